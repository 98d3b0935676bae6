use proptest::prelude::*;

use injfactor::canonical::canonical_map;
use injfactor::cardinal::{ext_add, validate_theorem_inputs, Omega};
use injfactor::carrier::canonical_bijection;
use injfactor::conjugacy::conjugator;
use injfactor::constructions::{anchor_both_forward, anchor_f_forward_g_open, anchor_f_open_g_forward};
use injfactor::injection::conjugate;
use injfactor::pipeline::{extract_witnesses, synthesize, verify_witness};
use injfactor::{Carrier, CycleType, ExtNat};

fn count() -> impl Strategy<Value = ExtNat> {
    prop_oneof![4 => (0u64..3).prop_map(ExtNat::Finite), 1 => Just(Omega)]
}

fn cycle_type() -> impl Strategy<Value = CycleType> {
    types(count().boxed())
}

fn finite_type() -> impl Strategy<Value = CycleType> {
    types((0u64..3).prop_map(ExtNat::Finite).boxed())
}

fn types(count: BoxedStrategy<ExtNat>) -> impl Strategy<Value = CycleType> {
    (count.clone(), count.clone(), count.clone(), count).prop_map(|(fwd, open, two, three)| {
        CycleType::new().with_fwd(fwd).with_open(open).with_finite(2, two).with_finite(3, three)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn anchors_compose(k in count()) {
        for s in [anchor_both_forward(k), anchor_f_forward_g_open(k), anchor_f_open_g_forward(k)] {
            prop_assert!(s.product_mismatches(150).is_empty());
        }
    }

    #[test]
    fn conjugator_intertwines(t in cycle_type()) {
        prop_assume!(t.has_infinite_cycle());
        let f = canonical_map(&t).unwrap();
        let g = conjugate(&f, &canonical_bijection(&Carrier::nat(), f.carrier())).unwrap();
        let a = conjugator(&f, &g).unwrap();
        for x in g.carrier().window(120) {
            prop_assert_eq!(a.backward(&f.eval(&a.forward(&x))), g.eval(&x));
            prop_assert_eq!(a.backward(&a.forward(&x)), x);
        }
    }

    #[test]
    fn valid_types_factor(tf in finite_type(), tg in finite_type(), th in finite_type()) {
        let th = th.with_fwd(ext_add(tf.fwd, tg.fwd));
        prop_assume!(validate_theorem_inputs(&tf, &tg, &th).is_ok());
        let state = synthesize(&tf, &tg, &th).unwrap();
        let w = extract_witnesses(state, &tf, &tg, &th).unwrap();
        let r = verify_witness(&w, 120);
        prop_assert!(r.ok(), "{} mismatches, {} violations", r.mismatches.len(), r.violations.len());
    }
}
