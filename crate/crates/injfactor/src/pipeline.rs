//! From three cycle types to an explicit factorization.
//!
//! [`synthesize`] builds `f`, `g`, `h = fg` of the requested types in stages.
//! [`extract_witnesses`] then conjugates the canonical representatives onto
//! them, producing permutations `a`, `b` with `h0 = a f0 a⁻¹ b g0 b⁻¹`.

use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{check_certificate, check_certificate_at, Violation};
use crate::canonical::canonical_map;
use crate::cardinal::{ext_sub_small, validate_theorem_inputs, CycleType, ExtNat, Omega};
use crate::carrier::Bijection;
use crate::conjugacy::conjugator;
use crate::constructions::{
    add_finite_cycles, add_forward_cycles, add_open_cycles, anchor_both_forward, anchor_f_forward_g_open,
    anchor_f_open_g_forward, plan_from_json, replay, FactorState, Step, Target,
};
use crate::element::Element;
use crate::error::Error;
use crate::injection::Injection;

const EXTRACT_CHECK: usize = 200;

/// Builds a certified triple `fg = h` with the given cycle types.
pub fn synthesize(tf: &CycleType, tg: &CycleType, th: &CycleType) -> Result<FactorState, Error> {
    validate_theorem_inputs(tf, tg, th)?;
    let k = th.open;
    // (f fwd, f open, g fwd, g open) of the anchor
    let (mut s, counts) = match (tf.fwd.is_zero(), tg.fwd.is_zero()) {
        (false, false) => (anchor_both_forward(k), (1, 0, 1, 0)),
        (false, true) => (anchor_f_forward_g_open(k), (1, 0, 0, 1)),
        (true, false) => (anchor_f_open_g_forward(k), (0, 1, 1, 0)),
        (true, true) => return Err(Error::UnsupportedDrosteCase),
    };
    let (f_fwd, f_open, g_fwd, g_open) = counts;
    s = add_finite_cycles(&s, Target::H, &th.finite)?;
    let more = ext_sub_small(tf.fwd, f_fwd)?;
    if !more.is_zero() {
        s = add_forward_cycles(&s, Target::F, more)?;
    }
    let more = ext_sub_small(tg.fwd, g_fwd)?;
    if !more.is_zero() {
        s = add_forward_cycles(&s, Target::G, more)?;
    }
    s = add_finite_cycles(&s, Target::F, &tf.finite)?;
    let more = ext_sub_small(tf.open, f_open)?;
    if !more.is_zero() {
        s = add_open_cycles(&s, Target::F, more)?;
    }
    s = add_finite_cycles(&s, Target::G, &tg.finite)?;
    let more = ext_sub_small(tg.open, g_open)?;
    if !more.is_zero() {
        s = add_open_cycles(&s, Target::G, more)?;
    }
    Ok(s)
}

/// Which conjugators make up `a` and `b`, in application order.
///
/// `c` carries `f0` onto `f`, `d` carries `g0` onto `g`, and `e` carries `h`
/// onto `h0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Recipe {
    pub a: Vec<String>,
    pub b: Vec<String>,
}

impl Default for Recipe {
    fn default() -> Self {
        Recipe { a: vec!["e".into(), "c".into()], b: vec!["e".into(), "d".into()] }
    }
}

#[derive(Clone, Debug)]
pub struct FactorizationWitness {
    pub types: [CycleType; 3],
    pub f0: Injection,
    pub g0: Injection,
    pub h0: Injection,
    pub a: Bijection,
    pub b: Bijection,
    pub state: FactorState,
    pub recipe: Recipe,
}

impl FactorizationWitness {
    /// `x a f0 a⁻¹ b g0 b⁻¹`.
    pub fn chain(&self, x: &Element) -> Element {
        let y = self.a.backward(&self.f0.eval(&self.a.forward(x)));
        self.b.backward(&self.g0.eval(&self.b.forward(&y)))
    }

    pub fn plan(&self) -> &[Step] {
        &self.state.history
    }

    /// The replayable bundle: types, plan, carrier and witness recipe.
    pub fn bundle(&self) -> Value {
        json!({
            "types": {"f": self.types[0].to_json(), "g": self.types[1].to_json(), "h": self.types[2].to_json()},
            "plan": self.state.plan(),
            "carrier": self.state.carrier().description(),
            "witness": self.recipe,
        })
    }

    /// Rebuilds a witness from [`FactorizationWitness::bundle`] output without
    /// verifying it.
    pub fn from_bundle(v: &Value) -> Result<Self, Error> {
        let field = |k: &str| v.get(k).ok_or_else(|| Error::Malformed(format!("bundle without {k:?}")));
        let types = field("types")?;
        let ty = |k: &str| {
            CycleType::from_json(types.get(k).ok_or_else(|| Error::Malformed(format!("bundle types without {k:?}")))?)
        };
        let (tf, tg, th) = (ty("f")?, ty("g")?, ty("h")?);
        validate_theorem_inputs(&tf, &tg, &th)?;
        let plan = plan_from_json(field("plan")?)?;
        let state = replay(&plan)?;
        if &state.carrier().description() != field("carrier")? {
            return Err(Error::Malformed("bundle carrier does not match its plan".into()));
        }
        let w = field("witness")?;
        let names = |k: &str| -> Result<Vec<String>, Error> {
            serde_json::from_value(w.get(k).cloned().unwrap_or(Value::Null))
                .map_err(|e| Error::Malformed(format!("witness recipe {k}: {e}")))
        };
        let recipe = Recipe { a: names("a")?, b: names("b")? };
        assemble(state, [tf, tg, th], recipe)
    }
}

fn assemble(state: FactorState, types: [CycleType; 3], recipe: Recipe) -> Result<FactorizationWitness, Error> {
    for (t, m) in types.iter().zip([&state.f, &state.g, &state.h]) {
        if Some(t) != m.census().as_ref() {
            return Err(Error::NotEquivalent);
        }
    }
    let f0 = canonical_map(&types[0])?;
    let g0 = canonical_map(&types[1])?;
    let h0 = canonical_map(&types[2])?;
    let c = conjugator(&f0, &state.f)?;
    let d = conjugator(&g0, &state.g)?;
    let e = conjugator(&state.h, &h0)?;
    let pick = |names: &[String]| -> Result<Bijection, Error> {
        let mut parts = names.iter().map(|n| match n.as_str() {
            "c" => Ok(c.clone()),
            "d" => Ok(d.clone()),
            "e" => Ok(e.clone()),
            _ => Err(Error::Malformed(format!("unknown conjugator {n:?}"))),
        });
        let first = parts.next().ok_or_else(|| Error::Malformed("empty witness recipe".into()))??;
        parts.try_fold(first, |acc, p| Ok(acc.then(&p?)))
    };
    let (a, b) = (pick(&recipe.a)?, pick(&recipe.b)?);
    Ok(FactorizationWitness { types, f0, g0, h0, a, b, state, recipe })
}

/// Permutations `a`, `b` with `h0 = a f0 a⁻¹ b g0 b⁻¹`, checked on a window.
pub fn extract_witnesses(
    state: FactorState,
    tf: &CycleType,
    tg: &CycleType,
    th: &CycleType,
) -> Result<FactorizationWitness, Error> {
    let w = assemble(state, [tf.clone(), tg.clone(), th.clone()], Recipe::default())?;
    for x in w.h0.carrier().window(EXTRACT_CHECK) {
        if w.chain(&x) != w.h0.eval(&x) {
            return Err(Error::VerificationFailed(x));
        }
    }
    Ok(w)
}

/// Writes a map with `fwd` forward cycles as a square.
pub fn ore_square(th: &CycleType) -> Result<FactorizationWitness, Error> {
    let half = match th.fwd {
        ExtNat::Finite(0) => return Err(Error::OreBijectiveCaseUnsupported),
        ExtNat::Finite(n) if n % 2 == 1 => return Err(Error::OddCoimage),
        ExtNat::Finite(n) => ExtNat::Finite(n / 2),
        Omega => Omega,
    };
    let tf = CycleType::new().with_fwd(half);
    let state = synthesize(&tf, &tf, th)?;
    extract_witnesses(state, &tf, &tf, th)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub element: Element,
    pub expected: Element,
    pub got: Element,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub window: usize,
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
    pub violations: Vec<(String, Violation)>,
    pub elapsed_ms: u128,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty() && self.violations.is_empty()
    }
}

/// Checks the witness identity on the first `n` elements of the canonical
/// carrier, and every certificate involved.
pub fn verify_witness(w: &FactorizationWitness, n: usize) -> VerifyReport {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let window = w.h0.carrier().window(n);
    for x in &window {
        let (expected, got) = (w.h0.eval(x), w.chain(x));
        if expected != got {
            mismatches.push(Mismatch { element: x.clone(), expected, got });
        }
    }
    let mut violations = Vec::new();
    if n > 0 {
        for (name, m) in [("f0", &w.f0), ("g0", &w.g0), ("h0", &w.h0)] {
            violations.extend(check_certificate(m, n).into_iter().map(|v| (name.to_string(), v)));
        }
        let points = w.state.probe_points(n);
        for (name, m) in [("f", &w.state.f), ("g", &w.state.g), ("h", &w.state.h)] {
            violations.extend(check_certificate_at(m, &points).into_iter().map(|v| (name.to_string(), v)));
        }
    }
    VerifyReport {
        window: n,
        checked: window.len(),
        mismatches,
        violations,
        elapsed_ms: start.elapsed().as_millis(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> CycleType {
        CycleType::new()
    }

    #[test]
    fn anchor_only_triple() {
        let s = synthesize(&t().with_fwd(1), &t().with_fwd(1), &t().with_fwd(2)).unwrap();
        assert_eq!(s.history.len(), 1);
        assert_eq!(s.h.eval(&Element::Atom(5)), Element::Atom(7));
    }

    #[test]
    fn droste_triple_is_rejected() {
        let o = |k| t().with_open(k);
        assert_eq!(synthesize(&o(1), &o(1), &o(2)).unwrap_err(), Error::UnsupportedDrosteCase);
    }

    #[test]
    fn mixed_triple_verifies() {
        let tf = t().with_fwd(1).with_finite(2, 1);
        let tg = t().with_fwd(1);
        let th = t().with_fwd(2).with_open(1).with_finite(3, Omega);
        let s = synthesize(&tf, &tg, &th).unwrap();
        let w = extract_witnesses(s, &tf, &tg, &th).unwrap();
        let r = verify_witness(&w, 300);
        assert!(r.ok(), "{:?}", r.mismatches.first());
        assert_eq!(r.checked, 300);
        assert_eq!(verify_witness(&w, 0).checked, 0);
    }

    #[test]
    fn corrupted_states_fail() {
        let (tf, th) = (t().with_fwd(1), t().with_fwd(2));
        let mut s = synthesize(&tf, &tf, &th).unwrap();
        s.h = s.f.clone();
        assert!(extract_witnesses(s, &tf, &tf, &th).is_err());

        let s = synthesize(&tf, &tf, &th.clone().with_open(1)).unwrap();
        let mut w = extract_witnesses(s, &tf, &tf, &th.clone().with_open(1)).unwrap();
        w.a = Bijection::identity(w.h0.carrier()).then(&w.b.inverse()).then(&w.b);
        assert!(!verify_witness(&w, 100).mismatches.is_empty());
    }

    #[test]
    fn bundles_round_trip_and_detect_swaps() {
        let tf = t().with_fwd(1).with_open(1);
        let tg = t().with_open(1);
        let th = t().with_fwd(1).with_open(2).with_finite(1, 2);
        let w = extract_witnesses(synthesize(&tf, &tg, &th).unwrap(), &tf, &tg, &th).unwrap();
        let v = w.bundle();
        let back = FactorizationWitness::from_bundle(&v).unwrap();
        assert!(verify_witness(&back, 200).ok());
        let mut swapped = v.clone();
        swapped["witness"] = json!({"a": ["e", "d"], "b": ["e", "c"]});
        let bad = FactorizationWitness::from_bundle(&swapped);
        assert!(bad.map_or(true, |b| !verify_witness(&b, 200).mismatches.is_empty()));
    }

    #[test]
    fn ore_squares() {
        for fwd in [ExtNat::Finite(2), ExtNat::Finite(4), Omega] {
            let th = t().with_fwd(fwd).with_open(1);
            let w = ore_square(&th).unwrap();
            assert!(verify_witness(&w, 200).ok());
        }
        assert_eq!(ore_square(&t().with_fwd(3)).unwrap_err(), Error::OddCoimage);
        assert_eq!(ore_square(&t().with_fwd(1).with_open(1)).unwrap_err(), Error::OddCoimage);
        assert_eq!(ore_square(&t().with_open(1)).unwrap_err(), Error::OreBijectiveCaseUnsupported);
    }
}
