//! The three starting triples.

use std::sync::Arc;

use super::certs::{closed_id, ClosedForm, SingleCycle};
use super::select::CycleIntersection;
use super::{FactorState, Step, TripleWitness};
use crate::cardinal::{CycleType, ExtNat, Omega};
use crate::carrier::Carrier;
use crate::element::Element;
use crate::injection::{conjugate, CycleClass, CycleId, Injection, Location};
use crate::piecewise::{Bound, Clause, Piecewise};

const ID: [[i64; 2]; 2] = [[1, 0], [0, 1]];
const FLIP: [[i64; 2]; 2] = [[1, 0], [0, -1]];

fn cl(i: Bound, j: Bound, m: [[i64; 2]; 2], off: [i64; 2]) -> Clause {
    Clause::new(vec![i, j], m.iter().map(|r| r.to_vec()).collect(), off.to_vec())
}

fn cl1(x: Bound, a: i64, b: i64) -> Clause {
    Clause::new(vec![x], vec![vec![a]], vec![b])
}

fn piecewise(c: &Carrier, clauses: Vec<Clause>) -> Injection {
    Piecewise::new(c.clone(), clauses).expect("anchor clauses are unimodular").into_injection()
}

fn single(m: Injection, start: Element, class: CycleClass) -> Injection {
    let cert = SingleCycle::new(m.core().clone(), closed_id(class, 0).0, start, class);
    m.with_certificate(Arc::new(cert))
}

fn fwd_id(k: u64) -> CycleId {
    closed_id(CycleClass::Forward, k)
}

fn loc(class: CycleClass, k: u64, position: i64) -> Location {
    Location { cycle: closed_id(class, k), class, position }
}

fn ordinal_of(id: &CycleId) -> i64 {
    match &id.0 {
        Element::Tag(_, k) => k.as_atom().unwrap(),
        _ => unreachable!(),
    }
}

fn is_open(id: &CycleId) -> bool {
    matches!(&id.0, Element::Tag(l, _) if l == "open")
}

fn state(f: Injection, g: Injection, h: Injection, cycle_h: CycleId, step: Step) -> FactorState {
    let any = f.carrier().nth(0).unwrap();
    let cycle_f = f.cert().unwrap().cycle_of(&any);
    let cycle_g = g.cert().unwrap().cycle_of(&any);
    witnessed(f, g, h, [cycle_f, cycle_g, cycle_h], step)
}

fn witnessed(f: Injection, g: Injection, h: Injection, ids: [CycleId; 3], step: Step) -> FactorState {
    let sigma = CycleIntersection::new(f.carrier().clone(), [f.clone(), g.clone(), h.clone()], ids.clone());
    let [cycle_f, cycle_g, cycle_h] = ids;
    let witness = TripleWitness { cycle_f, cycle_g, cycle_h, sigma: Arc::new(sigma) };
    FactorState { f, g, h, witness, history: vec![step] }.described()
}

/// `f` and `g` each one forward cycle; `h` two forward cycles and `K` open ones.
pub fn anchor_both_forward(k: ExtNat) -> FactorState {
    let step = Step::AnchorBothForward { k };
    if k.is_zero() {
        let c = Carrier::nat();
        let shift = || single(piecewise(&c, vec![cl1(Bound::ge(0), 1, 1)]), Element::Atom(0), CycleClass::Forward);
        let h = piecewise(&c, vec![cl1(Bound::ge(0), 1, 2)]).with_certificate(Arc::new(ClosedForm {
            census: CycleType::new().with_fwd(2),
            locate: Box::new(|x| {
                let v = x.as_atom().unwrap();
                loc(CycleClass::Forward, (v % 2) as u64, v / 2)
            }),
            element_at: Box::new(|id, p| Element::Atom(2 * p + ordinal_of(id))),
        }));
        return state(shift(), shift(), h, fwd_id(0), step);
    }
    let (rows, inner) = match k {
        ExtNat::Finite(k) => (Carrier::range(0, k as i64), Bound::between(1, k as i64 - 1)),
        Omega => (Carrier::nat(), Bound::ge(1)),
    };
    let c = Carrier::product_z(&rows);
    let any = Bound::any();
    let mut fc = vec![
        cl(Bound::eq(0), Bound::ge(1), FLIP, [0, 0]),
        cl(Bound::eq(0), Bound::le(0), ID, [1, 0]),
        cl(Bound::eq(1), Bound::ge(0), ID, [-1, 1]),
        cl(Bound::ge(2), Bound::ge(0), ID, [-1, 2]),
        cl(Bound::ge(1), Bound::eq(-1), ID, [0, 2]),
        cl(inner, Bound::le(-2), ID, [1, 2]),
    ];
    let mut gc = vec![
        cl(Bound::eq(0), Bound::ge(1), ID, [1, 0]),
        cl(Bound::eq(0), Bound::le(0), FLIP, [0, 1]),
        cl(Bound::ge(1), Bound::eq(1), ID, [0, -1]),
        cl(Bound::ge(1), Bound::le(0), ID, [-1, -1]),
        cl(inner, Bound::ge(2), ID, [1, -1]),
    ];
    if let ExtNat::Finite(k) = k {
        fc.push(cl(Bound::eq(k as i64), Bound::le(-2), FLIP, [0, 0]));
        gc.push(cl(Bound::eq(k as i64), Bound::ge(2), FLIP, [0, 1]));
    }
    let hc = vec![
        cl(Bound::eq(0), Bound::ge(1), ID, [0, 1]),
        cl(Bound::eq(0), Bound::le(0), ID, [0, -1]),
        cl(Bound::ge(1), any, ID, [0, 1]),
    ];
    let origin = Element::cell(0, 0);
    let f = single(piecewise(&c, fc), origin.clone(), CycleClass::Forward);
    let g = single(piecewise(&c, gc), origin, CycleClass::Forward);
    let h = piecewise(&c, hc).with_certificate(Arc::new(ClosedForm {
        census: CycleType::new().with_fwd(2).with_open(k),
        locate: Box::new(|x| match x.as_cell().unwrap() {
            (0, j) if j <= 0 => loc(CycleClass::Forward, 0, -j),
            (0, j) => loc(CycleClass::Forward, 1, j - 1),
            (i, j) => loc(CycleClass::Open, i as u64 - 1, j),
        }),
        element_at: Box::new(|id, p| match (is_open(id), ordinal_of(id)) {
            (true, k) => Element::cell(k + 1, p),
            (false, 0) => Element::cell(0, -p),
            (false, _) => Element::cell(0, p + 1),
        }),
    }));
    state(f, g, h, fwd_id(1), step)
}

/// `f` one forward cycle, `g` one open cycle, `h` one forward cycle and `K`
/// open ones.
pub fn anchor_f_forward_g_open(k: ExtNat) -> FactorState {
    let step = Step::AnchorFForwardGOpen { k };
    let any = Bound::any();
    match k {
        ExtNat::Finite(0) => {
            let c = Carrier::int();
            let f = piecewise(&c, vec![cl1(Bound::ge(1), -1, 0), cl1(Bound::le(0), -1, 1)]);
            let g = piecewise(&c, vec![cl1(any, 1, 1)]);
            let h = piecewise(&c, vec![cl1(Bound::ge(1), -1, 1), cl1(Bound::le(0), -1, 2)]);
            let f = single(f, Element::Atom(0), CycleClass::Forward);
            let g = single(g, Element::Atom(0), CycleClass::Open);
            let h = single(h, Element::Atom(1), CycleClass::Forward);
            state(f, g, h, fwd_id(0), step)
        }
        ExtNat::Finite(1) => {
            let c = Carrier::product_z(&Carrier::range(0, 1));
            let f = piecewise(
                &c,
                vec![
                    cl(Bound::eq(1), any, ID, [-1, 1]),
                    cl(Bound::eq(0), Bound::le(0), FLIP, [1, 0]),
                    cl(Bound::eq(0), Bound::ge(1), FLIP, [1, -1]),
                ],
            );
            let g = piecewise(&c, vec![cl(Bound::eq(1), any, ID, [-1, 1]), cl(Bound::eq(0), any, ID, [1, 0])]);
            let h = piecewise(
                &c,
                vec![
                    cl(Bound::eq(1), any, ID, [0, 1]),
                    cl(Bound::eq(0), Bound::le(0), FLIP, [0, 1]),
                    cl(Bound::eq(0), Bound::ge(1), FLIP, [0, 0]),
                ],
            );
            let f = single(f, Element::cell(1, -1), CycleClass::Forward);
            let g = single(g, Element::cell(0, 0), CycleClass::Open);
            let h = h.with_certificate(Arc::new(ClosedForm {
                census: CycleType::new().with_fwd(1).with_open(1),
                locate: Box::new(|x| match x.as_cell().unwrap() {
                    (1, j) => loc(CycleClass::Open, 0, j),
                    (_, j) if j > 0 => loc(CycleClass::Forward, 0, 2 * j - 1),
                    (_, j) => loc(CycleClass::Forward, 0, -2 * j),
                }),
                element_at: Box::new(|id, p| match (is_open(id), p) {
                    (true, p) => Element::cell(1, p),
                    (false, p) if p % 2 == 1 => Element::cell(0, (p + 1) / 2),
                    (false, p) => Element::cell(0, -p / 2),
                }),
            }));
            state(f, g, h, fwd_id(0), step)
        }
        _ => {
            let (rows, inner) = match k {
                ExtNat::Finite(k) => (Carrier::range(0, k as i64 - 1), Bound::between(1, k as i64 - 2)),
                Omega => (Carrier::nat(), Bound::ge(1)),
            };
            let column = Carrier::product(&Carrier::range(-1, -1), &Carrier::positive());
            let c = Carrier::sum(vec![Carrier::product_z(&rows), column]);
            let mut fc = vec![
                cl(Bound::eq(-1), Bound::ge(2).even(), FLIP, [1, 1]),
                cl(Bound::eq(-1), Bound::ge(1).odd(), FLIP, [1, -1]),
                cl(Bound::eq(0), Bound::ge(2).even(), ID, [-1, -1]),
                cl(Bound::eq(0), Bound::ge(1).odd(), ID, [-1, 1]),
                cl(Bound::eq(0), Bound::le(0), ID, [1, 0]),
                cl(Bound::eq(1), Bound::ge(0), ID, [-1, 1]),
                cl(Bound::ge(2), Bound::ge(0), ID, [-1, 2]),
                cl(Bound::ge(1), Bound::eq(-1), ID, [0, 2]),
                cl(inner, Bound::le(-2), ID, [1, 2]),
            ];
            let mut gc = vec![
                cl(Bound::eq(-1), Bound::ge(2).even(), ID, [1, -2]),
                cl(Bound::eq(-1), Bound::ge(1).odd(), ID, [1, 0]),
                cl(Bound::eq(0), Bound::ge(1), ID, [1, 0]),
                cl(Bound::eq(0), Bound::eq(0), ID, [-1, 1]),
                cl(Bound::eq(0), Bound::le(-2).even(), FLIP, [-1, 0]),
                cl(Bound::eq(0), Bound::le(-1).odd(), FLIP, [-1, 2]),
                cl(Bound::ge(1), Bound::eq(1), ID, [0, -1]),
                cl(Bound::ge(1), Bound::le(0), ID, [-1, -1]),
                cl(inner, Bound::ge(2), ID, [1, -1]),
            ];
            if let ExtNat::Finite(k) = k {
                let last = k as i64 - 1;
                fc.push(cl(Bound::eq(last), Bound::le(-2), FLIP, [0, 0]));
                gc.push(cl(Bound::eq(last), Bound::ge(2), FLIP, [0, 1]));
            }
            let hc = vec![
                cl(Bound::eq(-1), Bound::ge(1), ID, [0, 1]),
                cl(Bound::eq(0), any, ID, [0, -1]),
                cl(Bound::ge(1), any, ID, [0, 1]),
            ];
            let origin = Element::cell(0, 0);
            let f = single(piecewise(&c, fc), origin.clone(), CycleClass::Forward);
            let g = single(piecewise(&c, gc), origin, CycleClass::Open);
            let h = piecewise(&c, hc).with_certificate(Arc::new(ClosedForm {
                census: CycleType::new().with_fwd(1).with_open(k),
                locate: Box::new(|x| match x.as_cell().unwrap() {
                    (-1, j) => loc(CycleClass::Forward, 0, j - 1),
                    (0, j) => loc(CycleClass::Open, 0, -j),
                    (i, j) => loc(CycleClass::Open, i as u64, j),
                }),
                element_at: Box::new(|id, p| match (is_open(id), ordinal_of(id)) {
                    (false, _) => Element::cell(-1, p + 1),
                    (true, 0) => Element::cell(0, -p),
                    (true, i) => Element::cell(i, p),
                }),
            }));
            state(f, g, h, fwd_id(0), step)
        }
    }
}

/// The previous anchor with the roles of `f` and `g` swapped and `h`
/// conjugated to keep `fg = h`.
pub fn anchor_f_open_g_forward(k: ExtNat) -> FactorState {
    let b = anchor_f_forward_g_open(k);
    let f = b.g.clone();
    let g = b.f.clone();
    let h = conjugate(&b.h, &b.g.as_bijection()).expect("same carrier");
    let ids = [b.witness.cycle_g.clone(), b.witness.cycle_f.clone(), b.witness.cycle_h.clone()];
    witnessed(f, g, h, ids, Step::AnchorFOpenGForward { k })
}
