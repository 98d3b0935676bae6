//! Adding open or forward cycles to `f` or `g`.
//!
//! `K` copies of a line `θ_i` (`i ∈ ℤ` for open cycles, `i ≥ 1` for forward
//! ones) are adjoined. One map walks each line as a new cycle; the other two
//! thread it into their witness cycles next to the chosen elements `α_i`.

use std::sync::Arc;

use super::certs::{NewCycles, NoNewCycles, SurgeryCert};
use super::select::{select_conflict_free, Layout, SelectionPlan};
use super::{FactorState, Step, Target, TripleWitness};
use crate::cardinal::{ExtNat, Omega};
use crate::carrier::Carrier;
use crate::element::Element;
use crate::error::Error;
use crate::injection::{CycleClass, CycleId, Injection, MapCore};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Open,
    Fwd,
}

struct Stage {
    kind: Kind,
    target: Target,
    label: String,
    k: ExtNat,
    plan: SelectionPlan,
    old: [Injection; 3],
}

impl Stage {
    fn th(&self, c: u64, i: i64) -> Element {
        Element::tag(&self.label, Element::cell(c as i64, i))
    }

    fn parse(&self, x: &Element) -> Option<(u64, i64)> {
        x.untag(&self.label).and_then(Element::as_cell).map(|(c, i)| (c as u64, i))
    }

    fn alpha(&self, c: u64, i: i64) -> Element {
        self.plan.element_for(c, i as u64)
    }

    fn slot(&self, x: &Element) -> Option<(u64, i64)> {
        self.plan.slot_of(x).map(|(c, i)| (c, i as i64))
    }

    fn ev(&self, m: usize, x: &Element) -> Element {
        self.old[m].eval(x)
    }

    fn pre(&self, m: usize, y: &Element) -> Option<Element> {
        self.old[m].pre(y)
    }

    fn apply(&self, m: usize, x: &Element) -> Element {
        use Kind::*;
        use Target::*;
        let th = |c, i| self.th(c, i);
        let line = matches!((self.target, m), (F, 0) | (G, 1));
        if let Some((c, i)) = self.parse(x) {
            if line {
                return th(c, i + 1);
            }
            return match (self.kind, self.target, m) {
                (Open, F, 1) if i >= 1 => self.alpha(c, i),
                (Open, F, 1) => th(c, 1 - i),
                (Open, F, _) if i >= 0 => self.alpha(c, i + 1),
                (Open, F, _) => th(c, -i),
                (Open, G, 0) if i >= 1 => self.ev(0, &self.alpha(c, i)),
                (Open, G, 0) => th(c, 1 - i),
                (Open, G, _) if i >= 1 => self.ev(2, &self.alpha(c, i)),
                (Open, G, _) => th(c, 2 - i),
                (Fwd, F, 1) if i % 2 == 1 => th(c, i + 1),
                (Fwd, F, 1) => self.alpha(c, i / 2),
                (Fwd, F, _) if i % 2 == 1 => self.alpha(c, (i + 1) / 2),
                (Fwd, F, _) => th(c, i + 2),
                (Fwd, G, 0) if i % 2 == 1 => th(c, i + 1),
                (Fwd, G, 0) => self.ev(0, &self.alpha(c, i / 2)),
                (Fwd, G, _) if i % 2 == 1 => th(c, i + 2),
                (Fwd, G, _) => self.ev(2, &self.alpha(c, i / 2)),
                _ => unreachable!(),
            };
        }
        if line {
            return self.ev(m, x);
        }
        match self.target {
            F => {
                let y = self.ev(m, x);
                match (self.kind, self.slot(&y)) {
                    (Open, Some((c, i))) => th(c, 1 - i),
                    (Fwd, Some((c, i))) => th(c, 2 * i - 1),
                    (_, None) => y,
                }
            }
            G => match (self.kind, m, self.slot(x)) {
                (Open, 0, Some((c, i))) => th(c, 1 - i),
                (Open, _, Some((c, i))) => th(c, 2 - i),
                (Fwd, 0, Some((c, i))) => th(c, 2 * i - 1),
                (Fwd, _, Some((c, i))) => th(c, 2 * i),
                (_, _, None) => self.ev(m, x),
            },
            H => unreachable!(),
        }
    }

    fn preimage(&self, m: usize, y: &Element) -> Option<Element> {
        use Kind::*;
        use Target::*;
        let th = |c, i| Some(self.th(c, i));
        let line = matches!((self.target, m), (F, 0) | (G, 1));
        if let Some((c, k)) = self.parse(y) {
            if line {
                return match self.kind {
                    Fwd if k == 1 => None,
                    _ => th(c, k - 1),
                };
            }
            return match (self.kind, self.target, m) {
                (Open, F, 1) if k >= 1 => th(c, 1 - k),
                (Open, F, 1) => self.pre(1, &self.alpha(c, 1 - k)),
                (Open, F, _) if k >= 1 => th(c, -k),
                (Open, F, _) => self.pre(2, &self.alpha(c, 1 - k)),
                (Open, G, 0) if k >= 1 => th(c, 1 - k),
                (Open, G, 0) => Some(self.alpha(c, 1 - k)),
                (Open, G, _) if k >= 2 => th(c, 2 - k),
                (Open, G, _) => Some(self.alpha(c, 2 - k)),
                (Fwd, F, 1) if k % 2 == 1 => self.pre(1, &self.alpha(c, (k + 1) / 2)),
                (Fwd, F, 1) => th(c, k - 1),
                (Fwd, F, _) if k % 2 == 1 => self.pre(2, &self.alpha(c, (k + 1) / 2)),
                (Fwd, F, _) if k == 2 => None,
                (Fwd, F, _) => th(c, k - 2),
                (Fwd, G, 0) if k % 2 == 1 => Some(self.alpha(c, (k + 1) / 2)),
                (Fwd, G, 0) => th(c, k - 1),
                (Fwd, G, _) if k % 2 == 0 => Some(self.alpha(c, k / 2)),
                (Fwd, G, _) if k == 1 => None,
                (Fwd, G, _) => th(c, k - 2),
                _ => unreachable!(),
            };
        }
        if line {
            return self.pre(m, y);
        }
        match self.target {
            F => match (self.kind, m, self.slot(y)) {
                (Open, 1, Some((c, i))) => th(c, i),
                (Open, _, Some((c, i))) => th(c, i - 1),
                (Fwd, 1, Some((c, i))) => th(c, 2 * i),
                (Fwd, _, Some((c, i))) => th(c, 2 * i - 1),
                (_, _, None) => self.pre(m, y),
            },
            G => {
                let x = self.pre(m, y)?;
                match (self.kind, self.slot(&x)) {
                    (Open, Some((c, i))) => th(c, i),
                    (Fwd, Some((c, i))) => th(c, 2 * i),
                    (_, None) => Some(x),
                }
            }
            H => unreachable!(),
        }
    }
}

struct LineMap {
    st: Arc<Stage>,
    m: usize,
}

impl MapCore for LineMap {
    fn apply(&self, x: &Element) -> Element {
        self.st.apply(self.m, x)
    }

    fn preimage(&self, y: &Element) -> Option<Element> {
        self.st.preimage(self.m, y)
    }
}

/// Which adjoined elements form new cycles of one map.
#[derive(Clone, Copy)]
enum Part {
    All,
    Even,
    Odd,
}

struct Lines {
    st: Arc<Stage>,
    class: CycleClass,
    part: Part,
}

impl Lines {
    fn id(&self, c: u64) -> CycleId {
        CycleId(Element::tag(&self.st.label, Element::Atom(c as i64)))
    }

    fn copy(&self, id: &CycleId) -> u64 {
        id.0.untag(&self.st.label).and_then(Element::as_atom).unwrap() as u64
    }
}

impl NewCycles for Lines {
    fn count(&self, class: CycleClass) -> ExtNat {
        if class == self.class {
            self.st.k
        } else {
            ExtNat::ZERO
        }
    }

    fn is_new(&self, id: &CycleId) -> bool {
        id.0.untag(&self.st.label).is_some()
    }

    fn class(&self, _: &CycleId) -> CycleClass {
        self.class
    }

    fn ordinal(&self, id: &CycleId) -> u64 {
        self.copy(id)
    }

    fn id_at(&self, _: CycleClass, j: u64) -> CycleId {
        self.id(j)
    }

    fn theta_cycle(&self, x: &Element) -> Option<CycleId> {
        let (c, i) = self.st.parse(x)?;
        let mine = match self.part {
            Part::All => true,
            Part::Even => i % 2 == 0,
            Part::Odd => i % 2 == 1,
        };
        mine.then(|| self.id(c))
    }

    fn position(&self, x: &Element) -> i64 {
        let (_, i) = self.st.parse(x).unwrap();
        match (self.class, self.part) {
            (CycleClass::Open, _) => i,
            (_, Part::All) => i - 1,
            (_, Part::Even) => i / 2 - 1,
            (_, Part::Odd) => (i - 1) / 2,
        }
    }

    fn element_at(&self, id: &CycleId, p: i64) -> Element {
        let c = self.copy(id);
        let i = match (self.class, self.part) {
            (CycleClass::Open, _) => p,
            (_, Part::All) => p + 1,
            (_, Part::Even) => 2 * p + 2,
            (_, Part::Odd) => 2 * p + 1,
        };
        self.st.th(c, i)
    }
}

fn surgery(state: &FactorState, kind: Kind, target: Target, k: ExtNat) -> Result<FactorState, Error> {
    if k.is_zero() {
        return Err(Error::InvalidK("K must be at least 1; skip the stage instead".into()));
    }
    if target == Target::H {
        return Err(Error::InvalidK("only f or g can receive infinite cycles".into()));
    }
    let label = state.next_label();
    let plan = select_conflict_free(state, Layout::Lines(k));
    let copies = match k {
        ExtNat::Finite(k) => Carrier::range(0, k as i64 - 1),
        Omega => Carrier::nat(),
    };
    let index = match kind {
        Kind::Open => Carrier::product_z(&copies),
        Kind::Fwd => Carrier::product(&copies, &Carrier::positive()),
    };
    let carrier = Carrier::adjoin_tagged(state.carrier(), &label, &index)?;
    let st = Arc::new(Stage { kind, target, label: label.clone(), k, plan: plan.clone(), old: state.maps() });
    let line_map = match target {
        Target::F => 0,
        _ => 1,
    };
    let class = match kind {
        Kind::Open => CycleClass::Open,
        Kind::Fwd => CycleClass::Forward,
    };
    let w = &state.witness;
    let wid = [&w.cycle_f, &w.cycle_g, &w.cycle_h];
    let maps: Vec<Injection> = (0..3)
        .map(|m| {
            let core: Arc<dyn MapCore> = Arc::new(LineMap { st: st.clone(), m });
            let (new, rewired): (Arc<dyn NewCycles>, _) = if m == line_map {
                (Arc::new(Lines { st: st.clone(), class, part: Part::All }), None)
            } else if m == 2 && kind == Kind::Fwd {
                let part = if target == Target::F { Part::Even } else { Part::Odd };
                (Arc::new(Lines { st: st.clone(), class, part }), Some(wid[m].clone()))
            } else {
                (Arc::new(NoNewCycles), Some(wid[m].clone()))
            };
            let old = state.maps()[m].cert().unwrap().clone();
            let cert = SurgeryCert::build(old, core.clone(), &label, rewired, new, &[class]);
            Injection::new(carrier.clone(), core, serde_json::Value::Null).with_certificate(Arc::new(cert))
        })
        .collect();
    let mut history = state.history.clone();
    history.push(match kind {
        Kind::Open => Step::AddOpenCycles { target, k, label },
        Kind::Fwd => Step::AddForwardCycles { target, k, label },
    });
    let [f, g, h]: [Injection; 3] = maps.try_into().unwrap();
    let witness = TripleWitness { sigma: plan.reserved(), ..w.clone() };
    Ok(FactorState { f, g, h, witness, history }.described())
}

/// Adds `K` open cycles to `f` or `g`.
pub fn add_open_cycles(state: &FactorState, target: Target, k: ExtNat) -> Result<FactorState, Error> {
    surgery(state, Kind::Open, target, k)
}

/// Adds `K` forward cycles to `f` or `g`, and `K` to `h` with them.
pub fn add_forward_cycles(state: &FactorState, target: Target, k: ExtNat) -> Result<FactorState, Error> {
    surgery(state, Kind::Fwd, target, k)
}

#[cfg(test)]
mod tests {
    use super::super::anchors::anchor_both_forward;
    use super::super::testing::{assert_valid, censuses};
    use super::*;
    use crate::analysis::coimage_census;
    use crate::cardinal::ext_add;

    fn ks() -> [ExtNat; 3] {
        [ExtNat::Finite(1), ExtNat::Finite(3), Omega]
    }

    #[test]
    fn open_cycles_land_on_the_target_only() {
        let base = anchor_both_forward(ExtNat::Finite(1));
        let before = censuses(&base);
        for (target, t) in [(Target::F, 0), (Target::G, 1)] {
            for k in ks() {
                let s = add_open_cycles(&base, target, k).unwrap();
                assert_valid(&s, 500);
                let after = censuses(&s);
                for m in 0..3 {
                    let mut want = before[m].clone();
                    if m == t {
                        want.open = ext_add(want.open, k);
                    }
                    assert_eq!(after[m], want, "{target:?} K={k} map {m}");
                }
            }
        }
    }

    #[test]
    fn forward_cycles_land_on_target_and_h() {
        let base = anchor_both_forward(ExtNat::Finite(1));
        let before = censuses(&base);
        for (target, t) in [(Target::F, 0), (Target::G, 1)] {
            for k in ks() {
                let s = add_forward_cycles(&base, target, k).unwrap();
                assert_valid(&s, 500);
                let after = censuses(&s);
                for m in 0..3 {
                    let mut want = before[m].clone();
                    if m == t || m == 2 {
                        want.fwd = ext_add(want.fwd, k);
                    }
                    assert_eq!(after[m], want, "{target:?} K={k} map {m}");
                }
            }
        }
    }

    #[test]
    fn open_f_threads_the_line_through_g() {
        let base = anchor_both_forward(ExtNat::Finite(0));
        let s = add_open_cycles(&base, Target::F, ExtNat::Finite(1)).unwrap();
        let th = |i| Element::tag("t1", Element::cell(0, i));
        let alpha = s.g.eval(&th(1));
        let delta = base.g.pre(&alpha).unwrap();
        assert_eq!(s.g.eval(&delta), th(0));
        assert_eq!(s.g.eval(&th(0)), th(1));
    }

    #[test]
    fn forward_f_routes_h_through_odd_thetas() {
        let base = anchor_both_forward(ExtNat::Finite(0));
        let s = add_forward_cycles(&base, Target::F, ExtNat::Finite(2)).unwrap();
        for i in 1..5 {
            let th = Element::tag("t1", Element::cell(1, 2 * i - 1));
            let alpha = s.h.eval(&th);
            let zeta = base.h.pre(&alpha).unwrap();
            assert_eq!(s.h.pre(&th), Some(zeta));
        }
        for c in 0..2 {
            assert_eq!(s.h.pre(&Element::tag("t1", Element::cell(c, 2))), None);
        }
        let old: Vec<Element> = base.carrier().window(400);
        let heads = |m: &Injection| old.iter().filter(|x| m.pre(x).is_none()).count();
        assert_eq!(heads(&s.h), heads(&base.h));
        assert!(coimage_census(&s.h, 400) >= 1);
    }

    #[test]
    fn zero_and_h_targets_are_rejected() {
        let base = anchor_both_forward(ExtNat::Finite(0));
        assert!(matches!(add_open_cycles(&base, Target::F, ExtNat::ZERO), Err(Error::InvalidK(_))));
        assert!(matches!(add_forward_cycles(&base, Target::H, ExtNat::Finite(1)), Err(Error::InvalidK(_))));
    }
}
