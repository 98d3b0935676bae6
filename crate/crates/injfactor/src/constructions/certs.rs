//! Certificate building blocks shared by the anchors and the surgeries.

use std::sync::Arc;

use crate::cardinal::{ext_add, CycleType, ExtNat, Omega};
use crate::element::Element;
use crate::injection::{Certificate, CycleClass, CycleId, Location, MapCore};
use crate::walk::Walker;

/// Splits index `k` of a class holding `a` old cycles followed by `b` new ones.
/// Returns `(is_new, index within its part)`.
pub(crate) fn sum_split(a: ExtNat, b: ExtNat, k: u64) -> (bool, u64) {
    match (a, b) {
        (ExtNat::Finite(a), _) => {
            if k < a {
                (false, k)
            } else {
                (true, k - a)
            }
        }
        (Omega, ExtNat::Finite(b)) => {
            if k < b {
                (true, k)
            } else {
                (false, k - b)
            }
        }
        (Omega, Omega) => (k % 2 == 1, k / 2),
    }
}

/// Inverse of [`sum_split`].
pub(crate) fn sum_join(a: ExtNat, b: ExtNat, is_new: bool, j: u64) -> u64 {
    match (a, b, is_new) {
        (ExtNat::Finite(_), _, false) => j,
        (ExtNat::Finite(a), _, true) => a + j,
        (Omega, ExtNat::Finite(_), true) => j,
        (Omega, ExtNat::Finite(b), false) => b + j,
        (Omega, Omega, new) => 2 * j + new as u64,
    }
}

pub(crate) fn class_count(t: &CycleType, class: CycleClass) -> ExtNat {
    match class {
        CycleClass::Finite(n) => t.count_finite(n),
        CycleClass::Forward => t.fwd,
        CycleClass::Open => t.open,
    }
}

pub(crate) fn add_class(t: &CycleType, class: CycleClass, k: ExtNat) -> CycleType {
    let mut t = t.clone();
    match class {
        CycleClass::Finite(n) => {
            let c = ext_add(t.count_finite(n), k);
            t.finite.insert(n, c);
        }
        CycleClass::Forward => t.fwd = ext_add(t.fwd, k),
        CycleClass::Open => t.open = ext_add(t.open, k),
    }
    t
}

/// A map that is one infinite cycle.
pub(crate) struct SingleCycle {
    id: CycleId,
    class: CycleClass,
    walker: Walker,
}

impl SingleCycle {
    pub(crate) fn new(core: Arc<dyn MapCore>, id: Element, start: Element, class: CycleClass) -> Self {
        let walker = Walker::new(core, start, class == CycleClass::Open);
        SingleCycle { id: CycleId(id), class, walker }
    }
}

impl Certificate for SingleCycle {
    fn census(&self) -> CycleType {
        match self.class {
            CycleClass::Open => CycleType::new().with_open(1),
            _ => CycleType::new().with_fwd(1),
        }
    }

    fn cycle_of(&self, _: &Element) -> CycleId {
        self.id.clone()
    }

    fn class_of(&self, _: &CycleId) -> CycleClass {
        self.class
    }

    fn locate(&self, x: &Element) -> Location {
        Location { cycle: self.id.clone(), class: self.class, position: self.walker.position(x) }
    }

    fn element_at(&self, _: &CycleId, p: i64) -> Element {
        self.walker.element(p)
    }

    fn ordinal(&self, _: &CycleId) -> u64 {
        0
    }

    fn cycle_at(&self, _: CycleClass, _: u64) -> CycleId {
        self.id.clone()
    }
}

type LocateFn = dyn Fn(&Element) -> Location + Send + Sync;
type ElementAtFn = dyn Fn(&CycleId, i64) -> Element + Send + Sync;

/// A certificate given by closed forms. Cycle ids are `Tag(kind, Atom(ordinal))`
/// with `kind` one of `fwd`, `open`.
pub(crate) struct ClosedForm {
    pub census: CycleType,
    pub locate: Box<LocateFn>,
    pub element_at: Box<ElementAtFn>,
}

pub(crate) fn closed_id(class: CycleClass, k: u64) -> CycleId {
    let label = match class {
        CycleClass::Open => "open",
        _ => "fwd",
    };
    CycleId(Element::tag(label, Element::Atom(k as i64)))
}

impl Certificate for ClosedForm {
    fn census(&self) -> CycleType {
        self.census.clone()
    }

    fn cycle_of(&self, x: &Element) -> CycleId {
        (self.locate)(x).cycle
    }

    fn class_of(&self, id: &CycleId) -> CycleClass {
        match &id.0 {
            Element::Tag(l, _) if l == "open" => CycleClass::Open,
            _ => CycleClass::Forward,
        }
    }

    fn locate(&self, x: &Element) -> Location {
        (self.locate)(x)
    }

    fn element_at(&self, id: &CycleId, p: i64) -> Element {
        (self.element_at)(id, p)
    }

    fn ordinal(&self, id: &CycleId) -> u64 {
        match &id.0 {
            Element::Tag(_, k) => k.as_atom().unwrap() as u64,
            _ => unreachable!(),
        }
    }

    fn cycle_at(&self, class: CycleClass, k: u64) -> CycleId {
        closed_id(class, k)
    }
}

/// The cycles a surgery creates out of adjoined elements.
pub(crate) trait NewCycles: Send + Sync {
    fn count(&self, class: CycleClass) -> ExtNat;
    fn is_new(&self, id: &CycleId) -> bool;
    fn class(&self, id: &CycleId) -> CycleClass;
    fn ordinal(&self, id: &CycleId) -> u64;
    fn id_at(&self, class: CycleClass, j: u64) -> CycleId;
    /// Cycle of an adjoined element, or `None` if it joined the rewired cycle.
    fn theta_cycle(&self, x: &Element) -> Option<CycleId>;
    fn position(&self, x: &Element) -> i64;
    fn element_at(&self, id: &CycleId, p: i64) -> Element;
}

pub(crate) struct NoNewCycles;

impl NewCycles for NoNewCycles {
    fn count(&self, _: CycleClass) -> ExtNat {
        ExtNat::ZERO
    }
    fn is_new(&self, _: &CycleId) -> bool {
        false
    }
    fn class(&self, _: &CycleId) -> CycleClass {
        unreachable!()
    }
    fn ordinal(&self, _: &CycleId) -> u64 {
        unreachable!()
    }
    fn id_at(&self, _: CycleClass, _: u64) -> CycleId {
        unreachable!()
    }
    fn theta_cycle(&self, _: &Element) -> Option<CycleId> {
        None
    }
    fn position(&self, _: &Element) -> i64 {
        unreachable!()
    }
    fn element_at(&self, _: &CycleId, _: i64) -> Element {
        unreachable!()
    }
}

/// Certificate of a map after a surgery: the old certificate everywhere except
/// on the rewired witness cycle, which is re-walked from its old anchor, and
/// on the newly created cycles.
pub(crate) struct SurgeryCert {
    pub old: Arc<dyn Certificate>,
    pub label: String,
    pub rewired: Option<(CycleId, CycleClass, Walker)>,
    pub new: Arc<dyn NewCycles>,
    pub census: CycleType,
}

impl SurgeryCert {
    pub(crate) fn build(
        old: Arc<dyn Certificate>,
        core: Arc<dyn MapCore>,
        label: &str,
        rewired: Option<CycleId>,
        new: Arc<dyn NewCycles>,
        new_classes: &[CycleClass],
    ) -> Self {
        let rewired = rewired.map(|id| {
            let class = old.class_of(&id);
            let walker = Walker::new(core, old.anchor(&id), class == CycleClass::Open);
            (id, class, walker)
        });
        let mut census = old.census();
        for c in new_classes {
            census = add_class(&census, *c, new.count(*c));
        }
        SurgeryCert { old, label: label.to_string(), rewired, new, census }
    }

    fn is_theta(&self, x: &Element) -> bool {
        x.untag(&self.label).is_some()
    }

    fn on_rewired(&self, id: &CycleId) -> Option<&(CycleId, CycleClass, Walker)> {
        self.rewired.as_ref().filter(|r| &r.0 == id)
    }

    fn rewired_id(&self) -> CycleId {
        self.rewired.as_ref().expect("adjoined element on a rewired cycle").0.clone()
    }
}

impl Certificate for SurgeryCert {
    fn census(&self) -> CycleType {
        self.census.clone()
    }

    fn cycle_of(&self, x: &Element) -> CycleId {
        if self.is_theta(x) {
            self.new.theta_cycle(x).unwrap_or_else(|| self.rewired_id())
        } else {
            self.old.cycle_of(x)
        }
    }

    fn class_of(&self, id: &CycleId) -> CycleClass {
        if self.new.is_new(id) {
            self.new.class(id)
        } else {
            self.old.class_of(id)
        }
    }

    fn locate(&self, x: &Element) -> Location {
        let id = self.cycle_of(x);
        if let Some((_, class, w)) = self.on_rewired(&id) {
            return Location { cycle: id, class: *class, position: w.position(x) };
        }
        if self.new.is_new(&id) {
            let class = self.new.class(&id);
            return Location { cycle: id, class, position: self.new.position(x) };
        }
        self.old.locate(x)
    }

    fn element_at(&self, id: &CycleId, p: i64) -> Element {
        if let Some((_, _, w)) = self.on_rewired(id) {
            w.element(p)
        } else if self.new.is_new(id) {
            self.new.element_at(id, p)
        } else {
            self.old.element_at(id, p)
        }
    }

    fn ordinal(&self, id: &CycleId) -> u64 {
        let class = self.class_of(id);
        let (a, b) = (class_count(&self.old.census(), class), self.new.count(class));
        if b.is_zero() {
            return self.old.ordinal(id);
        }
        if self.new.is_new(id) {
            sum_join(a, b, true, self.new.ordinal(id))
        } else {
            sum_join(a, b, false, self.old.ordinal(id))
        }
    }

    fn cycle_at(&self, class: CycleClass, k: u64) -> CycleId {
        let (a, b) = (class_count(&self.old.census(), class), self.new.count(class));
        if b.is_zero() {
            return self.old.cycle_at(class, k);
        }
        match sum_split(a, b, k) {
            (true, j) => self.new.id_at(class, j),
            (false, j) => self.old.cycle_at(class, j),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_index_round_trips() {
        let counts = [ExtNat::Finite(0), ExtNat::Finite(3), Omega];
        for a in counts {
            for b in counts {
                for k in 0..40 {
                    let (new, j) = sum_split(a, b, k);
                    let part = if new { b } else { a };
                    if ext_add(a, b).exceeds(k) {
                        assert!(part.exceeds(j), "{a} {b} {k}");
                        assert_eq!(sum_join(a, b, new, j), k);
                    }
                }
            }
        }
    }
}
