//! Injective endomaps with exact evaluation and preimage, and certified
//! cycle decompositions.

use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::cardinal::CycleType;
use crate::carrier::{Bijection, Carrier};
use crate::element::Element;
use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CycleClass {
    Finite(u64),
    Forward,
    Open,
}

impl fmt::Display for CycleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CycleClass::Finite(n) => write!(f, "finite({n})"),
            CycleClass::Forward => write!(f, "forward"),
            CycleClass::Open => write!(f, "open"),
        }
    }
}

impl Serialize for CycleClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Identifies one cycle of a certified map.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CycleId(pub Element);

impl fmt::Debug for CycleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl fmt::Display for CycleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Location {
    pub cycle: CycleId,
    pub class: CycleClass,
    pub position: i64,
}

/// An exact cycle decomposition carried alongside a map.
///
/// Positions advance by one along the map. Forward cycles start at position 0
/// on their initial element, finite cycles use `0..n`, and open cycles are
/// indexed by all integers from a fixed anchor. Within each class the cycles
/// are numbered `0, 1, 2, ...` by [`Certificate::ordinal`].
pub trait Certificate: Send + Sync {
    fn census(&self) -> CycleType;

    fn cycle_of(&self, x: &Element) -> CycleId;

    fn class_of(&self, id: &CycleId) -> CycleClass;

    fn locate(&self, x: &Element) -> Location;

    fn element_at(&self, id: &CycleId, position: i64) -> Element;

    fn ordinal(&self, id: &CycleId) -> u64;

    fn cycle_at(&self, class: CycleClass, ordinal: u64) -> CycleId;

    fn anchor(&self, id: &CycleId) -> Element {
        self.element_at(id, 0)
    }
}

pub trait MapCore: Send + Sync {
    fn apply(&self, x: &Element) -> Element;
    fn preimage(&self, y: &Element) -> Option<Element>;
}

struct FnCore<A, P>(A, P);

impl<A, P> MapCore for FnCore<A, P>
where
    A: Fn(&Element) -> Element + Send + Sync,
    P: Fn(&Element) -> Option<Element> + Send + Sync,
{
    fn apply(&self, x: &Element) -> Element {
        (self.0)(x)
    }

    fn preimage(&self, y: &Element) -> Option<Element> {
        (self.1)(y)
    }
}

#[derive(Clone)]
pub struct Injection {
    carrier: Carrier,
    core: Arc<dyn MapCore>,
    cert: Option<Arc<dyn Certificate>>,
    desc: Value,
}

impl Injection {
    pub fn new(carrier: Carrier, core: Arc<dyn MapCore>, desc: Value) -> Self {
        Injection { carrier, core, cert: None, desc }
    }

    pub fn from_fns(
        carrier: Carrier,
        apply: impl Fn(&Element) -> Element + Send + Sync + 'static,
        preimage: impl Fn(&Element) -> Option<Element> + Send + Sync + 'static,
        desc: Value,
    ) -> Self {
        Self::new(carrier, Arc::new(FnCore(apply, preimage)), desc)
    }

    pub fn identity(c: &Carrier) -> Self {
        Self::from_fns(c.clone(), Element::clone, |y| Some(y.clone()), json!({"kind": "finite_table", "base": c.description(), "table": []}))
    }

    pub fn with_certificate(mut self, cert: Arc<dyn Certificate>) -> Self {
        self.cert = Some(cert);
        self
    }

    pub fn with_description(mut self, desc: Value) -> Self {
        self.desc = desc;
        self
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn certificate(&self) -> Option<&Arc<dyn Certificate>> {
        self.cert.as_ref()
    }

    pub fn cert(&self) -> Result<&Arc<dyn Certificate>, Error> {
        self.cert.as_ref().ok_or(Error::Uncertified)
    }

    pub fn census(&self) -> Option<CycleType> {
        self.cert.as_ref().map(|c| c.census())
    }

    pub fn description(&self) -> &Value {
        &self.desc
    }

    /// `(x)f`, checking that `x` is in the carrier.
    pub fn apply(&self, x: &Element) -> Result<Element, Error> {
        if !self.carrier.contains(x) {
            return Err(Error::OutOfCarrier(x.clone()));
        }
        Ok(self.core.apply(x))
    }

    /// The unique `x` with `(x)f = y`, if any.
    pub fn preimage(&self, y: &Element) -> Result<Option<Element>, Error> {
        if !self.carrier.contains(y) {
            return Err(Error::OutOfCarrier(y.clone()));
        }
        Ok(self.core.preimage(y))
    }

    /// Unchecked evaluation for callers that already know `x` is a member.
    pub fn eval(&self, x: &Element) -> Element {
        self.core.apply(x)
    }

    /// Unchecked preimage.
    pub fn pre(&self, y: &Element) -> Option<Element> {
        self.core.preimage(y)
    }

    pub fn core(&self) -> &Arc<dyn MapCore> {
        &self.core
    }

    /// Views a map known to be surjective as a bijection of its carrier.
    pub fn as_bijection(&self) -> Bijection {
        let (f, p) = (self.core.clone(), self.core.clone());
        Bijection::new(
            self.carrier.clone(),
            self.carrier.clone(),
            move |x| f.apply(x),
            move |y| p.preimage(y).unwrap_or_else(|| panic!("{y} has no preimage")),
            json!({"kind": "permutation", "map": self.desc}),
        )
    }
}

impl fmt::Debug for Injection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Injection({})", self.desc)
    }
}

/// `fg`: apply `f`, then `g`. The product carries no certificate.
pub fn compose(f: &Injection, g: &Injection) -> Result<Injection, Error> {
    if !f.carrier.same_as(&g.carrier) {
        return Err(Error::CarrierMismatch);
    }
    let (fa, ga) = (f.core.clone(), g.core.clone());
    let (fp, gp) = (f.core.clone(), g.core.clone());
    Ok(Injection::from_fns(
        f.carrier.clone(),
        move |x| ga.apply(&fa.apply(x)),
        move |y| gp.preimage(y).and_then(|z| fp.preimage(&z)),
        json!({"kind": "compose", "parts": [f.desc, g.desc]}),
    ))
}

/// `a f a⁻¹` on `a.source()`: `x ↦ (((x)a)f)a⁻¹`. Certificates are transported.
pub fn conjugate(f: &Injection, a: &Bijection) -> Result<Injection, Error> {
    if !a.target().same_as(&f.carrier) {
        return Err(Error::CarrierMismatch);
    }
    let (fa, aa) = (f.core.clone(), a.clone());
    let (fp, ap) = (f.core.clone(), a.clone());
    let out = Injection::from_fns(
        a.source().clone(),
        move |x| aa.backward(&fa.apply(&aa.forward(x))),
        move |y| fp.preimage(&ap.forward(y)).map(|z| ap.backward(&z)),
        json!({"kind": "conjugate", "map": f.desc, "bijection": a.description()}),
    );
    Ok(match &f.cert {
        Some(c) => out.with_certificate(Arc::new(TransportCert { inner: c.clone(), a: a.clone() })),
        None => out,
    })
}

struct TransportCert {
    inner: Arc<dyn Certificate>,
    a: Bijection,
}

impl Certificate for TransportCert {
    fn census(&self) -> CycleType {
        self.inner.census()
    }

    fn cycle_of(&self, x: &Element) -> CycleId {
        self.inner.cycle_of(&self.a.forward(x))
    }

    fn class_of(&self, id: &CycleId) -> CycleClass {
        self.inner.class_of(id)
    }

    fn locate(&self, x: &Element) -> Location {
        self.inner.locate(&self.a.forward(x))
    }

    fn element_at(&self, id: &CycleId, position: i64) -> Element {
        self.a.backward(&self.inner.element_at(id, position))
    }

    fn ordinal(&self, id: &CycleId) -> u64 {
        self.inner.ordinal(id)
    }

    fn cycle_at(&self, class: CycleClass, ordinal: u64) -> CycleId {
        self.inner.cycle_at(class, ordinal)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carrier::canonical_bijection;

    pub(crate) fn shift_on_nat() -> Injection {
        Injection::from_fns(
            Carrier::nat(),
            |x| Element::Atom(x.as_atom().unwrap() + 1),
            |y| match y.as_atom().unwrap() {
                0 => None,
                k => Some(Element::Atom(k - 1)),
            },
            json!({"kind": "shift"}),
        )
    }

    #[test]
    fn shift_apply_and_preimage() {
        let s = shift_on_nat();
        assert_eq!(s.apply(&Element::Atom(0)).unwrap(), Element::Atom(1));
        assert_eq!(s.preimage(&Element::Atom(0)).unwrap(), None);
        assert_eq!(s.preimage(&Element::Atom(5)).unwrap(), Some(Element::Atom(4)));
        assert!(matches!(s.apply(&Element::Atom(-1)), Err(Error::OutOfCarrier(_))));
    }

    #[test]
    fn identity_is_neutral() {
        let id = Injection::identity(&Carrier::nat());
        let s = shift_on_nat();
        let p = compose(&s, &id).unwrap();
        for x in Carrier::nat().window(100) {
            assert_eq!(id.apply(&x).unwrap(), x);
            assert_eq!(id.preimage(&x).unwrap(), Some(x.clone()));
            assert_eq!(p.apply(&x).unwrap(), s.apply(&x).unwrap());
        }
    }

    #[test]
    fn double_shift() {
        let s = shift_on_nat();
        let ss = compose(&s, &s).unwrap();
        for k in 0..100 {
            assert_eq!(ss.eval(&Element::Atom(k)), Element::Atom(k + 2));
        }
        assert_eq!(ss.pre(&Element::Atom(1)), None);
        assert_eq!(ss.pre(&Element::Atom(2)), Some(Element::Atom(0)));
        assert!(matches!(compose(&s, &Injection::identity(&Carrier::int())), Err(Error::CarrierMismatch)));
    }

    #[test]
    fn transported_shift_matches_formula() {
        // moving the shift onto {1, 2, ...} through rank matching gives k ↦ k+1 again
        let nat = Carrier::nat();
        let pos = Carrier::positive();
        let a = canonical_bijection(&pos, &nat);
        let t = conjugate(&shift_on_nat(), &a).unwrap();
        for k in 1..=100 {
            assert_eq!(t.eval(&Element::Atom(k)), Element::Atom(k + 1));
        }
        assert_eq!(t.pre(&Element::Atom(1)), None);
        let back = conjugate(&t, &a.inverse()).unwrap();
        for x in nat.window(200) {
            assert_eq!(back.eval(&x), shift_on_nat().eval(&x));
        }
    }
}
