//! Counts in `{0, 1, 2, ...} ∪ {ω}` and cycle-type signatures.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtNat {
    Finite(u64),
    Omega,
}

pub use ExtNat::Omega;

impl ExtNat {
    pub const ZERO: ExtNat = ExtNat::Finite(0);

    pub fn is_zero(self) -> bool {
        self == Self::ZERO
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            ExtNat::Finite(n) => Some(n),
            Omega => None,
        }
    }

    /// Whether index `k` is below this count.
    pub fn exceeds(self, k: u64) -> bool {
        match self {
            ExtNat::Finite(n) => k < n,
            Omega => true,
        }
    }
}

impl Default for ExtNat {
    fn default() -> Self {
        ExtNat::ZERO
    }
}

impl From<u64> for ExtNat {
    fn from(n: u64) -> Self {
        ExtNat::Finite(n)
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Finite(n) => write!(f, "{n}"),
            Omega => write!(f, "omega"),
        }
    }
}

impl Serialize for ExtNat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtNat::Finite(n) => s.serialize_u64(*n),
            Omega => s.serialize_str("omega"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtNat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::String(s) if s == "omega" || s == "ω" => Ok(Omega),
            Value::Number(n) if n.is_u64() => Ok(ExtNat::Finite(n.as_u64().unwrap())),
            v => Err(serde::de::Error::custom(format!("expected a count or \"omega\", got {v}"))),
        }
    }
}

pub fn ext_add(a: ExtNat, b: ExtNat) -> ExtNat {
    match (a, b) {
        (ExtNat::Finite(x), ExtNat::Finite(y)) => ExtNat::Finite(x + y),
        _ => Omega,
    }
}

/// `target - current` for the small anchor counts.
pub fn ext_sub_small(target: ExtNat, current: u64) -> Result<ExtNat, Error> {
    match target {
        Omega => Ok(Omega),
        ExtNat::Finite(t) => t.checked_sub(current).map(ExtNat::Finite).ok_or(Error::Underflow),
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleType {
    #[serde(default, serialize_with = "ser_finite")]
    pub finite: BTreeMap<u64, ExtNat>,
    #[serde(default = "zero")]
    pub open: ExtNat,
    #[serde(default = "zero")]
    pub fwd: ExtNat,
}

fn zero() -> ExtNat {
    ExtNat::ZERO
}

fn ser_finite<S: Serializer>(m: &BTreeMap<u64, ExtNat>, s: S) -> Result<S::Ok, S::Error> {
    let nonzero: BTreeMap<String, ExtNat> =
        m.iter().filter(|(_, v)| !v.is_zero()).map(|(k, v)| (k.to_string(), *v)).collect();
    nonzero.serialize(s)
}

impl CycleType {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_fwd(mut self, k: impl Into<ExtNat>) -> Self {
        self.fwd = k.into();
        self
    }

    pub fn with_open(mut self, k: impl Into<ExtNat>) -> Self {
        self.open = k.into();
        self
    }

    pub fn with_finite(mut self, n: u64, k: impl Into<ExtNat>) -> Self {
        self.finite.insert(n, k.into());
        self
    }

    pub fn count_finite(&self, n: u64) -> ExtNat {
        self.finite.get(&n).copied().unwrap_or(ExtNat::ZERO)
    }

    /// Lengths `n` with a nonzero count, ascending.
    pub fn finite_support(&self) -> impl Iterator<Item = (u64, ExtNat)> + '_ {
        self.finite.iter().filter(|(_, k)| !k.is_zero()).map(|(n, k)| (*n, *k))
    }

    pub fn has_infinite_cycle(&self) -> bool {
        !ext_add(self.open, self.fwd).is_zero()
    }

    /// Whether a map of this type lives on a countably infinite set.
    pub fn is_countably_infinite(&self) -> bool {
        self.has_infinite_cycle() || self.finite_support().any(|(_, k)| k == Omega)
    }

    pub fn from_json(v: &Value) -> Result<Self, Error> {
        let t: CycleType =
            serde_json::from_value(v.clone()).map_err(|e| Error::Malformed(format!("cycle type: {e}")))?;
        if t.finite.keys().any(|&n| n == 0) {
            return Err(Error::Malformed("cycle lengths must be positive".into()));
        }
        Ok(t)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).unwrap()
    }
}

impl PartialEq for CycleType {
    fn eq(&self, other: &Self) -> bool {
        type_equal(self, other)
    }
}

impl Eq for CycleType {}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

pub fn type_equal(a: &CycleType, b: &CycleType) -> bool {
    a.open == b.open && a.fwd == b.fwd && a.finite_support().eq(b.finite_support())
}

pub fn coimage_of_type(t: &CycleType) -> ExtNat {
    t.fwd
}

pub fn validate_theorem_inputs(tf: &CycleType, tg: &CycleType, th: &CycleType) -> Result<(), Error> {
    for (name, t) in [("f", tf), ("g", tg), ("h", th)] {
        if !t.has_infinite_cycle() {
            return Err(Error::NoInfiniteCycle(name.into()));
        }
    }
    if ext_add(tf.fwd, tg.fwd) != th.fwd {
        return Err(Error::CoimageMismatch);
    }
    if tf.fwd.is_zero() && tg.fwd.is_zero() {
        return Err(Error::UnsupportedDrosteCase);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use serde_json::json;

    fn n(k: u64) -> ExtNat {
        ExtNat::Finite(k)
    }

    #[test]
    fn addition() {
        assert_eq!(ext_add(n(0), n(5)), n(5));
        assert_eq!(ext_add(Omega, n(3)), Omega);
        assert_eq!(ext_add(n(2), n(2)), n(4));
    }

    #[test]
    fn small_subtraction() {
        assert_eq!(ext_sub_small(Omega, 1), Ok(Omega));
        assert_eq!(ext_sub_small(n(3), 1), Ok(n(2)));
        assert_eq!(ext_sub_small(n(0), 1), Err(Error::Underflow));
    }

    #[test]
    fn equality_reads_absent_as_zero() {
        let t = CycleType::new().with_fwd(1);
        assert!(type_equal(&t, &t));
        assert!(type_equal(&t, &CycleType::new().with_fwd(1).with_open(0).with_finite(3, 0)));
        assert!(!type_equal(&CycleType::new().with_fwd(2).with_open(4), &CycleType::new().with_fwd(1).with_open(4)));
    }

    #[test]
    fn coimage_is_forward_count() {
        assert_eq!(coimage_of_type(&CycleType::new().with_open(1)), n(0));
        assert_eq!(coimage_of_type(&CycleType::new().with_fwd(2).with_open(7)), n(2));
        assert_eq!(coimage_of_type(&CycleType::new().with_fwd(Omega)), Omega);
    }

    #[test]
    fn validation() {
        let one = CycleType::new().with_fwd(1);
        assert_eq!(validate_theorem_inputs(&one, &one, &CycleType::new().with_fwd(2).with_open(5)), Ok(()));
        assert_eq!(
            validate_theorem_inputs(&one, &one, &CycleType::new().with_fwd(3)),
            Err(Error::CoimageMismatch)
        );
        let o = |k| CycleType::new().with_open(k);
        assert_eq!(validate_theorem_inputs(&o(1), &o(1), &o(2)), Err(Error::UnsupportedDrosteCase));
        assert_eq!(
            validate_theorem_inputs(&CycleType::new().with_finite(2, Omega), &one, &one),
            Err(Error::NoInfiniteCycle("f".into()))
        );
    }

    #[test]
    fn json_shape() {
        let v = json!({"finite": {"1": 3, "4": "omega"}, "open": "omega", "fwd": 2});
        let t = CycleType::from_json(&v).unwrap();
        assert_eq!(t.count_finite(4), Omega);
        assert_eq!(t.count_finite(2), n(0));
        assert_eq!(t.to_json(), v);
        assert!(CycleType::from_json(&json!({"fwd": -1})).is_err());
        assert!(CycleType::from_json(&json!({"finite": {"0": 1}})).is_err());
    }

    fn arb_ext() -> impl Strategy<Value = ExtNat> {
        prop_oneof![4 => (0u64..1000).prop_map(ExtNat::Finite), 1 => Just(Omega)]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn add_commutes_and_associates(a in arb_ext(), b in arb_ext(), c in arb_ext()) {
            prop_assert_eq!(ext_add(a, b), ext_add(b, a));
            prop_assert_eq!(ext_add(ext_add(a, b), c), ext_add(a, ext_add(b, c)));
        }

        #[test]
        fn self_pair_needs_doubled_coimage(fa in arb_ext(), oa in arb_ext(), fh in arb_ext(), oh in arb_ext()) {
            let t = CycleType::new().with_fwd(fa).with_open(oa);
            let th = CycleType::new().with_fwd(fh).with_open(oh);
            if fh != ext_add(fa, fa) {
                prop_assert!(validate_theorem_inputs(&t, &t, &th).is_err());
            }
        }
    }
}
