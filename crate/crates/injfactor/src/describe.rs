//! Rebuilding maps and bijections from their JSON descriptions.

use serde_json::Value;

use crate::canonical::{canonical_map, finite_table};
use crate::cardinal::{CycleType, ExtNat};
use crate::carrier::{canonical_bijection, Bijection, Carrier};
use crate::conjugacy::conjugator;
use crate::constructions::{anchor_both_forward, anchor_f_forward_g_open, plan_from_json, replay};
use crate::element::Element;
use crate::error::Error;
use crate::injection::{compose, conjugate, Injection};
use crate::piecewise::Piecewise;

fn bad(msg: impl Into<String>) -> Error {
    Error::Malformed(msg.into())
}

fn field<'a>(v: &'a Value, k: &str) -> Result<&'a Value, Error> {
    v.get(k).ok_or_else(|| bad(format!("description without {k:?}")))
}

fn pair_of<'a>(v: &'a Value, k: &str) -> Result<(&'a Value, &'a Value), Error> {
    match field(v, k)?.as_array().map(Vec::as_slice) {
        Some([a, b]) => Ok((a, b)),
        _ => Err(bad(format!("{k:?} must hold two parts"))),
    }
}

/// Builds the map a description denotes.
///
/// Besides the kinds produced by this crate, `{"kind": "shift", "on": "nat"}`
/// and `{"kind": "shift", "on": "int"}` give the certified unit shifts.
pub fn map_from_description(v: &Value) -> Result<Injection, Error> {
    let kind = field(v, "kind")?.as_str().ok_or_else(|| bad("kind must be a string"))?;
    match kind {
        "canonical" => canonical_map(&CycleType::from_json(field(v, "type")?)?),
        "finite_table" => {
            let base = Carrier::from_description(field(v, "base")?)?;
            let rows = field(v, "table")?.as_array().ok_or_else(|| bad("table must be a list"))?;
            let table = rows
                .iter()
                .map(|r| match r.as_array().map(Vec::as_slice) {
                    Some([x, y]) => Ok((Element::from_json(x)?, Element::from_json(y)?)),
                    _ => Err(bad("table rows are [x, y] pairs")),
                })
                .collect::<Result<Vec<_>, Error>>()?;
            finite_table(&base, &table)
        }
        "piecewise" => Ok(Piecewise::from_description(v)?.into_injection()),
        "compose" => {
            let (a, b) = pair_of(v, "parts")?;
            compose(&map_from_description(a)?, &map_from_description(b)?)
        }
        "conjugate" => {
            let f = map_from_description(field(v, "map")?)?;
            conjugate(&f, &bijection_from_description(field(v, "bijection")?)?)
        }
        "shift" => match field(v, "on")?.as_str() {
            Some("nat") => Ok(anchor_both_forward(ExtNat::ZERO).f.with_description(v.clone())),
            Some("int") => Ok(anchor_f_forward_g_open(ExtNat::ZERO).g.with_description(v.clone())),
            _ => Err(bad("shift is on \"nat\" or \"int\"")),
        },
        k if k.starts_with("construction:") => {
            let state = replay(&plan_from_json(field(v, "plan")?)?)?;
            match field(v, "map")?.as_str() {
                Some("f") => Ok(state.f),
                Some("g") => Ok(state.g),
                Some("h") => Ok(state.h),
                _ => Err(bad("construction map must be f, g or h")),
            }
        }
        k => Err(bad(format!("unknown map kind {k:?}"))),
    }
}

/// Builds the bijection a description denotes.
pub fn bijection_from_description(v: &Value) -> Result<Bijection, Error> {
    let kind = field(v, "kind")?.as_str().ok_or_else(|| bad("kind must be a string"))?;
    match kind {
        "identity" => Ok(Bijection::identity(&Carrier::from_description(field(v, "carrier")?)?)),
        "inverse" => Ok(bijection_from_description(field(v, "of")?)?.inverse()),
        "compose" => {
            let (a, b) = pair_of(v, "parts")?;
            let (a, b) = (bijection_from_description(a)?, bijection_from_description(b)?);
            if !a.target().same_as(b.source()) {
                return Err(Error::CarrierMismatch);
            }
            Ok(a.then(&b))
        }
        "conjugator" => conjugator(&map_from_description(field(v, "f")?)?, &map_from_description(field(v, "g")?)?),
        "permutation" => {
            let m = map_from_description(field(v, "map")?)?;
            let census = m.census().ok_or(Error::Uncertified)?;
            if !census.fwd.is_zero() {
                return Err(bad("permutation description names a map with forward cycles"));
            }
            Ok(m.as_bijection())
        }
        "canonical_bijection" => Ok(canonical_bijection(
            &Carrier::from_description(field(v, "source")?)?,
            &Carrier::from_description(field(v, "target")?)?,
        )),
        k => Err(bad(format!("unknown bijection kind {k:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{add_open_cycles, Target};
    use serde_json::json;

    fn same_on_window(a: &Injection, b: &Injection, n: usize) {
        for x in a.carrier().window(n) {
            assert_eq!(a.eval(&x), b.eval(&x), "at {x}");
            assert_eq!(a.pre(&x), b.pre(&x), "at {x}");
        }
    }

    #[test]
    fn every_map_kind_round_trips() {
        let t = CycleType::new().with_fwd(1).with_finite(2, 3);
        let canon = canonical_map(&t).unwrap();
        let s = add_open_cycles(&anchor_both_forward(ExtNat::Finite(1)), Target::G, ExtNat::Finite(2)).unwrap();
        let a = conjugator(&s.g, &s.g).unwrap();
        let table = finite_table(&Carrier::nat(), &[(Element::Atom(1), Element::Atom(4)), (Element::Atom(4), Element::Atom(1))])
            .unwrap();
        let maps = vec![
            canon.clone(),
            table.clone(),
            s.f.clone(),
            s.h.clone(),
            compose(&table, &table).unwrap(),
            conjugate(&s.g, &a).unwrap(),
            anchor_both_forward(ExtNat::Finite(3)).g,
        ];
        for m in maps {
            let back = map_from_description(m.description()).unwrap();
            same_on_window(&m, &back, 200);
            assert_eq!(back.census(), m.census());
        }
    }

    #[test]
    fn shifts() {
        let n = map_from_description(&json!({"kind": "shift", "on": "nat"})).unwrap();
        assert_eq!(n.eval(&Element::Atom(4)), Element::Atom(5));
        assert_eq!(n.pre(&Element::Atom(0)), None);
        let z = map_from_description(&json!({"kind": "shift", "on": "int"})).unwrap();
        assert_eq!(z.pre(&Element::Atom(0)), Some(Element::Atom(-1)));
    }

    #[test]
    fn bijection_kinds_round_trip() {
        let c = Carrier::nat();
        let id = Bijection::identity(&c);
        let cb = canonical_bijection(&c, &Carrier::int());
        let both = cb.then(&cb.inverse());
        for b in [id, cb, both] {
            let back = bijection_from_description(b.description()).unwrap();
            for x in b.source().window(100) {
                assert_eq!(b.forward(&x), back.forward(&x));
            }
        }
    }

    #[test]
    fn malformed_descriptions() {
        assert!(map_from_description(&json!({"kind": "nope"})).is_err());
        assert!(map_from_description(&json!({"kind": "compose", "parts": [1]})).is_err());
        assert!(map_from_description(&json!(3)).is_err());
        assert!(map_from_description(&json!({"kind": "construction:x", "map": "q", "plan": []})).is_err());
    }
}
