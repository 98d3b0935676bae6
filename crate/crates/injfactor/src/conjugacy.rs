//! Equivalence of certified maps and explicit conjugating bijections.

use serde::Serialize;
use serde_json::json;

use crate::cardinal::{type_equal, CycleType};
use crate::carrier::Bijection;
use crate::error::Error;
use crate::injection::{CycleClass, Injection};

pub fn are_equivalent(f: &Injection, g: &Injection) -> Result<bool, Error> {
    Ok(type_equal(&f.cert()?.census(), &g.cert()?.census()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchRecord {
    pub class: CycleClass,
    pub index_f: u64,
    pub index_g: u64,
}

/// Pairs the `k`-th cycle of each class of one map with the `k`-th cycle of
/// the same class of the other. Nothing is materialized, so classes with
/// infinitely many cycles are fine.
#[derive(Clone, Debug)]
pub struct Matching {
    census: CycleType,
}

impl Matching {
    pub fn partner(&self, class: CycleClass, k: u64) -> Option<u64> {
        let count = match class {
            CycleClass::Finite(n) => self.census.count_finite(n),
            CycleClass::Forward => self.census.fwd,
            CycleClass::Open => self.census.open,
        };
        count.exceeds(k).then_some(k)
    }

    /// The first `limit` pairs of every class.
    pub fn prefix(&self, limit: u64) -> Vec<MatchRecord> {
        let classes = self
            .census
            .finite_support()
            .map(|(n, k)| (CycleClass::Finite(n), k))
            .chain([(CycleClass::Open, self.census.open), (CycleClass::Forward, self.census.fwd)]);
        let mut out = Vec::new();
        for (class, count) in classes {
            for k in (0..limit).take_while(|&k| count.exceeds(k)) {
                out.push(MatchRecord { class, index_f: k, index_g: k });
            }
        }
        out
    }
}

pub fn pair_cycles(census_f: &CycleType, census_g: &CycleType) -> Result<Matching, Error> {
    if !type_equal(census_f, census_g) {
        return Err(Error::NotEquivalent);
    }
    Ok(Matching { census: census_f.clone() })
}

/// A bijection `a` from `g`'s carrier to `f`'s with `a f a⁻¹ = g`.
///
/// `x` at position `p` of the `k`-th cycle of `g` goes to position `p` of the
/// `k`-th cycle of `f` of the same class.
pub fn conjugator(f: &Injection, g: &Injection) -> Result<Bijection, Error> {
    let (cf, cg) = (f.cert()?.clone(), g.cert()?.clone());
    pair_cycles(&cf.census(), &cg.census())?;
    let (cf2, cg2) = (cf.clone(), cg.clone());
    Ok(Bijection::new(
        g.carrier().clone(),
        f.carrier().clone(),
        move |x| {
            let l = cg.locate(x);
            cf.element_at(&cf.cycle_at(l.class, cg.ordinal(&l.cycle)), l.position)
        },
        move |y| {
            let l = cf2.locate(y);
            cg2.element_at(&cg2.cycle_at(l.class, cf2.ordinal(&l.cycle)), l.position)
        },
        json!({"kind": "conjugator", "f": f.description(), "g": g.description()}),
    ))
}
