//! Standard certified maps: canonical representatives of cycle types and
//! finite-support permutations.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde_json::{json, Value};

use crate::cardinal::{CycleType, ExtNat, Omega};
use crate::carrier::Carrier;
use crate::element::{rank, Element};
use crate::error::Error;
use crate::injection::{Certificate, CycleClass, CycleId, Injection, Location};

fn class_label(class: CycleClass) -> String {
    match class {
        CycleClass::Finite(n) => format!("c{n}"),
        CycleClass::Forward => "fwd".into(),
        CycleClass::Open => "open".into(),
    }
}

fn label_class(label: &str) -> Option<CycleClass> {
    match label {
        "fwd" => Some(CycleClass::Forward),
        "open" => Some(CycleClass::Open),
        _ => label.strip_prefix('c')?.parse().ok().filter(|&n| n > 0).map(CycleClass::Finite),
    }
}

fn copies(k: ExtNat) -> Carrier {
    match k {
        ExtNat::Finite(k) => Carrier::range(0, k as i64 - 1),
        Omega => Carrier::nat(),
    }
}

/// Decodes a canonical element `Tag(label, (j, p))`.
fn split(x: &Element) -> (CycleClass, i64, i64) {
    match x {
        Element::Tag(l, inner) => {
            let class = label_class(l).expect("not a canonical element");
            let (j, p) = inner.as_cell().expect("not a canonical element");
            (class, j, p)
        }
        _ => panic!("{x} is not a canonical element"),
    }
}

fn join(class: CycleClass, j: i64, p: i64) -> Element {
    Element::tag(&class_label(class), Element::cell(j, p))
}

fn cycle_id(class: CycleClass, j: i64) -> CycleId {
    CycleId(Element::tag(&class_label(class), Element::Atom(j)))
}

/// The canonical map of type `t`: a tagged union of `n`-cycles, copies of
/// the shift on ℤ (open cycles) and copies of the shift on ℕ (forward
/// cycles). The `j`-th cycle of each class is the `j`-th in its certificate.
pub fn canonical_map(t: &CycleType) -> Result<Injection, Error> {
    if !t.is_countably_infinite() {
        return Err(Error::EmptyType);
    }
    let mut parts = Vec::new();
    for (n, k) in t.finite_support() {
        parts.push((class_label(CycleClass::Finite(n)), Carrier::product(&copies(k), &Carrier::range(0, n as i64 - 1))));
    }
    if !t.open.is_zero() {
        parts.push(("open".into(), Carrier::product_z(&copies(t.open))));
    }
    if !t.fwd.is_zero() {
        parts.push(("fwd".into(), Carrier::product(&copies(t.fwd), &Carrier::nat())));
    }
    let carrier = Carrier::tagged_union(parts)?;
    let apply = |x: &Element| {
        let (class, j, p) = split(x);
        let q = match class {
            CycleClass::Finite(n) => (p + 1) % n as i64,
            _ => p + 1,
        };
        join(class, j, q)
    };
    let preimage = |y: &Element| {
        let (class, j, p) = split(y);
        match class {
            CycleClass::Finite(n) => Some(join(class, j, (p - 1).rem_euclid(n as i64))),
            CycleClass::Forward if p == 0 => None,
            _ => Some(join(class, j, p - 1)),
        }
    };
    let mut census = CycleType::new().with_open(t.open).with_fwd(t.fwd);
    for (n, k) in t.finite_support() {
        census = census.with_finite(n, k);
    }
    Ok(Injection::from_fns(carrier, apply, preimage, json!({"kind": "canonical", "type": t.to_json()}))
        .with_certificate(Arc::new(CanonicalCert { census })))
}

struct CanonicalCert {
    census: CycleType,
}

impl Certificate for CanonicalCert {
    fn census(&self) -> CycleType {
        self.census.clone()
    }

    fn cycle_of(&self, x: &Element) -> CycleId {
        let (class, j, _) = split(x);
        cycle_id(class, j)
    }

    fn class_of(&self, id: &CycleId) -> CycleClass {
        match &id.0 {
            Element::Tag(l, _) => label_class(l).expect("not a canonical cycle id"),
            _ => panic!("not a canonical cycle id"),
        }
    }

    fn locate(&self, x: &Element) -> Location {
        let (class, j, p) = split(x);
        Location { cycle: cycle_id(class, j), class, position: p }
    }

    fn element_at(&self, id: &CycleId, position: i64) -> Element {
        let class = self.class_of(id);
        let j = match &id.0 {
            Element::Tag(_, inner) => inner.as_atom().unwrap(),
            _ => unreachable!(),
        };
        let p = match class {
            CycleClass::Finite(n) => position.rem_euclid(n as i64),
            _ => position,
        };
        join(class, j, p)
    }

    fn ordinal(&self, id: &CycleId) -> u64 {
        match &id.0 {
            Element::Tag(_, inner) => inner.as_atom().unwrap() as u64,
            _ => panic!("not a canonical cycle id"),
        }
    }

    fn cycle_at(&self, class: CycleClass, ordinal: u64) -> CycleId {
        cycle_id(class, ordinal as i64)
    }
}

/// A permutation of `base` moving finitely many points, given as a table of
/// `(x, (x)f)` pairs. Points outside the table are fixed.
pub fn finite_table(base: &Carrier, table: &[(Element, Element)]) -> Result<Injection, Error> {
    let mut fwd = HashMap::new();
    let mut bwd = HashMap::new();
    for (x, y) in table {
        if !base.contains(x) {
            return Err(Error::OutOfCarrier(x.clone()));
        }
        if !base.contains(y) {
            return Err(Error::OutOfCarrier(y.clone()));
        }
        if x == y {
            continue;
        }
        if fwd.insert(x.clone(), y.clone()).is_some() || bwd.insert(y.clone(), x.clone()).is_some() {
            return Err(Error::Malformed(format!("table is not injective at {x} -> {y}")));
        }
    }
    if fwd.keys().any(|x| !bwd.contains_key(x)) {
        return Err(Error::Malformed("table must permute its support".into()));
    }
    // cycles of the moved points, each starting at its minimal-rank member
    let mut moved: Vec<Element> = fwd.keys().cloned().collect();
    moved.sort_by_cached_key(rank);
    let mut cycles: BTreeMap<u64, Vec<Vec<Element>>> = BTreeMap::new();
    let mut owner: HashMap<Element, (Element, i64)> = HashMap::new();
    for start in &moved {
        if owner.contains_key(start) {
            continue;
        }
        let mut cyc = vec![start.clone()];
        let mut cur = fwd[start].clone();
        while &cur != start {
            cyc.push(cur.clone());
            cur = fwd[&cur].clone();
        }
        for (p, e) in cyc.iter().enumerate() {
            owner.insert(e.clone(), (start.clone(), p as i64));
        }
        cycles.entry(cyc.len() as u64).or_default().push(cyc);
    }
    let mut census = CycleType::new();
    for (n, cs) in &cycles {
        census = census.with_finite(*n, cs.len() as u64);
    }
    let fixed = if base.is_infinite() {
        Omega
    } else {
        ExtNat::Finite(base.iter().count() as u64 - moved.len() as u64)
    };
    census = census.with_finite(1, fixed);
    let cert = TableCert { base: base.clone(), cycles, owner, moved, census };
    let (f2, b2) = (fwd.clone(), bwd.clone());
    let desc = json!({
        "kind": "finite_table",
        "base": base.description(),
        "table": table.iter().map(|(x, y)| json!([x.to_json(), y.to_json()])).collect::<Vec<Value>>(),
    });
    Ok(Injection::from_fns(
        base.clone(),
        move |x| f2.get(x).cloned().unwrap_or_else(|| x.clone()),
        move |y| Some(b2.get(y).cloned().unwrap_or_else(|| y.clone())),
        desc,
    )
    .with_certificate(Arc::new(cert)))
}

struct TableCert {
    base: Carrier,
    cycles: BTreeMap<u64, Vec<Vec<Element>>>,
    owner: HashMap<Element, (Element, i64)>,
    moved: Vec<Element>,
    census: CycleType,
}

impl TableCert {
    fn cycle(&self, id: &CycleId) -> Option<&Vec<Element>> {
        self.cycles.values().find_map(|cs| cs.iter().find(|c| c[0] == id.0))
    }
}

impl Certificate for TableCert {
    fn census(&self) -> CycleType {
        self.census.clone()
    }

    fn cycle_of(&self, x: &Element) -> CycleId {
        CycleId(self.owner.get(x).map_or_else(|| x.clone(), |(s, _)| s.clone()))
    }

    fn class_of(&self, id: &CycleId) -> CycleClass {
        CycleClass::Finite(self.cycle(id).map_or(1, |c| c.len() as u64))
    }

    fn locate(&self, x: &Element) -> Location {
        let cycle = self.cycle_of(x);
        let class = self.class_of(&cycle);
        let position = self.owner.get(x).map_or(0, |(_, p)| *p);
        Location { cycle, class, position }
    }

    fn element_at(&self, id: &CycleId, position: i64) -> Element {
        match self.cycle(id) {
            Some(c) => c[position.rem_euclid(c.len() as i64) as usize].clone(),
            None => id.0.clone(),
        }
    }

    fn ordinal(&self, id: &CycleId) -> u64 {
        match self.cycle(id) {
            Some(c) => {
                let cs = &self.cycles[&(c.len() as u64)];
                cs.iter().position(|d| d[0] == id.0).unwrap() as u64
            }
            None => {
                let r = rank(&id.0);
                let below = self.moved.iter().filter(|m| rank(m) < r).count();
                (self.base.index_of(&id.0).expect("fixed point outside base") - below) as u64
            }
        }
    }

    fn cycle_at(&self, class: CycleClass, ordinal: u64) -> CycleId {
        match class {
            CycleClass::Finite(1) => {
                let x = self
                    .base
                    .iter()
                    .filter(|x| !self.owner.contains_key(x))
                    .nth(ordinal as usize)
                    .expect("no such fixed point");
                CycleId(x)
            }
            CycleClass::Finite(n) => CycleId(self.cycles[&n][ordinal as usize][0].clone()),
            _ => panic!("finite-support permutations have only finite cycles"),
        }
    }
}
