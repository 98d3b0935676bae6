//! Countable subsets of the ground set with decidable membership and a
//! rank-ordered enumeration, plus bijections between them.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashSet};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::element::{cantor_pair, label_rank, rank, valid_label, Element};
use crate::error::Error;

type Ranked = (BigUint, Element);
type Stream = Box<dyn Iterator<Item = Ranked> + Send>;

/// A set of elements decided by code rather than by a carrier expression.
/// Used for the infinite removals performed by the constructions.
pub trait ElementSet: Send + Sync {
    fn contains(&self, e: &Element) -> bool;
}

#[derive(Clone)]
pub struct Carrier(Arc<Inner>);

struct Inner {
    node: Node,
    cache: Mutex<Cache>,
}

enum Node {
    Nat,
    Int,
    Finite(Vec<Element>, HashSet<Element>),
    Remove(Carrier, BTreeSet<Element>),
    Exclude(Carrier, Arc<dyn ElementSet>, String),
    Adjoin(Carrier, String, Carrier),
    Union(Vec<(String, Carrier)>),
    Sum(Vec<Carrier>),
    Product(Carrier, Carrier),
}

#[derive(Default)]
struct Cache {
    items: Vec<Ranked>,
    stream: Option<Stream>,
    exhausted: bool,
}

impl Carrier {
    fn new(node: Node) -> Self {
        Carrier(Arc::new(Inner { node, cache: Mutex::new(Cache::default()) }))
    }

    /// Non-negative integer atoms.
    pub fn nat() -> Self {
        Self::new(Node::Nat)
    }

    /// All integer atoms.
    pub fn int() -> Self {
        Self::new(Node::Int)
    }

    pub fn finite(elements: impl IntoIterator<Item = Element>) -> Self {
        let set: HashSet<Element> = elements.into_iter().collect();
        let mut v: Vec<Element> = set.iter().cloned().collect();
        v.sort_by_cached_key(rank);
        Self::new(Node::Finite(v, set))
    }

    /// Atoms `lo..=hi`.
    pub fn range(lo: i64, hi: i64) -> Self {
        Self::finite((lo..=hi).map(Element::Atom))
    }

    /// Atoms `1, 2, 3, ...`.
    pub fn positive() -> Self {
        Self::new(Node::Remove(Self::nat(), [Element::Atom(0)].into_iter().collect()))
    }

    pub fn remove_finite(c: &Carrier, s: impl IntoIterator<Item = Element>) -> Self {
        Self::new(Node::Remove(c.clone(), s.into_iter().collect()))
    }

    /// `c` minus an infinite decidable set. `name` identifies the set in the
    /// serialized description.
    pub fn exclude(c: &Carrier, set: Arc<dyn ElementSet>, name: &str) -> Self {
        Self::new(Node::Exclude(c.clone(), set, name.to_string()))
    }

    /// `c ∪ {Tag(label, i) : i ∈ index}`.
    pub fn adjoin_tagged(c: &Carrier, label: &str, index: &Carrier) -> Result<Self, Error> {
        if !valid_label(label) || c.labels().contains(label) {
            return Err(Error::TagCollision(label.to_string()));
        }
        Ok(Self::new(Node::Adjoin(c.clone(), label.to_string(), index.clone())))
    }

    /// Disjoint union whose parts are told apart by their tag labels.
    pub fn tagged_union(parts: Vec<(String, Carrier)>) -> Result<Self, Error> {
        let mut seen = HashSet::new();
        for (l, _) in &parts {
            if !valid_label(l) || !seen.insert(l.clone()) {
                return Err(Error::TagCollision(l.clone()));
            }
        }
        Ok(Self::new(Node::Union(parts)))
    }

    /// Union of carriers that are already pairwise disjoint.
    pub fn sum(parts: Vec<Carrier>) -> Self {
        Self::new(Node::Sum(parts))
    }

    pub fn product(a: &Carrier, b: &Carrier) -> Self {
        Self::new(Node::Product(a.clone(), b.clone()))
    }

    pub fn product_z(c: &Carrier) -> Self {
        Self::product(c, &Self::int())
    }

    pub fn contains(&self, e: &Element) -> bool {
        match &self.0.node {
            Node::Nat => matches!(e, Element::Atom(k) if *k >= 0),
            Node::Int => matches!(e, Element::Atom(_)),
            Node::Finite(_, set) => set.contains(e),
            Node::Remove(c, s) => !s.contains(e) && c.contains(e),
            Node::Exclude(c, s, _) => c.contains(e) && !s.contains(e),
            Node::Adjoin(c, label, idx) => match e {
                Element::Tag(l, inner) if l == label => idx.contains(inner),
                _ => c.contains(e),
            },
            Node::Union(parts) => match e {
                Element::Tag(l, inner) => {
                    parts.iter().any(|(pl, c)| pl == l && c.contains(inner))
                }
                _ => false,
            },
            Node::Sum(parts) => parts.iter().any(|c| c.contains(e)),
            Node::Product(a, b) => match e {
                Element::Pair(l, r) => a.contains(l) && b.contains(r),
                _ => false,
            },
        }
    }

    pub fn is_empty(&self) -> bool {
        self.nth(0).is_none()
    }

    pub fn is_infinite(&self) -> bool {
        match &self.0.node {
            Node::Nat | Node::Int => true,
            Node::Finite(..) => false,
            Node::Remove(c, _) | Node::Exclude(c, _, _) => c.is_infinite(),
            Node::Adjoin(c, _, idx) => c.is_infinite() || idx.is_infinite(),
            Node::Union(parts) => parts.iter().any(|(_, c)| c.is_infinite()),
            Node::Sum(parts) => parts.iter().any(Carrier::is_infinite),
            Node::Product(a, b) => {
                (a.is_infinite() && !b.is_empty()) || (b.is_infinite() && !a.is_empty())
            }
        }
    }

    /// The `k`-th member in rank order.
    pub fn nth(&self, k: usize) -> Option<Element> {
        self.nth_ranked(k).map(|(_, e)| e)
    }

    fn nth_ranked(&self, k: usize) -> Option<Ranked> {
        let mut cache = self.0.cache.lock().unwrap();
        while cache.items.len() <= k && !cache.exhausted {
            self.pull(&mut cache);
        }
        cache.items.get(k).cloned()
    }

    fn pull(&self, cache: &mut Cache) {
        if cache.stream.is_none() {
            cache.stream = Some(self.stream());
        }
        match cache.stream.as_mut().unwrap().next() {
            Some(item) => cache.items.push(item),
            None => cache.exhausted = true,
        }
    }

    /// Position of `e` in the rank-ordered enumeration, if it is a member.
    pub fn index_of(&self, e: &Element) -> Option<usize> {
        if !self.contains(e) {
            return None;
        }
        let r = rank(e);
        let mut cache = self.0.cache.lock().unwrap();
        while !cache.exhausted && cache.items.last().is_none_or(|(lr, _)| *lr < r) {
            self.pull(&mut cache);
        }
        cache.items.binary_search_by(|(lr, _)| lr.cmp(&r)).ok()
    }

    /// The first `n` members in rank order.
    pub fn window(&self, n: usize) -> Vec<Element> {
        if n == 0 {
            return Vec::new();
        }
        self.nth_ranked(n - 1);
        let cache = self.0.cache.lock().unwrap();
        cache.items.iter().take(n).map(|(_, e)| e.clone()).collect()
    }

    /// A fresh cursor over the members in rank order.
    pub fn iter(&self) -> impl Iterator<Item = Element> + Send {
        let c = self.clone();
        (0..).map_while(move |k| c.nth(k))
    }

    fn stream(&self) -> Stream {
        match &self.0.node {
            Node::Nat => Box::new((0i64..).map(|k| {
                let e = Element::Atom(k);
                (rank(&e), e)
            })),
            Node::Int => Box::new((0i64..).map(|z| {
                let k = if z % 2 == 0 { z / 2 } else { -(z / 2) - 1 };
                let e = Element::Atom(k);
                (rank(&e), e)
            })),
            Node::Finite(v, _) => {
                let items: Vec<Ranked> = v.iter().map(|e| (rank(e), e.clone())).collect();
                Box::new(items.into_iter())
            }
            Node::Remove(c, s) => {
                let s = s.clone();
                Box::new(c.ranked_iter().filter(move |(_, e)| !s.contains(e)))
            }
            Node::Exclude(c, s, _) => {
                let s = s.clone();
                Box::new(c.ranked_iter().filter(move |(_, e)| !s.contains(e)))
            }
            Node::Adjoin(c, label, idx) => Box::new(Merge::new(vec![
                c.ranked_iter(),
                tagged_stream(label.clone(), idx),
            ])),
            Node::Union(parts) => Box::new(Merge::new(
                parts.iter().map(|(l, c)| tagged_stream(l.clone(), c)).collect(),
            )),
            Node::Sum(parts) => {
                Box::new(Merge::new(parts.iter().map(Carrier::ranked_iter).collect()))
            }
            Node::Product(a, b) => Box::new(ProductStream::new(a.clone(), b.clone())),
        }
    }

    fn ranked_iter(&self) -> Stream {
        let c = self.clone();
        Box::new((0..).map_while(move |k| c.nth_ranked(k)))
    }

    /// Every tag label mentioned by the carrier expression.
    pub fn labels(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_labels(&mut out);
        out
    }

    fn collect_labels(&self, out: &mut BTreeSet<String>) {
        match &self.0.node {
            Node::Nat | Node::Int => {}
            Node::Finite(v, _) => {
                let mut ls = Vec::new();
                for e in v {
                    e.labels(&mut ls);
                }
                out.extend(ls);
            }
            Node::Remove(c, _) | Node::Exclude(c, _, _) => c.collect_labels(out),
            Node::Adjoin(c, l, idx) => {
                out.insert(l.clone());
                c.collect_labels(out);
                idx.collect_labels(out);
            }
            Node::Union(parts) => {
                for (l, c) in parts {
                    out.insert(l.clone());
                    c.collect_labels(out);
                }
            }
            Node::Sum(parts) => parts.iter().for_each(|c| c.collect_labels(out)),
            Node::Product(a, b) => {
                a.collect_labels(out);
                b.collect_labels(out);
            }
        }
    }

    pub fn description(&self) -> Value {
        match &self.0.node {
            Node::Nat => json!({"kind": "nat"}),
            Node::Int => json!({"kind": "int"}),
            Node::Finite(v, _) => {
                json!({"kind": "finite", "elements": v.iter().map(Element::to_json).collect::<Vec<_>>()})
            }
            Node::Remove(c, s) => json!({
                "kind": "remove",
                "of": c.description(),
                "elements": s.iter().map(Element::to_json).collect::<Vec<_>>(),
            }),
            Node::Exclude(c, _, name) => {
                json!({"kind": "remove", "of": c.description(), "selection": name})
            }
            Node::Adjoin(c, l, idx) => json!({
                "kind": "adjoin", "of": c.description(), "label": l, "index": idx.description(),
            }),
            Node::Union(parts) => json!({
                "kind": "union",
                "parts": parts.iter().map(|(l, c)| json!({"label": l, "carrier": c.description()})).collect::<Vec<_>>(),
            }),
            Node::Sum(parts) => json!({
                "kind": "sum",
                "parts": parts.iter().map(Carrier::description).collect::<Vec<_>>(),
            }),
            Node::Product(a, b) => match b.0.node {
                Node::Int => json!({"kind": "productZ", "of": a.description()}),
                _ => json!({"kind": "product", "left": a.description(), "right": b.description()}),
            },
        }
    }

    /// Rebuilds a carrier from [`Carrier::description`]. Removals of
    /// construction selections cannot be rebuilt this way; they come back by
    /// replaying the construction plan.
    pub fn from_description(v: &Value) -> Result<Self, Error> {
        let bad = |m: &str| Error::Malformed(format!("carrier {m}: {v}"));
        let sub = |key: &str| -> Result<Carrier, Error> {
            Carrier::from_description(v.get(key).ok_or_else(|| bad(&format!("missing {key:?}")))?)
        };
        let elements = |key: &str| -> Result<Vec<Element>, Error> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| bad(&format!("missing {key:?}")))?
                .iter()
                .map(Element::from_json)
                .collect()
        };
        let kind = v.get("kind").and_then(Value::as_str).ok_or_else(|| bad("without kind"))?;
        match kind {
            "nat" => Ok(Self::nat()),
            "int" => Ok(Self::int()),
            "finite" => Ok(Self::finite(elements("elements")?)),
            "remove" if v.get("selection").is_some() => Err(bad("needs a construction plan")),
            "remove" => Ok(Self::remove_finite(&sub("of")?, elements("elements")?)),
            "adjoin" => {
                let label = v.get("label").and_then(Value::as_str).ok_or_else(|| bad("missing label"))?;
                Self::adjoin_tagged(&sub("of")?, label, &sub("index")?)
            }
            "union" => {
                let parts = v.get("parts").and_then(Value::as_array).ok_or_else(|| bad("missing parts"))?;
                let parts = parts
                    .iter()
                    .map(|p| {
                        let l = p.get("label").and_then(Value::as_str).ok_or_else(|| bad("part without label"))?;
                        let c = Carrier::from_description(p.get("carrier").ok_or_else(|| bad("part without carrier"))?)?;
                        Ok((l.to_string(), c))
                    })
                    .collect::<Result<Vec<_>, Error>>()?;
                Self::tagged_union(parts)
            }
            "sum" => {
                let parts = v.get("parts").and_then(Value::as_array).ok_or_else(|| bad("missing parts"))?;
                Ok(Self::sum(parts.iter().map(Carrier::from_description).collect::<Result<_, _>>()?))
            }
            "productZ" => Ok(Self::product_z(&sub("of")?)),
            "product" => Ok(Self::product(&sub("left")?, &sub("right")?)),
            _ => Err(bad("of unknown kind")),
        }
    }

    pub fn same_as(&self, other: &Carrier) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.description() == other.description()
    }
}

impl fmt::Debug for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Carrier({})", self.description())
    }
}

fn tagged_stream(label: String, idx: &Carrier) -> Stream {
    let lr = label_rank(&label);
    Box::new(idx.ranked_iter().map(move |(r, e)| {
        (cantor_pair(&lr, &r) * 3u32 + 2u32, Element::Tag(label.clone(), Box::new(e)))
    }))
}

/// K-way merge of rank-ordered streams.
struct Merge {
    heads: Vec<Option<Ranked>>,
    streams: Vec<Stream>,
}

impl Merge {
    fn new(mut streams: Vec<Stream>) -> Self {
        let heads = streams.iter_mut().map(|s| s.next()).collect();
        Merge { heads, streams }
    }
}

impl Iterator for Merge {
    type Item = Ranked;

    fn next(&mut self) -> Option<Ranked> {
        let i = self
            .heads
            .iter()
            .enumerate()
            .filter_map(|(i, h)| h.as_ref().map(|(r, _)| (r, i)))
            .min()?
            .1;
        let out = self.heads[i].take();
        self.heads[i] = self.streams[i].next();
        out
    }
}

/// Enumerates `a × b` in rank order. The pair rank is monotone in both
/// coordinates, so a frontier heap suffices.
struct ProductStream {
    a: Carrier,
    b: Carrier,
    heap: BinaryHeap<Reverse<(BigUint, usize, usize)>>,
}

impl ProductStream {
    fn new(a: Carrier, b: Carrier) -> Self {
        let mut s = ProductStream { a, b, heap: BinaryHeap::new() };
        s.push(0, 0);
        s
    }

    fn push(&mut self, i: usize, j: usize) {
        if let (Some((ra, _)), Some((rb, _))) = (self.a.nth_ranked(i), self.b.nth_ranked(j)) {
            self.heap.push(Reverse((cantor_pair(&ra, &rb) * 3u32 + 1u32, i, j)));
        }
    }
}

impl Iterator for ProductStream {
    type Item = Ranked;

    fn next(&mut self) -> Option<Ranked> {
        let Reverse((r, i, j)) = self.heap.pop()?;
        if j == 0 {
            self.push(i + 1, 0);
        }
        self.push(i, j + 1);
        let e = Element::pair(self.a.nth(i).unwrap(), self.b.nth(j).unwrap());
        Some((r, e))
    }
}

type MapFn = Arc<dyn Fn(&Element) -> Element + Send + Sync>;

/// A bijection between two carriers, evaluable in both directions.
#[derive(Clone)]
pub struct Bijection {
    source: Carrier,
    target: Carrier,
    fwd: MapFn,
    bwd: MapFn,
    desc: Value,
}

impl Bijection {
    pub fn new(
        source: Carrier,
        target: Carrier,
        fwd: impl Fn(&Element) -> Element + Send + Sync + 'static,
        bwd: impl Fn(&Element) -> Element + Send + Sync + 'static,
        desc: Value,
    ) -> Self {
        Bijection { source, target, fwd: Arc::new(fwd), bwd: Arc::new(bwd), desc }
    }

    pub fn identity(c: &Carrier) -> Self {
        Self::new(c.clone(), c.clone(), Element::clone, Element::clone, json!({"kind": "identity", "carrier": c.description()}))
    }

    pub fn source(&self) -> &Carrier {
        &self.source
    }

    pub fn target(&self) -> &Carrier {
        &self.target
    }

    pub fn forward(&self, x: &Element) -> Element {
        (self.fwd)(x)
    }

    pub fn backward(&self, y: &Element) -> Element {
        (self.bwd)(y)
    }

    pub fn inverse(&self) -> Bijection {
        Bijection {
            source: self.target.clone(),
            target: self.source.clone(),
            fwd: self.bwd.clone(),
            bwd: self.fwd.clone(),
            desc: json!({"kind": "inverse", "of": self.desc}),
        }
    }

    /// `self` followed by `next` (right-action product).
    pub fn then(&self, next: &Bijection) -> Bijection {
        let (f1, f2) = (self.fwd.clone(), next.fwd.clone());
        let (b1, b2) = (self.bwd.clone(), next.bwd.clone());
        Bijection {
            source: self.source.clone(),
            target: next.target.clone(),
            fwd: Arc::new(move |x| f2(&f1(x))),
            bwd: Arc::new(move |y| b1(&b2(y))),
            desc: json!({"kind": "compose", "parts": [self.desc, next.desc]}),
        }
    }

    pub fn description(&self) -> &Value {
        &self.desc
    }
}

impl fmt::Debug for Bijection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bijection({})", self.desc)
    }
}

/// Matches the k-th member of `c1` with the k-th member of `c2`.
///
/// # Panics
///
/// The returned maps panic when queried outside their carriers.
pub fn canonical_bijection(c1: &Carrier, c2: &Carrier) -> Bijection {
    let (s1, t1) = (c1.clone(), c2.clone());
    let (s2, t2) = (c1.clone(), c2.clone());
    Bijection::new(
        c1.clone(),
        c2.clone(),
        move |x| {
            let k = s1.index_of(x).unwrap_or_else(|| panic!("{x} is not in the source carrier"));
            t1.nth(k).expect("target carrier is exhausted")
        },
        move |y| {
            let k = t2.index_of(y).unwrap_or_else(|| panic!("{y} is not in the target carrier"));
            s2.nth(k).expect("source carrier is exhausted")
        },
        json!({"kind": "canonical_bijection", "source": c1.description(), "target": c2.description()}),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strictly_increasing(c: &Carrier, n: usize) {
        let w = c.window(n);
        assert_eq!(w.len(), n);
        for pair in w.windows(2) {
            assert!(rank(&pair[0]) < rank(&pair[1]), "{} !< {}", pair[0], pair[1]);
        }
        for e in &w {
            assert!(c.contains(e), "{e} enumerated but not a member");
        }
    }

    #[test]
    fn remove_skips_element() {
        let c = Carrier::remove_finite(&Carrier::nat(), [Element::Atom(5)]);
        assert!(!c.contains(&Element::Atom(5)));
        assert!(!c.window(20).contains(&Element::Atom(5)));
        strictly_increasing(&c, 100);
    }

    #[test]
    fn adjoin_tagged_is_disjoint() {
        let c = Carrier::adjoin_tagged(&Carrier::nat(), "theta", &Carrier::int()).unwrap();
        assert!(c.contains(&Element::tag("theta", Element::Atom(-4))));
        assert!(c.contains(&Element::Atom(3)));
        assert!(!c.contains(&Element::Atom(-3)));
        strictly_increasing(&c, 300);
        assert!(matches!(
            Carrier::adjoin_tagged(&c, "theta", &Carrier::nat()),
            Err(Error::TagCollision(_))
        ));
    }

    #[test]
    fn tagged_union_interleaves_by_rank() {
        let c = Carrier::tagged_union(vec![("a".into(), Carrier::int()), ("b".into(), Carrier::int())]).unwrap();
        strictly_increasing(&c, 50);
        // brute force: the first 50 members are the 50 smallest-rank members
        let mut all: Vec<Element> = (-200..200)
            .flat_map(|k| [Element::tag("a", Element::Atom(k)), Element::tag("b", Element::Atom(k))])
            .collect();
        all.sort_by_cached_key(rank);
        assert_eq!(c.window(50), all[..50].to_vec());
    }

    #[test]
    fn product_enumerates_in_rank_order() {
        let c = Carrier::product_z(&Carrier::range(0, 3));
        strictly_increasing(&c, 500);
        let mut all: Vec<Element> = (0..=3).flat_map(|i| (-400..400).map(move |j| Element::cell(i, j))).collect();
        all.sort_by_cached_key(rank);
        assert_eq!(c.window(500), all[..500].to_vec());
        let s = Carrier::sum(vec![c.clone(), Carrier::product(&Carrier::range(-1, -1), &Carrier::positive())]);
        strictly_increasing(&s, 500);
    }

    #[test]
    fn index_of_inverts_nth() {
        let c = Carrier::product_z(&Carrier::nat());
        for k in 0..300 {
            let e = c.nth(k).unwrap();
            assert_eq!(c.index_of(&e), Some(k));
        }
        assert_eq!(c.index_of(&Element::Atom(0)), None);
    }

    #[test]
    fn canonical_bijection_shifts() {
        let nat = Carrier::nat();
        let c2 = Carrier::remove_finite(&nat, [Element::Atom(0)]);
        let b = canonical_bijection(&nat, &c2);
        assert_eq!(b.forward(&Element::Atom(0)), Element::Atom(1));
        for x in nat.window(500) {
            assert_eq!(b.backward(&b.forward(&x)), x);
        }
        let id = canonical_bijection(&c2, &c2);
        for x in c2.window(100) {
            assert_eq!(id.forward(&x), x);
        }
    }

    #[test]
    fn descriptions_round_trip() {
        let c = Carrier::adjoin_tagged(
            &Carrier::sum(vec![
                Carrier::product_z(&Carrier::range(0, 2)),
                Carrier::product(&Carrier::range(-1, -1), &Carrier::positive()),
            ]),
            "t0",
            &Carrier::product(&Carrier::nat(), &Carrier::positive()),
        )
        .unwrap();
        let d = c.description();
        let back = Carrier::from_description(&d).unwrap();
        assert_eq!(back.description(), d);
        assert_eq!(back.window(200), c.window(200));
    }
}
