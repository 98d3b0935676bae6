//! Factorizations `fg = h` built in stages: an anchor triple, then surgeries
//! that each add cycles of one kind to one of the three maps.
//!
//! Every state carries exact certificates for `f`, `g` and `h`, and a witness:
//! one infinite cycle of each map together with an infinite stream of
//! elements lying on all three. Surgeries consume part of the stream and
//! reserve the rest for the next stage.

mod anchors;
mod certs;
mod finite;
mod infinite;
mod select;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cardinal::ExtNat;
use crate::carrier::Carrier;
use crate::element::Element;
use crate::error::Error;
use crate::injection::{CycleId, Injection};

pub use anchors::{anchor_both_forward, anchor_f_forward_g_open, anchor_f_open_g_forward};
pub use finite::add_finite_cycles;
pub use infinite::{add_forward_cycles, add_open_cycles};
pub use select::{select_conflict_free, Layout, SelectionPlan, Sigma};

/// Which map of the triple a surgery adds cycles to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    F,
    G,
    H,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// One entry of a construction plan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "lemma", rename_all = "snake_case", deny_unknown_fields)]
pub enum Step {
    AnchorBothForward { k: ExtNat },
    AnchorFForwardGOpen { k: ExtNat },
    AnchorFOpenGForward { k: ExtNat },
    AddFiniteCycles {
        target: Target,
        #[serde(with = "length_keys")]
        k: BTreeMap<u64, ExtNat>,
        label: String,
    },
    AddOpenCycles { target: Target, k: ExtNat, label: String },
    AddForwardCycles { target: Target, k: ExtNat, label: String },
}

mod length_keys {
    use std::collections::BTreeMap;

    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    use crate::cardinal::ExtNat;

    pub fn serialize<S: Serializer>(m: &BTreeMap<u64, ExtNat>, s: S) -> Result<S::Ok, S::Error> {
        m.iter().map(|(n, k)| (n.to_string(), *k)).collect::<BTreeMap<String, ExtNat>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<u64, ExtNat>, D::Error> {
        BTreeMap::<String, ExtNat>::deserialize(d)?
            .into_iter()
            .map(|(n, k)| n.parse().map(|n| (n, k)).map_err(|_| D::Error::custom(format!("bad cycle length {n}"))))
            .collect()
    }
}

impl Step {
    pub fn lemma(&self) -> &'static str {
        match self {
            Step::AnchorBothForward { .. } => "anchor_both_forward",
            Step::AnchorFForwardGOpen { .. } => "anchor_f_forward_g_open",
            Step::AnchorFOpenGForward { .. } => "anchor_f_open_g_forward",
            Step::AddFiniteCycles { .. } => "add_finite_cycles",
            Step::AddOpenCycles { .. } => "add_open_cycles",
            Step::AddForwardCycles { .. } => "add_forward_cycles",
        }
    }
}

/// Three infinite cycles, one per map, and an infinite stream on all three.
#[derive(Clone)]
pub struct TripleWitness {
    pub cycle_f: CycleId,
    pub cycle_g: CycleId,
    pub cycle_h: CycleId,
    pub sigma: Arc<dyn Sigma>,
}

impl TripleWitness {
    pub fn contains(&self, x: &Element) -> bool {
        self.sigma.contains(x)
    }

    pub fn take(&self, n: usize) -> Vec<Element> {
        (0..n).map(|k| self.sigma.nth(k)).collect()
    }
}

impl fmt::Debug for TripleWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TripleWitness({}, {}, {})", self.cycle_f, self.cycle_g, self.cycle_h)
    }
}

/// A certified triple with `fg = h`.
#[derive(Clone, Debug)]
pub struct FactorState {
    pub f: Injection,
    pub g: Injection,
    pub h: Injection,
    pub witness: TripleWitness,
    pub history: Vec<Step>,
}

impl FactorState {
    pub fn carrier(&self) -> &Carrier {
        self.f.carrier()
    }

    pub fn plan(&self) -> Value {
        serde_json::to_value(&self.history).unwrap()
    }

    /// Fresh tag label for the next surgery.
    pub(crate) fn next_label(&self) -> String {
        format!("t{}", self.history.len())
    }

    pub(crate) fn maps(&self) -> [Injection; 3] {
        [self.f.clone(), self.g.clone(), self.h.clone()]
    }

    /// Attaches construction descriptions to the three maps.
    pub(crate) fn described(mut self) -> Self {
        let lemma = self.history.last().map_or("anchor", Step::lemma);
        let plan = self.plan();
        let d = |m: &str| json!({"kind": format!("construction:{lemma}"), "map": m, "plan": plan});
        self.f = self.f.with_description(d("f"));
        self.g = self.g.with_description(d("g"));
        self.h = self.h.with_description(d("h"));
        self
    }

    /// Points `x` among the first `n` carrier elements with `(x)fg ≠ (x)h`.
    pub fn product_mismatches(&self, n: usize) -> Vec<Element> {
        self.mismatches_at(&self.carrier().window(n))
    }

    pub fn mismatches_at(&self, points: &[Element]) -> Vec<Element> {
        points.iter().filter(|x| self.g.eval(&self.f.eval(x)) != self.h.eval(x)).cloned().collect()
    }

    /// The first `n` carrier elements, followed by a sample of the elements
    /// adjoined by each surgery and their neighbours under `f`, `g`, `h`.
    ///
    /// Adjoined elements carry fresh tags and so rank far beyond any small
    /// window; this is the point set that actually exercises the surgeries.
    pub fn probe_points(&self, n: usize) -> Vec<Element> {
        let mut seeds = Vec::new();
        let few = |k: &ExtNat, cap: u64| k.finite().unwrap_or(cap).min(cap);
        for step in &self.history {
            match step {
                Step::AddFiniteCycles { k, label, .. } => {
                    for (&len, c) in k {
                        for j in 0..few(c, 4) {
                            for i in 1..=2 * len {
                                let inner = Element::pair(Element::cell(len as i64, j as i64), Element::Atom(i as i64));
                                seeds.push(Element::tag(label, inner));
                            }
                        }
                    }
                }
                // Lines are Cantor-paired when K = ω, so deep samples on later
                // lines reach far into the witness stream.
                Step::AddOpenCycles { k, label, .. } => {
                    let span = if k.finite().is_some() { 8 } else { 5 };
                    for c in 0..few(k, 2) {
                        seeds.extend((-span..=span).map(|i| Element::tag(label, Element::cell(c as i64, i))));
                    }
                }
                Step::AddForwardCycles { k, label, .. } => {
                    let span = if k.finite().is_some() { 16 } else { 8 };
                    for c in 0..few(k, 2) {
                        seeds.extend((1..=span).map(|i| Element::tag(label, Element::cell(c as i64, i))));
                    }
                }
                _ => {}
            }
        }
        let mut out = self.carrier().window(n);
        let mut seen: std::collections::HashSet<Element> = out.iter().cloned().collect();
        for x in seeds.into_iter().filter(|x| self.carrier().contains(x)) {
            let mut near = vec![x.clone()];
            for m in [&self.f, &self.g, &self.h] {
                near.push(m.eval(&x));
                near.extend(m.pre(&x));
            }
            for y in near {
                if seen.insert(y.clone()) {
                    out.push(y);
                }
            }
        }
        out
    }
}

/// Runs one step on `state` (or from scratch for anchors).
pub fn apply_step(state: Option<FactorState>, step: &Step) -> Result<FactorState, Error> {
    let need = |s: Option<FactorState>| s.ok_or_else(|| Error::Malformed("plan must start with an anchor".into()));
    let check_label = |s: &FactorState, label: &str| {
        if s.next_label() != label {
            return Err(Error::Malformed(format!("plan label {label} out of sequence")));
        }
        Ok(())
    };
    match step {
        Step::AnchorBothForward { k } if state.is_none() => Ok(anchor_both_forward(*k)),
        Step::AnchorFForwardGOpen { k } if state.is_none() => Ok(anchor_f_forward_g_open(*k)),
        Step::AnchorFOpenGForward { k } if state.is_none() => Ok(anchor_f_open_g_forward(*k)),
        Step::AnchorBothForward { .. } | Step::AnchorFForwardGOpen { .. } | Step::AnchorFOpenGForward { .. } => {
            Err(Error::Malformed("anchor in the middle of a plan".into()))
        }
        Step::AddFiniteCycles { target, k, label } => {
            let s = need(state)?;
            check_label(&s, label)?;
            add_finite_cycles(&s, *target, k)
        }
        Step::AddOpenCycles { target, k, label } => {
            let s = need(state)?;
            check_label(&s, label)?;
            add_open_cycles(&s, *target, *k)
        }
        Step::AddForwardCycles { target, k, label } => {
            let s = need(state)?;
            check_label(&s, label)?;
            add_forward_cycles(&s, *target, *k)
        }
    }
}

/// Rebuilds a state from its plan.
pub fn replay(plan: &[Step]) -> Result<FactorState, Error> {
    let mut state = None;
    for step in plan {
        state = Some(apply_step(state, step)?);
    }
    state.ok_or_else(|| Error::Malformed("empty plan".into()))
}

pub fn plan_from_json(v: &Value) -> Result<Vec<Step>, Error> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Malformed(format!("construction plan: {e}")))
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;
    use crate::analysis::check_certificate_at;
    use crate::cardinal::CycleType;

    /// Exact product identity, certificate laws and witness membership.
    pub(crate) fn assert_valid(s: &FactorState, n: usize) {
        let points = s.probe_points(n);
        let bad = s.mismatches_at(&points);
        assert!(bad.is_empty(), "fg != h at {:?}", &bad[..bad.len().min(5)]);
        for (name, m) in [("f", &s.f), ("g", &s.g), ("h", &s.h)] {
            let v = check_certificate_at(m, &points);
            assert!(v.is_empty(), "{name}: {:?}", &v[..v.len().min(5)]);
        }
        let w = &s.witness;
        for x in w.take(30) {
            assert_eq!(s.f.cert().unwrap().cycle_of(&x), w.cycle_f, "{x}");
            assert_eq!(s.g.cert().unwrap().cycle_of(&x), w.cycle_g, "{x}");
            assert_eq!(s.h.cert().unwrap().cycle_of(&x), w.cycle_h, "{x}");
        }
    }

    pub(crate) fn censuses(s: &FactorState) -> [CycleType; 3] {
        [s.f.census().unwrap(), s.g.census().unwrap(), s.h.census().unwrap()]
    }
}
