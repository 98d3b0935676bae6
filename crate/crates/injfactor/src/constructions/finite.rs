//! Adding finite cycles to one map of the triple.
//!
//! Each chosen `α` is removed and replaced by a block `θ_1, ..., θ_{2n}`.
//! With `β, δ, ζ` the preimages of `α` and `γ, ε, η` its images under
//! `f, g, h`, each map enters the block from its preimage of `α`, leaves it to
//! its image of `α`, and permutes the rest of the block according to the
//! tables below. Half of the block closes up into a new `n`-cycle of the
//! target map.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::certs::{NewCycles, SurgeryCert};
use super::select::{select_conflict_free, Layout, SelectionPlan};
use super::{FactorState, Step, Target, TripleWitness};
use crate::cardinal::ExtNat;
use crate::carrier::Carrier;
use crate::element::Element;
use crate::error::Error;
use crate::injection::{CycleClass, CycleId, Injection, MapCore};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Node {
    Entry,
    Th(u64),
    Exit,
}

use Node::{Entry, Exit, Th};

/// The arrows of map `m` (0, 1, 2 for `f`, `g`, `h`) through one block.
pub(crate) fn block_rules(target: Target, m: usize, n: u64) -> Vec<(Node, Node)> {
    let mut r = Vec::new();
    let range = |lo: u64, hi: u64| lo..=hi;
    match (target, m) {
        (Target::H, 0) => {
            r.push((Entry, Th(n + 1)));
            r.extend(range(1, n - 1).map(|i| (Th(i), Th(i + n + 1))));
            r.push((Th(n), Exit));
            r.extend(range(n + 1, 2 * n).map(|i| (Th(i), Th(i - n))));
        }
        (Target::H, 1) => {
            r.push((Entry, Th(1)));
            r.push((Th(1), Th(2 * n)));
            r.extend(range(2, n).map(|i| (Th(i), Th(i + n - 1))));
            r.push((Th(n + 1), Exit));
            r.extend(range(n + 2, 2 * n).map(|i| (Th(i), Th(i - n))));
        }
        (Target::H, _) => {
            r.push((Entry, Th(1)));
            r.extend(range(1, n - 1).map(|i| (Th(i), Th(i + 1))));
            r.push((Th(n), Exit));
            r.push((Th(n + 1), Th(2 * n)));
            r.extend(range(n + 2, 2 * n).map(|i| (Th(i), Th(i - 1))));
        }
        (Target::F, 0) | (Target::G, 1) => {
            r.push((Entry, Th(1)));
            r.extend(range(1, n - 1).map(|i| (Th(i), Th(i + 1))));
            r.extend(range(n + 1, 2 * n - 1).map(|i| (Th(i), Th(i + 1))));
            r.push((Th(n), Exit));
            r.push((Th(2 * n), Th(n + 1)));
        }
        (Target::F, 1) => {
            r.push((Entry, Th(n + 1)));
            r.push((Th(1), Exit));
            r.extend(range(2, n).map(|i| (Th(i), Th(2 * n + 2 - i))));
            r.extend(range(n + 1, 2 * n).map(|i| (Th(i), Th(2 * n + 1 - i))));
        }
        (Target::F, _) => {
            r.push((Entry, Th(n + 1)));
            r.extend(range(1, n - 1).map(|i| (Th(i), Th(2 * n + 1 - i))));
            r.push((Th(n), Exit));
            r.extend(range(n + 1, 2 * n - 1).map(|i| (Th(i), Th(2 * n - i))));
            r.push((Th(2 * n), Th(n)));
        }
        (Target::G, 0) => {
            r.push((Entry, Th(n)));
            r.extend(range(1, n).map(|i| (Th(i), Th(2 * n + 1 - i))));
            r.extend(range(n + 1, 2 * n - 1).map(|i| (Th(i), Th(2 * n - i))));
            r.push((Th(2 * n), Exit));
        }
        (Target::G, _) => {
            r.push((Entry, Th(1)));
            r.push((Th(1), Th(n + 1)));
            r.extend(range(2, n).map(|i| (Th(i), Th(2 * n + 2 - i))));
            r.extend(range(n + 1, 2 * n - 1).map(|i| (Th(i), Th(2 * n + 1 - i))));
            r.push((Th(2 * n), Exit));
        }
    }
    r
}

struct Rules {
    next: HashMap<Node, Node>,
    prev: HashMap<Node, Node>,
}

struct Stage {
    label: String,
    blocks: Vec<(u64, ExtNat)>,
    plan: SelectionPlan,
    old: [Injection; 3],
    rules: HashMap<(usize, u64), Rules>,
    /// The new `n`-cycle of the target, in order from `θ_{n+1}`.
    cycle: HashMap<u64, Vec<u64>>,
}

impl Stage {
    fn theta(&self, n: u64, j: u64, i: u64) -> Element {
        Element::tag(&self.label, Element::pair(Element::cell(n as i64, j as i64), Element::Atom(i as i64)))
    }

    fn parse(&self, x: &Element) -> Option<(u64, u64, u64)> {
        match x.untag(&self.label)? {
            Element::Pair(l, r) => {
                let (n, j) = l.as_cell()?;
                Some((n as u64, j as u64, r.as_atom()? as u64))
            }
            _ => None,
        }
    }

    fn alpha(&self, n: u64, j: u64) -> Element {
        self.plan.element_for(n, j)
    }
}

struct BlockMap {
    st: Arc<Stage>,
    m: usize,
}

impl MapCore for BlockMap {
    fn apply(&self, x: &Element) -> Element {
        let st = &self.st;
        if let Some((n, j, i)) = st.parse(x) {
            return match st.rules[&(self.m, n)].next[&Th(i)] {
                Th(k) => st.theta(n, j, k),
                _ => st.old[self.m].eval(&st.alpha(n, j)),
            };
        }
        let y = st.old[self.m].eval(x);
        match st.plan.slot_of(&y) {
            Some((n, j)) => match st.rules[&(self.m, n)].next[&Entry] {
                Th(k) => st.theta(n, j, k),
                _ => unreachable!(),
            },
            None => y,
        }
    }

    fn preimage(&self, y: &Element) -> Option<Element> {
        let st = &self.st;
        if let Some((n, j, i)) = st.parse(y) {
            return match st.rules[&(self.m, n)].prev[&Th(i)] {
                Th(k) => Some(st.theta(n, j, k)),
                _ => st.old[self.m].pre(&st.alpha(n, j)),
            };
        }
        let x = st.old[self.m].pre(y)?;
        match st.plan.slot_of(&x) {
            Some((n, j)) => match st.rules[&(self.m, n)].prev[&Exit] {
                Th(k) => Some(st.theta(n, j, k)),
                _ => unreachable!(),
            },
            None => Some(x),
        }
    }
}

struct Blocks {
    st: Arc<Stage>,
    target: bool,
}

impl Blocks {
    fn id(&self, n: u64, j: u64) -> CycleId {
        CycleId(Element::tag(&self.st.label, Element::cell(n as i64, j as i64)))
    }

    fn unid(&self, id: &CycleId) -> (u64, u64) {
        let (n, j) = id.0.untag(&self.st.label).and_then(Element::as_cell).unwrap();
        (n as u64, j as u64)
    }
}

impl NewCycles for Blocks {
    fn count(&self, class: CycleClass) -> ExtNat {
        match class {
            CycleClass::Finite(n) if self.target => {
                self.st.blocks.iter().find(|(m, _)| *m == n).map_or(ExtNat::ZERO, |(_, k)| *k)
            }
            _ => ExtNat::ZERO,
        }
    }

    fn is_new(&self, id: &CycleId) -> bool {
        self.target && id.0.untag(&self.st.label).is_some()
    }

    fn class(&self, id: &CycleId) -> CycleClass {
        CycleClass::Finite(self.unid(id).0)
    }

    fn ordinal(&self, id: &CycleId) -> u64 {
        self.unid(id).1
    }

    fn id_at(&self, class: CycleClass, j: u64) -> CycleId {
        match class {
            CycleClass::Finite(n) => self.id(n, j),
            _ => unreachable!(),
        }
    }

    fn theta_cycle(&self, x: &Element) -> Option<CycleId> {
        let (n, j, i) = self.st.parse(x)?;
        (self.target && i > n).then(|| self.id(n, j))
    }

    fn position(&self, x: &Element) -> i64 {
        let (n, _, i) = self.st.parse(x).unwrap();
        self.st.cycle[&n].iter().position(|&k| k == i).unwrap() as i64
    }

    fn element_at(&self, id: &CycleId, p: i64) -> Element {
        let (n, j) = self.unid(id);
        let i = self.st.cycle[&n][p.rem_euclid(n as i64) as usize];
        self.st.theta(n, j, i)
    }
}

/// Adds `K_n` new `n`-cycles to the target map for every `n`.
pub fn add_finite_cycles(
    state: &FactorState,
    target: Target,
    k: &BTreeMap<u64, ExtNat>,
) -> Result<FactorState, Error> {
    if k.keys().any(|&n| n == 0) {
        return Err(Error::InvalidK("cycle lengths must be positive".into()));
    }
    let blocks: Vec<(u64, ExtNat)> = k.iter().filter(|(_, c)| !c.is_zero()).map(|(n, c)| (*n, *c)).collect();
    if blocks.is_empty() {
        return Ok(state.clone());
    }
    let label = state.next_label();
    let plan = select_conflict_free(state, Layout::Blocks(blocks.clone()));
    let t = match target {
        Target::F => 0,
        Target::G => 1,
        Target::H => 2,
    };
    let mut rules = HashMap::new();
    let mut cycle = HashMap::new();
    for &(n, _) in &blocks {
        for m in 0..3 {
            let r = block_rules(target, m, n);
            let next: HashMap<Node, Node> = r.iter().copied().collect();
            let prev: HashMap<Node, Node> = r.iter().map(|&(a, b)| (b, a)).collect();
            rules.insert((m, n), Rules { next, prev });
        }
        let next = &rules[&(t, n)].next;
        let mut order = vec![n + 1];
        while let Th(i) = next[&Th(*order.last().unwrap())] {
            if i == n + 1 {
                break;
            }
            order.push(i);
        }
        cycle.insert(n, order);
    }

    let index = Carrier::sum(
        blocks
            .iter()
            .map(|&(n, c)| {
                let slots = match c {
                    ExtNat::Finite(c) => Carrier::range(0, c as i64 - 1),
                    ExtNat::Omega => Carrier::nat(),
                };
                let nj = Carrier::product(&Carrier::range(n as i64, n as i64), &slots);
                Carrier::product(&nj, &Carrier::range(1, 2 * n as i64))
            })
            .collect(),
    );
    let kept = Carrier::exclude(state.carrier(), Arc::new(plan.clone()), &label);
    let carrier = Carrier::adjoin_tagged(&kept, &label, &index)?;

    let st = Arc::new(Stage { label: label.clone(), blocks, plan: plan.clone(), old: state.maps(), rules, cycle });
    let w = &state.witness;
    let wid = [&w.cycle_f, &w.cycle_g, &w.cycle_h];
    let maps: Vec<Injection> = (0..3)
        .map(|m| {
            let core: Arc<dyn MapCore> = Arc::new(BlockMap { st: st.clone(), m });
            let old = state.maps()[m].cert().unwrap().clone();
            let classes: Vec<CycleClass> = st.blocks.iter().map(|(n, _)| CycleClass::Finite(*n)).collect();
            let new = Arc::new(Blocks { st: st.clone(), target: m == t });
            let cert = SurgeryCert::build(old, core.clone(), &label, Some(wid[m].clone()), new, &classes);
            Injection::new(carrier.clone(), core, serde_json::Value::Null).with_certificate(Arc::new(cert))
        })
        .collect();
    let mut history = state.history.clone();
    history.push(Step::AddFiniteCycles { target, k: k.clone(), label });
    let [f, g, h]: [Injection; 3] = maps.try_into().unwrap();
    let witness = TripleWitness { sigma: plan.reserved(), ..w.clone() };
    Ok(FactorState { f, g, h, witness, history }.described())
}
