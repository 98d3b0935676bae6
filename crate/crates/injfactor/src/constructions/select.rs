//! Greedy conflict-free choice of surgery sites from a witness stream.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex};

use crate::cardinal::{ExtNat, Omega};
use crate::carrier::{Carrier, ElementSet};
use crate::element::Element;
use crate::error::Error;
use crate::injection::{CycleClass, CycleId, Injection};

const SCAN_LIMIT: usize = 50_000_000;

/// An infinite rank-ordered stream of elements with decidable membership.
pub trait Sigma: Send + Sync {
    fn contains(&self, x: &Element) -> bool;
    fn nth(&self, k: usize) -> Element;
}

/// Members of a carrier lying on three given cycles.
pub(crate) struct CycleIntersection {
    carrier: Carrier,
    maps: [Injection; 3],
    ids: [CycleId; 3],
    found: Mutex<Found>,
}

#[derive(Default)]
struct Found {
    next: u64,
    seen: HashSet<Element>,
    items: Vec<Element>,
}

impl CycleIntersection {
    pub(crate) fn new(carrier: Carrier, maps: [Injection; 3], ids: [CycleId; 3]) -> Self {
        CycleIntersection { carrier, maps, ids, found: Mutex::default() }
    }
}

impl CycleIntersection {
    /// The `t`-th candidate: the three cycles are walked in turn, each at
    /// positions `0, 1, 2, ...` if forward and `0, 1, -1, 2, -2, ...` if open.
    fn candidate(&self, t: u64) -> Element {
        let i = (t % 3) as usize;
        let t = t / 3;
        let cert = self.maps[i].certificate().unwrap();
        let id = &self.ids[i];
        let p = match cert.class_of(id) {
            CycleClass::Open if t % 2 == 0 => -((t / 2) as i64),
            CycleClass::Open => t.div_ceil(2) as i64,
            _ => t as i64,
        };
        cert.element_at(id, p)
    }
}

impl Sigma for CycleIntersection {
    fn contains(&self, x: &Element) -> bool {
        self.carrier.contains(x)
            && self.maps.iter().zip(&self.ids).all(|(m, id)| &m.certificate().unwrap().cycle_of(x) == id)
    }

    fn nth(&self, k: usize) -> Element {
        let mut st = self.found.lock().unwrap();
        while st.items.len() <= k {
            let x = self.candidate(st.next);
            st.next += 1;
            if !st.seen.contains(&x) && self.contains(&x) {
                st.seen.insert(x.clone());
                st.items.push(x);
            }
        }
        st.items[k].clone()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pick {
    Chosen(u64),
    Reserved(u64),
    Rejected,
}

struct Scan {
    sigma: Arc<dyn Sigma>,
    maps: [Injection; 3],
    excluded: Vec<Element>,
    state: Mutex<ScanState>,
}

#[derive(Default)]
struct ScanState {
    cursor: usize,
    blocked: HashSet<Element>,
    chosen: Vec<Element>,
    reserved: Vec<Element>,
    picks: HashMap<Element, Pick>,
}

impl Scan {
    fn step(&self, st: &mut ScanState) {
        if st.cursor >= SCAN_LIMIT {
            panic!("{}", Error::WitnessExhausted);
        }
        let x = self.sigma.nth(st.cursor);
        st.cursor += 1;
        let pick = if self.excluded.contains(&x) || st.blocked.contains(&x) {
            Pick::Rejected
        } else {
            for m in &self.maps {
                st.blocked.insert(m.eval(&x));
                if let Some(p) = m.pre(&x) {
                    st.blocked.insert(p);
                }
            }
            if (st.chosen.len() + st.reserved.len()) % 2 == 0 {
                st.chosen.push(x.clone());
                Pick::Chosen(st.chosen.len() as u64 - 1)
            } else {
                st.reserved.push(x.clone());
                Pick::Reserved(st.reserved.len() as u64 - 1)
            }
        };
        st.picks.insert(x, pick);
    }

    fn pick(&self, x: &Element) -> Option<Pick> {
        if !self.sigma.contains(x) {
            return None;
        }
        let mut st = self.state.lock().unwrap();
        while !st.picks.contains_key(x) {
            self.step(&mut st);
        }
        st.picks.get(x).copied()
    }

    fn chosen(&self, m: u64) -> Element {
        let mut st = self.state.lock().unwrap();
        while st.chosen.len() as u64 <= m {
            self.step(&mut st);
        }
        st.chosen[m as usize].clone()
    }

    fn reserved(&self, m: u64) -> Element {
        let mut st = self.state.lock().unwrap();
        while st.reserved.len() as u64 <= m {
            self.step(&mut st);
        }
        st.reserved[m as usize].clone()
    }
}

struct Reserved(Arc<Scan>);

impl Sigma for Reserved {
    fn contains(&self, x: &Element) -> bool {
        matches!(self.0.pick(x), Some(Pick::Reserved(_)))
    }

    fn nth(&self, k: usize) -> Element {
        self.0.reserved(k as u64)
    }
}

/// How chosen elements are dealt out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Layout {
    /// One element per `(n, j)` with `j < K_n`, for finite-cycle surgery.
    Blocks(Vec<(u64, ExtNat)>),
    /// Elements `α^c_i`, `c < K`, `i ≥ 1`, for open- and forward-cycle surgery.
    Lines(ExtNat),
}

fn pair_u64(a: u64, b: u64) -> u64 {
    (a + b) * (a + b + 1) / 2 + b
}

fn unpair_u64(z: u64) -> (u64, u64) {
    let w = (((8 * z + 1) as f64).sqrt() as u64).saturating_sub(1) / 2;
    let w = (w.saturating_sub(2)..w + 3).filter(|w| w * (w + 1) / 2 <= z).max().unwrap();
    let b = z - w * (w + 1) / 2;
    (w - b, b)
}

impl Layout {
    pub fn total(&self) -> ExtNat {
        match self {
            Layout::Blocks(b) => b.iter().fold(ExtNat::ZERO, |acc, (_, k)| crate::cardinal::ext_add(acc, *k)),
            Layout::Lines(k) if k.is_zero() => ExtNat::ZERO,
            Layout::Lines(_) => Omega,
        }
    }

    /// Slot of the `m`-th chosen element.
    pub fn slot(&self, m: u64) -> Option<(u64, u64)> {
        if !self.total().exceeds(m) {
            return None;
        }
        match self {
            Layout::Blocks(blocks) => {
                let mut m = m;
                for r in 0.. {
                    let live: Vec<u64> = blocks.iter().filter(|(_, k)| k.exceeds(r)).map(|(n, _)| *n).collect();
                    if m < live.len() as u64 {
                        return Some((live[m as usize], r));
                    }
                    m -= live.len() as u64;
                }
                unreachable!()
            }
            Layout::Lines(ExtNat::Finite(k)) => Some((m % k, m / k + 1)),
            Layout::Lines(Omega) => {
                let (c, i) = unpair_u64(m);
                Some((c, i + 1))
            }
        }
    }

    /// Inverse of [`Layout::slot`].
    pub fn index(&self, a: u64, b: u64) -> u64 {
        match self {
            Layout::Blocks(blocks) => {
                let earlier_rounds: u64 = blocks.iter().map(|(_, k)| k.finite().map_or(b, |k| k.min(b))).sum();
                let this_round = blocks.iter().filter(|(n, k)| *n < a && k.exceeds(b)).count() as u64;
                earlier_rounds + this_round
            }
            Layout::Lines(ExtNat::Finite(k)) => (b - 1) * k + a,
            Layout::Lines(Omega) => pair_u64(a, b - 1),
        }
    }
}

/// The elements chosen for one surgery, together with the reserved stream
/// that becomes the next witness.
#[derive(Clone)]
pub struct SelectionPlan {
    scan: Arc<Scan>,
    layout: Layout,
}

impl SelectionPlan {
    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    /// The `m`-th chosen element.
    pub fn chosen(&self, m: u64) -> Element {
        self.scan.chosen(m)
    }

    /// Element assigned to slot `(a, b)`.
    pub fn element_for(&self, a: u64, b: u64) -> Element {
        self.chosen(self.layout.index(a, b))
    }

    /// Slot of `x` if `x` was chosen and assigned.
    pub fn slot_of(&self, x: &Element) -> Option<(u64, u64)> {
        match self.scan.pick(x)? {
            Pick::Chosen(m) => self.layout.slot(m),
            _ => None,
        }
    }

    /// The reserved half of the accepted elements.
    pub fn reserved(&self) -> Arc<dyn Sigma> {
        Arc::new(Reserved(self.scan.clone()))
    }

    /// The first `n` accepted elements that are assigned to slots.
    pub fn assigned(&self, n: usize) -> Vec<Element> {
        (0..n as u64).take_while(|&m| self.layout.total().exceeds(m)).map(|m| self.chosen(m)).collect()
    }
}

impl ElementSet for SelectionPlan {
    fn contains(&self, e: &Element) -> bool {
        self.slot_of(e).is_some()
    }
}

/// Greedy scan of the witness stream of `state` in stream order.
///
/// An element is accepted unless it is position 0 of one of the three witness
/// cycles or an image or preimage, under `f`, `g` or `h`, of an earlier
/// acceptance. Accepted elements alternate between being chosen and being
/// reserved.
pub fn select_conflict_free(state: &super::FactorState, layout: Layout) -> SelectionPlan {
    let w = &state.witness;
    let excluded = vec![
        state.f.certificate().unwrap().anchor(&w.cycle_f),
        state.g.certificate().unwrap().anchor(&w.cycle_g),
        state.h.certificate().unwrap().anchor(&w.cycle_h),
    ];
    let scan = Scan {
        sigma: w.sigma.clone(),
        maps: [state.f.clone(), state.g.clone(), state.h.clone()],
        excluded,
        state: Mutex::new(ScanState::default()),
    };
    SelectionPlan { scan: Arc::new(scan), layout }
}
