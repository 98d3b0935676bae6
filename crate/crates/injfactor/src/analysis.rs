//! Budgeted orbit tracing, window censuses and certificate checks.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use crate::element::{rank, Element};
use crate::error::Error;
use crate::injection::{CycleClass, CycleId, Injection};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Finite { length: u64 },
    Forward { initial: Element, offset: u64 },
    OpenCertified { cycle: CycleId },
    Inconclusive { budget: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitReport {
    pub subject: Element,
    #[serde(flatten)]
    pub verdict: Verdict,
    pub trace_len: usize,
    /// Minimal-rank element seen on a closed finite orbit.
    #[serde(skip)]
    orbit_min: Option<Element>,
}

pub fn trace_orbit(f: &Injection, x: &Element, budget: usize) -> Result<OrbitReport, Error> {
    if !f.carrier().contains(x) {
        return Err(Error::OutOfCarrier(x.clone()));
    }
    let cert = f.certificate();
    let loc = cert.map(|c| c.locate(x));
    let contradiction = |msg: String| Err(Error::CertificateContradiction(x.clone(), msg));

    let mut steps = 0;
    let mut cur = x.clone();
    let mut min = x.clone();
    for n in 1..=budget {
        cur = f.eval(&cur);
        steps += 1;
        if rank(&cur) < rank(&min) {
            min = cur.clone();
        }
        if &cur == x {
            if let Some(l) = &loc {
                if l.class != CycleClass::Finite(n as u64) {
                    return contradiction(format!("closes after {n} steps but certified {}", l.class));
                }
            }
            let verdict = Verdict::Finite { length: n as u64 };
            return Ok(OrbitReport { subject: x.clone(), verdict, trace_len: steps, orbit_min: Some(min) });
        }
    }

    let mut cur = x.clone();
    for offset in 0..=budget as u64 {
        match f.pre(&cur) {
            None => {
                if let Some(l) = &loc {
                    if l.class != CycleClass::Forward || l.position != offset as i64 {
                        return contradiction(format!(
                            "initial element {offset} steps back but certified {} at {}",
                            l.class, l.position
                        ));
                    }
                }
                let verdict = Verdict::Forward { initial: cur, offset };
                return Ok(OrbitReport { subject: x.clone(), verdict, trace_len: steps, orbit_min: None });
            }
            Some(p) => {
                steps += 1;
                cur = p;
            }
        }
    }

    if let (Some(c), Some(l)) = (cert, loc) {
        let next = c.locate(&f.eval(x));
        let expected = match l.class {
            CycleClass::Finite(n) => (l.position + 1).rem_euclid(n as i64),
            _ => l.position + 1,
        };
        if next.cycle != l.cycle || next.position != expected {
            return contradiction(format!("successor located at {} {}", next.cycle, next.position));
        }
        if l.class == CycleClass::Open {
            let verdict = Verdict::OpenCertified { cycle: l.cycle };
            return Ok(OrbitReport { subject: x.clone(), verdict, trace_len: steps, orbit_min: None });
        }
    }
    Ok(OrbitReport { subject: x.clone(), verdict: Verdict::Inconclusive { budget }, trace_len: steps, orbit_min: None })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct WindowCensus {
    pub window: usize,
    /// Distinct `n`-cycles seen, by length.
    pub finite: BTreeMap<u64, u64>,
    pub forward: u64,
    pub open: u64,
    pub inconclusive: u64,
}

/// Traces the first `n` carrier elements and counts distinct cycles.
///
/// Finite orbits are grouped by their minimal-rank element, forward orbits by
/// their initial element and certified open orbits by certificate id.
pub fn window_census(f: &Injection, n: usize, budget: usize) -> WindowCensus {
    let mut finite: HashMap<u64, HashSet<Element>> = HashMap::new();
    let mut forward = HashSet::new();
    let mut open = HashSet::new();
    let mut inconclusive = 0;
    for x in f.carrier().window(n) {
        let Ok(r) = trace_orbit(f, &x, budget) else {
            inconclusive += 1;
            continue;
        };
        match r.verdict {
            Verdict::Finite { length } => {
                finite.entry(length).or_default().insert(r.orbit_min.unwrap());
            }
            Verdict::Forward { initial, .. } => {
                forward.insert(initial);
            }
            Verdict::OpenCertified { cycle } => {
                open.insert(cycle);
            }
            Verdict::Inconclusive { .. } => inconclusive += 1,
        }
    }
    WindowCensus {
        window: n,
        finite: finite.into_iter().map(|(k, s)| (k, s.len() as u64)).collect(),
        forward: forward.len() as u64,
        open: open.len() as u64,
        inconclusive,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub element: Element,
    pub law: String,
}

/// Checks the certificate laws on the first `n` carrier elements.
pub fn check_certificate(f: &Injection, n: usize) -> Vec<Violation> {
    check_certificate_at(f, &f.carrier().window(n))
}

/// Checks the certificate laws at the given carrier elements.
pub fn check_certificate_at(f: &Injection, points: &[Element]) -> Vec<Violation> {
    let Some(c) = f.certificate() else {
        return vec![];
    };
    let census = c.census();
    let mut out = Vec::new();
    for x in points.iter().cloned() {
        let mut bad = |law: String| out.push(Violation { element: x.clone(), law });
        let l = c.locate(&x);
        if c.cycle_of(&x) != l.cycle {
            bad(format!("cycle_of disagrees with locate ({} vs {})", c.cycle_of(&x), l.cycle));
        }
        if c.class_of(&l.cycle) != l.class {
            bad(format!("class_of {} disagrees with locate {}", c.class_of(&l.cycle), l.class));
        }
        if c.element_at(&l.cycle, l.position) != x {
            bad(format!("element_at({}, {}) != x", l.cycle, l.position));
        }
        let k = c.ordinal(&l.cycle);
        let count = match l.class {
            CycleClass::Finite(m) => census.count_finite(m),
            CycleClass::Forward => census.fwd,
            CycleClass::Open => census.open,
        };
        if !count.exceeds(k) {
            bad(format!("ordinal {k} out of range for {} cycles of class {}", count, l.class));
        } else if c.cycle_at(l.class, k) != l.cycle {
            bad(format!("cycle_at({}, {k}) != {}", l.class, l.cycle));
        }
        let y = f.eval(&x);
        let ly = c.locate(&y);
        let pre = f.pre(&x);
        match l.class {
            CycleClass::Finite(m) => {
                if ly.cycle != l.cycle || ly.position != (l.position + 1).rem_euclid(m as i64) {
                    bad("successor position law".into());
                }
                if !(0..m as i64).contains(&l.position) {
                    bad(format!("position {} outside 0..{m}", l.position));
                }
                let mut z = y.clone();
                for step in 1..m {
                    if z == x {
                        bad(format!("closes after {step} < {m} steps"));
                        break;
                    }
                    z = f.eval(&z);
                }
                if z != x {
                    bad(format!("does not close after {m} steps"));
                }
            }
            CycleClass::Forward => {
                if ly.cycle != l.cycle || ly.position != l.position + 1 {
                    bad("successor position law".into());
                }
                if l.position < 0 {
                    bad("negative position on a forward cycle".into());
                }
                if (l.position == 0) != pre.is_none() {
                    bad(format!("position {} but preimage {:?}", l.position, pre));
                }
            }
            CycleClass::Open => {
                if ly.cycle != l.cycle || ly.position != l.position + 1 {
                    bad("successor position law".into());
                }
                if pre.is_none() {
                    bad("open-cycle element without preimage".into());
                }
            }
        }
    }
    out
}

/// Number of the first `n` carrier elements without a preimage.
pub fn coimage_census(f: &Injection, n: usize) -> usize {
    f.carrier().window(n).iter().filter(|x| f.pre(x).is_none()).count()
}
