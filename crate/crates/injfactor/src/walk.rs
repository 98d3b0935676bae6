use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::element::Element;
use crate::injection::MapCore;

const STEP_LIMIT: usize = 20_000_000;

/// Memoized positions along one infinite cycle, discovered by walking the map
/// from the cycle's anchor. Callers must only ask about elements that lie on
/// the cycle.
pub(crate) struct Walker {
    map: Arc<dyn MapCore>,
    open: bool,
    table: Mutex<Table>,
}

struct Table {
    ahead: Vec<Element>,
    behind: Vec<Element>,
    index: HashMap<Element, i64>,
}

impl Walker {
    pub(crate) fn new(map: Arc<dyn MapCore>, anchor: Element, open: bool) -> Self {
        let mut index = HashMap::new();
        index.insert(anchor.clone(), 0);
        Walker {
            map,
            open,
            table: Mutex::new(Table { ahead: vec![anchor], behind: Vec::new(), index }),
        }
    }

    pub(crate) fn position(&self, x: &Element) -> i64 {
        let mut t = self.table.lock().unwrap();
        if let Some(&p) = t.index.get(x) {
            return p;
        }
        for _ in 0..STEP_LIMIT {
            let p = self.extend_ahead(&mut t);
            if t.ahead.last() == Some(x) {
                return p;
            }
            if self.open {
                let q = self.extend_behind(&mut t);
                if t.behind.last() == Some(x) {
                    return q;
                }
            }
        }
        panic!("{x} not reached on the cycle within {STEP_LIMIT} steps");
    }

    pub(crate) fn element(&self, p: i64) -> Element {
        let mut t = self.table.lock().unwrap();
        if p >= 0 {
            while t.ahead.len() as i64 <= p {
                self.extend_ahead(&mut t);
            }
            t.ahead[p as usize].clone()
        } else {
            assert!(self.open, "negative position on a forward cycle");
            let k = (-p) as usize;
            while t.behind.len() < k {
                self.extend_behind(&mut t);
            }
            t.behind[k - 1].clone()
        }
    }

    fn extend_ahead(&self, t: &mut Table) -> i64 {
        let next = self.map.apply(t.ahead.last().unwrap());
        let p = t.ahead.len() as i64;
        t.index.insert(next.clone(), p);
        t.ahead.push(next);
        p
    }

    fn extend_behind(&self, t: &mut Table) -> i64 {
        let from = t.behind.last().unwrap_or(&t.ahead[0]);
        let prev = self.map.preimage(from).expect("open cycle element without preimage");
        let p = -(t.behind.len() as i64) - 1;
        t.index.insert(prev.clone(), p);
        t.behind.push(prev);
        p
    }
}
