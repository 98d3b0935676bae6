//! Piecewise affine maps on integer atoms and integer cells.
//!
//! A clause applies when every coordinate satisfies its guard, and then sends
//! the coordinate vector `x` to `Ax + b` for a unimodular `A`. The first
//! matching clause wins.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::carrier::Carrier;
use crate::element::Element;
use crate::error::Error;
use crate::injection::Injection;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bound {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<i64>,
    /// `(modulus, residue)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub congruent: Option<(i64, i64)>,
}

impl Bound {
    pub fn any() -> Self {
        Bound::default()
    }

    pub fn eq(v: i64) -> Self {
        Bound { min: Some(v), max: Some(v), congruent: None }
    }

    pub fn ge(v: i64) -> Self {
        Bound { min: Some(v), ..Bound::default() }
    }

    pub fn le(v: i64) -> Self {
        Bound { max: Some(v), ..Bound::default() }
    }

    pub fn between(lo: i64, hi: i64) -> Self {
        Bound { min: Some(lo), max: Some(hi), congruent: None }
    }

    pub fn even(self) -> Self {
        Bound { congruent: Some((2, 0)), ..self }
    }

    pub fn odd(self) -> Self {
        Bound { congruent: Some((2, 1)), ..self }
    }

    pub fn holds(&self, v: i64) -> bool {
        self.min.is_none_or(|m| v >= m)
            && self.max.is_none_or(|m| v <= m)
            && self.congruent.is_none_or(|(m, r)| v.rem_euclid(m) == r)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Clause {
    pub guard: Vec<Bound>,
    pub matrix: Vec<Vec<i64>>,
    pub offset: Vec<i64>,
}

impl Clause {
    pub fn new(guard: Vec<Bound>, matrix: Vec<Vec<i64>>, offset: Vec<i64>) -> Self {
        Clause { guard, matrix, offset }
    }

    fn arity(&self) -> usize {
        self.guard.len()
    }

    fn act(&self, x: &[i64]) -> Vec<i64> {
        self.matrix
            .iter()
            .zip(&self.offset)
            .map(|(row, b)| row.iter().zip(x).map(|(a, v)| a * v).sum::<i64>() + b)
            .collect()
    }

    fn det(&self) -> i64 {
        match self.arity() {
            1 => self.matrix[0][0],
            _ => self.matrix[0][0] * self.matrix[1][1] - self.matrix[0][1] * self.matrix[1][0],
        }
    }

    /// `A⁻¹(y - b)`; exact because `A` is unimodular.
    fn unact(&self, y: &[i64]) -> Vec<i64> {
        let d = self.det();
        let z: Vec<i64> = y.iter().zip(&self.offset).map(|(v, b)| v - b).collect();
        match self.arity() {
            1 => vec![z[0] * d],
            _ => {
                let m = &self.matrix;
                vec![d * (m[1][1] * z[0] - m[0][1] * z[1]), d * (-m[1][0] * z[0] + m[0][0] * z[1])]
            }
        }
    }

    fn check(&self) -> Result<(), Error> {
        let n = self.arity();
        let shape_ok = (n == 1 || n == 2)
            && self.matrix.len() == n
            && self.matrix.iter().all(|r| r.len() == n)
            && self.offset.len() == n;
        if !shape_ok || self.det().abs() != 1 {
            return Err(Error::Malformed(format!("piecewise clause must be a unimodular affine map: {self:?}")));
        }
        Ok(())
    }
}

fn coords(x: &Element, arity: usize) -> Option<Vec<i64>> {
    match arity {
        1 => x.as_atom().map(|k| vec![k]),
        _ => x.as_cell().map(|(i, j)| vec![i, j]),
    }
}

fn element(v: &[i64]) -> Element {
    match v {
        [k] => Element::Atom(*k),
        [i, j] => Element::cell(*i, *j),
        _ => unreachable!(),
    }
}

#[derive(Clone, Debug)]
pub struct Piecewise {
    carrier: Carrier,
    arity: usize,
    clauses: Vec<Clause>,
}

impl Piecewise {
    pub fn new(carrier: Carrier, clauses: Vec<Clause>) -> Result<Self, Error> {
        let arity = clauses.first().map_or(1, Clause::arity);
        for c in &clauses {
            c.check()?;
            if c.arity() != arity {
                return Err(Error::Malformed("piecewise clauses disagree on arity".into()));
            }
        }
        Ok(Piecewise { carrier, arity, clauses })
    }

    /// # Panics
    ///
    /// Panics if no clause covers `x`.
    pub fn apply(&self, x: &Element) -> Element {
        let v = coords(x, self.arity).unwrap_or_else(|| panic!("{x} has the wrong shape"));
        let c = self
            .clauses
            .iter()
            .find(|c| c.guard.iter().zip(&v).all(|(g, k)| g.holds(*k)))
            .unwrap_or_else(|| panic!("no clause covers {x}"));
        element(&c.act(&v))
    }

    pub fn preimage(&self, y: &Element) -> Option<Element> {
        let v = coords(y, self.arity)?;
        self.clauses.iter().find_map(|c| {
            let x = c.unact(&v);
            let guarded = c.guard.iter().zip(&x).all(|(g, k)| g.holds(*k));
            let xe = element(&x);
            (guarded && self.carrier.contains(&xe) && &self.apply(&xe) == y).then_some(xe)
        })
    }

    pub fn description(&self) -> Value {
        json!({"kind": "piecewise", "carrier": self.carrier.description(), "clauses": self.clauses})
    }

    pub fn from_description(v: &Value) -> Result<Self, Error> {
        let carrier = Carrier::from_description(
            v.get("carrier").ok_or_else(|| Error::Malformed("piecewise map without carrier".into()))?,
        )?;
        let clauses: Vec<Clause> = serde_json::from_value(v.get("clauses").cloned().unwrap_or(Value::Null))
            .map_err(|e| Error::Malformed(format!("piecewise clauses: {e}")))?;
        Self::new(carrier, clauses)
    }

    pub fn into_injection(self) -> Injection {
        let desc = self.description();
        let carrier = self.carrier.clone();
        let (a, p) = (self.clone(), self);
        Injection::from_fns(carrier, move |x| a.apply(x), move |y| p.preimage(y), desc)
    }
}
