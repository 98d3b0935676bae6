//! The universal countable ground set.
//!
//! Every map in the crate acts on [`Element`]s: finite trees whose leaves are
//! integers, built with ordered pairs and labelled tags. A fixed bijection
//! [`rank`]/[`unrank`] between elements and the natural numbers gives every
//! subset a canonical enumeration order.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::Error;

/// Characters allowed in tag labels, in ascending ASCII order.
pub const LABEL_ALPHABET: &str = "0123456789_abcdefghijklmnopqrstuvwxyz";

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Atom(i64),
    Pair(Box<Element>, Box<Element>),
    Tag(String, Box<Element>),
}

impl Element {
    pub fn atom(k: i64) -> Self {
        Element::Atom(k)
    }

    pub fn pair(l: Element, r: Element) -> Self {
        Element::Pair(Box::new(l), Box::new(r))
    }

    /// Pair of two atoms, the shape used by the grid carriers.
    pub fn cell(i: i64, j: i64) -> Self {
        Element::pair(Element::Atom(i), Element::Atom(j))
    }

    /// # Panics
    ///
    /// Panics if `label` contains a character outside [`LABEL_ALPHABET`].
    pub fn tag(label: &str, inner: Element) -> Self {
        assert!(valid_label(label), "invalid tag label {label:?}");
        Element::Tag(label.to_string(), Box::new(inner))
    }

    pub fn as_atom(&self) -> Option<i64> {
        match self {
            Element::Atom(k) => Some(*k),
            _ => None,
        }
    }

    pub fn as_cell(&self) -> Option<(i64, i64)> {
        match self {
            Element::Pair(l, r) => Some((l.as_atom()?, r.as_atom()?)),
            _ => None,
        }
    }

    /// The inner element if `self` is a tag with the given label.
    pub fn untag(&self, label: &str) -> Option<&Element> {
        match self {
            Element::Tag(l, inner) if l == label => Some(inner),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Element::Atom(k) => json!(["atom", k]),
            Element::Pair(l, r) => json!(["pair", l.to_json(), r.to_json()]),
            Element::Tag(s, e) => json!(["tag", s, e.to_json()]),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self, Error> {
        let bad = || Error::Malformed(format!("not an element: {v}"));
        let arr = v.as_array().ok_or_else(bad)?;
        match (arr.first().and_then(Value::as_str), arr.len()) {
            (Some("atom"), 2) => Ok(Element::Atom(arr[1].as_i64().ok_or_else(bad)?)),
            (Some("pair"), 3) => Ok(Element::pair(
                Element::from_json(&arr[1])?,
                Element::from_json(&arr[2])?,
            )),
            (Some("tag"), 3) => {
                let label = arr[1].as_str().ok_or_else(bad)?;
                if !valid_label(label) {
                    return Err(bad());
                }
                Ok(Element::tag(label, Element::from_json(&arr[2])?))
            }
            _ => Err(bad()),
        }
    }

    /// Labels of every tag node inside the element.
    pub fn labels(&self, out: &mut Vec<String>) {
        match self {
            Element::Atom(_) => {}
            Element::Pair(l, r) => {
                l.labels(out);
                r.labels(out);
            }
            Element::Tag(s, e) => {
                out.push(s.clone());
                e.labels(out);
            }
        }
    }
}

pub fn valid_label(s: &str) -> bool {
    s.chars().all(|c| LABEL_ALPHABET.contains(c))
}

/// Cantor pairing `(a+b)(a+b+1)/2 + b`.
pub fn cantor_pair(a: &BigUint, b: &BigUint) -> BigUint {
    let s = a + b;
    (&s * (&s + 1u32)) / 2u32 + b
}

/// Inverse of [`cantor_pair`].
pub fn cantor_unpair(z: &BigUint) -> (BigUint, BigUint) {
    // w = floor((sqrt(8z+1)-1)/2)
    let disc: BigUint = z * 8u32 + 1u32;
    let w = (disc.sqrt() - 1u32) / 2u32;
    let t = (&w * (&w + 1u32)) / 2u32;
    let b = z - &t;
    let a = &w - &b;
    (a, b)
}

fn zigzag(k: i64) -> BigUint {
    if k >= 0 {
        BigUint::from(k as u64) * 2u32
    } else {
        BigUint::from(k.unsigned_abs()) * 2u32 - 1u32
    }
}

fn unzigzag(z: &BigUint) -> i64 {
    let half = (z / 2u32).to_i64().expect("atom index exceeds i64");
    if (z % 2u32).is_zero() {
        half
    } else {
        -half - 1
    }
}

/// Shortlex rank of a label over [`LABEL_ALPHABET`].
pub fn label_rank(s: &str) -> BigUint {
    let base = BigUint::from(LABEL_ALPHABET.len());
    let mut offset = BigUint::zero();
    let mut width = BigUint::one();
    for _ in 0..s.chars().count() {
        offset += &width;
        width *= &base;
    }
    let mut v = BigUint::zero();
    for c in s.chars() {
        let d = LABEL_ALPHABET.find(c).expect("invalid label character");
        v = v * &base + BigUint::from(d);
    }
    offset + v
}

pub fn label_unrank(n: &BigUint) -> String {
    let base = BigUint::from(LABEL_ALPHABET.len());
    let mut rest = n.clone();
    let mut width = BigUint::one();
    let mut len = 0usize;
    while rest >= width {
        rest -= &width;
        width *= &base;
        len += 1;
    }
    let alphabet: Vec<char> = LABEL_ALPHABET.chars().collect();
    let mut out = vec!['0'; len];
    for slot in out.iter_mut().rev() {
        let d = (&rest % &base).to_usize().unwrap();
        *slot = alphabet[d];
        rest /= &base;
    }
    out.into_iter().collect()
}

/// Position of `e` in the canonical enumeration of all elements.
pub fn rank(e: &Element) -> BigUint {
    match e {
        Element::Atom(k) => zigzag(*k) * 3u32,
        Element::Pair(l, r) => cantor_pair(&rank(l), &rank(r)) * 3u32 + 1u32,
        Element::Tag(s, inner) => cantor_pair(&label_rank(s), &rank(inner)) * 3u32 + 2u32,
    }
}

/// Inverse of [`rank`].
///
/// # Panics
///
/// Panics if the result would contain an atom outside the `i64` range.
pub fn unrank(n: &BigUint) -> Element {
    let q = n / 3u32;
    match (n % 3u32).to_u8().unwrap() {
        0 => Element::Atom(unzigzag(&q)),
        1 => {
            let (a, b) = cantor_unpair(&q);
            Element::pair(unrank(&a), unrank(&b))
        }
        _ => {
            let (a, b) = cantor_unpair(&q);
            Element::Tag(label_unrank(&a), Box::new(unrank(&b)))
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Atom(k) => write!(f, "{k}"),
            Element::Pair(l, r) => write!(f, "({l},{r})"),
            Element::Tag(s, e) => write!(f, "{s}:{e}"),
        }
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Element {
    type Err = Error;

    /// Parses the text form produced by `Display`: `5`, `(1,-2)`, `theta:(0,3)`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let mut p = TextParser { s: s.as_bytes(), i: 0 };
        let e = p.element()?;
        p.skip_ws();
        if p.i != p.s.len() {
            return Err(Error::Malformed(format!("trailing input in element {s:?}")));
        }
        Ok(e)
    }
}

/// Splits a comma-separated list of text-form elements at top-level commas.
pub fn parse_element_list(s: &str) -> Result<Vec<Element>, Error> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim().parse()?);
                start = i + 1;
            }
            _ => {}
        }
    }
    if !s[start..].trim().is_empty() {
        out.push(s[start..].trim().parse()?);
    }
    Ok(out)
}

struct TextParser<'a> {
    s: &'a [u8],
    i: usize,
}

impl TextParser<'_> {
    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn err(&self) -> Error {
        Error::Malformed(format!(
            "cannot parse element near byte {} of {:?}",
            self.i,
            String::from_utf8_lossy(self.s)
        ))
    }

    fn expect(&mut self, c: u8) -> Result<(), Error> {
        self.skip_ws();
        if self.s.get(self.i) == Some(&c) {
            self.i += 1;
            Ok(())
        } else {
            Err(self.err())
        }
    }

    fn element(&mut self) -> Result<Element, Error> {
        self.skip_ws();
        match self.s.get(self.i) {
            Some(b'(') => {
                self.i += 1;
                let l = self.element()?;
                self.expect(b',')?;
                let r = self.element()?;
                self.expect(b')')?;
                Ok(Element::pair(l, r))
            }
            Some(b'-') | Some(b'0'..=b'9') => {
                let start = self.i;
                self.i += 1;
                while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                    self.i += 1;
                }
                let word = std::str::from_utf8(&self.s[start..self.i]).unwrap();
                if self.s.get(self.i) == Some(&b':') || self.s.get(self.i).is_some_and(|c| LABEL_ALPHABET.as_bytes().contains(c)) {
                    self.i = start;
                    return self.tagged();
                }
                word.parse().map(Element::Atom).map_err(|_| self.err())
            }
            Some(_) => self.tagged(),
            None => Err(self.err()),
        }
    }

    fn tagged(&mut self) -> Result<Element, Error> {
        let start = self.i;
        while self.i < self.s.len() && LABEL_ALPHABET.as_bytes().contains(&self.s[self.i]) {
            self.i += 1;
        }
        let label = std::str::from_utf8(&self.s[start..self.i]).unwrap().to_string();
        if self.s.get(self.i) != Some(&b':') {
            return Err(self.err());
        }
        self.i += 1;
        let inner = self.element()?;
        Ok(Element::Tag(label, Box::new(inner)))
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        Element::from_json(&v).map_err(serde::de::Error::custom)
    }
}
