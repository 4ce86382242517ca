//! Ordinals below ε₀ in Cantor normal form.
//!
//! An [`Ordinal`] is a strictly decreasing list of terms `ω^e·c` with
//! `c ≥ 1`. Values are immutable and cheap to compare; every constructor
//! returns a normalized value.
//!
//! Besides comparison the module provides the three pieces of structure the
//! rank-set construction needs:
//!
//! * [`Ordinal::predecessor`], which dispatches between successor and limit
//!   stages,
//! * [`Ordinal::fundamental_sequence`], the Wainer assignment
//!   `ω^(e+1)[n] = ω^e·n`, `ω^λ[n] = ω^(λ[n])`,
//! * [`enumerate_below`], a fixed injective enumeration of `{β : β < α}`.
//!
//! The enumeration is dovetailed by *size*: `size(0) = 0` and
//! `size(ω^e₁·c₁ + … + ω^e_k·c_k) = Σ (cᵢ + size(eᵢ))`. Stage `s` emits every
//! ordinal of size `s` below the bound in increasing order. Each stage is
//! finite and every ordinal has exactly one size, so the enumeration is
//! injective and exhausts the whole initial segment.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrdinalError {
    #[error("zero has no predecessor")]
    ZeroPredecessor,
    #[error("{0} is not a limit ordinal")]
    NotLimit(Ordinal),
    #[error("fundamental sequence index must be at least 1")]
    ZeroIndex,
    #[error("cannot parse ordinal {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// One Cantor-normal-form term `ω^exponent · coefficient`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub exponent: Ordinal,
    pub coefficient: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Ordinal {
    terms: Vec<Term>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn finite(n: u64) -> Self {
        if n == 0 {
            return Self::zero();
        }
        Ordinal {
            terms: vec![Term {
                exponent: Self::zero(),
                coefficient: n,
            }],
        }
    }

    pub fn omega() -> Self {
        Self::omega_pow(Self::finite(1))
    }

    /// `ω^e`.
    pub fn omega_pow(e: Ordinal) -> Self {
        Ordinal {
            terms: vec![Term {
                exponent: e,
                coefficient: 1,
            }],
        }
    }

    /// Builds `ω^e₁·c₁ + ω^e₂·c₂ + …` read as an ordinal sum, so terms that
    /// are followed by a larger one are absorbed.
    pub fn from_terms(terms: impl IntoIterator<Item = (Ordinal, u64)>) -> Self {
        terms
            .into_iter()
            .filter(|(_, c)| *c > 0)
            .fold(Self::zero(), |acc, (e, c)| {
                acc.add(&Ordinal {
                    terms: vec![Term {
                        exponent: e,
                        coefficient: c,
                    }],
                })
            })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.terms.iter().all(|t| t.exponent.is_zero())
    }

    pub fn as_finite(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [t] if t.exponent.is_zero() => Some(t.coefficient),
            _ => None,
        }
    }

    pub fn is_successor(&self) -> bool {
        self.terms.last().is_some_and(|t| t.exponent.is_zero())
    }

    pub fn is_limit(&self) -> bool {
        self.terms.last().is_some_and(|t| !t.exponent.is_zero())
    }

    /// Re-normalizes the term list; for values built through the public API
    /// this is the identity.
    pub fn normalize(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|t| (t.exponent.normalize(), t.coefficient)))
    }

    /// Ordinal addition `self + other`.
    pub fn add(&self, other: &Ordinal) -> Ordinal {
        let Some(lead) = other.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<Term> = self
            .terms
            .iter()
            .take_while(|t| t.exponent > lead.exponent)
            .cloned()
            .collect();
        let mut rest = other.terms.clone();
        if let Some(same) = self.terms.iter().find(|t| t.exponent == lead.exponent) {
            rest[0].coefficient += same.coefficient;
        }
        terms.extend(rest);
        Ordinal { terms }
    }

    pub fn successor(&self) -> Ordinal {
        self.add(&Self::finite(1))
    }

    /// Right multiplication by a natural number.
    pub fn mul_nat(&self, k: u64) -> Ordinal {
        if k == 0 || self.is_zero() {
            return Self::zero();
        }
        let mut terms = self.terms.clone();
        terms[0].coefficient *= k;
        Ordinal { terms }
    }

    /// `Some(a − 1)` for successors, `None` for limits.
    pub fn predecessor(&self) -> Result<Option<Ordinal>, OrdinalError> {
        let Some(last) = self.terms.last() else {
            return Err(OrdinalError::ZeroPredecessor);
        };
        if !last.exponent.is_zero() {
            return Ok(None);
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().expect("non-empty");
        if last.coefficient == 1 {
            terms.pop();
        } else {
            last.coefficient -= 1;
        }
        Ok(Some(Ordinal { terms }))
    }

    /// The `n`-th element (`n ≥ 1`) of the Wainer fundamental sequence.
    pub fn fundamental_sequence(&self, n: u64) -> Result<Ordinal, OrdinalError> {
        if !self.is_limit() {
            return Err(OrdinalError::NotLimit(self.clone()));
        }
        if n == 0 {
            return Err(OrdinalError::ZeroIndex);
        }
        let mut base = self.terms.clone();
        let last = base.last_mut().expect("limit is non-zero");
        let e = last.exponent.clone();
        if last.coefficient == 1 {
            base.pop();
        } else {
            last.coefficient -= 1;
        }
        let head = match e.predecessor().expect("exponent of a limit term is non-zero") {
            Some(d) => Ordinal {
                terms: vec![Term {
                    exponent: d,
                    coefficient: n,
                }],
            },
            None => Self::omega_pow(e.fundamental_sequence(n)?),
        };
        Ok(Ordinal { terms: base }.add(&head))
    }

    /// Dovetailing weight used by [`enumerate_below`].
    pub fn size(&self) -> u64 {
        self.terms.iter().map(|t| t.coefficient + t.exponent.size()).sum()
    }

    fn leading(&self) -> Option<&Term> {
        self.terms.first()
    }

    fn tail(&self) -> Ordinal {
        Ordinal {
            terms: self.terms.iter().skip(1).cloned().collect(),
        }
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let ord = a.exponent.cmp(&b.exponent).then(a.coefficient.cmp(&b.coefficient));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

/// Three-way comparison in ordinal order.
pub fn compare(a: &Ordinal, b: &Ordinal) -> Ordering {
    a.cmp(b)
}

/// All ordinals of exactly `size` below `bound`, ascending.
fn of_size_below(size: u64, bound: &Ordinal, memo: &mut HashMap<(u64, Ordinal), Vec<Ordinal>>) -> Vec<Ordinal> {
    let Some(lead) = bound.leading() else {
        return Vec::new();
    };
    if size == 0 {
        return vec![Ordinal::zero()];
    }
    if let Some(hit) = memo.get(&(size, bound.clone())) {
        return hit.clone();
    }
    let exp_bound = lead.exponent.successor();
    let tail = bound.tail();
    let mut out = Vec::new();
    for exp_size in 0..size {
        for e in of_size_below(exp_size, &exp_bound, memo) {
            for c in 1..=(size - exp_size) {
                let rest_bound = if e < lead.exponent || c < lead.coefficient {
                    Ordinal::omega_pow(e.clone())
                } else if c == lead.coefficient {
                    tail.clone()
                } else {
                    break;
                };
                for rest in of_size_below(size - exp_size - c, &rest_bound, memo) {
                    let mut terms = vec![Term {
                        exponent: e.clone(),
                        coefficient: c,
                    }];
                    terms.extend(rest.terms);
                    out.push(Ordinal { terms });
                }
            }
        }
    }
    out.sort();
    memo.insert((size, bound.clone()), out.clone());
    out
}

/// Lazy enumeration of `{β : β < bound}` in the documented dovetail order.
#[derive(Debug, Clone)]
pub struct BelowEnumerator {
    bound: Ordinal,
    stage: u64,
    buffer: std::vec::IntoIter<Ordinal>,
    memo: HashMap<(u64, Ordinal), Vec<Ordinal>>,
}

impl BelowEnumerator {
    pub fn new(bound: Ordinal) -> Self {
        BelowEnumerator {
            bound,
            stage: 0,
            buffer: Vec::new().into_iter(),
            memo: HashMap::new(),
        }
    }
}

impl Iterator for BelowEnumerator {
    type Item = Ordinal;

    fn next(&mut self) -> Option<Ordinal> {
        if self.bound.is_zero() {
            return None;
        }
        loop {
            if let Some(o) = self.buffer.next() {
                return Some(o);
            }
            // a finite bound n is exhausted after stage n - 1
            if let Some(n) = self.bound.as_finite() {
                if self.stage >= n {
                    return None;
                }
            }
            let batch = of_size_below(self.stage, &self.bound, &mut self.memo);
            self.stage += 1;
            self.buffer = batch.into_iter();
        }
    }
}

/// The first `count` elements of the fixed enumeration of `Γ(a)`.
pub fn enumerate_below(a: &Ordinal, count: usize) -> Vec<Ordinal> {
    BelowEnumerator::new(a.clone()).take(count).collect()
}

type PrefixCache = Mutex<HashMap<Ordinal, Vec<Ordinal>>>;

/// `enumerate_below(a, n + 1)[n]`, memoized per bound. Pure: the cache only
/// stores prefixes of the deterministic enumeration.
pub fn nth_below(a: &Ordinal, n: usize) -> Option<Ordinal> {
    static CACHE: OnceLock<PrefixCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    {
        let guard = cache.lock().expect("enumeration cache poisoned");
        if let Some(prefix) = guard.get(a) {
            if n < prefix.len() {
                return Some(prefix[n].clone());
            }
            if a.as_finite().is_some_and(|f| prefix.len() as u64 == f) {
                return None;
            }
        }
    }
    let want = (n + 1).max(64).next_power_of_two();
    let prefix = enumerate_below(a, want);
    let out = prefix.get(n).cloned();
    cache
        .lock()
        .expect("enumeration cache poisoned")
        .insert(a.clone(), prefix);
    out
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if t.exponent.is_zero() {
                write!(f, "{}", t.coefficient)?;
                continue;
            }
            if t.exponent == Ordinal::finite(1) {
                write!(f, "w")?;
            } else if t.exponent.as_finite().is_some() || t.exponent == Ordinal::omega() {
                write!(f, "w^{}", t.exponent)?;
            } else {
                write!(f, "w^({})", t.exponent)?;
            }
            if t.coefficient > 1 {
                write!(f, "*{}", t.coefficient)?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, reason: impl Into<String>) -> OrdinalError {
        OrdinalError::Parse {
            input: self.src.to_string(),
            reason: reason.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.bytes.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<Option<u64>, OrdinalError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Ok(None);
        }
        self.src[start..self.pos]
            .parse()
            .map(Some)
            .map_err(|_| self.err("integer out of range"))
    }

    fn expr(&mut self) -> Result<Ordinal, OrdinalError> {
        let mut acc = self.product()?;
        while self.eat(b'+') {
            acc = acc.add(&self.product()?);
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<Ordinal, OrdinalError> {
        let mut acc = self.power()?;
        while self.eat(b'*') {
            let k = self
                .number()?
                .ok_or_else(|| self.err("only multiplication by a natural number is supported"))?;
            acc = acc.mul_nat(k);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Ordinal, OrdinalError> {
        self.skip_ws();
        if let Some(n) = self.number()? {
            if self.eat(b'^') {
                return Err(self.err("only w may be raised to a power"));
            }
            return Ok(Ordinal::finite(n));
        }
        if self.eat(b'w') {
            if self.eat(b'^') {
                let e = self.power()?;
                return Ok(Ordinal::omega_pow(e));
            }
            return Ok(Ordinal::omega());
        }
        if self.eat(b'(') {
            let inner = self.expr()?;
            if !self.eat(b')') {
                return Err(self.err("missing ')'"));
            }
            if self.eat(b'^') {
                return Err(self.err("only w may be raised to a power"));
            }
            return Ok(inner);
        }
        Err(self.err(format!("unexpected input at offset {}", self.pos)))
    }
}

impl FromStr for Ordinal {
    type Err = OrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser {
            src: s,
            bytes: s.as_bytes(),
            pos: 0,
        };
        let o = p.expr()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(p.err(format!("trailing input at offset {}", p.pos)));
        }
        Ok(o)
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn compare_examples() {
        assert_eq!(compare(&o("3"), &o("w")), Ordering::Less);
        assert_eq!(compare(&o("w*2+1"), &o("w*2+1")), Ordering::Equal);
        assert_eq!(compare(&o("w^2"), &o("w*5+9")), Ordering::Greater);
    }

    #[test]
    fn predecessor_examples() {
        assert_eq!(o("5").predecessor().unwrap(), Some(o("4")));
        assert_eq!(o("w").predecessor().unwrap(), None);
        assert_eq!(o("w^2+3").predecessor().unwrap(), Some(o("w^2+2")));
        assert_eq!(o("w+1").predecessor().unwrap(), Some(o("w")));
        assert_eq!(Ordinal::zero().predecessor(), Err(OrdinalError::ZeroPredecessor));
    }

    #[test]
    fn fundamental_sequence_examples() {
        for n in 1..6 {
            assert_eq!(o("w").fundamental_sequence(n).unwrap(), Ordinal::finite(n));
        }
        assert_eq!(o("w^2").fundamental_sequence(3).unwrap(), o("w*3"));
        assert_eq!(o("w^w").fundamental_sequence(2).unwrap(), o("w^2"));
        assert_eq!(o("w^2+w").fundamental_sequence(4).unwrap(), o("w^2+4"));
        assert_eq!(o("w*3").fundamental_sequence(2).unwrap(), o("w*2+2"));
        assert!(o("w+1").fundamental_sequence(1).is_err());
        assert!(Ordinal::zero().fundamental_sequence(1).is_err());
        assert_eq!(o("w").fundamental_sequence(0), Err(OrdinalError::ZeroIndex));
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate_below(&o("w"), 4), vec![o("0"), o("1"), o("2"), o("3")]);
        assert_eq!(
            enumerate_below(&o("5"), 5),
            (0..5).map(Ordinal::finite).collect::<Vec<_>>()
        );
        // a finite bound is exhausted
        assert_eq!(enumerate_below(&o("5"), 9).len(), 5);
        assert!(enumerate_below(&Ordinal::zero(), 3).is_empty());
    }

    #[test]
    fn enumerate_omega_two_prefix() {
        let bound = o("w*2");
        let prefix = enumerate_below(&bound, 6);
        assert_eq!(prefix.len(), 6);
        for (i, a) in prefix.iter().enumerate() {
            assert!(*a < bound);
            for b in &prefix[..i] {
                assert_ne!(a, b);
            }
        }
        // ω itself shows up early; every ω+k shows up at stage k + 2
        let long = enumerate_below(&bound, 40);
        for k in 0..10 {
            assert!(long.contains(&o("w").add(&Ordinal::finite(k))));
            assert!(long.contains(&Ordinal::finite(k)));
        }
    }

    #[test]
    fn nth_below_matches_enumeration() {
        let bound = o("w^2+w");
        let prefix = enumerate_below(&bound, 200);
        for (i, b) in prefix.iter().enumerate() {
            assert_eq!(nth_below(&bound, i).as_ref(), Some(b));
        }
        assert_eq!(nth_below(&o("3"), 3), None);
    }

    #[test]
    fn printer_canonical_forms() {
        for s in ["0", "5", "w", "w+3", "w*2", "w^2", "w^w", "w^(w+1)*2+w^3+7", "w^(w^2)"] {
            assert_eq!(o(s).to_string(), s);
        }
        assert_eq!(o("3+w").to_string(), "w");
        assert_eq!(o("(w+1)*2").to_string(), "w*2+1");
        assert_eq!(o("w^2 + w*0 + 1").to_string(), "w^2+1");
    }

    #[test]
    fn parse_errors() {
        assert!("".parse::<Ordinal>().is_err());
        assert!("2^w".parse::<Ordinal>().is_err());
        assert!("w*w".parse::<Ordinal>().is_err());
        assert!("(w+1".parse::<Ordinal>().is_err());
        assert!("w x".parse::<Ordinal>().is_err());
    }
}
