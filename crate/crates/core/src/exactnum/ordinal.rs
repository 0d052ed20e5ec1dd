//! Ordinals below ω^ω in Cantor normal form.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// `Σ ω^{e_i}·c_i` with strictly decreasing exponents and positive coefficients.
///
/// The derived `Ord` is the ordinal order: term vectors compare
/// lexicographically, `(e, c)` pairs compare exponent first, and a proper
/// prefix is smaller.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrdinalCnf {
    terms: Vec<(u32, u64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrdinalKind {
    Zero,
    Successor,
    Limit,
}

impl OrdinalCnf {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn finite(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            Self { terms: vec![(0, n)] }
        }
    }

    pub fn omega() -> Self {
        Self { terms: vec![(1, 1)] }
    }

    /// Normalizes an arbitrary term list: sorts by exponent, merges, drops zeros.
    pub fn from_terms(mut terms: Vec<(u32, u64)>) -> Self {
        terms.retain(|&(_, c)| c > 0);
        terms.sort_by_key(|t| std::cmp::Reverse(t.0));
        let mut out: Vec<(u32, u64)> = Vec::new();
        for (e, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == e => last.1 += c,
                _ => out.push((e, c)),
            }
        }
        Self { terms: out }
    }

    pub fn terms(&self) -> &[(u32, u64)] {
        &self.terms
    }

    pub fn kind(&self) -> OrdinalKind {
        match self.terms.last() {
            None => OrdinalKind::Zero,
            Some(&(0, _)) => OrdinalKind::Successor,
            Some(_) => OrdinalKind::Limit,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_finite(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(0, c)] => Some(*c),
            _ => None,
        }
    }

    pub fn succ(&self) -> Self {
        self.add(&Self::finite(1))
    }

    /// `self - 1` for successors.
    pub fn pred(&self) -> Option<Self> {
        if self.kind() != OrdinalKind::Successor {
            return None;
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().expect("successor has terms");
        last.1 -= 1;
        Some(Self::from_terms(terms))
    }

    /// Ordinal addition (absorbs the smaller-exponent terms of `self`).
    pub fn add(&self, rhs: &Self) -> Self {
        let Some(&(lead, _)) = rhs.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<(u32, u64)> = self.terms.iter().copied().filter(|&(e, _)| e >= lead).collect();
        match terms.last_mut() {
            Some(last) if last.0 == lead => {
                last.1 += rhs.terms[0].1;
                terms.extend_from_slice(&rhs.terms[1..]);
            }
            _ => terms.extend_from_slice(&rhs.terms),
        }
        Self { terms }
    }

    /// The smallest limit ordinal strictly above every `self + k`, i.e. the
    /// supremum of a sequence that climbs from `self` in finite steps.
    pub fn next_limit(&self) -> Self {
        let mut terms = self.terms.clone();
        if matches!(terms.last(), Some(&(0, _))) {
            terms.pop();
        }
        Self { terms }.add(&Self::omega())
    }

    /// Left subtraction: the unique `γ` with `self = other + γ`, if `other ≤ self`.
    pub fn left_sub(&self, other: &Self) -> Option<Self> {
        if other > self {
            return None;
        }
        // find first differing term
        let mut i = 0;
        while i < other.terms.len() && other.terms[i] == self.terms[i] {
            i += 1;
        }
        if i == other.terms.len() {
            return Some(Self { terms: self.terms[i..].to_vec() });
        }
        let (e_o, c_o) = other.terms[i];
        let (e_s, c_s) = self.terms[i];
        if e_s == e_o {
            // c_s > c_o
            let mut terms = vec![(e_s, c_s - c_o)];
            terms.extend_from_slice(&self.terms[i + 1..]);
            Some(Self { terms })
        } else {
            Some(Self { terms: self.terms[i..].to_vec() })
        }
    }
}

pub fn ord_compare(a: &OrdinalCnf, b: &OrdinalCnf) -> Ordering {
    a.cmp(b)
}

pub fn ord_kind(a: &OrdinalCnf) -> OrdinalKind {
    a.kind()
}

/// Renders as `w^2*3+w*2+3`; zero renders as `0`.
impl fmt::Display for OrdinalCnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|&(e, c)| {
                let base = match e {
                    0 => return c.to_string(),
                    1 => "w".to_string(),
                    _ => format!("w^{e}"),
                };
                if c == 1 {
                    base
                } else {
                    format!("{base}*{c}")
                }
            })
            .collect();
        write!(f, "{}", parts.join("+"))
    }
}

impl FromStr for OrdinalCnf {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero());
        }
        let bad = || Error::Parse(format!("bad ordinal `{s}`"));
        let mut terms = Vec::new();
        for part in s.split('+') {
            let part = part.trim();
            let (head, coeff) = match part.split_once('*') {
                Some((h, c)) => (h.trim(), c.trim().parse::<u64>().map_err(|_| bad())?),
                None => (part, 1),
            };
            let exp = if let Some(rest) = head.strip_prefix("w^") {
                rest.parse::<u32>().map_err(|_| bad())?
            } else if head == "w" {
                1
            } else {
                let n = head.parse::<u64>().map_err(|_| bad())?;
                if coeff != 1 {
                    return Err(bad());
                }
                terms.push((0, n));
                continue;
            };
            terms.push((exp, coeff));
        }
        let parsed = Self::from_terms(terms.clone());
        // reject non-normal input such as "3+w"
        let normal =
            terms.iter().filter(|t| t.1 > 0).count() == parsed.terms.len() && terms.windows(2).all(|w| w[0].0 > w[1].0);
        if !normal {
            return Err(bad());
        }
        Ok(parsed)
    }
}

impl serde::Serialize for OrdinalCnf {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for OrdinalCnf {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> OrdinalCnf {
        s.parse().unwrap()
    }

    #[test]
    fn comparisons() {
        assert_eq!(ord_compare(&o("w"), &o("3")), Ordering::Greater);
        assert_eq!(ord_compare(&o("2"), &o("2")), Ordering::Equal);
        assert_eq!(ord_compare(&o("w+1"), &o("w*2")), Ordering::Less);
        assert!(o("w^2") > o("w*100+7"));
    }

    #[test]
    fn kinds() {
        assert_eq!(ord_kind(&o("0")), OrdinalKind::Zero);
        assert_eq!(ord_kind(&o("w*2+3")), OrdinalKind::Successor);
        assert_eq!(ord_kind(&o("w^2")), OrdinalKind::Limit);
    }

    #[test]
    fn arithmetic() {
        assert_eq!(o("3").add(&o("w")), o("w"));
        assert_eq!(o("w+3").add(&o("w")), o("w*2"));
        assert_eq!(o("w").add(&o("2")), o("w+2"));
        assert_eq!(o("4").next_limit(), o("w"));
        assert_eq!(o("w+2").next_limit(), o("w*2"));
        assert_eq!(o("w*2+4").pred(), Some(o("w*2+3")));
        assert_eq!(o("w+1").pred(), Some(o("w")));
        assert_eq!(o("w*2+3").left_sub(&o("w")), Some(o("w+3")));
        assert_eq!(o("w+3").left_sub(&o("2")), Some(o("w+3")));
        assert_eq!(o("5").left_sub(&o("2")), Some(o("3")));
    }

    #[test]
    fn text_round_trip() {
        for s in ["0", "7", "w", "w*2+3", "w^3*2+w+1"] {
            assert_eq!(o(s).to_string(), s);
        }
        assert!("3+w".parse::<OrdinalCnf>().is_err());
    }
}
