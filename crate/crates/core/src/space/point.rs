use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exactnum::ExactScalar;

/// Opaque point identifier. Each builder uses its own variants.
///
/// Text forms: `s_inf`, `s[3]`, `x[level,copy,j]`, `psi2(<inner>)`,
/// `glue1(<inner>)`, `x0`, `h[0]`, `h[1/5]`, `a[k,i]`, `c[<theta>]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    SInf,
    S(i64),
    /// Orbit-family point `x^level_{copy, j}` of the winding construction.
    Fam {
        level: u32,
        copy: u32,
        j: i64,
    },
    /// Image of an inner tower point under the `slot`-th embedding.
    Embed {
        slot: u32,
        inner: Box<Point>,
    },
    /// Point of the `slot`-th component of a limit glue.
    Glue {
        slot: u32,
        inner: Box<Point>,
    },
    GlueFix,
    HarmonicZero,
    /// The point `1/q`.
    Harmonic(u64),
    /// Grid point `i` of the Denjoy fiber `A_k`.
    Arc {
        k: i64,
        i: u32,
    },
    /// Denjoy minimal-set point at angle `theta` outside the base orbit.
    Cantor {
        theta: ExactScalar,
    },
}

impl Point {
    pub fn embed(slot: u32, inner: Point) -> Point {
        match inner {
            Point::SInf => Point::SInf,
            inner => Point::Embed { slot, inner: Box::new(inner) },
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::SInf => write!(f, "s_inf"),
            Point::S(i) => write!(f, "s[{i}]"),
            Point::Fam { level, copy, j } => write!(f, "x[{level},{copy},{j}]"),
            Point::Embed { slot, inner } => write!(f, "psi{slot}({inner})"),
            Point::Glue { slot, inner } => write!(f, "glue{slot}({inner})"),
            Point::GlueFix => write!(f, "x0"),
            Point::HarmonicZero => write!(f, "h[0]"),
            Point::Harmonic(q) => write!(f, "h[1/{q}]"),
            Point::Arc { k, i } => write!(f, "a[{k},{i}]"),
            Point::Cantor { theta } => write!(f, "c[{theta}]"),
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn bracketed<'a>(s: &'a str, prefix: &str) -> Option<&'a str> {
    s.strip_prefix(prefix)?.strip_suffix(']')
}

fn wrapped<'a>(s: &'a str, prefix: &str) -> Option<(u32, &'a str)> {
    let rest = s.strip_prefix(prefix)?;
    let open = rest.find('(')?;
    let slot = rest[..open].parse().ok()?;
    Some((slot, rest[open + 1..].strip_suffix(')')?))
}

impl FromStr for Point {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad point id `{s}`"));
        let ints = |body: &str| -> Result<Vec<i64>> {
            body.split(',').map(|t| t.trim().parse::<i64>().map_err(|_| bad())).collect()
        };
        Ok(match s {
            "s_inf" => Point::SInf,
            "x0" => Point::GlueFix,
            "h[0]" => Point::HarmonicZero,
            _ => {
                if let Some(body) = bracketed(s, "s[") {
                    Point::S(body.parse().map_err(|_| bad())?)
                } else if let Some(body) = bracketed(s, "x[") {
                    match ints(body)?.as_slice() {
                        &[level, copy, j] => Point::Fam {
                            level: u32::try_from(level).map_err(|_| bad())?,
                            copy: u32::try_from(copy).map_err(|_| bad())?,
                            j,
                        },
                        _ => return Err(bad()),
                    }
                } else if let Some(body) = bracketed(s, "h[1/") {
                    Point::Harmonic(body.parse().map_err(|_| bad())?)
                } else if let Some(body) = bracketed(s, "a[") {
                    match ints(body)?.as_slice() {
                        &[k, i] => Point::Arc { k, i: u32::try_from(i).map_err(|_| bad())? },
                        _ => return Err(bad()),
                    }
                } else if let Some(body) = bracketed(s, "c[") {
                    Point::Cantor { theta: body.parse()? }
                } else if let Some((slot, inner)) = wrapped(s, "psi") {
                    Point::Embed { slot, inner: Box::new(inner.parse()?) }
                } else if let Some((slot, inner)) = wrapped(s, "glue") {
                    Point::Glue { slot, inner: Box::new(inner.parse()?) }
                } else {
                    return Err(bad());
                }
            }
        })
    }
}

impl serde::Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        let pts = vec![
            Point::SInf,
            Point::S(-3),
            Point::Fam { level: 2, copy: 1, j: -7 },
            Point::embed(3, Point::embed(1, Point::Fam { level: 1, copy: 2, j: 4 })),
            Point::Glue { slot: 2, inner: Box::new(Point::S(5)) },
            Point::GlueFix,
            Point::HarmonicZero,
            Point::Harmonic(17),
            Point::Arc { k: -4, i: 2 },
            Point::Cantor { theta: ExactScalar::sqrt2_minus_one() },
        ];
        for p in pts {
            assert_eq!(p.to_string().parse::<Point>().unwrap(), p);
        }
        assert_eq!(Point::embed(4, Point::SInf), Point::SInf);
        assert!("q[1]".parse::<Point>().is_err());
    }
}
