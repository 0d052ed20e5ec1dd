//! Finitary descriptions of countable compact spaces.
//!
//! Points are grouped into classes; each class carries a sample point and a
//! dynamics tag. Declared families say "members of class A accumulate on each
//! point of class B" and supply a concrete member generator plus a monotone
//! tail bound, so the description can be checked on finite prefixes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::coord::{plane_distance, Coord};
use super::point::Point;
use crate::error::{Error, Result};
use crate::exactnum::{ExactScalar, OrdinalCnf};

pub type ClassId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dynamics {
    Fixed,
    Periodic,
    /// Points of the class have injective orbits.
    Orbit,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointClass {
    pub label: String,
    pub sample: Point,
    pub dynamics: Dynamics,
    /// A single point rather than a countable set.
    pub single: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Members {
    Class(ClassId),
    /// Members drawn from classes of strictly increasing rank.
    Ladder(Vec<ClassId>),
}

impl Members {
    pub fn classes(&self) -> Vec<ClassId> {
        match self {
            Members::Class(c) => vec![*c],
            Members::Ladder(cs) => cs.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IndexDomain {
    Z,
    N,
}

impl IndexDomain {
    /// The first `n` indices: `1, 2, ...` or `1, -1, 2, -2, ...`.
    pub fn prefix(self, n: usize) -> Vec<i64> {
        match self {
            IndexDomain::N => (1..=n as i64).collect(),
            IndexDomain::Z => (0..n as i64).map(|t| if t % 2 == 0 { t / 2 + 1 } else { -(t / 2 + 1) }).collect(),
        }
    }
}

/// Whether members of a family come back near the target infinitely often
/// with unbounded multiplicity (winding orbits) or leave for good.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Returns {
    None,
    Unbounded,
}

pub type MemberFn = Arc<dyn Fn(&Point, i64) -> Option<Point> + Send + Sync>;
pub type TailFn = Arc<dyn Fn(u64) -> ExactScalar + Send + Sync>;
pub type CoordFn = Arc<dyn Fn(&Point) -> Result<Coord> + Send + Sync>;
pub type ClassFn = Arc<dyn Fn(&Point) -> Option<ClassId> + Send + Sync>;

#[derive(Clone)]
pub struct FamilySchema {
    pub label: String,
    pub members: Members,
    pub target: ClassId,
    pub index: IndexDomain,
    pub returns: Returns,
    /// Closed-form coordinate of the members, when one exists.
    pub coord: Option<String>,
    pub tail_text: String,
    /// `tail(n) ≥ d(member(t, j), t)` for all `|j| ≥ n`.
    pub tail: TailFn,
    /// `member(t, j)`: the `j`-th member converging to the target point `t`.
    pub member: MemberFn,
    /// Target point used for prefix checks.
    pub sample_target: Point,
}

impl fmt::Debug for FamilySchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FamilySchema")
            .field("label", &self.label)
            .field("members", &self.members)
            .field("target", &self.target)
            .field("returns", &self.returns)
            .finish()
    }
}

#[derive(Clone)]
pub struct ScatteredSpace {
    pub name: String,
    pub classes: Vec<PointClass>,
    pub families: Vec<FamilySchema>,
    pub class_of: ClassFn,
    pub coord: CoordFn,
}

impl fmt::Debug for ScatteredSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScatteredSpace")
            .field("name", &self.name)
            .field("classes", &self.classes)
            .field("families", &self.families)
            .finish()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub schema: String,
    pub index: Option<i64>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub prefix_len: usize,
    pub violations: Vec<Violation>,
}

impl ScatteredSpace {
    pub fn class(&self, label: &str) -> Option<ClassId> {
        self.classes.iter().position(|c| c.label == label)
    }

    pub fn label(&self, c: ClassId) -> &str {
        &self.classes[c].label
    }

    pub fn families_into(&self, c: ClassId) -> impl Iterator<Item = &FamilySchema> {
        self.families.iter().filter(move |f| f.target == c)
    }

    /// Structural rank of every class: `sup (rank(member) + 1)` over incoming
    /// families, with ladders contributing the limit of their member ranks.
    pub fn class_ranks(&self) -> Result<Vec<OrdinalCnf>> {
        #[derive(Clone, PartialEq)]
        enum Mark {
            Todo,
            Active,
            Done(OrdinalCnf),
        }
        fn visit(s: &ScatteredSpace, c: ClassId, marks: &mut Vec<Mark>) -> Result<OrdinalCnf> {
            match &marks[c] {
                Mark::Done(r) => return Ok(r.clone()),
                Mark::Active => return Err(Error::NotWellFounded(s.classes[c].label.clone())),
                Mark::Todo => {}
            }
            marks[c] = Mark::Active;
            let mut rank = OrdinalCnf::zero();
            let incoming: Vec<Members> = s.families_into(c).map(|f| f.members.clone()).collect();
            for members in incoming {
                let contrib = match members {
                    Members::Class(m) => visit(s, m, marks)?.succ(),
                    Members::Ladder(ms) => {
                        let mut top = OrdinalCnf::zero();
                        for m in ms {
                            let r = visit(s, m, marks)?;
                            if !top.is_zero() && r <= top {
                                return Err(Error::InvalidArgument(format!(
                                    "ladder into `{}` is not strictly increasing",
                                    s.classes[c].label
                                )));
                            }
                            top = r;
                        }
                        top.next_limit()
                    }
                };
                rank = rank.max(contrib);
            }
            marks[c] = Mark::Done(rank.clone());
            Ok(rank)
        }
        let mut marks = vec![Mark::Todo; self.classes.len()];
        (0..self.classes.len()).map(|c| visit(self, c, &mut marks)).collect()
    }

    /// Cantor-Bendixson rank: the largest class rank.
    pub fn cb_rank(&self) -> Result<OrdinalCnf> {
        Ok(self.class_ranks()?.into_iter().max().unwrap_or_default())
    }

    /// Labels of the classes that survive in `X^(gamma)`.
    pub fn derived_labels(&self, gamma: &OrdinalCnf) -> Result<BTreeSet<String>> {
        let ranks = self.class_ranks()?;
        Ok(self.classes.iter().zip(ranks).filter(|(_, r)| r >= gamma).map(|(c, _)| c.label.clone()).collect())
    }

    pub fn labels(&self) -> BTreeSet<String> {
        self.classes.iter().map(|c| c.label.clone()).collect()
    }

    /// Keeps the classes selected by `keep`, dropping families whose members vanish.
    pub fn restrict(&self, keep: &[bool], name: String) -> ScatteredSpace {
        let mut remap = vec![None; self.classes.len()];
        let mut classes = Vec::new();
        for (i, c) in self.classes.iter().enumerate() {
            if keep[i] {
                remap[i] = Some(classes.len());
                classes.push(c.clone());
            }
        }
        let families = self
            .families
            .iter()
            .filter_map(|f| {
                let target = remap[f.target]?;
                let members = match &f.members {
                    Members::Class(m) => Members::Class(remap[*m]?),
                    Members::Ladder(ms) => {
                        let kept: Vec<ClassId> = ms.iter().filter_map(|m| remap[*m]).collect();
                        if kept.is_empty() {
                            return None;
                        }
                        Members::Ladder(kept)
                    }
                };
                Some(FamilySchema { members, target, ..f.clone() })
            })
            .collect();
        let inner = self.class_of.clone();
        let remap = Arc::new(remap);
        ScatteredSpace {
            name,
            classes,
            families,
            class_of: Arc::new(move |p| inner(p).and_then(|c| remap[c])),
            coord: self.coord.clone(),
        }
    }

    /// The derived set `X^d` as a description: classes of rank at least one.
    pub fn derived_set(&self) -> Result<ScatteredSpace> {
        let ranks = self.class_ranks()?;
        let keep: Vec<bool> = ranks.iter().map(|r| !r.is_zero()).collect();
        Ok(self.restrict(&keep, format!("{}'", self.name)))
    }

    /// `n` iterations of `derived_set`.
    pub fn derived_n(&self, n: u32) -> Result<ScatteredSpace> {
        let mut cur = self.clone();
        for _ in 0..n {
            cur = cur.derived_set()?;
        }
        Ok(cur)
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn schema_json(&self) -> serde_json::Value {
        let classes: Vec<serde_json::Value> = self
            .classes
            .iter()
            .map(|c| {
                serde_json::json!({
                    "label": c.label,
                    "sample": c.sample,
                    "dynamics": c.dynamics,
                    "single": c.single,
                })
            })
            .collect();
        let schemas: Vec<serde_json::Value> = self
            .families
            .iter()
            .map(|f| {
                let members: Vec<&str> = f.members.classes().iter().map(|&m| self.label(m)).collect();
                serde_json::json!({
                    "base": f.sample_target,
                    "family": {
                        "label": f.label,
                        "index": f.index,
                        "members": members,
                        "ladder": matches!(f.members, Members::Ladder(_)),
                        "coord": f.coord,
                        "limit": self.label(f.target),
                        "tail_bound": f.tail_text,
                        "returns": f.returns,
                    }
                })
            })
            .collect();
        serde_json::json!({ "name": self.name, "classes": classes, "schemas": schemas })
    }
}

/// Checks well-foundedness, id uniqueness and the declared tail bounds on a
/// prefix of every family.
pub fn validate_space(s: &ScatteredSpace, prefix_len: usize, tolerance: &ExactScalar) -> Result<ValidationReport> {
    if prefix_len == 0 {
        return Err(Error::InvalidArgument("prefix_len must be at least 1".into()));
    }
    let mut violations = Vec::new();
    let mut push = |schema: &str, index: Option<i64>, detail: String| {
        violations.push(Violation { schema: schema.to_string(), index, detail });
    };
    if let Err(e) = s.class_ranks() {
        push(&s.name, None, e.to_string());
    }
    let mut seen_labels = BTreeSet::new();
    let mut seen_samples = BTreeMap::new();
    for c in &s.classes {
        if !seen_labels.insert(c.label.clone()) {
            push(&c.label, None, "duplicate class label".into());
        }
        if let Some(prev) = seen_samples.insert(c.sample.clone(), c.label.clone()) {
            push(&c.label, None, format!("sample point {} already used by `{prev}`", c.sample));
        }
    }
    for f in &s.families {
        let target_coord = (s.coord)(&f.sample_target)?;
        let mut prev_bound: Option<ExactScalar> = None;
        let mut ids = BTreeSet::new();
        for j in f.index.prefix(prefix_len) {
            let Some(m) = (f.member)(&f.sample_target, j) else {
                push(&f.label, Some(j), "member generator returned nothing".into());
                continue;
            };
            if m == f.sample_target || !ids.insert(m.clone()) {
                push(&f.label, Some(j), format!("member {m} repeats"));
            }
            let d = plane_distance(&(s.coord)(&m)?, &target_coord)?;
            let bound = (f.tail)(j.unsigned_abs());
            if d > bound {
                push(&f.label, Some(j), format!("distance {d} exceeds tail bound {bound}"));
            }
            if let Some(p) = &prev_bound {
                if &bound > p {
                    push(&f.label, Some(j), "tail bound is not monotone".into());
                }
            }
            prev_bound = Some(bound);
        }
        let last = f.index.prefix(prefix_len).last().map(|j| j.unsigned_abs()).unwrap_or(1);
        let end = (f.tail)(last);
        if &end > tolerance {
            push(&f.label, None, format!("tail bound {end} at the prefix end exceeds tolerance {tolerance}"));
        }
    }
    Ok(ValidationReport { ok: violations.is_empty(), prefix_len, violations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_space() -> ScatteredSpace {
        // {0} ∪ {1/j}: one family converging to 0.
        let classes = vec![
            PointClass { label: "zero".into(), sample: Point::HarmonicZero, dynamics: Dynamics::Fixed, single: true },
            PointClass { label: "pts".into(), sample: Point::Harmonic(1), dynamics: Dynamics::Orbit, single: false },
        ];
        let fam = FamilySchema {
            label: "pts->zero".into(),
            members: Members::Class(1),
            target: 0,
            index: IndexDomain::N,
            returns: Returns::None,
            coord: Some("1/j".into()),
            tail_text: "1/n".into(),
            tail: Arc::new(|n| ExactScalar::ratio(1, n.max(1) as i64)),
            member: Arc::new(|_, j| Some(Point::Harmonic(j as u64))),
            sample_target: Point::HarmonicZero,
        };
        ScatteredSpace {
            name: "line".into(),
            classes,
            families: vec![fam],
            class_of: Arc::new(|p| match p {
                Point::HarmonicZero => Some(0),
                Point::Harmonic(_) => Some(1),
                _ => None,
            }),
            coord: Arc::new(|p| match p {
                Point::HarmonicZero => Ok(Coord::plane(ExactScalar::zero(), ExactScalar::zero())),
                Point::Harmonic(q) => Ok(Coord::plane(ExactScalar::ratio(1, *q as i64), ExactScalar::zero())),
                _ => Err(Error::UnknownPoint(p.to_string())),
            }),
        }
    }

    #[test]
    fn ranks_and_derived() {
        let s = line_space();
        assert_eq!(s.cb_rank().unwrap(), OrdinalCnf::finite(1));
        let d = s.derived_set().unwrap();
        assert_eq!(d.labels(), ["zero".to_string()].into_iter().collect());
        assert!(d.derived_set().unwrap().is_empty());
        assert!(validate_space(&s, 30, &ExactScalar::ratio(1, 10)).unwrap().ok);
    }

    #[test]
    fn cycles_are_rejected() {
        let mut s = line_space();
        let mut back = s.families[0].clone();
        back.members = Members::Class(0);
        back.target = 1;
        s.families.push(back);
        assert!(matches!(s.cb_rank(), Err(Error::NotWellFounded(_))));
    }

    #[test]
    fn z_prefix_alternates() {
        assert_eq!(IndexDomain::Z.prefix(5), vec![1, -1, 2, -2, 3]);
    }
}
