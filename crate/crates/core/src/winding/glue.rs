use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{pow2, ExactScalar, OrdinalCnf};
use crate::space::{
    Coord, DynSystem, Dynamics, FamilySchema, IndexBounds, IndexDomain, Members, Point, PointClass, Returns,
    ScatteredSpace, SystemRef,
};

/// One rung of the witness chain: component `slot` has rank `rank`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainStep {
    pub slot: u32,
    pub rank: OrdinalCnf,
    pub top: Point,
}

struct Component {
    sys: SystemRef,
    offset: usize,
    top: usize,
}

/// `{x_0} ∪ ⋃ X_t` with component `t` shrunk by `2^-t/4` and parked at
/// `x_0 + (1.5·2^-t, 0)`, so the components accumulate only on `x_0`.
pub struct LimitGlue {
    x0: (ExactScalar, ExactScalar),
    comps: Arc<Vec<Component>>,
    space: ScatteredSpace,
    chain: Vec<ChainStep>,
}

fn scale(t: u32) -> ExactScalar {
    ExactScalar::rational(pow2(-i64::from(t) - 2))
}

fn relocate(x0: &(ExactScalar, ExactScalar), t: u32, c: &Coord) -> Result<Coord> {
    let (x, y) = c.as_plane().ok_or_else(|| Error::InvalidArgument("glue needs plane coordinates".into()))?;
    let s = scale(t);
    let shift = ExactScalar::rational(pow2(-i64::from(t))) * ExactScalar::ratio(3, 2);
    Ok(Coord::plane(&(&x0.0 + &shift) + &(&s * x), &x0.1 + &(&s * y)))
}

pub fn build_limit_glue(components: Vec<SystemRef>, x0: Coord) -> Result<LimitGlue> {
    if components.len() < 2 {
        return Err(Error::InvalidArgument("limit glue needs at least 2 components".into()));
    }
    let (x0x, x0y) = x0.as_plane().ok_or_else(|| Error::InvalidArgument("x0 must be a plane point".into()))?;
    let x0 = (x0x.clone(), x0y.clone());
    let mut classes =
        vec![PointClass { label: "x0".into(), sample: Point::GlueFix, dynamics: Dynamics::Fixed, single: true }];
    let mut families = Vec::new();
    let mut comps = Vec::new();
    let mut chain: Vec<ChainStep> = Vec::new();
    for (i, sys) in components.into_iter().enumerate() {
        let t = i as u32 + 1;
        let s = sys.space().ok_or_else(|| Error::InvalidArgument(format!("component {t} has no description")))?;
        let ranks = s.class_ranks()?;
        let rank = ranks.iter().max().cloned().unwrap_or_default();
        let tops: Vec<usize> = (0..ranks.len()).filter(|&c| ranks[c] == rank).collect();
        if tops.len() != 1 || !s.classes[tops[0]].single {
            return Err(Error::InvalidArgument(format!("component {t} has no single top point")));
        }
        if let Some(prev) = chain.last() {
            if rank <= prev.rank {
                return Err(Error::InvalidArgument(format!(
                    "component ranks must strictly increase: {} then {rank}",
                    prev.rank
                )));
            }
        }
        let offset = classes.len();
        let wrap = move |p: &Point| Point::Glue { slot: t, inner: Box::new(p.clone()) };
        for c in &s.classes {
            classes.push(PointClass { label: format!("glue{t}({})", c.label), sample: wrap(&c.sample), ..c.clone() });
        }
        let k = scale(t);
        for f in &s.families {
            let members = match &f.members {
                Members::Class(m) => Members::Class(offset + m),
                Members::Ladder(ms) => Members::Ladder(ms.iter().map(|m| offset + m).collect()),
            };
            let (tail, member, k) = (f.tail.clone(), f.member.clone(), k.clone());
            families.push(FamilySchema {
                label: format!("glue{t}({})", f.label),
                members,
                target: offset + f.target,
                index: f.index,
                returns: f.returns,
                coord: None,
                tail_text: format!("{k} * ({})", f.tail_text),
                tail: Arc::new(move |n| &k * &tail(n)),
                member: Arc::new(move |p, j| match p {
                    Point::Glue { slot, inner } if *slot == t => member(inner, j).map(|m| wrap(&m)),
                    _ => None,
                }),
                sample_target: wrap(&f.sample_target),
            });
        }
        chain.push(ChainStep { slot: t, rank, top: wrap(&s.classes[tops[0]].sample) });
        comps.push(Component { sys, offset, top: offset + tops[0] });
    }
    let count = comps.len() as i64;
    let tops = chain.iter().map(|c| c.top.clone()).collect::<Vec<_>>();
    families.push(FamilySchema {
        label: "glue->x0".into(),
        members: Members::Ladder(comps.iter().map(|c| c.top).collect()),
        target: 0,
        index: IndexDomain::N,
        returns: Returns::None,
        coord: Some("x0 + (3/2 * 2^-j, 0)".into()),
        tail_text: "7 * 2^(-n-2)".into(),
        tail: Arc::new(|n| ExactScalar::rational(pow2(-(n as i64) - 2)) * ExactScalar::integer(7)),
        member: Arc::new(move |p, j| {
            (*p == Point::GlueFix && (1..=count).contains(&j)).then(|| tops[j as usize - 1].clone())
        }),
        sample_target: Point::GlueFix,
    });
    let comps = Arc::new(comps);
    let class_of = {
        let comps = comps.clone();
        Arc::new(move |p: &Point| match p {
            Point::GlueFix => Some(0),
            Point::Glue { slot, inner } => {
                let c = comps.get((*slot as usize).checked_sub(1)?)?;
                Some(c.offset + (c.sys.space()?.class_of)(inner)?)
            }
            _ => None,
        })
    };
    let coord = {
        let (comps, x0) = (comps.clone(), x0.clone());
        Arc::new(move |p: &Point| glue_coord(&comps, &x0, p))
    };
    let space = ScatteredSpace { name: "X_glue".into(), classes, families, class_of, coord };
    Ok(LimitGlue { x0, comps, space, chain })
}

fn glue_coord(comps: &[Component], x0: &(ExactScalar, ExactScalar), p: &Point) -> Result<Coord> {
    match p {
        Point::GlueFix => Ok(Coord::plane(x0.0.clone(), x0.1.clone())),
        Point::Glue { slot, inner } => {
            let c = component(comps, *slot).ok_or_else(|| Error::UnknownPoint(p.to_string()))?;
            relocate(x0, *slot, &c.sys.coord(inner)?)
        }
        _ => Err(Error::UnknownPoint(p.to_string())),
    }
}

fn component(comps: &[Component], slot: u32) -> Option<&Component> {
    comps.get((slot as usize).checked_sub(1)?)
}

impl LimitGlue {
    /// Component ranks in order; strictly increasing by construction.
    pub fn witness_chain(&self) -> &[ChainStep] {
        &self.chain
    }

    pub fn components(&self) -> Vec<SystemRef> {
        self.comps.iter().map(|c| c.sys.clone()).collect()
    }

    fn step(&self, p: &Point, forward: bool) -> Result<Point> {
        match p {
            Point::GlueFix => Ok(Point::GlueFix),
            Point::Glue { slot, inner } => {
                let c = component(&self.comps, *slot).ok_or_else(|| Error::UnknownPoint(p.to_string()))?;
                let q = if forward { c.sys.apply(inner)? } else { c.sys.apply_inverse(inner)? };
                Ok(Point::Glue { slot: *slot, inner: Box::new(q) })
            }
            _ => Err(Error::UnknownPoint(p.to_string())),
        }
    }
}

impl DynSystem for LimitGlue {
    fn family(&self) -> String {
        "limit-glue".into()
    }

    fn params(&self) -> serde_json::Value {
        let comps: Vec<serde_json::Value> = self
            .comps
            .iter()
            .map(|c| serde_json::json!({ "family": c.sys.family(), "params": c.sys.params() }))
            .collect();
        serde_json::json!({ "components": comps, "x0": [self.x0.0, self.x0.1] })
    }

    fn contains(&self, p: &Point) -> bool {
        match p {
            Point::GlueFix => true,
            Point::Glue { slot, inner } => component(&self.comps, *slot).is_some_and(|c| c.sys.contains(inner)),
            _ => false,
        }
    }

    fn apply(&self, p: &Point) -> Result<Point> {
        self.step(p, true)
    }

    fn apply_inverse(&self, p: &Point) -> Result<Point> {
        self.step(p, false)
    }

    fn coord(&self, p: &Point) -> Result<Coord> {
        glue_coord(&self.comps, &self.x0, p)
    }

    /// `x0` plus the samples of the first `depth` components (all when 0),
    /// each enumerated with depth 1.
    fn enumerate(&self, b: &IndexBounds) -> Result<Vec<Point>> {
        let mut out = vec![Point::GlueFix];
        let take = if b.depth == 0 { self.comps.len() } else { (b.depth as usize).min(self.comps.len()) };
        let inner = IndexBounds { depth: 1, ..*b };
        for (i, c) in self.comps.iter().take(take).enumerate() {
            let slot = i as u32 + 1;
            out.extend(c.sys.enumerate(&inner)?.into_iter().map(|q| Point::Glue { slot, inner: Box::new(q) }));
        }
        out.sort();
        Ok(out)
    }

    fn default_bounds(&self) -> IndexBounds {
        IndexBounds::symmetric(3, 0)
    }

    fn space(&self) -> Option<&ScatteredSpace> {
        Some(&self.space)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{orbit, validate_space};
    use crate::winding::{build_tower, TowerSpec};

    fn towers(ranks: &[u64]) -> Vec<SystemRef> {
        ranks.iter().map(|&a| build_tower(TowerSpec::new(OrdinalCnf::finite(a), 2)).unwrap() as SystemRef).collect()
    }

    fn origin() -> Coord {
        Coord::plane(ExactScalar::zero(), ExactScalar::zero())
    }

    #[test]
    fn glue_reaches_omega() {
        let g = build_limit_glue(towers(&[2, 3, 4]), origin()).unwrap();
        let s = g.space().unwrap();
        assert_eq!(s.cb_rank().unwrap(), OrdinalCnf::omega());
        let ranks: Vec<u64> = g.witness_chain().iter().map(|c| c.rank.as_finite().unwrap()).collect();
        assert_eq!(ranks, [2, 3, 4]);
        assert_eq!(orbit(&g, &Point::GlueFix, -3, 3).unwrap(), vec![Point::GlueFix; 7]);
        let rep = validate_space(s, 3, &ExactScalar::integer(1)).unwrap();
        let hard: Vec<_> = rep.violations.iter().filter(|v| !v.detail.starts_with("tail bound")).collect();
        assert!(hard.is_empty(), "{hard:?}");
    }

    #[test]
    fn rejects_flat_or_short_lists() {
        assert!(build_limit_glue(towers(&[2]), origin()).is_err());
        assert!(build_limit_glue(towers(&[2, 2]), origin()).is_err());
        assert!(build_limit_glue(towers(&[3, 2]), origin()).is_err());
    }

    #[test]
    fn components_stay_apart() {
        let g = build_limit_glue(towers(&[2, 3]), origin()).unwrap();
        let pts = g.enumerate(&IndexBounds::symmetric(3, 0)).unwrap();
        for p in &pts {
            let c = g.coord(p).unwrap();
            let (x, _) = c.as_plane().unwrap();
            if let Point::Glue { slot, .. } = p {
                let lo = ExactScalar::rational(pow2(-i64::from(*slot))) * ExactScalar::ratio(5, 4);
                assert!(*x >= lo, "{p}");
            }
            let q = g.apply(p).unwrap();
            assert_eq!(&g.apply_inverse(&q).unwrap(), p);
        }
    }
}
