use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::neighborhood::{cell_radius, s_coord};
use super::number::FamilyCertificate;
use super::primes::{cantor_pair, PrimeOp, PrimeStream};
use super::standard::{s_classes, s_coord_of, s_family, shift};
use super::x2::{build_winding_x2, certify, level_geometry, Level, X2Params};
use super::Layer;
use crate::error::{Error, Result};
use crate::exactnum::{ExactScalar, OrdinalCnf, OrdinalKind};
use crate::space::{
    Coord, DynSystem, FamilySchema, IndexBounds, IndexDomain, Members, Point, PointClass, Returns, ScatteredSpace,
};

pub type LayerRef = Arc<dyn Layer>;

/// Largest supported tower rank, `ω·2+4`.
pub fn tower_cap() -> OrdinalCnf {
    OrdinalCnf::from_terms(vec![(1, 2), (0, 4)])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerSpec {
    pub alpha: OrdinalCnf,
    pub n: u32,
    #[serde(default = "super::x2::one")]
    pub r0: u64,
    #[serde(default)]
    pub primes: PrimeStream,
    #[serde(default)]
    pub context: u64,
    /// Levels described individually when the predecessor of `alpha` is a
    /// limit; deeper levels reuse the classes of the last one.
    #[serde(default = "default_ladder")]
    pub ladder: u32,
}

fn default_ladder() -> u32 {
    3
}

impl TowerSpec {
    pub fn new(alpha: OrdinalCnf, n: u32) -> Self {
        Self { alpha, n, r0: 1, primes: PrimeStream::default(), context: 0, ladder: 3 }
    }
}

/// Builds `X_alpha`; `alpha = 2` is the plain winding space.
pub fn build_tower(spec: TowerSpec) -> Result<LayerRef> {
    if spec.alpha > tower_cap() {
        return Err(Error::OrdinalCap(spec.alpha.to_string(), tower_cap().to_string()));
    }
    match spec.alpha.kind() {
        OrdinalKind::Limit => return Err(Error::LimitOrdinal(spec.alpha.to_string())),
        _ if spec.alpha < OrdinalCnf::finite(2) => {
            return Err(Error::InvalidArgument(format!("tower rank {} is below 2", spec.alpha)))
        }
        _ => {}
    }
    if spec.alpha == OrdinalCnf::finite(2) {
        let p = X2Params { n: spec.n, r0: spec.r0, primes: spec.primes, context: spec.context };
        return Ok(Arc::new(build_winding_x2(p)?));
    }
    if spec.ladder < 2 {
        return Err(Error::InvalidArgument("ladder prefix must have at least 2 levels".into()));
    }
    Ok(Arc::new(Tower::new(spec)?))
}

/// `γ_i`: successor ordinals `≥ 2` increasing to the limit `lambda`.
pub fn cofinal(lambda: &OrdinalCnf, i: u32) -> OrdinalCnf {
    let mut terms = lambda.terms().to_vec();
    let (e, c) = terms.pop().expect("limit ordinal has terms");
    if c > 1 {
        terms.push((e, c - 1));
    }
    let head = OrdinalCnf::from_terms(terms);
    let step = OrdinalCnf::from_terms(vec![(e - 1, u64::from(i))]);
    head.add(&step).succ()
}

struct Core {
    spec: TowerSpec,
    beta: OrdinalCnf,
    outer: PrimeStream,
    inner: Mutex<BTreeMap<u32, LayerRef>>,
}

impl Core {
    fn level(&self, i: u32) -> Level {
        level_geometry(self.spec.r0, &self.outer, i)
    }

    fn slot(&self, level: u32, copy: u32) -> u32 {
        (level - 1) * self.spec.n + copy - 1
    }

    fn unslot(&self, slot: u32) -> (u32, u32) {
        (slot / self.spec.n + 1, slot % self.spec.n + 1)
    }

    fn limit_below(&self) -> bool {
        self.beta.kind() == OrdinalKind::Limit
    }

    fn inner_alpha(&self, level: u32) -> OrdinalCnf {
        if self.limit_below() {
            cofinal(&self.beta, level)
        } else {
            self.beta.clone()
        }
    }

    /// Radius of the inner system, chosen so that the cells `s_{-r'..r'}`
    /// split into exactly `p` sweeps of the outer level.
    fn inner_r(&self, lv: &Level) -> u64 {
        (lv.p - 1) * (lv.r + 1) + lv.r
    }

    fn inner(&self, slot: u32) -> Result<LayerRef> {
        if let Some(l) = self.inner.lock().expect("inner cache poisoned").get(&slot) {
            return Ok(l.clone());
        }
        let (level, _) = self.unslot(slot);
        let lv = self.level(level);
        let spec = TowerSpec {
            alpha: self.inner_alpha(level),
            n: self.spec.n,
            r0: self.inner_r(&lv),
            primes: self.spec.primes.sub(PrimeOp::Odd(u64::from(slot))),
            context: cantor_pair(self.spec.context, u64::from(slot)) + 1,
            ladder: self.spec.ladder,
        };
        let layer = build_tower(spec)?;
        self.inner.lock().expect("inner cache poisoned").insert(slot, layer.clone());
        Ok(layer)
    }

    /// Contraction applied to offsets from an anchor cell.
    fn lambda(&self, lv: &Level) -> ExactScalar {
        let total = i64::from(self.spec.n) * lv.p as i64 + 1;
        (&lv.outer - &lv.inner) * ExactScalar::ratio(1, 4 * total)
    }

    /// Linear map `(x, y) ↦ c·(x, b·y)` for points away from the anchored cells.
    fn free_map(&self, lv: &Level, slot: u32, copy: u32) -> (ExactScalar, ExactScalar) {
        let c = &lv.rho * &ExactScalar::ratio(1, 8 * (i64::from(copy) + 1));
        let b = ExactScalar::one() + ExactScalar::ratio(1, i64::from(slot) + 2);
        (c, b)
    }

    /// Parking point in `U_i(s_∞)` for the unused phase between two sweeps.
    fn gap(&self, lv: &Level, copy: u32, wind: u64) -> (ExactScalar, ExactScalar) {
        let total = i64::from(self.spec.n) * lv.p as i64 + 1;
        let slot = (i64::from(copy) - 1) * lv.p as i64 + wind as i64;
        let half = &lv.rho * &ExactScalar::ratio(1, 2);
        (-half.clone(), -(&half * &ExactScalar::ratio(slot, total)))
    }

    /// Outer cell and sweep for an inner anchor `u`, `|u| ≤ r'`: `(J, t)`.
    fn place(&self, lv: &Level, u: i64) -> Option<(u64, i64)> {
        let rr = self.inner_r(lv) as i64;
        if u.abs() > rr {
            return None;
        }
        let idx = u + rr;
        Some(((idx / lv.k) as u64 + 1, idx % lv.k))
    }

    fn embed_coord(&self, slot: u32, y: &Point) -> Result<Coord> {
        let (level, copy) = self.unslot(slot);
        let lv = self.level(level);
        let inner = self.inner(slot)?;
        let ic = inner.coord(y)?;
        let (x, yy) = ic.as_plane().expect("plane coordinates");
        if let Some((w, t)) = inner.anchor(y).and_then(|u| self.place(&lv, u).map(|wt| (u, wt))).map(|(u, wt)| {
            let (sx, sy) = s_coord(u);
            ((x - &sx, yy - &sy), wt)
        }) {
            let ((dx, dy), (wind, t)) = (w, t);
            let lam = self.lambda(&lv);
            let (bx, by) = if t <= 2 * lv.r as i64 {
                let (sx, sy) = s_coord(t - lv.r as i64);
                (&sx + &lv.eta(self.spec.n, copy, wind), sy)
            } else {
                self.gap(&lv, copy, wind)
            };
            return Ok(Coord::plane(&bx + &(&lam * &dx), &by + &(&lam * &dy)));
        }
        let (c, b) = self.free_map(&lv, slot, copy);
        Ok(Coord::plane(&c * x, &c * &(&b * yy)))
    }

    fn coord(&self, p: &Point) -> Result<Coord> {
        if let Some(c) = s_coord_of(p) {
            return Ok(c);
        }
        match p {
            Point::Embed { slot, inner } => self.embed_coord(*slot, inner),
            _ => Err(Error::UnknownPoint(p.to_string())),
        }
    }

    fn anchor(&self, p: &Point) -> Option<i64> {
        match p {
            Point::S(u) => Some(*u),
            Point::Embed { slot, inner } => {
                let (level, _) = self.unslot(*slot);
                let lv = self.level(level);
                let u = self.inner(*slot).ok()?.anchor(inner)?;
                let (_, t) = self.place(&lv, u)?;
                (t <= 2 * lv.r as i64).then(|| t - lv.r as i64)
            }
            _ => None,
        }
    }

    fn first_level(&self, u: i64) -> u32 {
        (u.unsigned_abs().saturating_sub(self.spec.r0) + 1) as u32
    }

    /// Image of the inner `s_{u'}` that the first sweep of `level` puts on `s_u`.
    fn s_visit(&self, level: u32, u: i64) -> Option<Point> {
        let lv = self.level(level);
        if u.unsigned_abs() > lv.r {
            return None;
        }
        let rr = self.inner_r(&lv) as i64;
        Some(Point::embed(self.slot(level, 1), Point::S(-rr + u + lv.r as i64)))
    }
}

/// `X_alpha` for a successor `alpha ≥ 3`: `S` plus, at every level `i` and
/// copy `m`, an embedded copy of `X_beta` winding `p_i` times per inner sweep.
pub struct Tower {
    core: Arc<Core>,
    space: ScatteredSpace,
}

struct Group {
    offset: usize,
    inner_sinf: usize,
}

impl Tower {
    fn new(spec: TowerSpec) -> Result<Self> {
        let beta = spec.alpha.pred().expect("successor");
        let outer = spec.primes.sub(PrimeOp::Even);
        let core = Arc::new(Core { spec, beta, outer, inner: Mutex::new(BTreeMap::new()) });
        let levels = if core.limit_below() { core.spec.ladder } else { 1 };
        let mut classes = s_classes();
        let mut families = vec![s_family()];
        let mut groups = Vec::new();
        for level in 1..=levels {
            let sample_slot = core.slot(level, 1);
            let inner = core.inner(sample_slot)?;
            let is = inner.space().ok_or_else(|| Error::Placement("inner layer lacks a description".into()))?;
            let inner_sinf = is.class("s_inf").ok_or_else(|| Error::Placement("inner layer lacks s_inf".into()))?;
            let tag = if core.limit_below() { format!("psi{level}") } else { "psi".to_string() };
            let offset = classes.len();
            let map = |c: usize| if c == inner_sinf { 0 } else { offset + c - usize::from(c > inner_sinf) };
            for (c, pc) in is.classes.iter().enumerate() {
                if c != inner_sinf {
                    classes.push(PointClass {
                        label: format!("{tag}({})", pc.label),
                        sample: Point::embed(sample_slot, pc.sample.clone()),
                        ..pc.clone()
                    });
                }
            }
            let lv = core.level(level);
            // Anchored inner points keep norm above 1/(r'+2) and stay within
            // e(r') of their cell center, so closer members share the target's piece.
            let rr = core.inner_r(&lv);
            let (thr_cell, thr_inf) = (cell_radius(rr), ExactScalar::ratio(1, rr as i64 + 2));
            let (c, b) = core.free_map(&lv, sample_slot, 1);
            let scale = std::cmp::max(core.lambda(&lv), &c * &b);
            for (fi, f) in is.families.iter().enumerate() {
                let members = match &f.members {
                    Members::Class(m) => Members::Class(map(*m)),
                    Members::Ladder(ms) => Members::Ladder(ms.iter().map(|&m| map(m)).collect()),
                };
                let cm = core.clone();
                let tail = f.tail.clone();
                let thr = if f.target == inner_sinf { thr_inf.clone() } else { thr_cell.clone() };
                let scale = scale.clone();
                families.push(FamilySchema {
                    label: format!("{tag}({})", f.label),
                    members,
                    target: map(f.target),
                    index: f.index,
                    returns: f.returns,
                    coord: None,
                    tail_text: format!("2 while the inner bound is >= {thr}, else {scale} * ({})", f.tail_text),
                    tail: Arc::new(move |n| {
                        let t = tail(n);
                        if t >= thr {
                            ExactScalar::integer(2)
                        } else {
                            &scale * &t
                        }
                    }),
                    member: Arc::new(move |t, j| {
                        let (slot, y) = match t {
                            Point::SInf => (sample_slot, Point::SInf),
                            Point::Embed { slot, inner } => (*slot, (**inner).clone()),
                            _ => return None,
                        };
                        let inner = cm.inner(slot).ok()?;
                        let f = inner.space()?.families.get(fi)?;
                        (f.member)(&y, j).map(|m| Point::embed(slot, m))
                    }),
                    sample_target: Point::embed(sample_slot, f.sample_target.clone()),
                });
            }
            groups.push(Group { offset, inner_sinf });
        }
        let psi_s: Vec<usize> = groups.iter().map(|g| g.offset + 1 - usize::from(1 > g.inner_sinf)).collect();
        let cm = core.clone();
        let ladder = core.limit_below();
        let r0 = core.spec.r0;
        families.push(FamilySchema {
            label: "psi(S)->S".into(),
            members: if ladder { Members::Ladder(psi_s) } else { Members::Class(psi_s[0]) },
            target: 1,
            index: IndexDomain::N,
            returns: Returns::Unbounded,
            coord: Some("first sweep of copy 1 at level L(u)+j-1 through s_u".into()),
            tail_text: "1/(4(r0+n+1)^2)".into(),
            tail: Arc::new(move |n| cell_radius(r0 + n.max(1) - 1)),
            member: Arc::new(move |t, j| {
                let Point::S(u) = *t else { return None };
                let j = j.max(1) as u32;
                let level = if ladder { j } else { cm.first_level(u) + j - 1 };
                cm.s_visit(level, u)
            }),
            sample_target: Point::S(0),
        });
        let cc = core.clone();
        let groups = Arc::new(groups);
        let class_of = {
            let core = core.clone();
            Arc::new(move |p: &Point| match p {
                Point::SInf => Some(0),
                Point::S(_) => Some(1),
                Point::Embed { slot, inner } => {
                    let (level, _) = core.unslot(*slot);
                    let g = &groups[(level as usize).min(groups.len()) - 1];
                    let c = (core.inner(*slot).ok()?.space()?.class_of)(inner)?;
                    Some(if c == g.inner_sinf { 0 } else { g.offset + c - usize::from(c > g.inner_sinf) })
                }
                _ => None,
            })
        };
        let space = ScatteredSpace {
            name: format!("X_{}", core.spec.alpha),
            classes,
            families,
            class_of,
            coord: Arc::new(move |p| cc.coord(p)),
        };
        let rank = space.cb_rank()?;
        if !ladder && rank != core.spec.alpha {
            return Err(Error::Placement(format!("described rank {rank} differs from {}", core.spec.alpha)));
        }
        Ok(Self { core, space })
    }

    pub fn spec(&self) -> &TowerSpec {
        &self.core.spec
    }

    /// The embedded copy at `(level, copy)`.
    pub fn inner(&self, level: u32, copy: u32) -> Result<LayerRef> {
        self.core.inner(self.core.slot(level, copy))
    }

    pub fn slot(&self, level: u32, copy: u32) -> u32 {
        self.core.slot(level, copy)
    }

    pub fn wind_count(&self, level: u32) -> u64 {
        self.core.level(level).p
    }
}

impl DynSystem for Tower {
    fn family(&self) -> String {
        "tower".into()
    }

    fn params(&self) -> serde_json::Value {
        let s = &self.core.spec;
        serde_json::json!({
            "alpha": s.alpha, "n": s.n, "r0": s.r0, "primes": s.primes, "context": s.context, "ladder": s.ladder,
        })
    }

    fn contains(&self, p: &Point) -> bool {
        match p {
            Point::SInf | Point::S(_) => true,
            Point::Embed { slot, inner } => {
                **inner != Point::SInf && self.core.inner(*slot).map(|l| l.contains(inner)).unwrap_or(false)
            }
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
        self.require(p)?;
        self.core.coord(p)
    }

    fn enumerate(&self, b: &IndexBounds) -> Result<Vec<Point>> {
        let mut out = vec![Point::SInf];
        out.extend((b.lo..=b.hi).map(Point::S));
        for level in 1..=b.depth {
            for copy in 1..=self.core.spec.n {
                let slot = self.core.slot(level, copy);
                let inner = self.core.inner(slot)?;
                for q in inner.enumerate(b)? {
                    if q != Point::SInf {
                        out.push(Point::embed(slot, q));
                    }
                }
            }
        }
        out.sort();
        Ok(out)
    }

    fn default_bounds(&self) -> IndexBounds {
        IndexBounds::symmetric(4, 2)
    }

    fn space(&self) -> Option<&ScatteredSpace> {
        Some(&self.space)
    }
}

impl Tower {
    fn step(&self, p: &Point, forward: bool) -> Result<Point> {
        self.require(p)?;
        match p {
            Point::Embed { slot, inner } => {
                let l = self.core.inner(*slot)?;
                let q = if forward { l.apply(inner)? } else { l.apply_inverse(inner)? };
                Ok(Point::embed(*slot, q))
            }
            _ => Ok(shift(p, if forward { 1 } else { -1 }).expect("S point")),
        }
    }
}

impl Layer for Tower {
    fn anchor(&self, p: &Point) -> Option<i64> {
        self.core.anchor(p)
    }

    fn r0(&self) -> u64 {
        self.core.spec.r0
    }

    fn rank(&self) -> OrdinalCnf {
        self.core.spec.alpha.clone()
    }

    fn wind_window(&self, p: &Point) -> Option<(i64, i64)> {
        match p {
            Point::S(u) => {
                let r = self.core.spec.r0 as i64;
                Some((-r - u, r - u))
            }
            Point::Embed { slot, inner } => self.core.inner(*slot).ok()?.wind_window(inner),
            _ => None,
        }
    }

    /// Per level and copy: the image of `S`, labelled `p_i`, and the images of
    /// the inner families of the first inner level, labelled `p_i · q`.
    fn family_certificates(&self, depth: u32) -> Result<Vec<FamilyCertificate>> {
        let mut out = Vec::new();
        for level in 1..=depth {
            let lv = self.core.level(level);
            for copy in 1..=self.core.spec.n {
                let slot = self.core.slot(level, copy);
                let inner = self.core.inner(slot)?;
                let base = Point::embed(slot, Point::S(0));
                let window = inner.wind_window(&Point::S(0)).expect("S point");
                out.push(certify(self, &base, window, lv.r, lv.p, format!("psi{slot}(S)"))?);
                for c in inner.family_certificates(1)? {
                    let base = Point::embed(slot, c.base.clone());
                    let label = lv.p * c.label;
                    out.push(certify(self, &base, c.window, lv.r, label, format!("psi{slot}({})", c.family))?);
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::validate_space;
    use std::collections::BTreeSet;

    fn o(s: &str) -> OrdinalCnf {
        s.parse().unwrap()
    }

    #[test]
    fn guards() {
        assert!(matches!(build_tower(TowerSpec::new(OrdinalCnf::omega(), 2)), Err(Error::LimitOrdinal(_))));
        assert!(matches!(build_tower(TowerSpec::new(o("w*3"), 2)), Err(Error::OrdinalCap(..))));
        assert!(build_tower(TowerSpec::new(OrdinalCnf::finite(1), 2)).is_err());
        assert_eq!(build_tower(TowerSpec::new(OrdinalCnf::finite(2), 2)).unwrap().family(), "winding-x2");
    }

    #[test]
    fn cofinal_sequences() {
        assert_eq!(cofinal(&OrdinalCnf::omega(), 1), OrdinalCnf::finite(2));
        assert_eq!(cofinal(&o("w*2"), 3), o("w+4"));
        assert_eq!(cofinal(&o("w^2"), 2), o("w*2+1"));
    }

    #[test]
    fn finite_ranks() {
        for (a, prefix) in [(3, 80), (4, 10)] {
            let t = build_tower(TowerSpec::new(OrdinalCnf::finite(a), 2)).unwrap();
            let s = t.space().unwrap();
            assert_eq!(s.cb_rank().unwrap(), OrdinalCnf::finite(a));
            assert_eq!(s.derived_n(a as u32).unwrap().labels(), ["s_inf".to_string()].into());
            assert!(s.derived_n(a as u32 + 1).unwrap().is_empty());
            let rep = validate_space(s, prefix, &ExactScalar::ratio(1, 4)).unwrap();
            // doubly nested tails only shrink past indices far beyond any usable prefix
            let hard: Vec<_> = rep
                .violations
                .iter()
                .filter(|v| !(a > 3 && v.schema.starts_with("psi(psi(") && v.detail.starts_with("tail bound")))
                .collect();
            assert!(hard.is_empty(), "{hard:?}");
        }
    }

    #[test]
    fn limit_predecessor() {
        let t = build_tower(TowerSpec::new(o("w+1"), 2)).unwrap();
        assert_eq!(t.space().unwrap().cb_rank().unwrap(), o("w+1"));
    }

    #[test]
    fn product_labels() {
        let t = build_tower(TowerSpec::new(OrdinalCnf::finite(3), 2)).unwrap();
        let certs = t.family_certificates(1).unwrap();
        let p1 = 2;
        assert_eq!(certs[0].label, p1);
        assert!(certs[0].certificate.uniform);
        assert!(certs.len() > 2);
        for c in &certs {
            if c.family.ends_with("(S)") {
                assert_eq!(c.label, p1);
            } else {
                assert_eq!(c.label % p1, 0);
                assert!(c.label > p1);
            }
        }
    }

    #[test]
    fn coordinates_are_injective_and_equivariant() {
        let t = build_tower(TowerSpec::new(OrdinalCnf::finite(3), 2)).unwrap();
        let pts = t.enumerate(&IndexBounds::symmetric(6, 2)).unwrap();
        let coords: BTreeSet<String> = pts.iter().map(|p| format!("{:?}", t.coord(p).unwrap())).collect();
        assert_eq!(coords.len(), pts.len());
        for p in &pts {
            assert_eq!(&t.apply_inverse(&t.apply(p).unwrap()).unwrap(), p);
        }
    }
}
