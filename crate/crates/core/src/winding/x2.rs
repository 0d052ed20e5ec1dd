use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::neighborhood::{cell_radius, s_coord, NeighborhoodSystem};
use super::number::{winding_number, FamilyCertificate};
use super::primes::{cantor_pair, PrimeStream};
use super::standard::{s_classes, s_coord_of, s_family, shift};
use super::Layer;
use crate::error::{Error, Result};
use crate::exactnum::{ExactScalar, OrdinalCnf};
use crate::space::{
    orbit, Coord, DynSystem, Dynamics, FamilySchema, IndexBounds, IndexDomain, Members, Point, PointClass, Returns,
    ScatteredSpace,
};

/// Parameters of the rank-2 winding construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct X2Params {
    pub n: u32,
    /// Radius of the first neighborhood system; level `i` uses `r0 + i - 1`.
    #[serde(default = "one")]
    pub r0: u64,
    #[serde(default)]
    pub primes: PrimeStream,
    /// Distinguishes embedded copies so that their ray directions differ.
    #[serde(default)]
    pub context: u64,
}

pub(crate) fn one() -> u64 {
    1
}

impl X2Params {
    pub fn new(n: u32, primes: PrimeStream) -> Self {
        Self { n, r0: 1, primes, context: 0 }
    }
}

/// Per-level geometry.
#[derive(Clone, Debug)]
pub(crate) struct Level {
    pub r: u64,
    pub k: i64,
    pub p: u64,
    pub rho: ExactScalar,
    pub outer: ExactScalar,
    pub inner: ExactScalar,
}

pub(crate) fn level_geometry(r0: u64, primes: &PrimeStream, i: u32) -> Level {
    let r = r0 + u64::from(i) - 1;
    Level {
        r,
        k: 2 * r as i64 + 2,
        p: primes.get(i),
        rho: NeighborhoodSystem::nested(r).rho,
        outer: cell_radius(r),
        inner: cell_radius(r + 1),
    }
}

impl Level {
    /// Horizontal offset of copy `m` during wind `J`, strictly between the
    /// radii of `V_{i+1}` and `V_i`.
    pub fn eta(&self, n: u32, m: u32, wind: u64) -> ExactScalar {
        let slot = (u64::from(m) - 1) * self.p + wind;
        let total = u64::from(n) * self.p + 1;
        let frac = ExactScalar::ratio(slot as i64, total as i64);
        &self.inner + &((&self.outer - &self.inner) * frac)
    }

    /// `(J, t)` when index `j` is a wind index: `j = J k + t`, `1 ≤ J ≤ p`, `t ≤ 2r`.
    pub fn wind_of(&self, j: i64) -> Option<(u64, i64)> {
        let (w, t) = (j.div_euclid(self.k), j.rem_euclid(self.k));
        (w >= 1 && w as u64 <= self.p && t <= 2 * self.r as i64).then_some((w as u64, t))
    }

    /// Last wind index.
    pub fn wind_end(&self) -> i64 {
        self.p as i64 * self.k + 2 * self.r as i64
    }
}

#[derive(Clone, Debug)]
struct Core {
    params: X2Params,
}

impl Core {
    fn level(&self, i: u32) -> Level {
        level_geometry(self.params.r0, &self.params.primes, i)
    }

    fn valid(&self, p: &Point) -> bool {
        match p {
            Point::SInf | Point::S(_) => true,
            Point::Fam { level, copy, .. } => *level >= 1 && *copy >= 1 && *copy <= self.params.n,
            _ => false,
        }
    }

    fn ray_slope(&self, level: u32, copy: u32) -> ExactScalar {
        let code = cantor_pair(self.params.context, u64::from(level) - 1) as i64 + 1;
        let n = i64::from(self.params.n);
        &(ExactScalar::one() - ExactScalar::ratio(1, code + 1))
            + &ExactScalar::ratio(i64::from(copy) - 1, n * 2 * (code + 1) * (code + 2))
    }

    fn coord(&self, p: &Point) -> Result<Coord> {
        if let Some(c) = s_coord_of(p) {
            return Ok(c);
        }
        let Point::Fam { level, copy, j } = *p else {
            return Err(Error::UnknownPoint(p.to_string()));
        };
        if !self.valid(p) {
            return Err(Error::UnknownPoint(p.to_string()));
        }
        let lv = self.level(level);
        if let Some((w, t)) = lv.wind_of(j) {
            let (x, y) = s_coord(t - lv.r as i64);
            return Ok(Coord::plane(&x + &lv.eta(self.params.n, copy, w), y));
        }
        let den = if j >= 0 { 2 * j + 2 } else { 1 - 2 * j };
        let tau = &lv.rho * &ExactScalar::ratio(1, den);
        Ok(Coord::plane(-tau.clone(), &tau * &self.ray_slope(level, copy)))
    }

    fn anchor(&self, p: &Point) -> Option<i64> {
        match *p {
            Point::S(u) => Some(u),
            Point::Fam { level, j, .. } => {
                let lv = self.level(level);
                lv.wind_of(j).map(|(_, t)| t - lv.r as i64)
            }
            _ => None,
        }
    }

    /// First level whose radius covers `s_u`.
    fn first_level(&self, u: i64) -> u32 {
        (u.unsigned_abs().saturating_sub(self.params.r0) + 1) as u32
    }
}

/// The rank-2 space `X₂ = S ∪ ⋃ Y_i` with `n` parallel orbit families per level.
#[derive(Clone, Debug)]
pub struct WindingX2 {
    core: Arc<Core>,
    space: ScatteredSpace,
}

pub fn build_winding_x2(params: X2Params) -> Result<WindingX2> {
    if params.n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if params.r0 < 1 {
        return Err(Error::InvalidArgument("r0 must be at least 1".into()));
    }
    let core = Arc::new(Core { params });
    let lv1 = core.level(1);
    for i in 1..=4 {
        let lv = core.level(i);
        if lv.p < 2 {
            return Err(Error::Placement(format!("level {i}: wind count {} below 2", lv.p)));
        }
    }
    let mut classes = s_classes();
    classes.push(PointClass {
        label: "Y".into(),
        sample: Point::Fam { level: 1, copy: 1, j: 0 },
        dynamics: Dynamics::Orbit,
        single: false,
    });
    let (w1, rho1) = (lv1.wind_end(), lv1.rho.clone());
    let c = core.clone();
    let families = vec![
        s_family(),
        FamilySchema {
            label: "Y->s_inf".into(),
            members: Members::Class(2),
            target: 0,
            index: IndexDomain::Z,
            returns: Returns::None,
            coord: Some("x[1,1,j]: rho_1/(2|j|+1)-ray outside the wind indices".into()),
            tail_text: format!("2 for n <= {w1}, else rho_1/(2n+1)"),
            tail: Arc::new(move |n| {
                if n as i64 <= w1 {
                    ExactScalar::integer(2)
                } else {
                    &rho1 * &ExactScalar::ratio(1, 2 * n as i64 + 1)
                }
            }),
            member: Arc::new(|_, j| Some(Point::Fam { level: 1, copy: 1, j })),
            sample_target: Point::SInf,
        },
        FamilySchema {
            label: "Y->S".into(),
            members: Members::Class(2),
            target: 1,
            index: IndexDomain::N,
            returns: Returns::Unbounded,
            coord: Some("first-wind visit of s_u by copy 1 of level L(u)+j-1".into()),
            tail_text: "1/(4(r0+n+1)^2)".into(),
            tail: {
                let r0 = core.params.r0;
                Arc::new(move |n| cell_radius(r0 + n.max(1) - 1))
            },
            member: Arc::new(move |t, j| {
                let Point::S(u) = *t else { return None };
                let level = c.first_level(u) + j.max(1) as u32 - 1;
                let lv = c.level(level);
                Some(Point::Fam { level, copy: 1, j: lv.k + u + lv.r as i64 })
            }),
            sample_target: Point::S(0),
        },
    ];
    let cc = core.clone();
    let space = ScatteredSpace {
        name: "X2".into(),
        classes,
        families,
        class_of: Arc::new(|p| match p {
            Point::SInf => Some(0),
            Point::S(_) => Some(1),
            Point::Fam { .. } => Some(2),
            _ => None,
        }),
        coord: Arc::new(move |p| cc.coord(p)),
    };
    Ok(WindingX2 { core, space })
}

impl WindingX2 {
    pub fn params(&self) -> &X2Params {
        &self.core.params
    }

    pub fn wind_count(&self, level: u32) -> u64 {
        self.core.level(level).p
    }

    pub fn neighborhoods(&self, level: u32) -> NeighborhoodSystem {
        NeighborhoodSystem::nested(self.core.level(level).r)
    }
}

impl DynSystem for WindingX2 {
    fn family(&self) -> String {
        "winding-x2".into()
    }

    fn params(&self) -> serde_json::Value {
        let p = &self.core.params;
        serde_json::json!({ "n": p.n, "r0": p.r0, "primes": p.primes, "context": p.context })
    }

    fn contains(&self, p: &Point) -> bool {
        self.core.valid(p)
    }

    fn apply(&self, p: &Point) -> Result<Point> {
        step(self, p, 1)
    }

    fn apply_inverse(&self, p: &Point) -> Result<Point> {
        step(self, p, -1)
    }

    fn coord(&self, p: &Point) -> Result<Coord> {
        self.core.coord(p)
    }

    /// `s_j` and `x[level, copy, j]` for `j` in the bounds and levels up to `depth`.
    fn enumerate(&self, b: &IndexBounds) -> Result<Vec<Point>> {
        let mut out = vec![Point::SInf];
        for j in b.lo..=b.hi {
            out.push(Point::S(j));
            for level in 1..=b.depth {
                for copy in 1..=self.core.params.n {
                    out.push(Point::Fam { level, copy, j });
                }
            }
        }
        out.sort();
        Ok(out)
    }

    fn default_bounds(&self) -> IndexBounds {
        IndexBounds::symmetric(12, 3)
    }

    fn space(&self) -> Option<&ScatteredSpace> {
        Some(&self.space)
    }
}

fn step(sys: &WindingX2, p: &Point, by: i64) -> Result<Point> {
    sys.require(p)?;
    Ok(match *p {
        Point::Fam { level, copy, j } => Point::Fam { level, copy, j: j + by },
        _ => shift(p, by).expect("S point"),
    })
}

impl Layer for WindingX2 {
    fn anchor(&self, p: &Point) -> Option<i64> {
        self.core.anchor(p)
    }

    fn r0(&self) -> u64 {
        self.core.params.r0
    }

    fn rank(&self) -> OrdinalCnf {
        OrdinalCnf::finite(2)
    }

    fn wind_window(&self, p: &Point) -> Option<(i64, i64)> {
        match *p {
            Point::S(u) => {
                let r = self.core.params.r0 as i64;
                Some((-r - u, r - u))
            }
            Point::Fam { level, j, .. } => {
                let lv = self.core.level(level);
                Some((lv.k - j, lv.wind_end() - j))
            }
            _ => None,
        }
    }

    fn family_certificates(&self, depth: u32) -> Result<Vec<FamilyCertificate>> {
        let mut out = Vec::new();
        for level in 1..=depth {
            let lv = self.core.level(level);
            for copy in 1..=self.core.params.n {
                let base = Point::Fam { level, copy, j: 0 };
                let window = self.wind_window(&base).expect("family point");
                out.push(certify(self, &base, window, lv.r, lv.p, format!("Y[{level},{copy}]"))?);
            }
        }
        Ok(out)
    }
}

/// Computes the certificate of the orbit of `base` over `window` (padded by
/// two indices) with respect to `V_r` and checks it against `label`.
pub(crate) fn certify(
    sys: &dyn DynSystem,
    base: &Point,
    window: (i64, i64),
    r: u64,
    label: u64,
    family: String,
) -> Result<FamilyCertificate> {
    let (lo, hi) = (window.0 - 2, window.1 + 2);
    let pts = orbit(sys, base, lo, hi)?;
    let seq: Vec<(i64, Coord)> = pts.iter().zip(lo..).map(|(p, m)| Ok((m, sys.coord(p)?))).collect::<Result<_>>()?;
    let v = NeighborhoodSystem::nested(r);
    let cert = winding_number(&seq, &v)?
        .ok_or_else(|| Error::Placement(format!("family {family}: orbit does not wind around S")))?;
    if cert.d != label {
        return Err(Error::Placement(format!("family {family}: winds {} times, expected {label}", cert.d)));
    }
    Ok(FamilyCertificate { family, base: base.clone(), label, window, certificate: cert })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{hausdorff_distance, validate_space};
    use std::collections::BTreeSet;

    fn x2(n: u32) -> WindingX2 {
        build_winding_x2(X2Params::new(n, PrimeStream::default())).unwrap()
    }

    #[test]
    fn ranks_and_derived_sets() {
        let x = x2(2);
        let s = x.space().unwrap();
        assert_eq!(s.cb_rank().unwrap(), OrdinalCnf::finite(2));
        assert_eq!(s.derived_n(1).unwrap().labels(), ["S", "s_inf"].iter().map(|l| l.to_string()).collect());
        assert_eq!(s.derived_n(2).unwrap().labels(), ["s_inf".to_string()].into());
        let rep = validate_space(s, 50, &ExactScalar::ratio(1, 10)).unwrap();
        assert!(rep.ok, "{:?}", rep.violations);
    }

    #[test]
    fn certificates_and_labels() {
        for n in [1, 2, 3] {
            let x = x2(n);
            let certs = x.family_certificates(3).unwrap();
            assert_eq!(certs.len(), 3 * n as usize);
            let labels: Vec<u64> = certs.iter().map(|c| c.label).collect();
            for p in [2, 3, 5] {
                assert_eq!(labels.iter().filter(|&&l| l == p).count(), n as usize);
            }
            for c in &certs {
                assert!(c.certificate.uniform);
            }
        }
    }

    #[test]
    fn copies_share_cells() {
        let x = x2(3);
        let lv = x.core.level(2);
        let v = x.neighborhoods(2);
        for j in -5..=(lv.wind_end() + 5) {
            let cells: BTreeSet<_> = (1..=3)
                .map(|m| format!("{:?}", v.locate(&x.coord(&Point::Fam { level: 2, copy: m, j }).unwrap()).unwrap()))
                .collect();
            assert_eq!(cells.len(), 1, "j = {j}");
        }
    }

    #[test]
    fn coordinates_are_injective() {
        let x = x2(2);
        let pts = x.enumerate(&IndexBounds::symmetric(30, 4)).unwrap();
        let coords: BTreeSet<String> = pts.iter().map(|p| format!("{:?}", x.coord(p).unwrap())).collect();
        assert_eq!(coords.len(), pts.len());
    }

    #[test]
    fn levels_approach_s() {
        let x = x2(2);
        let mut prev: Option<ExactScalar> = None;
        for level in 1..=4 {
            let lv = x.core.level(level);
            let winds: Vec<Coord> = (lv.k..=lv.wind_end())
                .filter(|&j| lv.wind_of(j).is_some())
                .map(|j| x.coord(&Point::Fam { level, copy: 1, j }).unwrap())
                .collect();
            let r = lv.r as i64;
            let s: Vec<Coord> = (-r..=r).map(|u| x.coord(&Point::S(u)).unwrap()).collect();
            let d = hausdorff_distance(&winds, &s).unwrap();
            if let Some(p) = &prev {
                assert!(&d < p);
            }
            prev = Some(d);
        }
    }
}
