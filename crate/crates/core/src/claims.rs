//! Named claims checked end to end at desk scale. Each claim bundles one or
//! more numbered criteria; every criterion is a list of pass/fail checks
//! with the data that decided them.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{
    ball_cover, classify_expansiveness, clique_cover, companion_set, compare_derived, cover_companion_oracle,
    depth_chain, fixed_points, max_companion_profile, omega::find_return, power_containment,
    refute_positive_n_expansiveness, ChainMode, DepthParams, Mode, SeparationTable, Verdict,
};
use crate::denjoy::build_denjoy;
use crate::error::{Error, Result};
use crate::exactnum::{ExactScalar, OrdinalCnf};
use crate::space::{orbit, truncate, Delta, DynSystem, IndexBounds, Point, SystemRef, Truncation};
use crate::winding::{
    build_harmonic, build_limit_glue, build_tower, build_winding_x2, standard_s, TowerSpec, X2Params,
};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub detail: Value,
}

fn check(name: impl Into<String>, ok: bool, detail: Value) -> Check {
    Check { name: name.into(), ok, detail }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub criterion: u32,
    pub title: String,
    pub ok: bool,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimReport {
    pub claim: String,
    pub ok: bool,
    pub criteria: Vec<CriterionReport>,
}

/// Claim name, the criteria it covers, and a one-line summary.
pub const CLAIMS: [(&str, &[u32], &str); 9] = [
    ("thm3.1", &[1, 2], "modified Denjoy system: fibers are forward companions, two-sided expansive"),
    ("thm4.2", &[3], "X_2 has rank 2 and essentially n-point companion sets"),
    ("thm4.4", &[4], "Omega chains of X_2 and the rank-3 tower have depth 2 and 3"),
    ("cor4.5", &[5], "limit glue of towers of ranks 2, 3, 4 has rank omega"),
    ("ex5.1", &[6], "harmonic example: fixed points {0, 1}, growing companion sets of 0"),
    ("thm3.3", &[7], "countable spaces carry forward companions beyond any n"),
    ("thm2.6", &[8], "companions of T are companions of T^k"),
    ("rem2.5", &[9], "cover oracle agrees with the companion profile"),
    ("derived", &[10], "derived sets of descriptions agree with prefix computations"),
];

pub const TITLES: [&str; 11] = [
    "Denjoy n=3: forward fibers, two-sided singletons",
    "Denjoy two-sided verdict n-expansive(1) below 1/6",
    "X_2 rank, derived sets and n-point companion witnesses",
    "depth chains of X_2 and the rank-3 tower",
    "limit glue rank omega with increasing witness chain",
    "harmonic fixed points and companion growth",
    "refuter finds forward witnesses beyond n",
    "companion containment under powers",
    "cover oracle brackets the companion profile, exact on at least 3 instances",
    "derived sets: description vs prefix computation",
    "determinism of reports",
];

/// Options shared by the claims; `n` restricts claims parameterized by the
/// expansiveness level.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ClaimOptions {
    pub n: Option<u32>,
}

pub fn verify_claim(name: &str, opts: &ClaimOptions) -> Result<ClaimReport> {
    let (_, criteria, _) = CLAIMS
        .iter()
        .find(|(c, _, _)| *c == name)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown claim `{name}`")))?;
    let criteria = criteria.iter().map(|&c| run_criterion(c, opts)).collect::<Result<Vec<_>>>()?;
    Ok(ClaimReport { claim: name.to_string(), ok: criteria.iter().all(|c| c.ok), criteria })
}

pub fn run_criterion(c: u32, opts: &ClaimOptions) -> Result<CriterionReport> {
    let checks = match c {
        1 => denjoy_companions()?,
        2 => denjoy_expansive()?,
        3 => x2_companions(opts)?,
        4 => depth_chains(opts)?,
        5 => limit_glue()?,
        6 => harmonic()?,
        7 => refuter()?,
        8 => powers()?,
        9 => oracle()?,
        10 => derived()?,
        11 => determinism(opts)?,
        _ => return Err(Error::InvalidArgument(format!("no criterion {c}"))),
    };
    Ok(CriterionReport {
        criterion: c,
        title: TITLES[c as usize - 1].to_string(),
        ok: checks.iter().all(|k| k.ok),
        checks,
    })
}

fn r(p: i64, q: i64) -> ExactScalar {
    ExactScalar::ratio(p, q)
}

fn grid() -> [ExactScalar; 3] {
    [r(1, 4), r(1, 8), r(1, 16)]
}

fn x2(n: u32) -> Result<SystemRef> {
    Ok(Arc::new(build_winding_x2(X2Params::new(n, Default::default()))?))
}

fn ns(opts: &ClaimOptions) -> Vec<u32> {
    opts.n.map_or_else(|| vec![2, 3], |n| vec![n])
}

/// Fiber `k` of the Denjoy system when `members` is exactly one full fiber.
fn fiber_of(members: &[Point], n: u32) -> Option<i64> {
    let ks: BTreeSet<i64> = members
        .iter()
        .map(|p| match p {
            Point::Arc { k, .. } => Some(*k),
            _ => None,
        })
        .collect::<Option<_>>()?;
    (ks.len() == 1 && members.len() == n as usize).then(|| *ks.iter().next().expect("one fiber"))
}

fn denjoy_companions() -> Result<Vec<Check>> {
    let d = Arc::new(build_denjoy(3)?);
    let tr = truncate(d, &IndexBounds::symmetric(32, 0).with_samples(16), 64)?;
    let delta = r(1, 8);
    let fwd = max_companion_profile(&tr, &delta, &[64], Mode::Forward)?.remove(0);
    let fiber = fiber_of(&fwd.members, 3);
    let mut checks = vec![check(
        "forward max companion cardinality is 3 with a fiber witness A_k, k >= 2",
        fwd.max_card == 3 && fiber.is_some_and(|k| k >= 2),
        json!({ "points": tr.len(), "horizon": 64, "max_card": fwd.max_card, "witness": fwd.witness, "members": fwd.members }),
    )];
    let two = max_companion_profile(&tr, &delta, &[64], Mode::TwoSided)?.remove(0);
    checks.push(check(
        "two-sided max companion cardinality is 1",
        two.max_card == 1,
        json!({ "max_card": two.max_card, "witness": two.witness, "members": two.members }),
    ));
    for delta in grid() {
        let table = SeparationTable::build(&tr, &Delta::new(delta.clone())?, 64, Mode::Forward)?;
        let exact: Vec<i64> = (0..=32)
            .filter(|&k| {
                tr.position(&Point::Arc { k, i: 0 }).is_some_and(|i| {
                    let members: Vec<Point> =
                        table.companions(i, 64).into_iter().map(|j| tr.points()[j].clone()).collect();
                    fiber_of(&members, 3) == Some(k)
                })
            })
            .collect();
        checks.push(check(
            format!("fiber witness of forward cardinality exactly 3 at delta {delta}"),
            !exact.is_empty(),
            json!({ "delta": delta, "fibers": exact }),
        ));
    }
    // the same scan at longer horizons, to locate where the profile settles
    let long = truncate(Arc::new(build_denjoy(3)?), &IndexBounds::symmetric(32, 0).with_samples(16), 320)?;
    let horizons = [64, 100, 128, 200, 256, 320];
    let fwd_long = max_companion_profile(&long, &delta, &horizons, Mode::Forward)?;
    let two_long = max_companion_profile(&long, &delta, &horizons, Mode::TwoSided)?;
    let rows = |p: &[crate::analysis::ProfileRow]| -> Value {
        p.iter().map(|r| json!({ "horizon": r.horizon, "max_card": r.max_card, "witness": r.witness })).collect()
    };
    checks.push(check(
        "profiles at longer horizons (informational)",
        true,
        json!({ "delta": delta, "forward": rows(&fwd_long), "two_sided": rows(&two_long) }),
    ));
    Ok(checks)
}

fn denjoy_expansive() -> Result<Vec<Check>> {
    let d = Arc::new(build_denjoy(3)?);
    let tr = truncate(d, &IndexBounds::symmetric(32, 0).with_samples(16), 256)?;
    let deltas: Vec<ExactScalar> = grid().into_iter().filter(|d| *d < r(1, 6)).collect();
    let c = classify_expansiveness(&tr, &deltas, &[200, 256], Mode::TwoSided)?;
    Ok(c.deltas
        .iter()
        .map(|dc| {
            check(
                format!("two-sided verdict at delta {} is n-expansive(1)", dc.delta),
                dc.verdict == Verdict::NExpansive(1),
                json!({
                    "verdict": dc.verdict,
                    "stable": dc.stable,
                    "half_max": dc.half_max,
                    "profile": dc.profile.iter().map(|r| json!({ "horizon": r.horizon, "max_card": r.max_card })).collect::<Vec<_>>(),
                }),
            )
        })
        .collect())
}

/// Smallest scanned horizon from which the profile no longer changes.
fn settle_horizon(rows: &[crate::analysis::ProfileRow]) -> u32 {
    let last = rows.last().expect("nonempty");
    let mut h = last.horizon;
    for row in rows.iter().rev() {
        if row.max_card == last.max_card && row.members == last.members {
            h = row.horizon;
        } else {
            break;
        }
    }
    h
}

fn x2_companions(opts: &ClaimOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for n in ns(opts) {
        let sys = x2(n)?;
        let s = sys.space().expect("described");
        let rank = s.cb_rank()?;
        let top = s.derived_n(2)?.labels();
        checks.push(check(
            format!("n={n}: cb_rank 2 and second derived set {{s_inf}}"),
            rank == OrdinalCnf::finite(2) && top == ["s_inf".to_string()].into(),
            json!({ "rank": rank, "derived2": top }),
        ));
        let tr = truncate(sys.clone(), &IndexBounds::symmetric(12, 3), 80)?;
        let horizons: Vec<u32> = (0..=80).collect();
        for delta in grid() {
            let table = SeparationTable::build(&tr, &Delta::new(delta.clone())?, 80, Mode::TwoSided)?;
            let rows = crate::analysis::companions::profile_from_table(&tr, &table, &horizons);
            let last = rows.last().expect("nonempty");
            let settle = settle_horizon(&rows);
            let monotone = (0..tr.len()).all(|i| (1..=80).all(|h| table.count(i, h) <= table.count(i, h - 1)));
            let exact = companion_set(&tr, &last.witness, &delta, 80, Mode::TwoSided)?;
            let tuple = match last.members.as_slice() {
                [Point::Fam { level, j, .. }, ..] => {
                    let want: Vec<Point> = (1..=n).map(|copy| Point::Fam { level: *level, copy, j: *j }).collect();
                    last.members == want
                }
                _ => false,
            };
            checks.push(check(
                format!("n={n}, delta {delta}: stabilized max {n} with companion set exactly {{y_1..y_{n}}}"),
                last.max_card == n as usize && tuple && exact.members == last.members && monotone,
                json!({
                    "points": tr.len(),
                    "max_card": last.max_card,
                    "witness": last.witness,
                    "members": last.members,
                    "stabilization_horizon": settle,
                    "scan_horizon": 80,
                    "monotone": monotone,
                }),
            ));
        }
    }
    Ok(checks)
}

fn chain_labels(c: &crate::analysis::OmegaChain) -> Vec<Vec<String>> {
    c.levels.iter().map(|l| l.classes.clone()).collect()
}

fn depth_chains(opts: &ClaimOptions) -> Result<Vec<Check>> {
    let n = opts.n.unwrap_or(2);
    let sys = x2(n)?;
    let mut checks = Vec::new();
    let mut chains = Vec::new();
    for mode in [ChainMode::Wandering, ChainMode::Multi] {
        let c = depth_chain(&sys, mode, &DepthParams::default())?;
        let labels = chain_labels(&c);
        let ok = c.depth == OrdinalCnf::finite(2)
            && labels.len() == 3
            && labels[1] == ["s_inf".to_string(), "S".to_string()]
            && labels[2] == ["s_inf".to_string()];
        checks.push(check(
            format!("X_2 {mode:?} chain X_2 > S > {{s_inf}} with depth 2"),
            ok,
            json!({ "depth": c.depth, "levels": labels }),
        ));
        chains.push(labels);
    }
    checks.push(check("wandering and multi chains coincide", chains[0] == chains[1], json!({})));
    let tr = truncate(sys, &IndexBounds::symmetric(12, 3), 40)?;
    let w = find_return(&tr, &Point::S(0), &Delta::new(r(1, 4))?, 12, 3, &|_| true)?;
    checks.push(check(
        "s_0 has an arithmetic-progression return of length d+1 = 4 into B_{1/4}(s_0)",
        w.as_ref().is_some_and(|w| w.hits.len() == 4 && w.witness != Point::S(0)),
        serde_json::to_value(&w)?,
    ));
    let tower: SystemRef = build_tower(TowerSpec::new(OrdinalCnf::finite(3), n))?;
    let rank = tower.space().expect("described").cb_rank()?;
    let p = DepthParams { bounds: IndexBounds::symmetric(4, 1), horizon: 16, ..Default::default() };
    let c = depth_chain(&tower, ChainMode::Multi, &p)?;
    let w = depth_chain(&tower, ChainMode::Wandering, &p)?;
    checks.push(check(
        "rank-3 tower: rank 3 and depth 3 in both modes",
        rank == OrdinalCnf::finite(3) && c.depth == OrdinalCnf::finite(3) && w.depth == OrdinalCnf::finite(3),
        json!({ "rank": rank, "depth_multi": c.depth, "depth_wandering": w.depth, "levels": chain_labels(&c) }),
    ));
    Ok(checks)
}

fn glue_components(n: u32, ranks: &[u64]) -> Result<Vec<SystemRef>> {
    ranks.iter().map(|&a| build_tower(TowerSpec::new(OrdinalCnf::finite(a), n)).map(|t| t as SystemRef)).collect()
}

fn limit_glue() -> Result<Vec<Check>> {
    let origin = crate::space::Coord::plane(ExactScalar::zero(), ExactScalar::zero());
    let g = build_limit_glue(glue_components(2, &[2, 3, 4])?, origin.clone())?;
    let rank = g.space().expect("described").cb_rank()?;
    let chain = g.witness_chain();
    let increasing = chain.windows(2).all(|w| w[0].rank < w[1].rank);
    let fixed = orbit(&g, &Point::GlueFix, -5, 5)?.iter().all(|p| *p == Point::GlueFix);
    let rejected = build_limit_glue(glue_components(2, &[2, 2])?, origin).is_err();
    Ok(vec![
        check("glued rank is omega", rank == OrdinalCnf::omega(), json!({ "rank": rank })),
        check("witness chain strictly increasing", increasing, serde_json::to_value(chain)?),
        check("x0 is fixed", fixed, json!({})),
        check("repeated ranks are rejected", rejected, json!({})),
    ])
}

fn harmonic_count(n: i64) -> Result<usize> {
    let tr = truncate(Arc::new(build_harmonic()), &IndexBounds::new(1, n, 0), 8)?;
    Ok(companion_set(&tr, &Point::HarmonicZero, &r(1, 8), 8, Mode::TwoSided)?.members.len())
}

fn harmonic() -> Result<Vec<Check>> {
    let tr = truncate(Arc::new(build_harmonic()), &IndexBounds::new(1, 1024, 0), 8)?;
    let fixed = fixed_points(&tr)?;
    let (c10, c11) = (harmonic_count(1024)?, harmonic_count(2048)?);
    Ok(vec![
        check(
            "fixed points are exactly {0, 1}",
            fixed == vec![Point::HarmonicZero, Point::Harmonic(1)],
            json!({ "fixed": fixed }),
        ),
        check("companions of 0 at delta 1/8, N = 2^10: at least 1000", c10 >= 1000, json!({ "count": c10 })),
        check("count strictly increases when N doubles", c11 > c10, json!({ "n1024": c10, "n2048": c11 })),
    ])
}

fn refuter() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let cases: Vec<(&str, Truncation, u32)> = vec![
        ("harmonic", truncate(Arc::new(build_harmonic()), &IndexBounds::new(1, 63, 0), 8)?, 8),
        ("winding-x2", truncate(x2(2)?, &IndexBounds::symmetric(12, 3), 80)?, 80),
    ];
    for (name, tr, h) in &cases {
        for n in 1..=5 {
            let rows = refute_positive_n_expansiveness(tr, n, &grid(), *h)?;
            let found = rows.iter().all(|r| r.witness.is_some() && r.cardinality > n);
            let detail: Vec<Value> = rows
                .iter()
                .map(|r| json!({ "delta": r.delta, "witness": r.witness, "cardinality": r.cardinality }))
                .collect();
            checks.push(check(format!("{name}: forward witness beyond n={n} at every delta"), found, json!(detail)));
        }
    }
    Ok(checks)
}

fn powers() -> Result<Vec<Check>> {
    let origin = crate::space::Coord::plane(ExactScalar::zero(), ExactScalar::zero());
    let systems: Vec<(&str, SystemRef, IndexBounds)> = vec![
        ("standard-s", Arc::new(standard_s()), IndexBounds::symmetric(8, 0)),
        ("harmonic", Arc::new(build_harmonic()), IndexBounds::new(1, 31, 0)),
        ("winding-x2 n=2", x2(2)?, IndexBounds::symmetric(6, 2)),
        ("winding-x2 n=3", x2(3)?, IndexBounds::symmetric(6, 2)),
        ("tower 3", build_tower(TowerSpec::new(OrdinalCnf::finite(3), 2))?, IndexBounds::symmetric(3, 1)),
        ("limit-glue", Arc::new(build_limit_glue(glue_components(2, &[2, 3])?, origin)?), IndexBounds::symmetric(2, 0)),
        ("denjoy", Arc::new(build_denjoy(3)?), IndexBounds::symmetric(6, 0).with_samples(4)),
    ];
    let mut checks = Vec::new();
    for (name, sys, b) in systems {
        let tr = truncate(sys, &b, 12)?;
        for k in [2, 3] {
            let c = power_containment(&tr, k, &r(1, 8), 12)?;
            checks.push(check(
                format!("{name}: companions under T inside companions under T^{k}"),
                c.holds(),
                json!({ "points": c.points, "violations": c.violations.len() }),
            ));
        }
    }
    Ok(checks)
}

fn oracle() -> Result<Vec<Check>> {
    let cases: Vec<(&str, SystemRef, IndexBounds, ExactScalar)> = vec![
        ("harmonic", Arc::new(build_harmonic()), IndexBounds::new(1, 15, 0), r(1, 8)),
        ("standard-s", Arc::new(standard_s()), IndexBounds::symmetric(6, 0), r(1, 8)),
        ("winding-x2 n=2", x2(2)?, IndexBounds::symmetric(2, 1), r(1, 16)),
        ("denjoy n=3", Arc::new(build_denjoy(3)?), IndexBounds::symmetric(8, 0), r(1, 8)),
    ];
    let h = 4;
    let mut checks = Vec::new();
    let mut matched = 0;
    for (name, sys, b, delta) in cases {
        let tr = truncate(sys, &b, h)?;
        let cover = clique_cover(&tr, &delta, h)?;
        let o = cover_companion_oracle(&tr, &cover, h)?;
        let p = max_companion_profile(&tr, &delta, &[h], Mode::TwoSided)?.remove(0);
        let balls = cover_companion_oracle(&tr, &ball_cover(&tr, &delta, h)?, h)?;
        let exact = o.max_card == p.max_card;
        matched += usize::from(exact);
        checks.push(check(
            format!("{name}: clique oracle <= companion maximum <= ball oracle"),
            o.max_card <= p.max_card && p.max_card <= balls.max_card,
            json!({
                "exact": exact,
                "points": tr.len(),
                "delta": delta,
                "horizon": h,
                "oracle": o.max_card,
                "profile": p.max_card,
                "ball_cover_bound": balls.max_card,
                "cover_size": o.cover_size,
            }),
        ));
    }
    checks.push(check(
        "clique oracle matches exactly on at least 3 instances",
        matched >= 3,
        json!({ "matched": matched }),
    ));
    Ok(checks)
}

fn derived() -> Result<Vec<Check>> {
    let systems: Vec<(&str, SystemRef)> = vec![
        ("standard-s", Arc::new(standard_s())),
        ("winding-x2", x2(2)?),
        ("tower 3", build_tower(TowerSpec::new(OrdinalCnf::finite(3), 2))?),
    ];
    let mut checks = Vec::new();
    for (name, sys) in systems {
        let s = sys.space().expect("described");
        for prefix in [20, 50, 100] {
            let c = compare_derived(s, prefix)?;
            let levels: Vec<Value> =
                c.levels.iter().map(|l| json!({ "k": l.k, "schema": l.schema, "brute": l.brute })).collect();
            checks.push(check(format!("{name}: prefix {prefix}"), c.agree, json!(levels)));
        }
    }
    Ok(checks)
}

/// Runs criteria 1 to 10 twice and compares the serialized reports.
fn determinism(opts: &ClaimOptions) -> Result<Vec<Check>> {
    (1..=10)
        .map(|c| {
            let a = serde_json::to_string(&run_criterion(c, opts)?)?;
            let b = serde_json::to_string(&run_criterion(c, opts)?)?;
            Ok(check(format!("criterion {c} reports are byte-identical"), a == b, json!({ "bytes": a.len() })))
        })
        .collect()
}
