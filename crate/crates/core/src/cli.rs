//! Command-line surface of the `expansive` binary.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::analysis::{
    ball_cover, cb_rank_checked, classify_expansiveness, clique_cover, companion_set, compare_derived,
    converging_semiorbits, cover_companion_oracle, depth_chain, fixed_points, max_companion_profile,
    multi_nonwandering, nonwandering, periodic_points, power_containment, refute_positive_n_expansiveness, ChainMode,
    DepthParams, Mode,
};
use crate::claims::{verify_claim, ClaimOptions, CLAIMS};
use crate::denjoy::arc_diameter_profile;
use crate::emit::{emit_table, TableKind};
use crate::error::{Error, Result};
use crate::exactnum::{ExactScalar, OrdinalCnf};
use crate::report::{decimal, digits_for_bits, read_report, write_atomic, Report, RunConfig};
use crate::space::{truncate, validate_space, IndexBounds, Point, Truncation};
use crate::sysfile::{self, build_family, describe, Built, SystemFile};

#[derive(Parser, Debug)]
#[command(name = "expansive", version, about = "Companion sets, ranks and recurrence of countable dynamical systems")]
struct Cli {
    /// Bits of precision for decimal renderings and certified intervals.
    #[arg(long, global = true, env = "EXPANSIVE_PRECISION", default_value_t = 64)]
    precision: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a system and write its system file.
    Build(BuildArgs),
    /// Run one analysis on a system file.
    Analyze {
        #[arg(value_enum)]
        what: Analysis,
        #[command(flatten)]
        args: Box<AnalyzeArgs>,
    },
    /// Check a named claim end to end.
    Verify {
        #[arg(long)]
        claim: String,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turn a report into a tab-separated table.
    Emit {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        kind: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
struct BoundsArgs {
    #[arg(long, allow_hyphen_values = true)]
    lo: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    hi: Option<i64>,
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long)]
    samples: Option<u32>,
    #[arg(long)]
    horizon: Option<u32>,
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: Option<u32>,
    /// Tower ordinal, e.g. `3` or `w+1`.
    #[arg(long)]
    alpha: Option<String>,
    /// Extra family parameters as a JSON object.
    #[arg(long)]
    params: Option<String>,
    #[command(flatten)]
    bounds: BoundsArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Analysis {
    Companions,
    Profile,
    Classify,
    Rank,
    Derived,
    Omega,
    Multi,
    Depth,
    Fix,
    Per,
    Cs,
    Refute,
    Oracle,
    Power,
    ArcDiameter,
    Validate,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Forward,
    TwoSided,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ChainArg {
    Wandering,
    Multi,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CoverArg {
    Clique,
    Ball,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[arg(long)]
    sys: PathBuf,
    #[command(flatten)]
    bounds: BoundsArgs,
    /// Distance threshold; repeat for a grid. Default 1/4, 1/8, 1/16.
    #[arg(long)]
    delta: Vec<ExactScalar>,
    #[arg(long, value_enum, default_value = "two-sided")]
    mode: ModeArg,
    #[arg(long)]
    point: Option<Point>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<i64>,
    #[arg(long)]
    epsilon: Option<ExactScalar>,
    #[arg(long)]
    max_k: Option<u32>,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long, value_enum, default_value = "multi")]
    chain: ChainArg,
    #[arg(long, value_enum, default_value = "clique")]
    cover: CoverArg,
    #[arg(long)]
    prefix: Option<usize>,
    #[arg(long)]
    max_period: Option<u32>,
    #[arg(long)]
    tol: Option<ExactScalar>,
    /// Profile horizons; default every horizon up to the truncation's.
    #[arg(long = "at")]
    horizons: Vec<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

/// Parses `argv` (program name first), runs the command and returns the exit
/// code: 0 on success, 1 when a verification fails, 2 on usage errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool> {
    let bits = cli.precision;
    if bits == 0 || bits > 4096 {
        return Err(usage(format!("precision {bits} out of range 1..=4096")));
    }
    match cli.command {
        Command::Build(a) => build(a, bits),
        Command::Analyze { what, args } => analyze(what, *args, bits),
        Command::Verify { claim, n, out } => {
            if !CLAIMS.iter().any(|(c, _, _)| *c == claim) {
                let names: Vec<&str> = CLAIMS.iter().map(|c| c.0).collect();
                return Err(usage(format!("unknown claim `{claim}`; known: {}", names.join(", "))));
            }
            let opts = ClaimOptions { n };
            let rep = verify_claim(&claim, &opts)?;
            for c in &rep.criteria {
                eprintln!("criterion {:>2} {}: {}", c.criterion, if c.ok { "pass" } else { "FAIL" }, c.title);
            }
            let config = RunConfig {
                command: "verify".into(),
                options: json!({ "claim": claim, "n": n }),
                out: out.as_ref().map(|p| p.display().to_string()),
                precision_bits: bits,
                deterministic: true,
                ..Default::default()
            };
            let ok = rep.ok;
            finish(Report::new("claim", ok, config, rep)?, out.as_deref())?;
            Ok(ok)
        }
        Command::Emit { report, kind, out } => {
            let kind = TableKind::parse(&kind)?;
            let table = emit_table(&read_report(&report)?, kind)?;
            match out {
                Some(p) => write_atomic(&p, table.as_bytes())?,
                None => print!("{table}"),
            }
            Ok(true)
        }
    }
}

fn finish(report: Report, out: Option<&Path>) -> Result<()> {
    let bytes = report.to_bytes()?;
    match out {
        Some(p) => write_atomic(p, &bytes),
        None => {
            print!("{}", String::from_utf8_lossy(&bytes));
            Ok(())
        }
    }
}

fn default_bounds(family: &str) -> (IndexBounds, u32) {
    match family {
        "denjoy" => (IndexBounds::symmetric(8, 0).with_samples(4), 32),
        "harmonic" => (IndexBounds::new(1, 64, 0), 10),
        "standard-s" => (IndexBounds::symmetric(8, 0), 16),
        "limit-glue" => (IndexBounds::symmetric(3, 1), 16),
        _ => (IndexBounds::symmetric(6, 2), 24),
    }
}

fn merge_bounds(base: IndexBounds, horizon: u32, a: &BoundsArgs) -> (IndexBounds, u32) {
    let b = IndexBounds {
        lo: a.lo.unwrap_or(base.lo),
        hi: a.hi.unwrap_or(base.hi),
        depth: a.depth.unwrap_or(base.depth),
        samples: a.samples.unwrap_or(base.samples),
    };
    (b, a.horizon.unwrap_or(horizon))
}

fn build(a: BuildArgs, bits: u32) -> Result<bool> {
    if !sysfile::FAMILIES.contains(&a.family.as_str()) {
        return Err(usage(format!("unknown family `{}`; known: {}", a.family, sysfile::FAMILIES.join(", "))));
    }
    let mut params: Value = match &a.params {
        Some(s) => serde_json::from_str(s).map_err(|e| usage(format!("--params is not JSON: {e}")))?,
        None => json!({}),
    };
    if !params.is_object() {
        return Err(usage("--params must be a JSON object"));
    }
    if let Some(n) = a.n {
        params["n"] = json!(n);
    }
    if let Some(alpha) = &a.alpha {
        params["alpha"] = json!(alpha);
    }
    let built = build_family(&a.family, &params)?;
    let sys = built.system();
    let (b0, h0) = default_bounds(&a.family);
    let (bounds, horizon) = merge_bounds(b0, h0, &a.bounds);
    let file = SystemFile {
        format: sysfile::FORMAT,
        family: sys.family().to_string(),
        params: sys.params(),
        bounds: Some(bounds),
        horizon: Some(horizon),
        details: describe(&built, &bounds, bits)?,
    };
    let mut bytes = serde_json::to_vec_pretty(&serde_json::to_value(&file)?)?;
    bytes.push(b'\n');
    write_atomic(&a.out, &bytes)?;
    Ok(true)
}

fn mode(m: ModeArg) -> Mode {
    match m {
        ModeArg::Forward => Mode::Forward,
        ModeArg::TwoSided => Mode::TwoSided,
    }
}

fn grid(a: &AnalyzeArgs) -> Vec<ExactScalar> {
    if a.delta.is_empty() {
        vec![ExactScalar::ratio(1, 4), ExactScalar::ratio(1, 8), ExactScalar::ratio(1, 16)]
    } else {
        a.delta.clone()
    }
}

fn one_delta(a: &AnalyzeArgs) -> Result<ExactScalar> {
    match a.delta.as_slice() {
        [] => Ok(ExactScalar::ratio(1, 8)),
        [d] => Ok(d.clone()),
        _ => Err(usage("this analysis takes a single --delta")),
    }
}

fn need<T: Clone>(v: &Option<T>, flag: &str) -> Result<T> {
    v.clone().ok_or_else(|| usage(format!("missing --{flag}")))
}

fn analyze(what: Analysis, a: AnalyzeArgs, bits: u32) -> Result<bool> {
    let (file, built) = sysfile::load(&a.sys)?;
    let sys = built.system();
    let (b0, h0) = default_bounds(&file.family);
    let (bounds, horizon) = merge_bounds(file.bounds.unwrap_or(b0), file.horizon.unwrap_or(h0), &a.bounds);
    let mut config = RunConfig {
        command: format!("analyze {}", what.to_possible_value().expect("named").get_name()),
        family: Some(file.family.clone()),
        params: Some(file.params.clone()),
        bounds: Some(bounds),
        horizon: Some(horizon),
        deltas: Vec::new(),
        options: json!({}),
        out: a.out.as_ref().map(|p| p.display().to_string()),
        precision_bits: bits,
        deterministic: true,
    };
    let tr = || -> Result<Truncation> { truncate(sys.clone(), &bounds, horizon) };
    let space = || sys.space().ok_or_else(|| usage(format!("family {} has no scattered description", file.family)));
    let digits = digits_for_bits(bits);
    let (kind, ok, result): (&str, bool, Value) = match what {
        Analysis::Companions => {
            let d = one_delta(&a)?;
            config.deltas = vec![d.to_string()];
            let x = need(&a.point, "point")?;
            let r = companion_set(&tr()?, &x, &d, horizon, mode(a.mode))?;
            config.options = json!({ "point": x, "mode": r.mode });
            ("companions", true, json!({ "cardinality": r.members.len(), "report": r }))
        }
        Analysis::Profile => {
            let d = one_delta(&a)?;
            config.deltas = vec![d.to_string()];
            let hs: Vec<u32> = if a.horizons.is_empty() { (0..=horizon).collect() } else { a.horizons.clone() };
            let t = tr()?;
            let rows = max_companion_profile(&t, &d, &hs, mode(a.mode))?;
            config.options = json!({ "mode": format!("{:?}", a.mode), "horizons": hs });
            ("companion-profile", true, json!({ "delta": d, "points": t.len(), "rows": rows }))
        }
        Analysis::Classify => {
            let ds = grid(&a);
            config.deltas = ds.iter().map(ToString::to_string).collect();
            let hs: Vec<u32> = if a.horizons.is_empty() { vec![horizon / 2, horizon] } else { a.horizons.clone() };
            config.options = json!({ "mode": format!("{:?}", a.mode), "horizons": hs });
            ("classification", true, serde_json::to_value(classify_expansiveness(&tr()?, &ds, &hs, mode(a.mode))?)?)
        }
        Analysis::Rank => {
            let s = space()?;
            let rank = cb_rank_checked(s)?;
            let ranks: Vec<Value> =
                s.class_ranks()?.iter().zip(&s.classes).map(|(r, c)| json!({ "class": c.label, "rank": r })).collect();
            let derived: Vec<Value> = match rank.as_finite() {
                Some(n) => (0..=n)
                    .map(|k| Ok(json!({ "k": k, "classes": s.derived_labels(&OrdinalCnf::finite(k))? })))
                    .collect::<Result<_>>()?,
                None => Vec::new(),
            };
            ("rank", true, json!({ "rank": rank, "class_ranks": ranks, "derived": derived }))
        }
        Analysis::Derived => {
            let prefix = a.prefix.unwrap_or(50);
            config.options = json!({ "prefix": prefix });
            let c = compare_derived(space()?, prefix)?;
            ("derived", c.agree, serde_json::to_value(c)?)
        }
        Analysis::Omega | Analysis::Multi => {
            let eps = a.epsilon.clone().unwrap_or_else(|| ExactScalar::ratio(1, 4));
            let max_k = a.max_k.unwrap_or(12);
            let d = if what == Analysis::Multi { a.d.unwrap_or(3) } else { 1 };
            config.options = json!({ "epsilon": eps, "max_k": max_k, "d": d });
            let t = tr()?;
            let r = if d == 1 { nonwandering(&t, &eps, max_k)? } else { multi_nonwandering(&t, &eps, max_k, d)? };
            ("omega", true, serde_json::to_value(r)?)
        }
        Analysis::Depth => {
            let defaults = DepthParams::default();
            let p = DepthParams {
                epsilon: a.epsilon.clone().unwrap_or(defaults.epsilon),
                max_k: a.max_k.unwrap_or(defaults.max_k),
                d: a.d.unwrap_or(defaults.d),
                bounds,
                horizon,
            };
            let m = match a.chain {
                ChainArg::Wandering => ChainMode::Wandering,
                ChainArg::Multi => ChainMode::Multi,
            };
            config.options = json!({ "chain": m, "epsilon": p.epsilon, "max_k": p.max_k, "d": p.d });
            ("omega-chain", true, serde_json::to_value(depth_chain(&sys, m, &p)?)?)
        }
        Analysis::Fix => ("fixed-points", true, json!({ "points": fixed_points(&tr()?)? })),
        Analysis::Per => {
            let maxp = a.max_period.unwrap_or(horizon.max(1));
            config.options = json!({ "max_period": maxp });
            let per = periodic_points(&tr()?, maxp)?;
            let rows: Vec<Value> = per.iter().map(|(p, xs)| json!({ "period": p, "points": xs })).collect();
            ("periodic-points", true, json!({ "rows": rows }))
        }
        Analysis::Cs => {
            let tol = a.tol.clone().unwrap_or_else(|| ExactScalar::ratio(1, 8));
            config.options = json!({ "tol": tol });
            ("semi-orbits", true, json!({ "rows": converging_semiorbits(&tr()?, horizon, &tol)? }))
        }
        Analysis::Refute => {
            let ds = grid(&a);
            config.deltas = ds.iter().map(ToString::to_string).collect();
            let n = need(&a.n, "n")?;
            config.options = json!({ "n": n });
            let rows = refute_positive_n_expansiveness(&tr()?, n, &ds, horizon)?;
            let refuted = rows.iter().all(|r| r.cardinality > n);
            ("refutation", true, json!({ "refuted": refuted, "rows": rows }))
        }
        Analysis::Oracle => {
            let d = one_delta(&a)?;
            config.deltas = vec![d.to_string()];
            config.options = json!({ "cover": format!("{:?}", a.cover) });
            let t = tr()?;
            let cover = match a.cover {
                CoverArg::Clique => clique_cover(&t, &d, horizon)?,
                CoverArg::Ball => ball_cover(&t, &d, horizon)?,
            };
            let o = cover_companion_oracle(&t, &cover, horizon)?;
            let p = max_companion_profile(&t, &d, &[horizon], Mode::TwoSided)?.remove(0);
            let r = json!({ "oracle": o, "profile_max": p.max_card, "equal": o.max_card == p.max_card });
            ("oracle", true, r)
        }
        Analysis::Power => {
            let d = one_delta(&a)?;
            config.deltas = vec![d.to_string()];
            let k = a.k.unwrap_or(2);
            config.options = json!({ "k": k });
            let c = power_containment(&tr()?, k, &d, horizon)?;
            ("power", c.holds(), serde_json::to_value(c)?)
        }
        Analysis::ArcDiameter => {
            if !matches!(built, Built::Denjoy(_)) {
                return Err(usage("arc-diameter needs a denjoy system file"));
            }
            let k = a.k.unwrap_or(0);
            config.options = json!({ "k": k });
            let rows: Vec<Value> = arc_diameter_profile(k, bounds.lo, bounds.hi)
                .into_iter()
                .map(|(m, d)| json!({ "m": m, "diameter": d.to_string(), "decimal": decimal(&d, digits) }))
                .collect();
            ("arc-diameter", true, json!({ "k": k, "rows": rows }))
        }
        Analysis::Validate => {
            let prefix = a.prefix.unwrap_or(20);
            let tol = a.tol.clone().unwrap_or_else(|| ExactScalar::ratio(1, 4));
            config.options = json!({ "prefix": prefix, "tol": tol });
            let r = validate_space(space()?, prefix, &tol)?;
            ("validation", r.violations.is_empty(), serde_json::to_value(r)?)
        }
    };
    finish(Report::new(kind, ok, config, result)?, a.out.as_deref())?;
    Ok(ok)
}
