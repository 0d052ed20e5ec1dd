use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_expansive"));
    c.env_remove("EXPANSIVE_PRECISION");
    c
}

fn workdir(name: &str) -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn build_denjoy_with_fibers() {
    let d = workdir("build_denjoy");
    let o = run(&d, &["build", "--family", "denjoy", "--n", "3", "--out", "sys.json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let sys = json(d.join("sys.json"));
    assert_eq!(sys["format"], 1);
    assert_eq!(sys["params"]["n"], 3);
    let fibers = sys["details"]["fibers"].as_array().unwrap();
    let zero = fibers.iter().find(|f| f["k"] == 0).unwrap();
    assert_eq!(zero["arc_length"], "1/3");
    assert_eq!(zero["points"].as_array().unwrap().len(), 3);
    let points = sys["details"]["points"].as_array().unwrap();
    assert!(points.iter().all(|p| p["position"].is_array()));
}

#[test]
fn depth_of_x2_and_tables() {
    let d = workdir("depth_x2");
    assert!(run(&d, &["build", "--family", "winding-x2", "--n", "2", "--out", "x2.json"]).status.success());
    let o = run(&d, &["analyze", "depth", "--sys", "x2.json", "--out", "depth.json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(d.join("depth.json"));
    assert_eq!(r["kind"], "omega-chain");
    assert_eq!(r["result"]["depth"], "2");
    let o = run(&d, &["emit", "--report", "depth.json", "--kind", "omega-chain"]);
    let table = String::from_utf8(o.stdout).unwrap();
    assert_eq!(table.lines().last(), Some("2\t1\ts_inf"));

    let o = run(&d, &["emit", "--report", "depth.json", "--kind", "companion-profile"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mismatch"));

    let o = run(&d, &["analyze", "rank", "--sys", "x2.json"]);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["result"]["rank"], "2");
    assert_eq!(r["result"]["derived"][2]["classes"], serde_json::json!(["s_inf"]));
}

#[test]
fn arc_diameter_table() {
    let d = workdir("arc");
    assert!(run(&d, &["build", "--family", "denjoy", "--n", "3", "--out", "sys.json"]).status.success());
    let o = run(
        &d,
        &["analyze", "arc-diameter", "--sys", "sys.json", "--k", "0", "--lo", "-5", "--hi", "10", "--out", "a.json"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&d, &["emit", "--report", "a.json", "--kind", "arc-diameter"]);
    let t = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = t.lines().collect();
    assert_eq!(lines.len(), 17);
    assert_eq!(lines[0], "m\tdiameter");
    assert_eq!(lines[1], "-5\t1/96");
    assert_eq!(lines[6], "0\t1/3");
    assert_eq!(lines[16], "10\t1/3072");
    let r = json(d.join("a.json"));
    assert_eq!(r["result"]["rows"][5]["decimal"], "0.33333333333333333333");
}

#[test]
fn usage_errors_exit_two() {
    let d = workdir("usage");
    assert_eq!(run(&d, &["build", "--family", "mystery", "--out", "m.json"]).status.code(), Some(2));
    assert_eq!(run(&d, &["verify", "--claim", "lemma9"]).status.code(), Some(2));
    assert_eq!(run(&d, &["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&d, &["analyze", "rank", "--sys", "missing.json"]).status.code(), Some(2));
    assert!(!d.join("m.json").exists());
}

#[test]
fn profile_report_is_deterministic() {
    let d = workdir("determinism");
    assert!(run(&d, &["build", "--family", "harmonic", "--out", "h.json"]).status.success());
    let args = ["analyze", "profile", "--sys", "h.json", "--delta", "1/8", "--at", "0", "--at", "4", "--at", "8"];
    let a = run(&d, &args).stdout;
    let b = run(&d, &args).stdout;
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let o =
        bin().current_dir(&d).args(args).args(["--out", "p.json"]).env("EXPANSIVE_PRECISION", "16").output().unwrap();
    assert!(o.status.success());
    let r = json(d.join("p.json"));
    assert_eq!(r["config"]["precision_bits"], 16);
    let t = run(&d, &["emit", "--report", "p.json", "--kind", "companion-profile"]).stdout;
    assert_eq!(String::from_utf8(t).unwrap().lines().count(), 4);
}

#[test]
fn verify_x2_claim() {
    let d = workdir("verify");
    let o = run(&d, &["verify", "--claim", "thm4.2", "--n", "2", "--out", "claim.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(d.join("claim.json"));
    assert_eq!(r["ok"], true);
    let checks = r["result"]["criteria"][0]["checks"].as_array().unwrap();
    assert_eq!(checks[0]["detail"]["rank"], "2");
    assert!(checks[1..].iter().all(|c| c["detail"]["members"].as_array().unwrap().len() == 2));
}

#[test]
fn x2_semi_orbits_converge_to_s_inf() {
    let d = workdir("cs");
    assert!(run(
        &d,
        &[
            "build",
            "--family",
            "winding-x2",
            "--n",
            "2",
            "--lo",
            "-8",
            "--hi",
            "8",
            "--horizon",
            "40",
            "--out",
            "x2.json"
        ]
    )
    .status
    .success());
    let o = run(&d, &["analyze", "cs", "--sys", "x2.json", "--tol", "1/4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = r["result"]["rows"].as_array().unwrap();
    assert!(rows.iter().any(|row| row["point"] == "s_inf"));
    assert!(rows.iter().all(|row| row["alpha"] == "s_inf" && row["omega"] == "s_inf"));
    let fixed = run(&d, &["analyze", "fix", "--sys", "x2.json"]);
    let r: Value = serde_json::from_slice(&fixed.stdout).unwrap();
    assert_eq!(r["result"]["points"], serde_json::json!(["s_inf"]));
}
