use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use capquad_cli::files::{read_rule_file, to_canonical_json, ReportFileV1, RuleFileV1};
use serde_json::Value;
use tempfile::TempDir;

fn capquad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capquad"))
        .args(args)
        .env_remove("CAPQUAD_SEED")
        .env_remove("CAPQUAD_THREADS")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = capquad(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn points(dir: &TempDir, name: &str, extra: &[&str]) -> String {
    let out = p(dir, name);
    let mut args = vec!["points", "--alpha", "1.0", "--degree", "8", "--delta", "0.25", "--seed", "42", "--out", &out];
    args.extend_from_slice(extra);
    ok(&args);
    out
}

fn report(path: &str) -> ReportFileV1 {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn points_file_is_deterministic_and_plausible() {
    let dir = TempDir::new().unwrap();
    let out = p(&dir, "a.json");
    ok(&["points", "--d", "2", "--alpha", "1.0", "--degree", "8", "--delta", "0.5", "--seed", "42", "--out", &out]);
    let again = p(&dir, "b.json");
    ok(&["points", "--d", "2", "--alpha", "1.0", "--degree", "8", "--delta", "0.5", "--seed", "42", "--out", &again]);
    assert_eq!(fs::read(&out).unwrap(), fs::read(&again).unwrap());
    let f = read_rule_file(Path::new(&out)).unwrap();
    // Node counts scale like (n/δ)^2 with a moderate constant.
    let scaled = f.nodes.len() as f64 * (0.5f64 / 8.0).powi(2);
    assert!((1.0..=4.0).contains(&scaled), "{scaled}");
    assert!(f.weights.is_none());
}

#[test]
fn inadmissible_radius_names_the_flag() {
    let out = capquad(&["points", "--alpha", "3.1", "--degree", "8"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--alpha"));
}

#[test]
fn malformed_flags_exit_one() {
    assert_eq!(capquad(&["points", "--alpha", "x", "--degree", "8"]).status.code(), Some(1));
    assert_eq!(capquad(&["points", "--degree", "8"]).status.code(), Some(1));
    assert_eq!(capquad(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(capquad(&["--help"]).status.code(), Some(0));
}

#[test]
fn solve_accepts_maximal_set() {
    let dir = TempDir::new().unwrap();
    let pts = points(&dir, "p.json", &[]);
    let rule = p(&dir, "r.json");
    ok(&["solve", "--points", &pts, "--degree", "8", "--out", &rule]);
    let f = read_rule_file(Path::new(&rule)).unwrap();
    let w = f.weights.as_ref().unwrap();
    assert_eq!(w.len(), f.nodes.len());
    assert!(w.iter().all(|v| *v > 0.0));
    assert!(f.residual.unwrap() <= 1e-10);
    let total: f64 = w.iter().sum();
    assert!((total - 2.0 * PI * (1.0 - 1f64.cos())).abs() < 1e-9);
}

#[test]
fn sparse_set_is_infeasible() {
    let dir = TempDir::new().unwrap();
    let pts = p(&dir, "s.json");
    ok(&["points", "--alpha", "1.0", "--degree", "8", "--delta", "4", "--seed", "1", "--out", &pts]);
    let out = capquad(&["solve", "--points", &pts, "--degree", "8"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("residual") && err.contains("--delta 2"), "{err}");
}

#[test]
fn single_node_degree_zero() {
    let dir = TempDir::new().unwrap();
    let path = p(&dir, "one.json");
    fs::write(
        &path,
        r#"{"version":"capquad-rule/1","d":2,"alpha":1.0,"center":[0,0,1],"degree":0,"delta":0.5,
            "epsilon":0.5,"nodes":[[0,0,1]],"generator":{"seed":0,"algorithm":"greedy-fps"}}"#,
    )
    .unwrap();
    let out = ok(&["solve", "--points", &path]);
    let f: RuleFileV1 = serde_json::from_slice(&out.stdout).unwrap();
    let w = f.weights.unwrap();
    assert_eq!(w.len(), 1);
    assert!((w[0] - 2.0 * PI * (1.0 - 1f64.cos())).abs() < 1e-12);
}

#[test]
fn bad_files_exit_one() {
    let dir = TempDir::new().unwrap();
    let pts = points(&dir, "p.json", &[]);
    let text = fs::read_to_string(&pts).unwrap().replace("capquad-rule/1", "capquad-rule/9");
    let bad = p(&dir, "bad.json");
    fs::write(&bad, text).unwrap();
    assert_eq!(capquad(&["solve", "--points", &bad]).status.code(), Some(1));
    assert_eq!(capquad(&["solve", "--points", &p(&dir, "missing.json")]).status.code(), Some(1));
    fs::write(&bad, "{").unwrap();
    assert_eq!(capquad(&["verify", "sieve", "--points", &bad]).status.code(), Some(1));
    // mz needs weights.
    assert_eq!(capquad(&["verify", "mz", "--points", &pts]).status.code(), Some(1));
}

fn moment_values(stdout: &[u8]) -> Vec<(String, f64)> {
    let v: Value = serde_json::from_slice(stdout).unwrap();
    v["moments"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| (m["label"].as_str().unwrap().to_string(), m["value"].as_f64().unwrap()))
        .collect()
}

#[test]
fn moments_of_the_hemisphere() {
    let out = ok(&["moments", "--d", "2", "--alpha", "1.5707963", "--degree", "1"]);
    let m = moment_values(&out.stdout);
    assert_eq!(m.len(), 4);
    let get = |l: &str| m.iter().find(|(k, _)| k == l).unwrap().1;
    assert!((get("Y(0,0)") - 1.7724539).abs() < 1e-6);
    assert!((get("Y(1,0)") - 1.5349901).abs() < 1e-6);
    assert_eq!(get("Y(1,1)"), 0.0);
    assert_eq!(get("Y(1,-1)"), 0.0);

    let out = ok(&["moments", "--alpha", "1.0", "--degree", "0"]);
    let m = moment_values(&out.stdout);
    assert_eq!(m.len(), 1);
    let area = 2.0 * PI * (1.0 - 1f64.cos());
    assert!((m[0].1 - area / (4.0 * PI).sqrt()).abs() < 1e-12);

    assert_eq!(capquad(&["moments", "--d", "3", "--alpha", "1.0", "--degree", "1"]).status.code(), Some(1));
}

#[test]
fn verify_mz_is_exact_below_half_degree() {
    let dir = TempDir::new().unwrap();
    let pts = points(&dir, "p.json", &[]);
    let rule = p(&dir, "r.json");
    ok(&["solve", "--points", &pts, "--out", &rule]);
    let rep = p(&dir, "mz.json");
    ok(&["verify", "mz", "--rule", &rule, "--poly-degree", "4", "--trials", "20", "--report", &rep]);
    let r = report(&rep);
    assert_eq!(r.version, "capquad-report/1");
    assert_eq!(r.inequality, "mz");
    let b = r.cells[0].ratios;
    assert!((b.min - 1.0).abs() < 1e-9 && (b.max - 1.0).abs() < 1e-9, "{b:?}");
    assert!(r.wall_time_seconds.is_none());

    let csv = p(&dir, "mz.csv");
    ok(&[
        "verify",
        "mz",
        "--rule",
        &rule,
        "--trials",
        "20",
        "--assert",
        "--record-time",
        "--csv",
        &csv,
        "--report",
        &rep,
    ]);
    assert!(report(&rep).wall_time_seconds.is_some());
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.starts_with("quantity,"));
}

#[test]
fn change_of_variables_passes_assertion() {
    let out = ok(&["verify", "change-of-var", "--alpha", "2.5", "--degree", "8", "--trials", "5", "--assert"]);
    let r: ReportFileV1 = serde_json::from_slice(&out.stdout).unwrap();
    assert!(r.cells[0].estimate.unwrap() <= 1e-9);
    assert!(r.cells[1].estimate.unwrap() <= 1e-8);
}

#[test]
fn sieve_ignores_duplicated_nodes() {
    let dir = TempDir::new().unwrap();
    let pts = points(&dir, "p.json", &[]);
    let mut f = read_rule_file(Path::new(&pts)).unwrap();
    let copy = f.nodes.clone();
    f.nodes.extend(copy);
    let dup = p(&dir, "dup.json");
    fs::write(&dup, to_canonical_json(&f).unwrap()).unwrap();
    let a = ok(&["verify", "sieve", "--points", &pts, "--trials", "20"]);
    let b = ok(&["verify", "sieve", "--points", &dup, "--trials", "20"]);
    let a: ReportFileV1 = serde_json::from_slice(&a.stdout).unwrap();
    let b: ReportFileV1 = serde_json::from_slice(&b.stdout).unwrap();
    let (ca, cb) = (a.cells[0].estimate.unwrap(), b.cells[0].estimate.unwrap());
    assert!((ca - cb).abs() <= 1e-12 * ca, "{ca} vs {cb}");
}

#[test]
fn assertion_failures_exit_three() {
    let dir = TempDir::new().unwrap();
    let pts = p(&dir, "s.json");
    ok(&["points", "--alpha", "1.0", "--degree", "8", "--delta", "4", "--out", &pts]);
    let out = capquad(&["verify", "maxmin", "--points", &pts, "--trials", "20", "--assert"]);
    assert_eq!(out.status.code(), Some(3));
    // Without --assert the same run succeeds.
    ok(&["verify", "maxmin", "--points", &pts, "--trials", "20"]);
}

#[test]
fn rule_files_round_trip_byte_identically() {
    let dir = TempDir::new().unwrap();
    let pts = points(&dir, "p.json", &["--collar-beta", "1.5"]);
    let rule = p(&dir, "r.json");
    ok(&["solve", "--points", &pts, "--out", &rule]);
    for path in [&pts, &rule] {
        let bytes = fs::read_to_string(path).unwrap();
        let f = read_rule_file(Path::new(path)).unwrap();
        assert_eq!(to_canonical_json(&f).unwrap(), bytes);
    }
}

#[test]
fn seed_comes_from_environment_unless_flagged() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_capquad"));
        c.args(["points", "--alpha", "0.5", "--degree", "4"]).args(extra).env_remove("CAPQUAD_SEED");
        if let Some(s) = env {
            c.env("CAPQUAD_SEED", s);
        }
        c.output().unwrap().stdout
    };
    assert_eq!(run(Some("9"), &[]), run(None, &["--seed", "9"]));
    assert_eq!(run(Some("9"), &["--seed", "3"]), run(None, &["--seed", "3"]));
    assert_ne!(run(Some("9"), &[]), run(None, &[]));
}

#[test]
fn thread_count_does_not_change_output() {
    let a = ok(&["--threads", "1", "verify", "bernstein", "--alpha", "0.5", "--degree", "8", "--trials", "10"]);
    let b = ok(&["--threads", "4", "verify", "bernstein", "--alpha", "0.5", "--degree", "8", "--trials", "10"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(capquad(&["--threads", "0", "moments", "--alpha", "1", "--degree", "1"]).status.code(), Some(1));
}
