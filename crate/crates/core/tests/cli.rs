mod common;

use std::path::Path;
use thermovoid::cli::main_with;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("thermovoid").chain(args.iter().copied()).map(Into::into);
    let code = main_with(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TOY: &str = "dim = 1
C = [2.0]
D = [0.0]
A = [3.0]
B = [0.0]
b = [0.0]
M = [0.0]
a_vec = [0.0]
K = [1.0]
xi = 5.0
m = 0.0
a = 1.0
tau = 0.0
rho = 1.0
chi = 1.0
theta0 = 1.0
";

/// Pulse scenario text with one line replaced, written next to a copy of
/// the reference material.
fn variant(dir: &Path, name: &str, from: &str, to: &str) -> std::path::PathBuf {
    let text = std::fs::read_to_string(common::scenario_path("pulse.toml")).unwrap();
    assert!(text.contains(from));
    std::fs::copy(
        common::scenario_path("reference_material.toml"),
        dir.join("reference_material.toml"),
    )
    .unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text.replace(from, to)).unwrap();
    p
}

#[test]
fn check_material_toy_is_admissible() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("toy.toml");
    std::fs::write(&f, TOY).unwrap();
    let r = cli(&["check-material", "--material", path(&f)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["admissible"], true);
    assert_eq!(v["spectrum"]["mu_min"].as_f64(), Some(2.0));
    assert_eq!(v["spectrum"]["mu_max"].as_f64(), Some(5.0));
    assert!(r.stdout.contains("\"mu_max\": 5.0000000000000000e0"));
}

#[test]
fn check_material_reports_broken_symmetry_and_missing_keys() {
    let dir = tempfile::tempdir().unwrap();
    // 2D isotropic packing with C_11,12 set and C_12,11 left at zero.
    let broken = "dim = 2
C = [3.0, 1.0, 0.25, 1.0, 3.0, 0.0, 0.0, 0.0, 1.0]
D = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
A = [1.0, 0.0, 0.0, 1.0]
B = [0.0, 0.0, 0.0, 0.0]
b = [0.0, 0.0]
M = [0.0, 0.0, 0.0, 0.0]
a_vec = [0.0, 0.0]
K = [1.0, 0.0, 0.0, 1.0]
xi = 1.0
m = 0.0
a = 1.0
tau = 0.0
rho = 1.0
chi = 1.0
theta0 = 1.0
";
    let f = dir.path().join("broken.toml");
    std::fs::write(&f, broken).unwrap();
    let r = cli(&["check-material", "--material", path(&f)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("C_ijrs = C_rsij at (1,1,1,2)"), "{}", r.stderr);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap_or(serde_json::Value::Null);
    assert!(v.is_null(), "no summary on failure");

    let f = dir.path().join("missing.toml");
    std::fs::write(&f, TOY.replace("xi = 5.0\n", "")).unwrap();
    let r = cli(&["check-material", "--material", path(&f)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("xi"), "{}", r.stderr);
    assert_eq!(cli(&["check-material"]).code, 1);
}

#[test]
fn verify_decay_on_the_reference_pulse_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let scenario = common::scenario_path("pulse.toml");
    let r = cli(&["verify-decay", "--scenario", path(&scenario), "--out", path(&out)]);
    assert_eq!(r.code, 0, "{}\n{}", r.stdout, r.stderr);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["resolution"]["resolution_limited"], false);
    assert_eq!(v["decay"]["lambda"].as_f64(), Some(40.0));
    let csv = std::fs::read_to_string(out.join("measure.csv")).unwrap();
    assert!(csv.starts_with("r,t,E,dE_dr,dE_dt,I\n"));
    let summary = std::fs::read_to_string(out.join("summary.json")).unwrap();
    assert_eq!(summary.trim_end(), r.stdout.trim_end());
}

#[test]
fn verify_decay_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // ζT < L for every λ on the grid.
    let short = variant(dir.path(), "short.toml", "horizon = 1.0", "horizon = 0.5");
    let r = cli(&["verify-decay", "--scenario", path(&short)]);
    assert_eq!(r.code, 2, "{}", r.stderr);
    assert!(r.stderr.contains("window"));
    let pulse = common::scenario_path("pulse.toml");
    let r = cli(&["verify-decay", "--scenario", path(&pulse), "--lambda", "5", "--t0", "0.1"]);
    assert_eq!(r.code, 2, "{}", r.stderr);
    assert_eq!(cli(&["verify-decay", "--scenario", path(&pulse), "--lambda", "-1"]).code, 1);
    assert_eq!(cli(&["verify-decay", "--scenario", path(&pulse), "--r0", "3"]).code, 1);
    assert_eq!(cli(&["verify-decay", "--scenario", "/nonexistent.toml"]).code, 1);
    assert_eq!(cli(&["no-such-command"]).code, 1);
    let help = cli(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("verify-decay"));
}

#[test]
fn coarse_grid_is_flagged_with_enlarged_slack() {
    let dir = tempfile::tempdir().unwrap();
    let coarse = variant(dir.path(), "coarse.toml", "nodes = [401]", "nodes = [101]");
    let r = cli(&["verify-decay", "--scenario", path(&coarse)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stderr.contains("resolution-limited"));
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["resolution"]["resolution_limited"], true);
    assert_eq!(v["resolution"]["slack_factor"].as_f64(), Some(16.0));
    assert_eq!(v["diff_inequality"]["tolerance"].as_f64(), Some(0.08));
    assert!(v["warnings"][0].as_str().unwrap().contains("resolution-limited"));
}

#[test]
fn sweep_lambda_rows() {
    let dir = tempfile::tempdir().unwrap();
    let pulse = common::scenario_path("pulse.toml");
    let r = cli(&["sweep-lambda", "--scenario", path(&pulse), "--lambda", "5"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    assert_eq!(v["rows"][0]["feasible"], true);
    assert!(v["rows"][0]["slope"].as_f64().unwrap() < -5.0 / v["rows"][0]["zeta"].as_f64().unwrap());

    // M² = 0: ζ/√λ tends to √(k_M/(2θ₀aρ)) = √(1/2).
    let f = dir.path().join("toy.toml");
    std::fs::write(&f, TOY).unwrap();
    let out = dir.path().join("sweep");
    let r = cli(&["sweep-lambda", "--material", path(&f), "--lambda", "1e4,1e5,1e6", "--out", path(&out)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    let limit = 0.5f64.sqrt();
    for row in v["rows"].as_array().unwrap() {
        let x = row["zeta_over_sqrt_lambda"].as_f64().unwrap();
        assert!((x / limit - 1.0).abs() < 0.01, "{x}");
        assert!(row["feasible"].is_null() && row["slope"].is_null());
    }
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.starts_with("lambda,epsilon,zeta,lambda_over_zeta,zeta_over_sqrt_lambda,feasible,slope\n"));

    // No row is feasible on the short horizon; none gets a slope.
    let short = variant(dir.path(), "short.toml", "horizon = 1.0", "horizon = 0.5");
    let r = cli(&["sweep-lambda", "--scenario", path(&short), "--parallel"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().all(|r| r["feasible"] == false && r["slope"].is_null()));
}

#[test]
fn sweep_parallel_matches_sequential() {
    let pulse = common::scenario_path("pulse.toml");
    let a = cli(&["sweep-lambda", "--scenario", path(&pulse), "--lambda", "1,10,40"]);
    let b = cli(&["sweep-lambda", "--scenario", path(&pulse), "--lambda", "1,10,40", "--parallel"]);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn spectrum_and_selftest() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("toy.toml");
    std::fs::write(&f, TOY).unwrap();
    let r = cli(&["spectrum", "--material", path(&f), "--lambda", "4"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    // λρk_M/(2θ₀aμ_M) = 0.4 with M² = 0 gives ε = 0.
    assert_eq!(v["rows"][0]["epsilon"].as_f64(), Some(0.0));
    assert_eq!(v["rows"][0]["zeta"].as_f64(), Some(5f64.sqrt()));

    let r = cli(&["selftest", "--seed", "7"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["seed"], 7);
    assert!(v["closed_forms"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    assert_eq!(r.stdout, cli(&["selftest", "--seed", "7"]).stdout);
}

#[test]
fn simulate_refinement_and_dump_formats() {
    let dir = tempfile::tempdir().unwrap();
    let mms = common::scenario_path("manufactured.toml");
    let csv_dir = dir.path().join("csv");
    let r = cli(&["simulate", "--scenario", path(&mms), "--refine", "2", "--parallel", "--out", path(&csv_dir)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    let levels = v["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 3);
    for l in &levels[1..] {
        let ratio = l["error_ratio"].as_f64().unwrap();
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    }
    let seq = cli(&["simulate", "--scenario", path(&mms), "--refine", "2"]);
    assert_eq!(seq.stdout.replace("\"trajectory.csv\"", "null"), r.stdout.replace("\"trajectory.csv\"", "null"));

    let bin_dir = dir.path().join("bin");
    let r = cli(&["simulate", "--scenario", path(&mms), "--out", path(&bin_dir), "--format", "bin"]);
    assert_eq!(r.code, 0);
    let csv = std::fs::read_to_string(csv_dir.join("trajectory.csv")).unwrap();
    let bin = std::fs::read(bin_dir.join("trajectory.bin")).unwrap();
    let rows = csv.lines().count() - 1;
    // t, x, u, udot, phi, phidot, theta
    assert_eq!(bin.len(), rows * 7 * 8);
    let first: Vec<f64> = csv.lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    let from_bin: Vec<f64> = bin[..56].chunks(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    assert_eq!(first, from_bin);

    // The pulse budget is sized for its own grid; refining it is rejected.
    let pulse = common::scenario_path("pulse.toml");
    let r = cli(&["simulate", "--scenario", path(&pulse), "--refine", "1"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("budget"));
}

#[test]
fn verify_decay_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let pulse = common::scenario_path("pulse.toml");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(cli(&["verify-decay", "--scenario", path(&pulse), "--out", path(&a)]).code, 0);
    assert_eq!(cli(&["verify-decay", "--scenario", path(&pulse), "--out", path(&b)]).code, 0);
    for f in ["measure.csv", "summary.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}
