//! End-to-end tests against the built binary: determinism, manifests,
//! exit codes, and report pooling.

use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_erwkit")
}

/// Fresh per-test scratch directory.
fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("erwkit-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn data_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn collide(seed: &str, offset: u32, replicas: u32, out: &Path) {
    run_ok(&[
        "collide",
        "--p",
        "0.5",
        "--q",
        "0.5",
        "--p2",
        "0.5",
        "--q2",
        "0.5",
        "--horizon",
        "10000",
        "--replicas",
        &replicas.to_string(),
        "--replica-offset",
        &offset.to_string(),
        "--seed",
        seed,
        "--out",
        out.to_str().unwrap(),
    ]);
}

#[test]
fn collide_runs_are_bitwise_deterministic() {
    let base = tmp("det");
    collide("7", 0, 100, &base.join("a"));
    collide("7", 0, 100, &base.join("b"));
    let a = fs::read(base.join("a/collide.csv")).unwrap();
    let b = fs::read(base.join("b/collide.csv")).unwrap();
    assert_eq!(a, b);
    assert_eq!(data_rows(&base.join("a/collide.csv")).len(), 100);

    let manifest = read_json(&base.join("a/manifest.json"));
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["normal_transform"], "box-muller");
    assert_eq!(manifest["subcommand"], "collide");
    assert_eq!(manifest["config"]["subcommand"], "collide");
    assert_eq!(manifest["outputs"][0]["file"], "collide.csv");
    assert_eq!(manifest["outputs"][0]["rows"], 100);
}

#[test]
fn hex_and_decimal_seeds_agree() {
    let base = tmp("hex");
    collide("7", 0, 10, &base.join("dec"));
    collide("0x7", 0, 10, &base.join("hex"));
    let dec = read_json(&base.join("dec/manifest.json"));
    let hex = read_json(&base.join("hex/manifest.json"));
    assert_eq!(
        dec["outputs"][0]["sha256"], hex["outputs"][0]["sha256"],
        "same seed must produce the same digest"
    );
    assert_eq!(hex["seed"], 7);
}

#[test]
fn bvn_zero_correlation_has_zero_correction() {
    let base = tmp("bvn0");
    let out = run_ok(&["bvn", "--delta", "0", "--a", "1", "--b", "1", "--out", base.to_str().unwrap()]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["phi"].as_f64().unwrap(), 0.0);
    let on_disk = read_json(&base.join("bvn.json"));
    assert_eq!(on_disk["phi"], v["phi"]);
}

#[test]
fn negative_flag_values_parse_as_plain_tokens() {
    let base = tmp("neg");
    let out = run_ok(&[
        "bvn", "--delta", "-0.5", "--a", "2", "--b", "1",
        "--out", base.to_str().unwrap(),
    ]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let phi = v["phi"].as_f64().unwrap();
    let envelope = v["phi_envelope"].as_f64().unwrap();
    assert!(phi < 0.0, "negative correlation gives negative correction");
    assert!(phi.abs() <= envelope);

    run_ok(&[
        "kernel", "--variant", "rlfbm", "--beta", "-0.2", "--gamma", "0.3",
        "--grid-points", "2", "--x-max", "100",
        "--out", base.join("k").to_str().unwrap(),
    ]);
}

#[test]
fn bvn_rejects_correlation_outside_unit_interval() {
    let base = tmp("bvnbad");
    let out = run(&["bvn", "--delta", "1.5", "--a", "1", "--b", "1", "--out", base.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("delta"), "{err}");
}

#[test]
fn bad_probability_exits_with_usage_code() {
    let out = run(&["simulate", "--p", "1.5", "--q", "0.5", "--steps", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("probability"), "{err}");

    let out = run(&["kernel", "--variant", "fbm"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--hurst"), "{err}");
}

#[test]
fn rational_probability_lands_exactly_in_the_manifest() {
    let base = tmp("rational");
    run_ok(&[
        "simulate",
        "--p",
        "3/4",
        "--q",
        "0.5",
        "--steps",
        "20",
        "--out",
        base.to_str().unwrap(),
    ]);
    let manifest = read_json(&base.join("manifest.json"));
    assert_eq!(manifest["config"]["p"].as_f64().unwrap(), 0.75);
}

#[test]
fn exact_law_sums_to_one() {
    let base = tmp("law");
    run_ok(&[
        "simulate",
        "--p",
        "0.6",
        "--q",
        "0.5",
        "--steps",
        "50",
        "--exact-law",
        "--out",
        base.to_str().unwrap(),
    ]);
    let rows = data_rows(&base.join("law.csv"));
    assert_eq!(rows.len(), 51);
    let total: f64 = rows.iter().map(|r| r[1].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12, "law mass {total}");
}

#[test]
fn lil_tables_have_expected_shapes_and_decreasing_ratio() {
    let base = tmp("lil");
    run_ok(&[
        "lil",
        "--variant",
        "erwdiff",
        "--p",
        "0.5",
        "--p2",
        "0.6",
        "--alpha",
        "16",
        "--nmax",
        "30",
        "--jmax",
        "8",
        "--out",
        base.to_str().unwrap(),
    ]);
    assert_eq!(data_rows(&base.join("blocks.csv")).len(), 29);
    assert_eq!(data_rows(&base.join("deltas.csv")).len(), 9);
    let ratios: Vec<f64> = data_rows(&base.join("ratios.csv"))
        .iter()
        .map(|r| r[3].parse().unwrap())
        .collect();
    assert_eq!(ratios.len(), 5, "doubling horizons 2,4,8,16 plus nmax");
    assert!(
        ratios.windows(2).all(|w| w[1] < w[0]),
        "event ratio must decrease: {ratios:?}"
    );
    assert!(!base.join("stats.csv").exists(), "tables-only run");
}

#[test]
fn kernel_dump_covers_the_upper_triangle() {
    let base = tmp("kernel");
    run_ok(&[
        "kernel",
        "--variant",
        "fbm",
        "--hurst",
        "0.7",
        "--grid-points",
        "4",
        "--x-max",
        "1e4",
        "--out",
        base.to_str().unwrap(),
    ]);
    let rows = data_rows(&base.join("kernel.csv"));
    assert_eq!(rows.len(), 10, "4 choose 2 plus diagonal");
    for r in &rows {
        let s: f64 = r[0].parse().unwrap();
        let t: f64 = r[1].parse().unwrap();
        assert!(s <= t);
    }
    let summary = read_json(&base.join("kernel.json"));
    assert_eq!(summary["rho"].as_f64().unwrap(), 0.7);
    assert!(summary["profile_exponent"].is_f64());
}

#[test]
fn report_pools_disjoint_runs_exactly() {
    let base = tmp("pool");
    collide("11", 0, 30, &base.join("a"));
    collide("11", 30, 30, &base.join("b"));
    let manifest_a = base.join("a/manifest.json");
    let manifest_b = base.join("b/manifest.json");
    let rep = base.join("rep");
    let out = run_ok(&[
        "report",
        manifest_a.to_str().unwrap(),
        manifest_b.to_str().unwrap(),
        "--out",
        rep.to_str().unwrap(),
    ]);
    assert!(
        String::from_utf8_lossy(&out.stderr).is_empty(),
        "disjoint offsets must not warn"
    );

    let mut counts = Vec::new();
    for dir in ["a", "b"] {
        for row in data_rows(&base.join(dir).join("collide.csv")) {
            counts.push(row[2].parse::<f64>().unwrap());
        }
    }
    let want_mean = counts.iter().sum::<f64>() / counts.len() as f64;
    let rows = data_rows(&rep.join("summary.csv"));
    let count_row = rows.iter().find(|r| r[0] == "collision_count").unwrap();
    assert_eq!(count_row[1], "60");
    let got_mean: f64 = count_row[2].parse().unwrap();
    assert!((got_mean - want_mean).abs() < 1e-12);
    assert!(rows.iter().any(|r| r[0] == "distance_constant_theory"));
    assert!(rep.join("summary.txt").exists());

    let rep2 = base.join("rep2");
    let out = run(&[
        "report",
        manifest_a.to_str().unwrap(),
        manifest_a.to_str().unwrap(),
        "--out",
        rep2.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("overlapping replica ranges"), "{err}");
}

#[test]
fn report_rejects_mismatched_experiments_and_tampered_files() {
    let base = tmp("repbad");
    collide("3", 0, 5, &base.join("a"));
    run_ok(&[
        "collide",
        "--p",
        "0.5",
        "--q",
        "0.5",
        "--p2",
        "0.5",
        "--q2",
        "0.5",
        "--horizon",
        "20000",
        "--replicas",
        "5",
        "--seed",
        "3",
        "--out",
        base.join("other").to_str().unwrap(),
    ]);
    let out = run(&[
        "report",
        base.join("a/manifest.json").to_str().unwrap(),
        base.join("other/manifest.json").to_str().unwrap(),
        "--out",
        base.join("rep").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not match"));

    // Appending a byte must break the digest check.
    let csv = base.join("a/collide.csv");
    let mut bytes = fs::read(&csv).unwrap();
    bytes.push(b'x');
    fs::write(&csv, bytes).unwrap();
    let out = run(&[
        "report",
        base.join("a/manifest.json").to_str().unwrap(),
        "--out",
        base.join("rep2").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("digest mismatch"));
}

#[test]
fn report_warns_on_version_mismatch_but_still_pools() {
    let base = tmp("repver");
    collide("5", 0, 5, &base.join("a"));
    let manifest = base.join("a/manifest.json");
    let text = fs::read_to_string(&manifest).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["tool_version"] = Value::String("0.0.0".into());
    fs::write(&manifest, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    let out = run(&[
        "report",
        manifest.to_str().unwrap(),
        "--out",
        base.join("rep").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("warning") && err.contains("0.0.0"), "{err}");

    let rows = data_rows(&base.join("rep/summary.csv"));
    let raw: Vec<f64> = data_rows(&base.join("a/collide.csv"))
        .iter()
        .map(|r| r[4].parse().unwrap())
        .collect();
    let want = raw.iter().sum::<f64>() / raw.len() as f64;
    let got: f64 = rows
        .iter()
        .find(|r| r[0] == "stat_plus")
        .unwrap()[2]
        .parse()
        .unwrap();
    assert!((got - want).abs() < 1e-12);
}

#[test]
fn report_refuses_non_collide_manifests() {
    let base = tmp("repsim");
    run_ok(&[
        "simulate",
        "--p",
        "0.5",
        "--q",
        "0.5",
        "--steps",
        "10",
        "--out",
        base.join("sim").to_str().unwrap(),
    ]);
    let out = run(&[
        "report",
        base.join("sim/manifest.json").to_str().unwrap(),
        "--out",
        base.join("rep").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("collide"));
}

#[test]
fn threaded_and_serial_replica_fanout_agree() {
    let base = tmp("threads");
    run_ok(&[
        "simulate", "--p", "0.6", "--q", "0.5", "--steps", "500", "--stride", "100",
        "--replicas", "8", "--seed", "13", "--threads", "1",
        "--out", base.join("serial").to_str().unwrap(),
    ]);
    run_ok(&[
        "simulate", "--p", "0.6", "--q", "0.5", "--steps", "500", "--stride", "100",
        "--replicas", "8", "--seed", "13", "--threads", "4",
        "--out", base.join("par").to_str().unwrap(),
    ]);
    let serial = fs::read(base.join("serial/paths.csv")).unwrap();
    let par = fs::read(base.join("par/paths.csv")).unwrap();
    assert_eq!(serial, par, "thread count must not change output bytes");
}
