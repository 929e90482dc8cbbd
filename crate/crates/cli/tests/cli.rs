use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const FAST: &[&str] = &[
    "--n-chains",
    "16",
    "--sweeps-per-chain",
    "200",
    "--sweeps-per-swap",
    "10",
    "--max-swaps",
    "100",
    "--runs",
    "4",
];

fn pbit(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pbit"))
        .current_dir(dir)
        .env_remove("PBIT_WORKERS")
        .env_remove("PBIT_SEED")
        .args(args)
        .output()
        .expect("running pbit")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = pbit(dir, args);
    assert!(
        out.status.success(),
        "pbit {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn with_fast<'a>(args: &[&'a str]) -> Vec<&'a str> {
    let mut v = args.to_vec();
    v.extend_from_slice(FAST);
    v
}

fn read(dir: &Path, file: &str) -> Vec<u8> {
    fs::read(dir.join(file)).unwrap_or_else(|e| panic!("{}: {e}", dir.join(file).display()))
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_slice(&read(dir, "manifest.json")).unwrap()
}

/// Every output except the manifest, which carries timestamps.
fn outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "manifest.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

fn instances(tmp: &Path, name: &str, vars: &str, count: &str) {
    ok(tmp, &["generate", "--vars", vars, "--count", count, "--seed", "7", "--out", name]);
}

#[test]
fn generate_is_deterministic() {
    let tmp = TempDir::new().unwrap();
    instances(tmp.path(), "a", "8", "3");
    instances(tmp.path(), "b", "8", "3");
    let a = outputs(&tmp.path().join("a"));
    assert_eq!(a.len(), 3);
    assert_eq!(a, outputs(&tmp.path().join("b")));
    assert!(a.iter().all(|(name, _)| name.ends_with(".3r3x")));
}

#[test]
fn usage_errors_exit_with_two() {
    let tmp = TempDir::new().unwrap();
    let out = pbit(tmp.path(), &["generate", "--vars", "3", "--out", "x"]);
    assert_eq!(out.status.code(), Some(2));
    let out = pbit(tmp.path(), &["solve", "--in", "x", "--order", "4", "--out", "y"]);
    assert_eq!(out.status.code(), Some(2));
    let out = pbit(tmp.path(), &["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn refuses_non_empty_output_without_force() {
    let tmp = TempDir::new().unwrap();
    instances(tmp.path(), "a", "6", "1");
    let out = pbit(tmp.path(), &["generate", "--vars", "6", "--out", "a"]);
    assert_eq!(out.status.code(), Some(1));
    ok(tmp.path(), &["generate", "--vars", "6", "--out", "a", "--force"]);
}

#[test]
fn missing_input_is_a_failure() {
    let tmp = TempDir::new().unwrap();
    let out = pbit(tmp.path(), &with_fast(&["solve", "--in", "nowhere", "--out", "o"]));
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn preprocess_writes_increasing_ladder() {
    let tmp = TempDir::new().unwrap();
    instances(tmp.path(), "i", "8", "4");
    ok(
        tmp.path(),
        &["preprocess", "--in", "i", "--n-chains", "16", "--sweeps-per-chain", "200", "--out", "p"],
    );
    let doc: Value = serde_json::from_slice(&read(&tmp.path().join("p"), "schedule.json")).unwrap();
    let betas: Vec<f64> = doc["betas"].as_array().unwrap().iter().map(|b| b.as_f64().unwrap()).collect();
    assert!(!betas.is_empty());
    assert!(betas.windows(2).all(|w| w[0] < w[1]));
    let m = manifest(&tmp.path().join("p"));
    assert_eq!(m["command"], "preprocess");
    assert_eq!(m["inputs"].as_array().unwrap().len(), 1);
}

#[test]
fn backends_give_identical_outcomes() {
    let tmp = TempDir::new().unwrap();
    instances(tmp.path(), "i", "8", "3");
    for backend in ["standalone", "mastergraph"] {
        ok(
            tmp.path(),
            &with_fast(&["solve", "--in", "i", "--backend", backend, "--out", backend]),
        );
    }
    let s = tmp.path().join("standalone");
    let m = tmp.path().join("mastergraph");
    assert_eq!(read(&s, "pcurves.csv"), read(&m, "pcurves.csv"));
    assert_eq!(read(&s, "outcomes.csv"), read(&m, "outcomes.csv"));
}

#[test]
fn third_order_halves_the_pbit_count() {
    let tmp = TempDir::new().unwrap();
    instances(tmp.path(), "i", "10", "2");
    for order in ["2", "3"] {
        ok(tmp.path(), &with_fast(&["solve", "--in", "i", "--order", order, "--out", order]));
    }
    let pbits = |o: &str| manifest(&tmp.path().join(o))["notes"]["size"]["num_pbits"].as_u64().unwrap();
    assert_eq!(pbits("2"), 20);
    assert_eq!(pbits("3"), 10);
}

#[test]
fn validate_reports_pass_and_fail_through_exit_code() {
    let tmp = TempDir::new().unwrap();
    let out = pbit(tmp.path(), &["validate", "--suite", "conversion"]);
    assert_eq!(out.status.code(), Some(0));
    let summary: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["passed"], true);
    // Ten samples cannot resolve the Boltzmann distribution.
    let out = pbit(tmp.path(), &["validate", "--suite", "boltzmann", "--samples", "10"]);
    assert_eq!(out.status.code(), Some(1));
    let summary: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["passed"], false);
}

#[test]
fn replay_reproduces_outputs() {
    let tmp = TempDir::new().unwrap();
    instances(tmp.path(), "i8", "8", "3");
    instances(tmp.path(), "i10", "10", "3");
    let args = with_fast(&[
        "benchmark", "--in", "i8", "i10", "--order", "2,3", "--time-model", "sweeps", "--bootstrap", "50", "--out", "b",
    ]);
    ok(tmp.path(), &args);
    let first = tmp.path().join("b");
    for f in ["tts.csv", "fit.csv", "pcurves.csv", "tts.svg", "outcomes_o2_n016.csv", "schedule_o3_n020.json"] {
        assert!(first.join(f).is_file(), "missing {f}");
    }
    ok(tmp.path(), &["replay", "b/manifest.json", "--out", "again"]);
    assert_eq!(outputs(&first), outputs(&tmp.path().join("again")));

    fs::write(tmp.path().join("i8/k008_0000.3r3x"), "tampered\n").unwrap();
    let out = pbit(tmp.path(), &["replay", "b/manifest.json", "--out", "third"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn worker_count_does_not_change_results() {
    let tmp = TempDir::new().unwrap();
    instances(tmp.path(), "i", "8", "4");
    for w in ["1", "4"] {
        let out = format!("w{w}");
        ok(
            tmp.path(),
            &with_fast(&["--workers", w, "solve", "--in", "i", "--order", "3", "--out", &out]),
        );
    }
    assert_eq!(outputs(&tmp.path().join("w1")), outputs(&tmp.path().join("w4")));
    assert_eq!(manifest(&tmp.path().join("w4"))["workers"], 4);
}

#[test]
fn hardware_mode_runs() {
    let tmp = TempDir::new().unwrap();
    instances(tmp.path(), "i", "8", "2");
    ok(tmp.path(), &with_fast(&["solve", "--in", "i", "--mode", "hardware", "--out", "h"]));
    let csv = String::from_utf8(read(&tmp.path().join("h"), "outcomes.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 4);
}

#[test]
fn sweep_time_prints_csv() {
    let tmp = TempDir::new().unwrap();
    let out = pbit(tmp.path(), &["sweep-time", "--sizes", "16,32", "--sweeps", "100"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "n,software_seconds,fpga_seconds");
    assert_eq!(lines.len(), 3);
}
