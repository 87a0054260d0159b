use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use edpfill::csvio;

fn edpfill(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edpfill"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = edpfill(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn small_config(dir: &Path) {
    fs::write(dir.join("small.json"), r#"{"n_records": 10, "n_materials": 4, "trials": 2, "cr_grid": [0.3, 0.5]}"#).unwrap();
}

#[test]
fn step_by_step_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    small_config(d);
    let c = ["--config", "small.json", "--out", "o"];
    let with = |rest: &[&str]| -> Vec<String> { c.iter().chain(rest).map(|s| s.to_string()).collect() };
    let run = |rest: &[&str]| {
        let args = with(rest);
        ok(d, &args.iter().map(String::as_str).collect::<Vec<_>>());
    };

    run(&["synth-gm"]);
    assert_eq!(fs::read_dir(d.join("o/records")).unwrap().count(), 10);
    run(&["features", "--records", "o/records"]);
    run(&["sample-materials"]);
    run(&["simulate", "--records", "o/records", "--materials", "o/materials.csv"]);
    run(&["cluster", "--features", "o/ims.csv", "--k", "2"]);
    run(&["sample", "mask", "--matrix", "o/base_shear.csv", "--cr", "0.4", "--clusters", "o/clusters.csv"]);
    run(&["complete", "--matrix", "o/base_shear.csv", "--mask", "o/mask.csv", "--rank", "2"]);
    run(&[
        "regress", "--matrix", "o/base_shear.csv", "--mask", "o/mask.csv", "--ims", "o/ims.csv", "--materials",
        "o/materials.csv", "--completion", "o/estimate.csv",
    ]);

    let ims = csvio::read_features(d.join("o/ims.csv")).unwrap();
    assert_eq!((ims.n_rows(), ims.n_dims()), (10, 31));
    let mask = csvio::read_mask(d.join("o/mask.csv")).unwrap();
    for j in 0..4 {
        assert_eq!(mask.column_count(j), 4);
    }
    let truth = csvio::read_matrix(d.join("o/base_shear.csv")).unwrap();
    let est = csvio::read_matrix(d.join("o/estimate.csv")).unwrap();
    let reg = csvio::read_matrix(d.join("o/regression.csv")).unwrap();
    let ens = csvio::read_matrix(d.join("o/ensemble.csv")).unwrap();
    assert_eq!(est.row_ids(), truth.row_ids());
    for k in 0..40 {
        let (a, b, e) = (est.values().as_slice()[k], reg.values().as_slice()[k], ens.values().as_slice()[k]);
        assert_eq!(e, 0.5 * (a + b));
    }
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("o/complete.json")).unwrap()).unwrap();
    assert_eq!(meta["rank"], 2);
    assert!(meta["scale"].as_f64().unwrap() > 0.0);
    let trace = fs::read_to_string(d.join("o/trace.csv")).unwrap();
    assert!(trace.starts_with("sweep,objective\n1,"));
}

#[test]
fn simulate_from_files_matches_experiment_dataset() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    small_config(d);
    ok(d, &["--config", "small.json", "--out", "s", "synth-gm"]);
    ok(d, &["--config", "small.json", "--out", "s", "sample-materials"]);
    ok(d, &["--config", "small.json", "--out", "s", "simulate", "--records", "s/records", "--materials", "s/materials.csv"]);
    ok(d, &["--config", "small.json", "--out", "e", "experiment"]);
    let a = fs::read_to_string(d.join("s/top_displacement.csv")).unwrap();
    let b = fs::read_to_string(d.join("e/dataset/top_displacement.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn experiment_then_report() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    small_config(d);
    ok(d, &["--config", "small.json", "--seed", "5", "--out", "e", "experiment"]);
    for f in ["tidy.csv", "summary.csv", "report.json", "error_top_displacement.svg", "error_base_shear.svg", "config.json"] {
        assert!(d.join("e").join(f).exists(), "{f}");
    }
    let tidy = fs::read_to_string(d.join("e/tidy.csv")).unwrap();
    assert_eq!(tidy.lines().count(), 1 + 2 * 3 * 2 * 2);
    let config: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("e/config.json")).unwrap()).unwrap();
    assert_eq!(config["seed"], 5);

    ok(d, &["--out", "r", "report", "--tidy", "e/tidy.csv"]);
    assert_eq!(
        fs::read_to_string(d.join("r/summary.csv")).unwrap(),
        fs::read_to_string(d.join("e/summary.csv")).unwrap()
    );
}

#[test]
fn points_are_deterministic_per_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["--seed", "4", "--out", "a", "sample", "points", "--scheme", "lhs", "--count", "8", "--dims", "3"]);
    ok(d, &["--seed", "4", "--out", "b", "sample", "points", "--scheme", "lhs", "--count", "8", "--dims", "3"]);
    ok(d, &["--seed", "5", "--out", "c", "sample", "points", "--scheme", "lhs", "--count", "8", "--dims", "3"]);
    let read = |p: &str| fs::read_to_string(d.join(p)).unwrap();
    assert_eq!(read("a/points.csv"), read("b/points.csv"));
    assert_ne!(read("a/points.csv"), read("c/points.csv"));
    ok(d, &["--out", "h", "sample", "points", "--scheme", "halton", "--count", "4", "--dims", "1"]);
    assert_eq!(read("h/points.csv"), "point,x0\np0,0.5\np1,0.25\np2,0.75\np3,0.125\n");
}

#[test]
fn bad_inputs_fail_with_a_message() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(d.join("bad.json"), r#"{"trials": 0}"#).unwrap();
    let out = edpfill(d, &["--config", "bad.json", "experiment"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    fs::write(d.join("typo.json"), r#"{"trails": 3}"#).unwrap();
    assert!(!edpfill(d, &["--config", "typo.json", "experiment"]).status.success());

    fs::write(d.join("m.csv"), "top_displacement,m0\ng0,1.0\ng1,oops\n").unwrap();
    fs::write(d.join("k.csv"), "mask,m0\ng0,1\ng1,0\n").unwrap();
    let out = edpfill(d, &["complete", "--matrix", "m.csv", "--mask", "k.csv"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("m.csv"));
}
