use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn dyadic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dyadic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
        .display()
        .to_string()
}

/// Window K = 1, N = 1: eight cells of length 1/2 on [-2, 2).
fn write_cells(dir: &Path, name: &str, values: [f64; 8]) -> String {
    let mut text = String::from("cell_index,left_endpoint,value\n");
    for (i, v) in values.iter().enumerate() {
        text.push_str(&format!("{i},{},{v}\n", -2.0 + 0.5 * i as f64));
    }
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn haar_unit(dir: &Path) -> String {
    write_cells(dir, "h.csv", [0.0, 0.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0])
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json stdout")
}

#[test]
fn haar_coeffs_of_haar_function() {
    let dir = TempDir::new().unwrap();
    let f = haar_unit(dir.path());
    let o = dyadic(&["--json", "haar", "coeffs", &f]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(&o);
    let nonzero: Vec<_> = v["coefficients"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["value"].as_f64().unwrap() != 0.0)
        .collect();
    assert_eq!(nonzero.len(), 1);
    assert_eq!(nonzero[0]["k"], 0);
    assert_eq!(nonzero[0]["m"], 0);
    assert_eq!(nonzero[0]["value"].as_f64().unwrap(), 1.0);

    let human = stdout(&dyadic(&["haar", "coeffs", &f]));
    assert!(human.lines().any(|l| l == "0,0,1"), "{human}");
}

#[test]
fn haar_reconstruct_round_trips() {
    let dir = TempDir::new().unwrap();
    let f = write_cells(dir.path(), "f.csv", [1.5, -2.0, 0.25, 3.0, 0.0, 7.0, -0.5, 1.0]);
    let o = dyadic(&["--json", "haar", "coeffs", &f]);
    let coeffs = dir.path().join("coeffs.json");
    std::fs::write(&coeffs, &o.stdout).unwrap();
    let out = dir.path().join("back.csv");
    let o = dyadic(&[
        "haar",
        "reconstruct",
        coeffs.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let back = dyadic_core::io::read_step_function(&out).unwrap();
    let orig = dyadic_core::io::read_step_function(&f).unwrap();
    for (a, b) in back.cells().iter().zip(orig.cells()) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}

#[test]
fn empty_file_reports_no_cells() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("empty.csv");
    std::fs::write(&f, "").unwrap();
    let o = dyadic(&["haar", "coeffs", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no cells"), "{}", stderr(&o));
}

#[test]
fn malformed_csv_reports_line() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("bad.csv");
    std::fs::write(&f, "cell_index,left_endpoint,value\n0,-1,1\n1,0,oops\n").unwrap();
    let o = dyadic(&["haar", "coeffs", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn apply_paraproduct_matches_library() {
    let dir = TempDir::new().unwrap();
    let f = write_cells(dir.path(), "f.csv", [1.0, 2.0, -1.0, 0.5, 3.0, -2.0, 0.0, 1.0]);
    let g = write_cells(dir.path(), "g.csv", [0.5, 0.5, 1.0, -1.0, 2.0, 2.0, 1.0, 0.0]);
    let out = dir.path().join("p.csv");
    let o = dyadic(&[
        "apply",
        "--op",
        "P",
        "--alpha",
        "01",
        "--inputs",
        &format!("{f},{g}"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let fs = [
        dyadic_core::io::read_step_function(&f).unwrap(),
        dyadic_core::io::read_step_function(&g).unwrap(),
    ];
    let expected = dyadic_core::operators::paraproduct(&"01".parse().unwrap(), &fs).unwrap();
    let got = dyadic_core::io::read_step_function(&out).unwrap();
    assert_eq!(got.cells(), expected.cells());
}

#[test]
fn apply_usage_errors() {
    let dir = TempDir::new().unwrap();
    let f = haar_unit(dir.path());
    let pair = format!("{f},{f}");

    let o = dyadic(&["apply", "--op", "P", "--alpha", "11", "--inputs", &pair]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("U_m"), "{}", stderr(&o));

    let o = dyadic(&["apply", "--op", "P", "--alpha", "010", "--inputs", &pair]);
    assert_eq!(o.status.code(), Some(2));

    let o = dyadic(&["apply", "--op", "comm", "--alpha", "01", "--inputs", &pair]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--b"), "{}", stderr(&o));
}

#[test]
fn apply_commutator_with_constant_b_vanishes() {
    let dir = TempDir::new().unwrap();
    let f = write_cells(dir.path(), "f.csv", [1.0, 2.0, -1.0, 0.5, 3.0, -2.0, 0.0, 1.0]);
    let b = write_cells(dir.path(), "b.csv", [3.0; 8]);
    let o = dyadic(&[
        "--json", "apply", "--op", "comm", "--alpha", "0", "--inputs", &f, "--b", &b,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for c in json(&o)["cells"].as_array().unwrap() {
        assert!(c.as_f64().unwrap().abs() < 1e-12);
    }
}

#[test]
fn ap_of_constant_weight_is_one() {
    let dir = TempDir::new().unwrap();
    let w = write_cells(dir.path(), "w.csv", [1.0; 8]);
    let o = dyadic(&["--json", "weights", "ap", "--p", "2", &w]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["value"].as_f64().unwrap(), 1.0);
    assert!(v["interval"]["k"].is_i64());
    assert_eq!(stdout(&dyadic(&["weights", "ap", "--p", "2", &w])).split('\t').next(), Some("1"));
}

#[test]
fn ap_rejects_small_p_and_nonpositive_weight() {
    let dir = TempDir::new().unwrap();
    let w = write_cells(dir.path(), "w.csv", [1.0; 8]);
    let o = dyadic(&["weights", "ap", "--p", "0.5", &w]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains('p'));

    let bad = write_cells(dir.path(), "bad.csv", [1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
    let o = dyadic(&["weights", "a1", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!stderr(&o).is_empty());
}

#[test]
fn bmo2_agrees_with_bmo_r2() {
    let dir = TempDir::new().unwrap();
    let b = write_cells(dir.path(), "b.csv", [1.0, 2.0, -1.0, 0.5, 3.0, -2.0, 0.0, 1.0]);
    let two = json(&dyadic(&["--json", "weights", "bmo2", &b]));
    let r2 = json(&dyadic(&["--json", "weights", "bmo", "--r", "2", &b]));
    let (x, y) = (two["value"].as_f64().unwrap(), r2["value"].as_f64().unwrap());
    assert!((x - y).abs() <= 1e-10 * x.max(1.0), "{x} vs {y}");
}

#[test]
fn multi_ap_reads_weight_vector() {
    let dir = TempDir::new().unwrap();
    write_cells(dir.path(), "w1.csv", [1.0; 8]);
    write_cells(dir.path(), "w2.csv", [1.0; 8]);
    let manifest = dir.path().join("wv.json");
    std::fs::write(
        &manifest,
        r#"{"exponents": [2.0, 2.0], "weight_files": ["w1.csv", "w2.csv"]}"#,
    )
    .unwrap();
    let o = dyadic(&["--json", "weights", "multi-ap", manifest.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!((json(&o)["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn verify_shipped_localization_passes() {
    let o = dyadic(&["verify", "--config", &config("localization.json")]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("PASS localization"));
}

#[test]
fn verify_corrupt_fails() {
    let o = dyadic(&["verify", "--config", &config("localization.json"), "--corrupt"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL localization"));
}

#[test]
fn verify_creates_out_dir() {
    let dir = TempDir::new().unwrap();
    let out: PathBuf = dir.path().join("a/b/c");
    let o = dyadic(&[
        "verify",
        "--config",
        &config("outside_support.json"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(out.join("summary.json").exists());
    assert!(out.join("outside_support_trials.csv").exists());
}

#[test]
fn verify_bad_config_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(
        &cfg,
        r#"{"seed": 1, "trials": 1, "m": 2, "alpha": "01", "window": {"K": 1, "N": 3}, "delta": 0.9}"#,
    )
    .unwrap();
    let o = dyadic(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("delta"), "{}", stderr(&o));
}

#[test]
fn outputs_are_byte_stable() {
    let a = dyadic(&["--json", "verify", "--config", &config("bmo.json")]);
    let b = dyadic(&["--json", "--threads", "2", "verify", "--config", &config("bmo.json")]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let dir = TempDir::new().unwrap();
    let f = write_cells(dir.path(), "f.csv", [1.0, 2.0, -1.0, 0.5, 3.0, -2.0, 0.0, 1.0]);
    let x = dyadic(&["haar", "coeffs", &f]);
    let y = dyadic(&["haar", "coeffs", &f]);
    assert_eq!(x.stdout, y.stdout);
}

#[test]
fn json_and_human_modes_agree() {
    let dir = TempDir::new().unwrap();
    let b = write_cells(dir.path(), "b.csv", [1.0, 2.0, -1.0, 0.5, 3.0, -2.0, 0.0, 1.0]);
    let v = json(&dyadic(&["--json", "weights", "bmo", &b]));
    let human = stdout(&dyadic(&["weights", "bmo", &b]));
    let value: f64 = human.split('\t').next().unwrap().parse().unwrap();
    assert_eq!(value.to_bits(), v["value"].as_f64().unwrap().to_bits());
}
