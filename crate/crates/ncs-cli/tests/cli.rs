//! End-to-end runs of the `ncs` binary.

use std::fs;
use std::process::{Command, Output};

fn ncs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncs"))
        .args(args)
        .env("NCS_LOG", "quiet")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV, parsed as numbers.
fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect()
}

#[test]
fn eval_canonical_q() {
    let o = ncs(&["eval", "--quantity", "q", "--nbar", "1", "--grid", "0:4:5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("x,value\n"));
    let rows = rows(&text);
    assert_eq!(rows.len(), 5);
    for r in rows {
        let want = 0.5 * (-r[0] / 2.0).exp();
        assert!((r[1] - want).abs() <= 1e-15 * want, "{r:?}");
    }
}

#[test]
fn single_point_grid() {
    let o = ncs(&["eval", "--quantity", "q", "--grid", "0:0:1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(rows(&stdout(&o)), vec![vec![0.0, 0.5]]);
}

#[test]
fn grid_beyond_radius_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.json");
    // 2F1-type normalization: labels live in the unit disk
    fs::write(&model, r#"{"p":2,"q":1,"a":[1.0,2.0],"b":[1.0]}"#).unwrap();
    let m = model.to_str().unwrap();
    let o = ncs(&["eval", "--model", m, "--quantity", "norm", "--grid", "0:2:3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("outside radius"));
    let o = ncs(&["eval", "--model", m, "--quantity", "norm", "--grid", "0:0.5:2"]);
    assert_eq!(o.status.code(), Some(0));
    // N(x) = 1F0(2;;x) = (1 − x)^{-2}
    assert!((rows(&stdout(&o))[1][1] - 4.0).abs() < 1e-13);
}

#[test]
fn config_errors_exit_2() {
    for args in [
        vec!["eval", "--quantity", "q", "--grid", "2:1:3"],
        vec!["eval", "--quantity", "q", "--model", "pho:-1"],
        vec!["eval", "--quantity", "q", "--quad", "simpson:4"],
        vec!["eval", "--quantity", "p", "--nbar", "0"],
        vec!["verify", "--suite", "nope"],
        vec!["frobnicate"],
    ] {
        assert_eq!(ncs(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn transform_canonical_p_to_q() {
    let o = ncs(&["transform", "--direction", "p-to-q", "--nbar", "2", "--grid", "0.1:10:6:log"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("x,transformed,closed_form,rel_err\n"));
    for r in rows(&text) {
        assert!(r[3] <= 1e-8, "{r:?}");
    }
}

#[test]
fn transform_pho_q_to_p_matches_closed_form() {
    // k = 1: P(x) = ((n̄+1)/n̄) e^{−x/n̄}/n̄
    let o = ncs(&["transform", "--direction", "q-to-p", "--model", "pho:1", "--nbar", "0.5", "--grid", "0.5:4:4"]);
    assert_eq!(o.status.code(), Some(0));
    for r in rows(&stdout(&o)) {
        let want = 3.0 * (-2.0 * r[0]).exp() * 2.0;
        assert!((r[1] - want).abs() <= 1e-12 * want, "{r:?}");
    }
}

#[test]
fn transform_pho_kp_json() {
    let o = ncs(&[
        "transform", "--direction", "p-to-q", "--model", "pho:2.5", "--flavor", "kp", "--grid", "0.5:5:3", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let records = v.as_array().unwrap();
    assert_eq!(records.len(), 3);
    for r in records {
        assert!(r["rel_err"].as_f64().unwrap() <= 1e-5, "{r}");
    }
}

#[test]
fn output_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for path in [&a, &b] {
        let o = ncs(&["eval", "--model", "pho:1.5", "--quantity", "weight", "--grid", "0.01:20:64:log", "--output", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    for line in text.lines().skip(1) {
        for cell in line.split(',') {
            let v: f64 = cell.parse().unwrap();
            assert_eq!(format!("{v:.16e}"), cell);
        }
    }
}

#[test]
fn overlap_at_the_reference_label_is_one() {
    let o = ncs(&["eval", "--quantity", "overlap", "--model", "pho:1", "--ref-x", "2", "--grid", "0:4:3"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = rows(&stdout(&o));
    assert_eq!(rows[1], vec![2.0, 1.0]);
    assert!(rows[0][1] < 1.0 && rows[2][1] < 1.0);
}

#[test]
fn moments_table() {
    let o = ncs(&["moments", "--model", "pho:1", "--kind", "identity", "--n-max", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("n,computed,expected,rel_err\n"));
    let rows = rows(&text);
    assert_eq!(rows.len(), 5);
    // ρ(n) = n!·(2)ₙ/(1)ₙ = (n+1)!
    assert_eq!(rows[3][2], 24.0);
    assert!(rows.iter().all(|r| r[3] <= 1e-8));
}

#[test]
fn verify_canonical_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = ncs(&["verify", "--suite", "canonical", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["suite"], "canonical");
    assert_eq!(v["pass"], true);
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["tag"].is_string() && c["pass"] == true));
}

#[test]
fn verify_with_impossible_tolerance_fails() {
    let o = ncs(&["verify", "--suite", "canonical", "--tol", "1e-300"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], false);
}

#[test]
fn pho_k_for_hydrogen_like_parameters() {
    let o = ncs(&["pho-k", "--J", "0", "--mass", "8.3676e-28", "--omega", "8.28e14", "--r0", "0.7416e-10", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let k = v["k"].as_f64().unwrap();
    assert!((k - 9.536511434343408).abs() < 1e-9);
    assert_eq!(v["model"]["b"][0].as_f64().unwrap(), k + 1.0);
}
