// SPDX-License-Identifier: Apache-2.0

use std::process::{Command, Output};

fn edr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edr")).args(args).env_remove("EDR_OUT_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(key).filter(|rest| rest.starts_with(' ')).map(|rest| rest.trim().to_string()))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
}

#[test]
fn family_a_report() {
    let o = edr(&["family", "--kind", "A", "--mu", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(field(&s, "tau"), "1.0471976");
    assert_eq!(field(&s, "epsilon_q^2"), "0.5000000");
    assert_eq!(field(&s, "eta_p^2"), "0.1250000");
    assert_eq!(field(&s, "saturated"), "true");
}

#[test]
fn family_c_transfer_entries() {
    let o = edr(&["family", "--kind", "C", "--mu", "0.5", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["transfer"]["a"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(v["transfer"]["b"].as_f64().unwrap(), 0.0);
}

#[test]
fn invalid_mu_is_a_precondition_error() {
    let o = edr(&["family", "--kind", "A", "--mu", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mu"));
}

#[test]
fn solve_examples() {
    let s = stdout(&edr(&["solve", "--mu", "0.5", "--gamma", "1", "--D", "-1"]));
    assert_eq!(field(&s, "alpha"), "0.6666667");
    assert_eq!(field(&s, "tau"), "0.6931472");
    let s = stdout(&edr(&["solve", "--mu", "0.5", "--gamma", "0", "--discriminant", "1"]));
    assert_eq!(field(&s, "alpha"), "0.5773503");
    assert_eq!(field(&s, "tau"), "1.0471976");
}

#[test]
fn solve_reports_infeasibility() {
    let o = edr(&["solve", "--mu", "0.5", "--gamma", "0.5", "--D", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("infeasible: gamma < sqrt(-D)"));
}

fn sweep_rows(kind: &str) -> Vec<Vec<f64>> {
    let o = edr(&["sweep", "--kind", kind]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.split('\n');
    assert_eq!(
        lines.next().unwrap(),
        "mu,epsilon_q,eta_p,eta_q,sigma_q1,sigma_p1,edr_lhs,heisenberg_product,a,b,c,d,tau,alpha,beta,gamma,D"
    );
    lines.filter(|l| !l.is_empty()).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

#[test]
fn sweep_is_saturated_and_peaks_at_half() {
    for kind in ["A", "B", "C"] {
        let rows = sweep_rows(kind);
        assert_eq!(rows.len(), 99);
        for r in &rows {
            assert_eq!(r.len(), 17);
            assert!((r[6] / 0.25 - 1.0).abs() < 1e-9, "{r:?}");
            assert!(r[1] * r[2] < 0.5);
        }
        let best = rows.iter().max_by(|x, y| (x[1] * x[2]).total_cmp(&(y[1] * y[2]))).unwrap();
        assert_eq!(best[0], 0.5);
        assert!((best[1] * best[2] - 0.25).abs() < 1e-9);
    }
}

#[test]
fn sweep_eta_q_of_c_grows_on_the_tail() {
    let rows = sweep_rows("C");
    let tail: Vec<f64> = rows[80..].iter().map(|r| r[3]).collect();
    assert!(tail.windows(2).all(|w| w[1] > w[0]));
    assert!(tail.last().unwrap() > &10.0);
}

#[test]
fn sweep_output_is_byte_identical_and_lf_terminated() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_edr"))
            .args(["sweep", "--kind", "B", "--q1", "0.3", "--output", name])
            .env("EDR_OUT_DIR", dir.path())
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(dir.path().join(name)).unwrap()
    };
    let (a, b) = (run("one.csv"), run("two.csv"));
    assert_eq!(a, b);
    assert!(!a.contains(&b'\r'));
    assert_eq!(a.last(), Some(&b'\n'));
}

#[test]
fn sweep_values_round_trip() {
    let o = edr(&["sweep", "--kind", "A", "--mu", "0.3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let csv_row = &sweep_rows("A")[29];
    assert_eq!(v[0]["epsilon_q"].as_f64().unwrap(), csv_row[1]);
    assert_eq!(v[0]["D"].as_f64().unwrap(), csv_row[16]);
}

#[test]
fn posterior_examples() {
    let v: serde_json::Value =
        serde_json::from_slice(&edr(&["posterior", "--kind", "B", "--mu", "0.5", "--y", "1"]).stdout).unwrap();
    let s = &v["states"][0];
    assert!((s["mean_q"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((s["sigma_q"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-12);

    let v: serde_json::Value =
        serde_json::from_slice(&edr(&["posterior", "--kind", "A", "--mu", "0.5", "--y", "1"]).stdout).unwrap();
    assert!((v["states"][0]["mean_q"].as_f64().unwrap() + 1.0).abs() < 1e-12);

    let o = edr(&["posterior", "--kind", "A", "--mu", "0.5", "--interval=-inf:inf"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["weight"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn posterior_rejects_bad_interval() {
    assert_eq!(edr(&["posterior", "--kind", "A", "--mu", "0.5", "--interval", "3:1"]).status.code(), Some(2));
    assert_eq!(edr(&["posterior", "--kind", "A", "--mu", "0.5", "--interval", "3"]).status.code(), Some(2));
}

#[test]
fn verify_small_run_passes_and_is_deterministic() {
    let args = ["verify", "--n", "1000", "--random", "5", "--seed", "7", "--format", "json"];
    let (a, b) = (edr(&args), edr(&args));
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_detects_tampering() {
    let o = edr(&["verify", "--n", "20000", "--random", "5", "--tamper", "0.2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAILED"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(edr(&["family", "--kind", "Z", "--mu", "0.5"]).status.code(), Some(2));
    assert_eq!(edr(&["sweep", "--kind", "A", "--format", "text"]).status.code(), Some(2));
    assert_eq!(edr(&["family", "--kind", "A", "--mu", "0.5", "--hbar", "-1"]).status.code(), Some(2));
}
