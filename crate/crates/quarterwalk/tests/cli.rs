//! End-to-end tests of the command-line surface: flags, output layouts,
//! exit codes, and byte determinism.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quarterwalk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

#[test]
fn count_csv_contains_known_row() {
    let out = run(&["count", "--walk", "main", "--kmax", "10", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("i,j,k,count\n"));
    assert!(text.lines().any(|l| l == "0,0,10,3404"), "missing origin row");
}

#[test]
fn count_kmax_zero_single_row() {
    let out = run(&["count", "--walk", "main", "--kmax", "0", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "i,j,k,count\n0,0,0,1\n");
}

#[test]
fn count_output_is_deterministic() {
    let args = ["count", "--walk", "main", "--kmax", "15", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout, "stdout must be byte-identical across runs");
}

#[test]
fn count_bigstep_matches_series_coefficients() {
    let out = run(&["count", "--walk", "big_step", "--kmax", "5", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let series = quarterwalk::variants::q_bigstep(0, 0, 5).unwrap();
    for (k, c) in series.coeffs().iter().enumerate() {
        use num::traits::Zero;
        let present = text.lines().any(|l| l == format!("0,0,{k},{}", c.numer()));
        assert_eq!(present, !c.is_zero(), "k = {k}: row presence vs coefficient {c}");
    }
}

#[test]
fn coeffs_json_layout_main() {
    let out = run(&["coeffs", "--walk", "main", "-i", "0", "-j", "0", "--order", "10"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["order"], 10);
    assert_eq!(json["identities_ok"], true);
    assert!(json.get("walk").is_none(), "main output carries no walk tag");
    let q = json["q"]["0,0"].as_array().unwrap();
    let want = ["1/1", "0/1", "2/1", "2/1", "10/1", "16/1", "64/1", "126/1", "454/1", "1004/1", "3404/1"];
    for (k, w) in want.iter().enumerate() {
        assert_eq!(q[k], *w, "k = {k}");
    }
    // c generates the total counts
    assert_eq!(json["c"][3], "16/1");
}

#[test]
fn coeffs_json_tags_variants() {
    let out = run(&["coeffs", "--walk", "rational_gf", "-i", "1", "-j", "0", "--order", "6"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["walk"], "rational_gf");
    assert_eq!(json["identities_ok"], true);
    assert_eq!(json["q"]["1,0"][1], "1/1");
}

#[test]
fn coeffs_csv_layout() {
    let out = run(&["coeffs", "--walk", "main", "-i", "1", "-j", "1", "--order", "4", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "i,j,k,coeff\n1,1,0,0/1\n1,1,1,0/1\n1,1,2,0/1\n1,1,3,2/1\n1,1,4,2/1\n");
}

#[test]
fn asymptotics_report_values() {
    let out = run(&["asymptotics", "--tol", "1e-10"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rho_lo = json["rho_lo"].as_f64().unwrap();
    let rho_hi = json["rho_hi"].as_f64().unwrap();
    assert!(rho_lo >= 0.3449997, "rho_lo = {rho_lo}");
    assert!(rho_hi <= 0.3449998, "rho_hi = {rho_hi}");
    let c00 = json["C00"].as_f64().unwrap();
    assert!((0.0526..=0.0536).contains(&c00), "C00 = {c00}");
    assert!(json["C00_err"].as_f64().unwrap() > 0.0);
}

#[test]
fn table_has_ten_rows_ending_at_0995() {
    let out = run(&["table", "--kmin", "10", "--kmax", "100", "--step", "10", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 10);
    let last: f64 = rows[9].rsplit(',').next().unwrap().parse().unwrap();
    assert!((last - 0.995).abs() <= 1e-3, "final ratio {last}");
}

#[test]
fn verify_suites_pass() {
    for suite in ["oracle", "identities"] {
        let out = run(&["verify", "--suite", suite]);
        assert!(out.status.success(), "suite {suite} failed: {}", stdout(&out));
        let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(json["failed"], 0, "suite {suite}");
    }
}

#[test]
fn invalid_arguments_exit_2() {
    let out = run(&["count", "--walk", "main", "--kmax", "5000"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty(), "no partial output on argument errors");

    let out = run(&["coeffs", "--walk", "main", "-i", "0", "-j", "0", "--order", "501"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["count", "--walk", "sideways", "--kmax", "3"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["verify", "--suite", "bogus"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["table", "--kmin", "50", "--kmax", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("quarterwalk-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("counts.csv");
    let out = run(&[
        "count", "--walk", "main", "--kmax", "4", "--format", "csv",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.starts_with("i,j,k,count\n"));
    assert!(written.contains("0,0,4,10"));
    std::fs::remove_dir_all(&dir).unwrap();
}
