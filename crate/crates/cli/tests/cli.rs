//! CLI surface tests: output schema, the documented exit codes, and
//! the worked examples from the command-line contract.

mod common;

use common::fixture_path;
use std::path::PathBuf;
use std::process::Command;

const CSV_HEADER: &str =
    "k,res_norm,delta,accepted_ell,estimate,true_err_sq,ideal_delay,chosen_delay,local_orth";

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_krylest")
}

fn out_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("krylest-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn parse_csv(path: &PathBuf) -> (String, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(|s| s.to_string()).collect())
        .collect();
    (header, rows)
}

#[test]
fn identity_run_estimate_equals_error() {
    let dir = out_dir();
    let csv = dir.join("identity.csv");
    let json = dir.join("identity.json");
    let status = Command::new(bin())
        .args(["run", "--solver", "cgls", "--synthetic", "identity:5", "--oracle", "--csv"])
        .arg(&csv)
        .arg("--json")
        .arg(&json)
        .status()
        .unwrap();
    assert!(status.success());
    let (header, rows) = parse_csv(&csv);
    assert_eq!(header, CSV_HEADER);
    // Converges in one iteration; the estimate column equals the true
    // error column on that row.
    assert_eq!(rows.len(), 1);
    let estimate: f64 = rows[0][4].parse().unwrap();
    let true_err: f64 = rows[0][5].parse().unwrap();
    assert!(
        (estimate - true_err).abs() <= 1e-12 * true_err.max(1.0),
        "{estimate} vs {true_err}"
    );
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(summary["iterations"], 1);
    assert_eq!(summary["solver"], "cgls");
}

#[test]
fn bundled_rhs_run_produces_full_schema() {
    let dir = out_dir();
    let csv = dir.join("illc.csv");
    let json = dir.join("illc.json");
    let status = Command::new(bin())
        .args(["run", "--solver", "cgls", "--rhs", "bundled", "--oracle", "--local-orth"])
        .arg("--matrix")
        .arg(fixture_path("illc1033.mtx"))
        .args(["--max-iter", "300", "--csv"])
        .arg(&csv)
        .arg("--json")
        .arg(&json)
        .status()
        .unwrap();
    assert!(status.success());
    let (header, rows) = parse_csv(&csv);
    assert_eq!(header, CSV_HEADER);
    assert_eq!(rows.len(), 300, "row count equals iterations executed");
    for row in &rows {
        assert_eq!(row.len(), 9, "fixed column count");
        assert!(!row[1].is_empty() && !row[2].is_empty());
        // Oracle columns populated when --oracle is on.
        assert!(!row[5].is_empty() && !row[6].is_empty());
    }
    // Early rows have accepted estimates; the trailing pending block
    // leaves the estimate fields empty (not omitted).
    assert!(!rows[0][4].is_empty());
    assert!(rows.last().unwrap()[4].is_empty());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(summary["matrix"]["rows"], 1033);
    assert_eq!(summary["matrix"]["cols"], 320);
    assert!(summary["oracle"]["plateau_index"].is_number());
}

#[test]
fn oracle_columns_are_empty_without_oracle() {
    let dir = out_dir();
    let csv = dir.join("nooracle.csv");
    let status = Command::new(bin())
        .args(["run", "--solver", "lsqr", "--synthetic", "diag:1,2,3,4", "--csv"])
        .arg(&csv)
        .arg("--json")
        .arg(dir.join("nooracle.json"))
        .status()
        .unwrap();
    assert!(status.success());
    let (_, rows) = parse_csv(&csv);
    for row in &rows {
        assert_eq!(row.len(), 9);
        assert!(row[5].is_empty() && row[6].is_empty(), "oracle fields empty");
    }
}

#[test]
fn compare_reports_equivalence() {
    let out = Command::new(bin())
        .args([
            "compare",
            "--solver-a",
            "cgne",
            "--solver-b",
            "craig",
            "--synthetic",
            "svd:6,14,10,4",
            "--rhs",
            "generated:5",
            "--max-iter",
            "6",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let dist = report["max_iterate_distance"].as_f64().unwrap();
    let x_norm = report["x_norm"].as_f64().unwrap();
    assert!(dist <= 1e-10 * x_norm, "divergence {dist} vs scale {x_norm}");
}

#[test]
fn compare_identical_configs_is_exactly_zero() {
    let out = Command::new(bin())
        .args([
            "compare",
            "--solver-a",
            "cgls",
            "--solver-b",
            "cgls",
            "--synthetic",
            "svd:12,7,30,9",
            "--rhs",
            "generated:1",
            "--max-iter",
            "7",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["max_iterate_distance"].as_f64().unwrap(), 0.0);
}

#[test]
fn breakdown_exits_with_code_2() {
    // cg on an indefinite matrix trips the not-SPD breakdown.
    let status = Command::new(bin())
        .args(["run", "--solver", "cg", "--synthetic", "diag:1,-1", "--csv"])
        .arg(out_dir().join("bd.csv"))
        .arg("--json")
        .arg(out_dir().join("bd.json"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn io_error_exits_with_code_3() {
    let status = Command::new(bin())
        .args(["run", "--solver", "cgls", "--matrix", "/nonexistent/nope.mtx", "--csv"])
        .arg(out_dir().join("io.csv"))
        .arg("--json")
        .arg(out_dir().join("io.json"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn config_error_exits_with_code_3() {
    // Least-norm solver with a bundled (least-squares) RHS is rejected.
    let status = Command::new(bin())
        .args(["run", "--solver", "craig", "--rhs", "bundled"])
        .arg("--matrix")
        .arg(fixture_path("well1033.mtx"))
        .arg("--csv")
        .arg(out_dir().join("cfg.csv"))
        .arg("--json")
        .arg(out_dir().join("cfg.json"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
    // Usage errors are remapped off the breakdown code as well.
    let status = Command::new(bin())
        .args(["run", "--solver", "nonsense"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn env_var_sets_default_output_directory() {
    let dir = out_dir().join("envout");
    std::fs::create_dir_all(&dir).unwrap();
    let status = Command::new(bin())
        .args(["run", "--solver", "cgls", "--synthetic", "identity:3"])
        .env("KRYLEST_OUT_DIR", &dir)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.join("run.csv").is_file());
    assert!(dir.join("run.json").is_file());
}

#[test]
fn summary_reports_bound_companions() {
    let dir = out_dir();
    let json = dir.join("bounds.json");
    let status = Command::new(bin())
        .args(["run", "--solver", "cgls", "--synthetic", "svd:30,12,50,2", "--max-iter", "12", "--csv"])
        .arg(dir.join("bounds.csv"))
        .arg("--json")
        .arg(&json)
        .status()
        .unwrap();
    assert!(status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let est = summary["final_estimate"].as_f64().unwrap();
    let ub = summary["final_upper_bound"].as_f64().unwrap();
    assert!((ub - est / 0.75).abs() <= 1e-12 * ub, "upper bound is estimate/(1-tau)");
    let rel = summary["final_relative_estimate"].as_f64().unwrap();
    assert!(rel > 0.0 && rel <= 1.0);
}

#[test]
fn estimate_stopping_criterion_halts_early() {
    let dir = out_dir();
    let json = dir.join("stop.json");
    let status = Command::new(bin())
        .args([
            "run",
            "--solver",
            "cgls",
            "--rhs",
            "bundled",
            "--alpha",
            "1e-2",
            "--beta",
            "1e-2",
            "--max-iter",
            "4000",
        ])
        .arg("--matrix")
        .arg(fixture_path("well1033.mtx"))
        .arg("--csv")
        .arg(dir.join("stop.csv"))
        .arg("--json")
        .arg(&json)
        .status()
        .unwrap();
    assert!(status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let term = summary["termination"].as_str().unwrap();
    assert!(
        term.starts_with("estimate_stop"),
        "expected the estimate stop to fire, got {term}"
    );
    assert!(summary["iterations"].as_u64().unwrap() < 4000);
}
