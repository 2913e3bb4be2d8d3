use std::path::Path;
use std::process::{Command, Output};

use squeezelab::hilbert::{build_fock_operator, write_operator, FockOp};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_squeezelab"))
        .args(args)
        .env_remove("SQUEEZELAB_DIM")
        .output()
        .unwrap()
}

fn stderr_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).expect("stderr is one JSON object")
}

fn write_xp(dir: &Path, dim: usize) -> (String, String) {
    let a = dir.join("A.json");
    let h = dir.join("H.json");
    write_operator(&a, &build_fock_operator(FockOp::X, dim).unwrap()).unwrap();
    write_operator(&h, &build_fock_operator(FockOp::P, dim).unwrap()).unwrap();
    (a.display().to_string(), h.display().to_string())
}

#[test]
fn scenario_writes_outputs_and_refuses_overwrite() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("runs");
    let out_s = out.to_str().unwrap();
    let args = ["scenario", "--family", "spin", "--two-j", "16", "--seed", "7", "--out", out_s];
    let first = run(&args);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));

    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "family,param,N,ratio,predicted,rmse_sq,rmse_cl,flags");
    let row = lines.next().unwrap();
    assert!(row.starts_with("spin_rotation,16,"));
    assert!(row.contains("rule=energy_over_classical_sd"));

    let jsonl = std::fs::read_to_string(out.join("result.jsonl")).unwrap();
    let result: serde_json::Value = serde_json::from_str(jsonl.lines().next().unwrap()).unwrap();
    assert_eq!(result["family"], "spin_rotation");
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["master_seed"], 7);
    assert_eq!(manifest["command"], "scenario");

    let again = run(&args);
    assert_eq!(again.status.code(), Some(1));
    assert_eq!(stderr_json(&again)["error"], "invalid_parameter");

    let mut forced = args.to_vec();
    forced.push("--force");
    assert!(run(&forced).status.success());
}

#[test]
fn sweep_reports_fit() {
    let out = run(&["sweep", "--family", "position", "--lambda", "4,9,16,25", "--no-mc"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    let fit: serde_json::Value = serde_json::from_str(lines[4]).unwrap();
    let slope = fit["fit"]["slope"].as_f64().unwrap();
    assert!((slope + 1.0).abs() < 0.05);
    assert!(fit["fit"]["r2"].as_f64().unwrap() > 0.99);
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"family": "position", "lambda": 9, "monte_carlo": false}"#).unwrap();
    let out = run(&["scenario", "--config", cfg.to_str().unwrap(), "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["param"], 9.0);
    assert!((r["gain"]["n_probes"].as_f64().unwrap() - 3.0).abs() < 0.05);

    std::fs::write(&cfg, r#"{"family": "position", "lambda": }"#).unwrap();
    let bad = run(&["scenario", "--config", cfg.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    let err = stderr_json(&bad);
    assert_eq!(err["error"], "json");
    assert!(err["message"].as_str().unwrap().contains("line 1"));
}

#[test]
fn dim_env_sets_truncation() {
    let out = Command::new(env!("CARGO_BIN_EXE_squeezelab"))
        .args(["scenario", "--family", "sg", "--alpha", "2", "--no-mc"])
        .env("SQUEEZELAB_DIM", "128")
        .output()
        .unwrap();
    assert!(out.status.success());
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["dim"], 128);
}

#[test]
fn usage_errors_exit_one_with_json() {
    let out = run(&["scenario", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "usage");

    let out = run(&["scenario", "--family", "position"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "invalid_parameter");

    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn solve_lists_states_and_reports_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let (a, h) = write_xp(dir.path(), 48);
    let out = run(&["solve", "--A", &a, "--H", &h, "--lambda", "2.0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let body: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let states = body["states"].as_array().unwrap();
    assert!(!states.is_empty());
    for s in states {
        assert!(s["residual"].as_f64().unwrap() <= 1e-6);
    }

    let other = dir.path().join("H64.json");
    write_operator(&other, &build_fock_operator(FockOp::P, 64).unwrap()).unwrap();
    let out = run(&["solve", "--A", &a, "--H", other.to_str().unwrap(), "--lambda", "2.0"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "dimension_mismatch");
    assert!(err["message"].as_str().unwrap().contains("H64.json"));
}

#[test]
fn design_infeasible_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let (a, h) = write_xp(dir.path(), 64);
    let out = run(&[
        "design", "--A", &a, "--H", &h, "--budget", "0.001", "--ground", "0", "--lambda", "1,2,4",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "infeasible");
    assert!(err["report"]["candidates"].as_u64().unwrap() > 0);
}

#[test]
fn design_selects_a_good_probe() {
    let dir = tempfile::tempdir().unwrap();
    let (a, h) = write_xp(dir.path(), 128);
    let out = run(&[
        "design", "--A", &a, "--H", &h, "--budget", "1.5", "--ground", "0", "--lambda", "2,4.5,8",
        "--no-mc",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // ΔP = √(λ/2) = 1.5 at λ = 4.5.
    assert_eq!(r["diagnostics"]["lambda_selected"], 4.5);
    assert_eq!(r["gain"]["probe_count_rule"], "energy_ratio");
}

#[test]
fn check_passes_by_default_and_fails_on_tiny_truncation() {
    let ok = run(&["check", "--dim", "128", "--alpha", "2", "--samples", "20"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));

    let bad = run(&["check", "--dim", "8", "--alpha", "4"]);
    assert_eq!(bad.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&bad.stdout).unwrap();
    let tail = report["suites"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["name"] == "tail")
        .unwrap();
    assert_eq!(tail["pass"], false);
}
