use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

const EXP1: [f64; 4] = [-3.542884, 3.001152, 6.924106, -18.0296];

fn altproj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_altproj")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, cfg: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    p
}

fn at_rest(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| json!({"model": "second_order", "x0": x})).collect())
}

fn run(cmd: &str, cfg: &Path, extra: &[&str]) -> Output {
    let mut args = vec![cmd, "--config", cfg.to_str().unwrap()];
    args.extend_from_slice(extra);
    altproj(&args)
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn experiment_one_solution_file() {
    let dir = TempDir::new().unwrap();
    for mode in ["centralized", "ring"] {
        let cfg = json!({
            "agents": at_rest(&EXP1),
            "outputs": {"solution": "sol.json", "trace": "trace.csv"}
        });
        let path = write_config(dir.path(), "exp1.json", &cfg);
        let out = run("solve", &path, &["--mode", mode, "--quiet"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty() && out.stderr.is_empty());
        let sol = read_json(&dir.path().join("sol.json"));
        assert_eq!(sol["mode"], mode);
        assert!((sol["x_consensus"][0].as_f64().unwrap() + 5.5527).abs() < 1e-3);
        assert!((sol["t_consensus"].as_f64().unwrap() - 7.0645).abs() < 1e-3);
        assert_eq!(sol["height_scale"], "time_squared");
        let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
        let mut lines = trace.lines();
        assert_eq!(lines.next().unwrap(), "cycle,agent_id,x,height,increment_norm,flag,bregman_event");
        let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
        assert!(rows.iter().all(|r| r.len() == 7));
        assert_eq!(rows[0][1], "2");
        let events = rows.iter().filter(|r| r[6] == "1").count();
        assert_eq!(events as u64, sol["solver"]["outer_iters"].as_u64().unwrap());
    }
}

#[test]
fn solution_goes_to_stdout_without_a_path() {
    let dir = TempDir::new().unwrap();
    let path = write_config(dir.path(), "c.json", &json!({"agents": at_rest(&[-2.0, 2.0])}));
    let out = run("solve", &path, &["--quiet"]);
    assert!(out.status.success());
    let sol: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(sol["x_consensus"][0].as_f64().unwrap().abs() < 1e-5);
    assert!((sol["t_consensus"].as_f64().unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-5);
}

#[test]
fn single_agent_stays_put() {
    let dir = TempDir::new().unwrap();
    let path = write_config(dir.path(), "c.json", &json!({"agents": at_rest(&[1.25])}));
    let out = run("solve", &path, &["--quiet"]);
    assert!(out.status.success());
    let sol: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(sol["x_consensus"][0].as_f64().unwrap(), 1.25);
    assert_eq!(sol["t_consensus"].as_f64().unwrap(), 0.0);
}

#[test]
fn validation_errors_exit_2_and_name_keys() {
    let dir = TempDir::new().unwrap();
    let path = write_config(dir.path(), "empty.json", &json!({"agents": []}));
    let out = run("solve", &path, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("agents"));

    let bad = json!({
        "agents": [{"model": "second_order", "x0": 0.0, "u_max": 0.0}],
        "solver": {"outer_tol": -1.0},
        "outputs": {"dt": 0.0}
    });
    let path = write_config(dir.path(), "bad.json", &bad);
    let out = run("simulate", &path, &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    for key in ["agents[0].u_max", "solver.outer_tol", "outputs.dt"] {
        assert!(err.contains(key), "{key} missing: {err}");
    }

    std::fs::write(dir.path().join("broken.json"), "{\"agents\": [").unwrap();
    assert_eq!(run("solve", &dir.path().join("broken.json"), &[]).status.code(), Some(2));
    assert_eq!(run("solve", &dir.path().join("missing.json"), &[]).status.code(), Some(2));
}

#[test]
fn solver_failure_exits_3_and_keeps_partial_trace() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({
        "agents": at_rest(&EXP1),
        "solver": {"err": 1e-12, "max_inner_cycles": 3},
        "outputs": {"trace": "trace.csv", "solution": "sol.json"}
    });
    let path = write_config(dir.path(), "c.json", &cfg);
    let out = run("solve", &path, &[]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 1 + 3 * 4);
    assert!(!dir.path().join("sol.json").exists());
}

#[test]
fn simulate_meets_at_the_consensus_point() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({
        "agents": at_rest(&EXP1),
        "outputs": {"trajectory": "traj.csv", "dt": 0.05}
    });
    let path = write_config(dir.path(), "c.json", &cfg);
    let out = run("simulate", &path, &[]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("switches at"));
    let csv = std::fs::read_to_string(dir.path().join("traj.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "agent_id,t,x,v,u");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    for id in 1..=4 {
        let last = rows.iter().rfind(|r| r[0] == id as f64).unwrap();
        assert!((last[1] - 7.0645).abs() < 1e-3, "{last:?}");
        assert!((last[2] + 5.5527).abs() < 1e-3 && last[3].abs() < 1e-6 && last[4] == 0.0, "{last:?}");
    }
}

#[test]
fn simulate_coarse_dt_and_idle_agent() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({"agents": at_rest(&[0.0]), "outputs": {"dt": 100.0}});
    let path = write_config(dir.path(), "c.json", &cfg);
    let out = run("simulate", &path, &["--quiet"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows, vec!["1,0,0,0,0"]);

    let cfg = json!({"agents": at_rest(&[0.0, 1.0]), "outputs": {"dt": 100.0}});
    let path = write_config(dir.path(), "d.json", &cfg);
    let out = run("simulate", &path, &["--quiet"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = csv.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    let horizon = rows.iter().map(|r| r[1]).fold(0.0, f64::max);
    for id in [1.0, 2.0] {
        let mine: Vec<&Vec<f64>> = rows.iter().filter(|r| r[0] == id).collect();
        assert!(mine.len() >= 2, "{csv}");
        assert_eq!(mine[0][1], 0.0);
        let last = mine.last().unwrap();
        assert_eq!(last[1], horizon);
        assert!((last[2] - 0.5).abs() < 1e-6 && last[3] == 0.0, "{csv}");
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({
        "agents": at_rest(&EXP1),
        "mode": "ring",
        "outputs": {"solution": "s.json", "trace": "t.csv", "trajectory": "j.csv"}
    });
    let path = write_config(dir.path(), "c.json", &cfg);
    let mut snapshots = Vec::new();
    for _ in 0..2 {
        assert!(run("simulate", &path, &["--quiet"]).status.success());
        let files: Vec<Vec<u8>> =
            ["s.json", "t.csv", "j.csv"].iter().map(|f| std::fs::read(dir.path().join(f)).unwrap()).collect();
        snapshots.push(files);
    }
    assert_eq!(snapshots[0], snapshots[1]);
}

#[test]
fn verify_agrees_on_experiment_one() {
    let dir = TempDir::new().unwrap();
    let path = write_config(dir.path(), "c.json", &json!({"agents": at_rest(&EXP1)}));
    let out = run("verify", &path, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.contains("min-max time") && table.contains("projection"));
    assert!(!table.contains("MISMATCH"));
}

#[test]
fn verify_symmetric_pair() {
    let dir = TempDir::new().unwrap();
    let path = write_config(dir.path(), "c.json", &json!({"agents": at_rest(&[-3.0, 3.0])}));
    assert!(run("verify", &path, &["--quiet"]).status.success());
}

#[test]
fn verify_catches_a_loose_tolerance() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({"agents": at_rest(&EXP1), "solver": {"err": 10.0}});
    let path = write_config(dir.path(), "c.json", &cfg);
    let out = run("verify", &path, &[]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stdout).contains("MISMATCH"));
}

#[test]
fn first_order_plane_in_ring_mode() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({
        "agents": [
            {"model": "first_order", "x0": [0.0, 0.0]},
            {"model": "first_order", "x0": [4.0, 0.0]},
            {"model": "first_order", "x0": [2.0, 3.0]}
        ],
        "mode": "ring",
        "outputs": {"trace": "t.csv"}
    });
    let path = write_config(dir.path(), "c.json", &cfg);
    let out = run("solve", &path, &["--quiet"]);
    assert!(out.status.success());
    let sol: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(sol["message_counts"].as_array().unwrap().len(), 3);
    assert!((sol["t_consensus"].as_f64().unwrap() - 13.0 / 6.0).abs() < 1e-4);
    let trace = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert!(trace.starts_with("cycle,agent_id,x1,x2,height,increment_norm,flag,bregman_event\n"));
}
