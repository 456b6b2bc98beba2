use std::path::PathBuf;
use std::process::{Command, Output};
use unipulse_cli::output::{Csv, RunManifest};

const BIN: &str = env!("CARGO_BIN_EXE_unipulse");

struct Run {
    out: PathBuf,
    result: Output,
    _dir: tempfile::TempDir,
}

impl Run {
    fn code(&self) -> i32 {
        self.result.status.code().expect("exited normally")
    }

    fn stderr(&self) -> String {
        String::from_utf8_lossy(&self.result.stderr).into_owned()
    }

    fn manifest(&self) -> RunManifest {
        let text = std::fs::read_to_string(self.out.join("manifest.json")).unwrap();
        serde_json::from_str(&text).unwrap()
    }

    fn csv(&self, name: &str) -> Csv {
        Csv::parse(&std::fs::read_to_string(self.out.join(name)).unwrap()).unwrap()
    }

    fn json(&self, name: &str) -> serde_json::Value {
        serde_json::from_str(&std::fs::read_to_string(self.out.join(name)).unwrap()).unwrap()
    }
}

fn run(cmd: &str, config: &str, extra: &[&str]) -> Run {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    std::fs::write(&cfg, config).unwrap();
    let out = dir.path().join("out");
    let result = Command::new(BIN)
        .arg(cmd)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(extra)
        .env_remove(unipulse_cli::THREADS_ENV)
        .output()
        .unwrap();
    Run { out, result, _dir: dir }
}

fn hashes(m: &RunManifest) -> Vec<(String, String)> {
    m.files.iter().map(|f| (f.name.clone(), f.sha256.clone())).collect()
}

const SWEEP: &str = r#"{
  "kind": "single",
  "axis1": {"name": "area", "min": 0, "max": 12.566370614359172, "count": 9},
  "axis2": {"name": "time", "min": 0, "max": 60, "count": 7},
  "fixed": {"delta": 0.25, "tau": 40},
  "observable": {"population": 1}
}"#;

#[test]
fn sweep_writes_a_full_grid_in_range() {
    let r = run("sweep", SWEEP, &[]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let csv = r.csv("grid.csv");
    assert_eq!(csv.rows.len(), 9);
    assert!(csv.header[0].contains("area") && csv.header[0].contains("time [ps]"));
    assert_eq!(csv.header.len(), 8);
    assert!(csv.rows.iter().all(|row| row[1..].iter().all(|v| (0.0..=1.0).contains(v))));
    assert!(csv.comments.iter().any(|c| c.contains("cyclic-ghz")));
    let m = r.manifest();
    assert_eq!(m.command, "sweep");
    assert_eq!(m.convention, "cyclic-ghz");
    assert_eq!(m.config["kind"], "single");
    m.verify(&r.out).unwrap();
}

#[test]
fn register_pair_sweep_writes_one_grid_per_level() {
    let cfg = r#"{
      "kind": "register-pair",
      "axis1": {"name": "amplitude", "min": 1, "max": 10, "count": 4},
      "axis2": {"name": "tau2", "min": 0, "max": 50, "count": 5},
      "fixed": {"delta": 0.25, "j": 0.02, "tau1": 50, "tau_r": 100}
    }"#;
    let r = run("sweep", cfg, &["--threads", "2"]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let grids: Vec<Csv> = (0..4).map(|k| r.csv(&format!("grid_{k}.csv"))).collect();
    for i in 0..4 {
        for j in 1..6 {
            let total: f64 = grids.iter().map(|g| g.rows[i][j]).sum();
            assert!((total - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn missing_field_is_named() {
    let r = run("sweep", r#"{"kind": "single", "axis2": {"name": "time", "min": 0, "max": 1, "count": 2}}"#, &[]);
    assert_eq!(r.code(), 2);
    assert!(r.stderr().contains("axis1"), "{}", r.stderr());
}

#[test]
fn unknown_field_and_bad_axis_are_config_errors() {
    let typo = SWEEP.replace("\"fixed\"", "\"fixd\"");
    let r = run("sweep", &typo, &[]);
    assert_eq!(r.code(), 2);
    assert!(r.stderr().contains("fixd"), "{}", r.stderr());
    let r = run("sweep", &SWEEP.replace("\"area\"", "\"colour\""), &[]);
    assert_eq!(r.code(), 2, "{}", r.stderr());
}

#[test]
fn sweep_is_hash_stable_across_runs_and_threads() {
    let a = run("sweep", SWEEP, &["--threads", "1"]);
    let b = run("sweep", SWEEP, &["--threads", "4"]);
    assert_eq!(hashes(&a.manifest()), hashes(&b.manifest()));
}

#[test]
fn thread_count_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, SWEEP).unwrap();
    let status = Command::new(BIN)
        .args(["sweep", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("o"))
        .env(unipulse_cli::THREADS_ENV, "3")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let bad = Command::new(BIN)
        .args(["sweep", "--config"])
        .arg(&cfg)
        .env(unipulse_cli::THREADS_ENV, "many")
        .status()
        .unwrap();
    assert_eq!(bad.code(), Some(2));
}

#[test]
fn closed_lindblad_matches_the_closed_form() {
    let cfg = r#"{"amplitude": 10, "delta": 0.25, "tau": 12.5, "tau_r": {"min": 0, "max": 4000, "count": 41}, "gamma": 0, "gamma_phi": 0}"#;
    let r = run("lindblad", cfg, &[]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let csv = r.csv("scan.csv");
    assert_eq!(csv.header, ["tau_R [ps]", "W_numeric", "W_analytic"]);
    assert!(csv.rows.iter().all(|row| (row[1] - row[2]).abs() <= 1e-8));
}

#[test]
fn open_lindblad_drops_the_closed_form_column() {
    let cfg = r#"{"amplitude": 10, "delta": 0.25, "tau": 12.5, "tau_r": {"min": 0, "max": 4000, "count": 5}, "gamma": 0.05, "gamma_phi": 0.1}"#;
    let r = run("lindblad", cfg, &[]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    assert_eq!(r.csv("scan.csv").header, ["tau_R [ps]", "W_numeric"]);
}

#[test]
fn zero_splitting_gives_flat_fringes() {
    let cfg = r#"{"amplitude": 10, "delta": 0, "tau": 12.5, "tau_r": {"min": 0, "max": 4000, "count": 21}}"#;
    let r = run("ramsey", cfg, &[]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let w: Vec<f64> = r.csv("scan.csv").rows.iter().map(|row| row[1]).collect();
    assert!(w.iter().all(|v| (v - w[0]).abs() < 1e-12));
}

#[test]
fn negative_rate_is_rejected() {
    let cfg = r#"{"amplitude": 10, "delta": 0.25, "tau": 12.5, "tau_r": {"min": 0, "max": 10, "count": 3}, "gamma": -0.1}"#;
    let r = run("lindblad", cfg, &[]);
    assert_eq!(r.code(), 2);
    assert!(r.stderr().contains("gamma"));
}

#[test]
fn angular_convention_passes_units_through() {
    let cfg = r#"{"amplitude": 62.83185307179586, "delta": 1.5707963267948966, "tau": 0.0125, "tau_r": {"min": 0, "max": 4, "count": 5}}"#;
    let a = run("ramsey", cfg, &["--convention", "angular"]);
    let cyc = r#"{"amplitude": 10, "delta": 0.25, "tau": 12.5, "tau_r": {"min": 0, "max": 4000, "count": 5}}"#;
    let b = run("ramsey", cyc, &[]);
    let (a, b) = (a.csv("scan.csv"), b.csv("scan.csv"));
    assert_eq!(a.header[0], "tau_R [ns]");
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert!((x[1] - y[1]).abs() < 1e-9);
    }
}

#[test]
fn pi_flip_calibration_converges() {
    let cfg = r#"{"template": {"kind": "single-pulse", "delta": 0.25, "amplitude": [2.5, 250]}, "target": {"initial": 0, "final": 1}}"#;
    let r = run("calibrate", cfg, &[]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let j = r.json("calibration.json");
    assert_eq!(j["converged"], true);
    assert!(j["infidelity"].as_f64().unwrap() <= 1e-4);
    assert_eq!(j["parameters"][0]["unit"], "GHz");
}

#[test]
fn zero_budget_is_data_not_failure() {
    let cfg = r#"{"template": {"kind": "single-pulse", "delta": 0.25, "amplitude": [2.5, 250]}, "target": {"initial": 0, "final": 1}, "options": {"budget": 0}}"#;
    let r = run("calibrate", cfg, &[]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    assert_eq!(r.json("calibration.json")["converged"], false);
}

#[test]
fn out_of_range_basis_target() {
    let cfg = r#"{"template": {"kind": "single-pulse", "delta": 0.25, "amplitude": [2.5, 250]}, "target": {"initial": 0, "final": 3}}"#;
    let r = run("calibrate", cfg, &[]);
    assert_eq!(r.code(), 2);
    assert!(r.stderr().contains("target.final"), "{}", r.stderr());
}

#[test]
fn shaped_entangled_calibration_records_fidelity() {
    let r = run("calibrate", r#"{"template": {"kind": "shaped", "target": "entangled"}, "options": {"tol": 1e-2, "budget": 600, "coarse_points": 21, "golden_steps": 30}}"#, &[]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let j = r.json("calibration.json");
    assert!(j["fidelity"].as_f64().unwrap() >= 0.99, "{j}");
}

#[test]
fn symmetric_interferometer_shapes_nothing() {
    let r = run("shape", r#"{"amp": {"ic1": 1.0}}"#, &[]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let j = r.json("summary.json");
    assert!(j["peak"].as_f64().unwrap().abs() < 1e-12);
    assert!(j["duration"].is_null());
}

#[test]
fn bias_scan_is_monotone() {
    let r = run("shape", r#"{"bias_sweep": [0.1, 0.3, 0.5, 0.7, 0.9]}"#, &[]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let d: Vec<f64> = r.csv("bias.csv").rows.iter().map(|row| row[1]).collect();
    assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
    r.manifest().verify(&r.out).unwrap();
}

#[test]
fn cfl_violation_is_a_config_error() {
    let r = run("shape", r#"{"ljj": {"dx": 0.05, "dt": 0.04}}"#, &[]);
    assert_eq!(r.code(), 2);
    assert!(r.stderr().contains("CFL"), "{}", r.stderr());
}

#[test]
fn demo_writes_trajectory_and_summary() {
    let r = run("demo", r#"{"target": "inversion"}"#, &[]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let j = r.json("demo.json");
    assert!(j["fidelity"].as_f64().unwrap() >= 0.99);
    let traj = r.csv("trajectory.csv");
    assert_eq!(traj.header.len(), 5);
    let last = traj.rows.last().unwrap();
    assert!(last[4] > 0.98);
    let names: Vec<_> = r.manifest().files.iter().map(|f| f.name.clone()).collect();
    assert_eq!(names, ["trajectory.csv", "shape.csv", "demo.json"]);
}

#[test]
fn unreadable_config_and_bad_json() {
    let out = Command::new(BIN).args(["sweep", "--config", "/definitely/missing.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let r = run("sweep", "{ not json", &[]);
    assert_eq!(r.code(), 2);
    assert!(r.stderr().contains("line 1"), "{}", r.stderr());
}

#[test]
fn help_exits_cleanly() {
    let out = Command::new(BIN).arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for c in ["sweep", "ramsey", "lindblad", "calibrate", "shape", "demo"] {
        assert!(text.contains(c));
    }
}

