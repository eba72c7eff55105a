use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use subradiant_chain::cli::cmd_validate_truncation;
use subradiant_chain::config::RunConfig;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("chainsim-test-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn chainsim(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chainsim"))
        .args(args)
        .arg("--set")
        .arg(format!("output.directory=\"{}\"", dir.display()))
        .output()
        .unwrap()
}

fn rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(|r| r.unwrap()).collect()
}

#[test]
fn single_atom_modes() {
    let dir = scratch("single");
    let out = chainsim(&dir, &["modes", "--set", "geometry.n_atoms=1", "--set", "truncation.n_max=1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = rows(&dir.join("single_modes.csv"));
    assert_eq!(r.len(), 1);
    assert_eq!(r[0][0].parse::<usize>().unwrap(), 1);
    assert_eq!(r[0][2].parse::<f64>().unwrap(), 0.0);
    assert!((r[0][3].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);

    let meta: toml::Table = fs::read_to_string(dir.join("single_modes.meta.toml")).unwrap().parse().unwrap();
    assert_eq!(meta["schema_version"].as_integer(), Some(1));
    assert_eq!(meta["command"].as_str(), Some("modes"));
    assert_eq!(meta["config"]["geometry"]["n_atoms"].as_integer(), Some(1));
}

#[test]
fn modes_output_is_byte_identical_across_runs() {
    let (a, b) = (scratch("det-a"), scratch("det-b"));
    for d in [&a, &b] {
        let out = chainsim(d, &["modes", "--set", "geometry.n_atoms=8"]);
        assert!(out.status.success());
    }
    for f in ["single_modes.csv", "dispersion.csv", "double_modes.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn failures_print_an_error_record() {
    let dir = scratch("fail");
    let cfg = dir.join("bad.toml");
    fs::write(&cfg, "[geometry]\nn_atoms = 5\nspacingg = 0.3\n").unwrap();
    let out = chainsim(&dir, &["modes", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    let record: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(record["error"], "config");

    let out = chainsim(&dir, &["validate-truncation", "--set", "geometry.n_atoms=16"]);
    assert!(!out.status.success());
    let record: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(record["error"], "config");
    assert!(record["message"].as_str().unwrap().contains("12"));

    let out = chainsim(
        &dir,
        &["radiation", "--snapshot", "1e6", "--set", "geometry.n_atoms=4", "--set", "schedule.storage_time=1"],
    );
    assert!(!out.status.success());
}

#[test]
fn print_config_round_trips() {
    let dir = scratch("print");
    let out = chainsim(&dir, &["print-config", "--set", "drive.omega_t1=0.25", "--set", "schedule.n_cycles=2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let cfg = RunConfig::from_toml_str(&text).unwrap();
    assert_eq!(cfg.drive.omega_t1, 0.25);
    assert_eq!(cfg.schedule.n_cycles, 2);
    assert_eq!(RunConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap(), cfg);
}

#[test]
fn protocol_writes_the_time_series_schema() {
    let dir = scratch("protocol");
    let out = chainsim(
        &dir,
        &["protocol", "--set", "geometry.n_atoms=5", "--set", "schedule.storage_time=2", "--set", "schedule.n_cycles=1"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(dir.join("protocol.csv")).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        ["t", "phase", "pop_total", "pop_1", "pop_2", "gamma", "trace", "proj_1"]
    );
    for r in reader.records() {
        let r = r.unwrap();
        let total: f64 = r[2].parse().unwrap();
        let parts: f64 = r[3].parse::<f64>().unwrap() + r[4].parse::<f64>().unwrap();
        assert!((total - parts).abs() < 1e-12);
        assert!((r[6].parse::<f64>().unwrap() - 1.0).abs() < 1e-8);
    }
    assert!(dir.join("emission.csv").exists());
    assert!(dir.join("protocol.meta.toml").exists());
}

#[test]
fn rate_model_and_kappa_map_commands() {
    let dir = scratch("rates");
    let out = chainsim(&dir, &["rate-model", "--set", "geometry.n_atoms=6"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = rows(&dir.join("rate_model.csv"));
    assert!(r.len() > 10);
    let out = chainsim(&dir, &["kappa-map", "--set", "sweep.n_atoms=[4, 5]", "--set", "sweep.spacings=[0.3, 0.35]"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = rows(&dir.join("kappa.csv"));
    assert_eq!(r.len(), 4);
    assert!(r.iter().all(|row| row[4].parse::<f64>().unwrap() > 1.0));
}

#[test]
fn truncations_coincide_in_the_linear_regime() {
    let mut cfg = RunConfig::default();
    cfg.geometry.n_atoms = 5;
    cfg.drive.omega_t1 = 1e-3;
    cfg.schedule.storage_time = 5.0;
    let t = &cmd_validate_truncation(&cfg).unwrap()[0];
    let (p1, p3) = (t.column("pop_n1").unwrap(), t.column("pop_n3").unwrap());
    for (a, b) in p1.iter().zip(&p3) {
        assert!((a - b).abs() <= 1e-6 * b.max(1e-300), "{a} vs {b}");
    }
}
