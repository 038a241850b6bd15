use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use topamp_cli::emit::read_csv;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_topamp"))
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin().arg("run").arg(config).arg("--out").arg(out).args(extra).output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn single_file(dir: &Path, prefix: &str, ext: &str) -> PathBuf {
    let mut hits: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| {
            let name = p.file_name().unwrap().to_string_lossy();
            name.starts_with(prefix) && name.ends_with(ext)
        })
        .collect();
    assert_eq!(hits.len(), 1, "{prefix}*{ext} in {}", dir.display());
    hits.pop().unwrap()
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name} in {header:?}"))
}

#[test]
fn every_shipped_config_validates() {
    let mut n = 0;
    for entry in fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        let out = bin().arg("validate").arg(&path).output().unwrap();
        assert!(out.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&out.stderr));
        n += 1;
    }
    assert!(n >= 7);
}

#[test]
fn gain_config_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&configs_dir().join("gain_sweep.json"), dir.path(), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&single_file(dir.path(), "gain-sweep.vs-n__", ".csv")).unwrap();
    let (g, cf) = (column(&header, "gain[dB]"), column(&header, "closed_form_gain[dB]"));
    assert_eq!(rows.len(), 3 * 15);
    for r in &rows {
        assert!((r[g] - r[cf]).abs() < 0.3, "{r:?}");
    }
    let sidecar: Value =
        serde_json::from_str(&fs::read_to_string(single_file(dir.path(), "gain-sweep.vs-n__", ".json")).unwrap())
            .unwrap();
    assert_eq!(sidecar["kind"], "gain-sweep");
    assert_eq!(sidecar["partial"], false);
    assert_eq!(sidecar["config_hash"].as_str().unwrap().len(), 16);
}

#[test]
fn nsr_config_fits_inverse_square_root() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(&configs_dir().join("nsr.json"), dir.path(), &[]).status.success());
    let sidecar: Value =
        serde_json::from_str(&fs::read_to_string(single_file(dir.path(), "nsr__", ".json")).unwrap()).unwrap();
    let p = sidecar["extras"]["fit_power"].as_f64().unwrap();
    assert!((p + 0.5).abs() < 0.05, "{p}");
    let (header, rows) = read_csv(&single_file(dir.path(), "nsr__", ".csv")).unwrap();
    assert_eq!(header, vec!["site", "nsr", "closed_form", "fit"]);
    assert_eq!(rows.len(), 29);
}

#[test]
fn phase_map_has_boundary_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "pm.json",
        r#"{"model": {"chain": {"gamma_p": 1.0, "n_sites": 40}},
            "experiment": {"kind": "phase-map", "omega": {"start": -3, "stop": 3, "points": 7},
                           "gamma_p": {"start": 0.5, "stop": 3.5, "points": 4}}}"#,
    );
    let out = dir.path().join("out");
    assert!(run(&cfg, &out, &[]).status.success());
    let (header, rows) = read_csv(&single_file(&out, "phase-map__", ".csv")).unwrap();
    assert_eq!(rows.len(), 28);
    let (lo, hi) = (column(&header, "boundary_lower[t_d]"), column(&header, "boundary_upper[t_d]"));
    let w = column(&header, "omega[t_d]");
    let centre = rows.iter().find(|r| r[w] == 0.0).unwrap();
    assert!((centre[lo] - 0.0).abs() < 1e-12 && (centre[hi] - 4.0).abs() < 1e-12);
}

#[test]
fn every_violation_is_reported_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        r#"{"model": {"chain": {"gamma_p": 5.0, "n_sites": 0}}, "experiment": {"kind": "nsr", "bogus": 1}}"#,
    );
    for verb in ["validate", "run"] {
        let out = bin().arg(verb).arg(&cfg).output().unwrap();
        assert_eq!(out.status.code(), Some(1));
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains("model.chain.n_sites"), "{err}");
        assert!(err.contains("experiment"), "{err}");
    }
    let cfg = write_config(
        dir.path(),
        "kappa.json",
        r#"{"model": {"chain": {"gamma_p": 5.0, "n_sites": 4}}, "experiment": {"kind": "nsr"}}"#,
    );
    let out = bin().arg("validate").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("model.chain.gamma_p") && err.contains("kappa > 0"), "{err}");
}

#[test]
fn failed_grid_points_give_partial_or_strict_exit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "pm.json",
        r#"{"model": {"chain": {"gamma_p": 1.0, "n_sites": 20}},
            "experiment": {"kind": "phase-map", "omega": [0.0, 1.0], "gamma_p": [1.0, 4.0]}}"#,
    );
    let out = dir.path().join("out");
    assert_eq!(run(&cfg, &out, &[]).status.code(), Some(3));
    let sidecar: Value =
        serde_json::from_str(&fs::read_to_string(single_file(&out, "phase-map__", ".json")).unwrap()).unwrap();
    assert_eq!(sidecar["partial"], true);
    assert_eq!(sidecar["errors"].as_array().unwrap().len(), 2);
    let (_, rows) = read_csv(&single_file(&out, "phase-map__", ".csv")).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows[3][2].is_nan());

    let strict_out = dir.path().join("strict");
    assert_eq!(run(&cfg, &strict_out, &["--strict"]).status.code(), Some(2));
    assert!(!strict_out.exists());
}

#[test]
fn outputs_are_identical_across_thread_counts_and_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "dis.json",
        r#"{"model": {"chain": {"gamma_p": 0.1, "n_sites": 10}},
            "experiment": {"kind": "disorder", "w": [0.0, 0.5, 1.0], "n_sites": [6, 8, 10], "instances": 20, "seed": 7}}"#,
    );
    let mut seen = vec![];
    for (k, threads) in ["1", "4", "4"].iter().enumerate() {
        let out = dir.path().join(format!("o{k}"));
        assert!(run(&cfg, &out, &["--threads", threads]).status.success());
        seen.push(fs::read(single_file(&out, "disorder.gain__", ".csv")).unwrap());
    }
    assert_eq!(seen[0], seen[1]);
    assert_eq!(seen[1], seen[2]);

    let out = dir.path().join("reseeded");
    assert!(run(&cfg, &out, &["--seed", "8"]).status.success());
    let other = single_file(&out, "disorder.gain__", ".csv");
    assert_ne!(fs::read(&other).unwrap(), seen[0]);
    let sidecar: Value =
        serde_json::from_str(&fs::read_to_string(single_file(&out, "disorder.gain__", ".json")).unwrap()).unwrap();
    assert_eq!(sidecar["seed"], 8);
}

#[test]
fn remaining_fast_configs_run() {
    for name in
        ["noise_profile.json", "added_noise.json", "stability.json", "steady_state.json", "classify.json"]
    {
        let dir = tempfile::tempdir().unwrap();
        let out = run(&configs_dir().join(name), dir.path(), &[]);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(fs::read_dir(dir.path()).unwrap().count() >= 2, "{name}");
    }
}

#[test]
fn schema_and_version() {
    let out = bin().arg("schema").output().unwrap();
    assert!(out.status.success());
    let schema: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(schema["properties"]["experiment"].is_object());
    let out = bin().arg("version").output().unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("topamp "));
}
