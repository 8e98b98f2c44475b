// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

use czscatter::table::SweepTable;

fn czscatter(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_czscatter"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in [
        "solve",
        "gate",
        "fidelity-sweep",
        "duration",
        "working-condition",
        "equivalence",
    ] {
        let a = dir.path().join(format!("{cmd}-a.csv"));
        let b = dir.path().join(format!("{cmd}-b.csv"));
        for p in [&a, &b] {
            let out = czscatter(&[cmd, "--out", p.to_str().unwrap()]);
            assert!(out.status.success(), "{cmd}: {}", stderr(&out));
        }
        assert_eq!(
            std::fs::read(&a).unwrap(),
            std::fs::read(&b).unwrap(),
            "{cmd}"
        );
    }
}

#[test]
fn invalid_geometry_is_rejected_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"geometry": {"x2": 4.0, "x3": 2.0}}"#);
    let out_path = dir.path().join("solve.csv");
    let out = czscatter(&[
        "solve",
        "--config",
        &config,
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("x3 > x2"), "{}", stderr(&out));
    assert!(!out_path.exists());
}

#[test]
fn inadmissible_packet_names_the_condition() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"packet": {"x0": -30, "k0": 1, "dk": 0.05}}"#,
    );
    let out = czscatter(&["wavepacket", "--config", &config]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("3*dx"), "{}", stderr(&out));
}

#[test]
fn sweep_summary_reports_window() {
    let out = czscatter(&["fidelity-sweep", "--format", "json"]);
    assert!(out.status.success());
    let err = stderr(&out);
    assert!(
        err.contains("widest symmetric window with F >= 0.95"),
        "{err}"
    );
    let table = SweepTable::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(table.rows.len(), 401);
    let w: f64 = table.metadata["window_half_width"].parse().unwrap();
    assert!((0.05..0.06).contains(&w), "{w}");
}

#[test]
fn sweep_flags_override_config() {
    let out = czscatter(&[
        "fidelity-sweep",
        "--samples",
        "11",
        "--gamma",
        "100",
        "--regime",
        "2,1",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let table = SweepTable::from_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(table.rows.len(), 11);
    assert_eq!(table.columns.len(), 4);
    assert!(table.metadata["regime"].starts_with("n=2, n'=1"));
}

#[test]
fn wavepacket_writes_snapshots_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("wp.csv");
    let out = czscatter(&[
        "wavepacket",
        "--samples",
        "3",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    for i in 0..3 {
        let snap = dir.path().join(format!("wp.t{i:03}.csv"));
        let table = SweepTable::from_csv(&std::fs::read_to_string(snap).unwrap()).unwrap();
        assert_eq!(table.columns[0], "x");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("wp.summary.json")).unwrap())
            .unwrap();
    assert!(summary["F_wp"].as_f64().unwrap() >= 0.95);
    assert!(summary["norm_drift"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn equivalence_rejects_pole_on_grid() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"atoms": {"velocity": 1, "omega0": 1, "coupling": 0.1}, "k_grid": {"lo": 0.5, "hi": 1.5, "samples": 11}}"#,
    );
    let out = czscatter(&["equivalence", "--config", &config]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
}

#[test]
fn working_condition_custom_si() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"units": "SI", "velocity": 1.0, "wavelength": 6.283185307179586}"#,
    );
    let out = czscatter(&["working-condition", "--config", &config, "--format", "json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let table = SweepTable::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!((table.column("td_bound_s").unwrap()[0] - 10.0).abs() < 1e-12);
}

#[test]
fn unknown_config_field_is_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"gama": 10}"#);
    let out = czscatter(&["gate", "--config", &config]);
    assert_eq!(out.status.code(), Some(2));
}
