// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::process::{Command, Output};

fn twincav(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twincav"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn run_preset_writes_outputs_and_prints_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sym");
    let o = twincav(&[
        "run",
        "--scenario",
        "fig2-sym",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let printed: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(printed["scenario"], "fig2-sym");
    for f in [
        "samples.csv",
        "summary.json",
        "EN_ML.csv",
        "EN_MR.csv",
        "EN_LR.csv",
        "plot.gp",
    ] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let on_disk = fs::read(out.join("summary.json")).unwrap();
    assert_eq!(on_disk, o.stdout);
}

#[test]
fn csv_format_prints_one_row_per_pair() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f3");
    let o = twincav(&[
        "--format",
        "csv",
        "run",
        "--scenario",
        "fig3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn config_file_and_errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("mine.cfg");
    let base = fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../core/presets/fig2_sym.cfg"
    ))
    .unwrap();
    let short = base.replace("sim.t_end_s = 500e-6", "sim.t_end_s = 80e-6");
    assert_ne!(short, base);
    fs::write(&cfg, &short).unwrap();
    let out = dir.path().join("mine");
    let o = twincav(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );

    fs::write(&cfg, format!("{short}left.colour = 1\n")).unwrap();
    let o = twincav(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("left.colour"));

    let o = twincav(&["run", "--scenario", "no-such-preset"]);
    assert_eq!(o.status.code(), Some(2));

    let o = twincav(&["run", "--config", "/nonexistent/x.cfg"]);
    assert_eq!(o.status.code(), Some(4));

    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let o = twincav(&[
        "run",
        "--scenario",
        "fig3",
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn divergent_configuration_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("hot.cfg");
    let base = fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../core/presets/fig2_sym.cfg"
    ))
    .unwrap();
    let text = base
        .replace("left.power_W = 70e-6", "left.power_W = 1e3")
        .replace("left.detuning = 6.5", "left.detuning = -1")
        .replace("drive.mode = both", "drive.mode = left_only")
        .replace("sim.t_end_s = 500e-6", "sim.t_end_s = 200e-6");
    fs::write(&cfg, text).unwrap();
    let o = twincav(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn sweep_reports_every_point() {
    let dir = tempfile::tempdir().unwrap();
    let o = twincav(&[
        "--format",
        "csv",
        "sweep",
        "--scenario",
        "fig2-asym",
        "--key",
        "right.finesse",
        "--start",
        "2e5",
        "--stop",
        "3e5",
        "--steps",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 4);
    assert!(dir.path().join("sweep.csv").exists());

    let o = twincav(&[
        "sweep",
        "--scenario",
        "fig3",
        "--key",
        "left.bogus",
        "--start",
        "1",
        "--stop",
        "2",
        "--steps",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_passes() {
    let o = twincav(&["verify", "--seed", "7"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let checks: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(checks
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
}

#[test]
fn missing_source_is_a_usage_error() {
    assert_eq!(twincav(&["run"]).status.code(), Some(2));
}
