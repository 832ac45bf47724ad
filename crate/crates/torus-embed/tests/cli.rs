//! End-to-end checks of the command-line interface.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::Instant;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_torus-embed"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("torus-embed-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn verify_default_config_passes_quickly() {
    let dir = scratch("verify");
    let report_a = dir.join("a.json");
    let report_b = dir.join("b.json");

    let started = Instant::now();
    let out = bin().args(["verify", "--out"]).arg(&report_a).output().unwrap();
    let elapsed = started.elapsed().as_secs_f64();
    assert!(out.status.success(), "verify failed: {}", stdout(&out));
    assert!(elapsed < 10.0, "default verify took {elapsed:.1}s");
    let text = stdout(&out);
    assert!(text.contains("PASS E.pullback_analytic"));
    assert!(text.contains("PASS F.equivariance"));
    assert!(text.contains("PASS control.wrong_target"));
    assert!(!text.contains("FAIL"));

    // Identical config and seed: byte-identical reports.
    let out = bin().args(["verify", "--out"]).arg(&report_b).output().unwrap();
    assert!(out.status.success());
    assert_eq!(fs::read(&report_a).unwrap(), fs::read(&report_b).unwrap());

    // A different seed changes sampled residuals but must still pass.
    let out = bin().args(["verify", "--seed", "9", "--out"]).arg(dir.join("c.json")).output().unwrap();
    assert!(out.status.success());

    fs::remove_dir_all(&dir).ok();
}

#[test]
fn embed_reports_dimension_arithmetic() {
    let out = bin().args(["embed", "--map", "e"]).output().unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("D = 8"), "expected D = 8 for the n=2 clifford E, got:\n{text}");
    assert!(text.contains("N = 4"));

    let out = bin().args(["embed", "--map", "f"]).output().unwrap();
    assert!(out.status.success());
    assert!(stdout(&out).contains("D = 6"));
}

#[test]
fn split_prints_c_and_margin() {
    let out = bin().args(["split"]).output().unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("c = 0.5"));
    assert!(text.contains("margin = 0.5"));
}

#[test]
fn export_obj_has_full_vertex_grid_and_quads() {
    let dir = scratch("obj");
    let out_path = dir.join("f.obj");
    let out = bin()
        .args(["export", "--map", "f", "--format", "obj", "--window", "2", "--out"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&out_path).unwrap();
    let vertices = text.lines().filter(|l| l.starts_with("v ")).count();
    let faces = text.lines().filter(|l| l.starts_with("f ")).count();
    assert_eq!(vertices, 128 * 128);
    assert_eq!(faces, 127 * 127);
    assert!(text.lines().next().unwrap().starts_with('#'));
    assert!(text.contains("# config-hash: "));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn export_csv_is_deterministic() {
    let dir = scratch("csv");
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    for path in [&a, &b] {
        let out = bin()
            .args(["export", "--map", "e", "--format", "csv", "--out"])
            .arg(path)
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let header = fs::read_to_string(&a).unwrap();
    assert!(header.starts_with("x1,x2,y1,y2,y3,y4,y5,y6,y7,y8"));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn spiral_csv_export() {
    let dir = scratch("spiral");
    let path = dir.join("spiral.csv");
    let out = bin()
        .args(["export", "--map", "spiral", "--format", "csv", "--window", "20", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("s,x,y"));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn bad_config_fails_with_context() {
    let dir = scratch("badcfg");
    let cfg = dir.join("bad.json");
    fs::write(&cfg, r#"{"n": 2, "metric": {"family": "revolution", "major": 1.0, "minor": 2.0}}"#)
        .unwrap();
    let out = bin().args(["split", "--config"]).arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("major > minor"), "unhelpful error: {err}");

    fs::write(&cfg, r#"{"n": 2, "unknown_key": 1}"#).unwrap();
    let out = bin().args(["split", "--config"]).arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema violation"));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_revolution_config_end_to_end() {
    let dir = scratch("rev");
    let cfg = dir.join("rev.json");
    fs::write(
        &cfg,
        r#"{
  "n": 2,
  "metric": {"family": "revolution", "major": 2.0, "minor": 1.0},
  "oracle": {"kind": "revolution"},
  "split": {"resolution": 128}
}"#,
    )
    .unwrap();
    let report = dir.join("report.json");
    let out = bin()
        .args(["verify", "--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(&report)
        .output()
        .unwrap();
    assert!(out.status.success(), "revolution verify failed:\n{}", stdout(&out));
    assert!(!stdout(&out).contains("FAIL"));
    fs::remove_dir_all(&dir).ok();
}
