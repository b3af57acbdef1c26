use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use erasure_qec::circuit::ShotLine;
use erasure_qec::cli::DecodeLine;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_erasure-qec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn channel_prints_json() {
    let o = run(&["channel", "--gamma", "0.01", "--f-neg", "0.25"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys.len(), 6);
    for k in ["e", "leak", "p_i", "p_x", "p_y", "p_z"] {
        assert!(keys.contains(&k), "{keys:?}");
    }
    assert!((v["e"].as_f64().unwrap() - 0.0075).abs() < 1e-12);
    assert!((v["leak"].as_f64().unwrap() - 0.0025).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["threshold"]).status.code(), Some(2));
    assert_eq!(run(&["channel", "--gamma", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "seed = 1\nmystery = 3\n").unwrap();
    let o = run(&["threshold", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn missing_files_exit_3() {
    let o = run(&["threshold", "--config", "/nonexistent/run.cfg"]);
    assert_eq!(o.status.code(), Some(3));
    let sample = configs().join("d2_fig3_sample.cfg");
    let o = run(&["decode", "--config", sample.to_str().unwrap(), "--input", "/nonexistent/shots.jsonl"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn refused_scaling_fit_exits_4_after_writing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tiny.cfg");
    std::fs::write(
        &cfg,
        "seed = 2\n[[experiment]]\nname = \"tiny\"\nmodel = \"code_capacity\"\ndistances = [3]\naxis = \"p\"\nrates = [0.001, 0.002, 0.004]\nshots = 100\nthreshold = 0.13\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = run(&["scaling", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(out.join("scaling.csv").exists());
}

#[test]
fn sample_is_deterministic_and_forces_flag() {
    let cfg = configs().join("d2_fig3_sample.cfg");
    let cfg = cfg.to_str().unwrap();
    let a = run(&["sample", "--config", cfg]);
    let b = run(&["sample", "--config", cfg, "--workers", "3"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let lines: Vec<ShotLine> = stdout(&a).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 200);
    for (i, line) in lines.iter().enumerate() {
        assert_eq!(line.shot, i as u64);
        assert!(line.flags.contains(&7));
        assert_eq!(line.detectors.len(), 2);
    }
    let c = run(&["sample", "--config", cfg, "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn decode_reads_sampled_shots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("d2_fig3_sample.cfg");
    let cfg = cfg.to_str().unwrap();
    let out = dir.path().to_str().unwrap();
    let s = run(&["sample", "--config", cfg, "--out", out]);
    assert_eq!(s.status.code(), Some(0));
    let shots = dir.path().join("shots.jsonl");
    let o = run(&["decode", "--config", cfg, "--input", shots.to_str().unwrap(), "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let lines: Vec<DecodeLine> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 200);
    for l in &lines {
        assert_eq!(l.fail, l.predicted_obs != l.actual_obs);
    }
    assert_eq!(std::fs::read_to_string(dir.path().join("decoded.jsonl")).unwrap(), stdout(&o));

    let garbage = dir.path().join("garbage.jsonl");
    std::fs::write(&garbage, "{\"shot\":0}\n").unwrap();
    let g = run(&["decode", "--config", cfg, "--input", garbage.to_str().unwrap()]);
    assert_eq!(g.status.code(), Some(2));
}

#[test]
fn verify_passes_and_corrupted_decoder_fails() {
    let o = run(&["verify", "--circuits", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = report["syndrome_table"].as_array().unwrap();
    assert_eq!(rows.len(), 12);

    let bad = run(&["verify", "--circuits", "10", "--corrupt-decoder"]);
    assert_ne!(bad.status.code(), Some(0));
    let err = stderr(&bad);
    assert!(err.contains("failing suites:") && err.contains("erasure_exhaustive"), "{err}");
}
