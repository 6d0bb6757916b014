use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn hypwave(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypwave"))
        .args(args)
        .current_dir(dir)
        .env_remove("HYPWAVE_THREADS")
        .output()
        .expect("binary runs")
}

fn ok_json(dir: &Path, args: &[&str]) -> Value {
    let out = hypwave(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn norm_of(v: &Value) -> f64 {
    v["norm"].as_f64().expect("norm field")
}

fn bandlimited(dir: &Path, name: &str, seed: u64) {
    let seed = seed.to_string();
    ok_json(
        dir,
        &["synth", "--family", "bandlimited", "--J", "6", "--cap", "10", "--seed", &seed, "--out", name],
    );
}

fn read_values(path: &Path) -> Vec<f64> {
    let f = hypwave::io::read_field(path).unwrap();
    f.values().iter().flat_map(|v| [v.re, v.im]).collect()
}

#[test]
fn transform_round_trip() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    bandlimited(dir, "f.grd", 11);
    for wavelet in ["haar", "db2", "db4"] {
        ok_json(dir, &["transform", "--wavelet", wavelet, "--in", "f.grd", "--out", "c.hwc"]);
        ok_json(dir, &["transform", "--inverse", "--in", "c.hwc", "--out", "g.grd"]);
        let a = read_values(&dir.join("f.grd"));
        let b = read_values(&dir.join("g.grd"));
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = a.iter().zip(&b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(err <= 1e-12 * scale, "{wavelet}: {err}");
    }
}

#[test]
fn haar_sequence_norm_matches_l2() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    bandlimited(dir, "f.grd", 5);
    ok_json(dir, &["transform", "--wavelet", "haar", "--in", "f.grd", "--out", "c.hwc"]);
    let seq = ok_json(dir, &["seqnorm", "--space", "ft", "--s", "0", "--p", "2", "--q", "2", "--in", "c.hwc"]);
    let l2 = ok_json(dir, &["norm", "--space", "L2", "--in", "f.grd"]);
    assert!((norm_of(&seq) - norm_of(&l2)).abs() <= 1e-9 * norm_of(&l2));
    assert_eq!(seq["admissibility"]["valid"], Value::Bool(true));
}

#[test]
fn hyperbolic_sobolev_alias_and_consistency() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let mut ratios = Vec::new();
    for seed in 0..5u64 {
        bandlimited(dir, "f.grd", seed);
        let base = ["--s", "1", "--p", "2", "--alpha", "1,1", "--in", "f.grd"];
        let run = |space: &str, extra: &[&str]| {
            let mut args = vec!["norm", "--space", space];
            args.extend_from_slice(&base);
            args.extend_from_slice(extra);
            norm_of(&ok_json(dir, &args))
        };
        let wt = run("Wt", &[]);
        assert_eq!(wt, run("Ft", &["--q", "2"]));
        ratios.push(wt / run("W", &[]));
    }
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    assert!(max / min <= 20.0, "{ratios:?}");
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    bandlimited(dir, "f.grd", 1);
    ok_json(dir, &["transform", "--in", "f.grd", "--out", "c.hwc"]);

    assert_eq!(hypwave(dir, &["norm", "--space", "L2", "--in", "f.grd", "--bogus"]).status.code(), Some(2));
    let bad_alpha = hypwave(dir, &["norm", "--space", "W", "--alpha", "1,2", "--in", "f.grd"]);
    assert_eq!(bad_alpha.status.code(), Some(2));
    assert_eq!(String::from_utf8_lossy(&bad_alpha.stderr).lines().count(), 1);
    assert_eq!(hypwave(dir, &["norm", "--space", "W", "--p", "1", "--in", "f.grd"]).status.code(), Some(2));
    assert_eq!(hypwave(dir, &["norm", "--space", "L2", "--in", "missing.grd"]).status.code(), Some(3));

    std::fs::write(dir.join("junk.grd"), b"not a field\n").unwrap();
    assert_eq!(hypwave(dir, &["norm", "--space", "L2", "--in", "junk.grd"]).status.code(), Some(3));

    let strict = ["seqnorm", "--space", "ft", "--s", "1", "--strict", "--in", "c.hwc"];
    assert_eq!(hypwave(dir, &strict).status.code(), Some(4));
    let lenient = ok_json(dir, &["seqnorm", "--space", "ft", "--s", "1", "--in", "c.hwc"]);
    assert_eq!(lenient["admissibility"]["valid"], Value::Bool(false));
}

#[test]
fn synth_is_deterministic_and_reports_truth() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let args = |out: &'static str| {
        vec!["synth", "--family", "cascade", "--J", "6", "--s", "0.8", "--alpha", "0.6,1.4", "--rademacher", "--seed", "9", "--out", out]
    };
    let truth = ok_json(dir, &args("a.grd"));
    ok_json(dir, &args("b.grd"));
    assert_eq!(std::fs::read(dir.join("a.grd")).unwrap(), std::fs::read(dir.join("b.grd")).unwrap());
    assert_eq!(truth["ground_truth"]["family"], "cascade");
    assert_eq!(truth["ground_truth"]["params"]["s"].as_f64(), Some(0.8));

    let kernel = ok_json(dir, &["synth", "--family", "kernel", "--d", "1", "--J", "10", "--n", "5", "--out", "k.grd"]);
    assert_eq!(kernel["ground_truth"]["terms"].as_u64(), Some(5));
    let missing_n = hypwave(dir, &["synth", "--family", "kernel", "--d", "1", "--J", "10", "--out", "k.grd"]);
    assert_eq!(missing_n.status.code(), Some(2));
}

#[test]
fn detect_recovers_deterministic_cascade() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    ok_json(dir, &["synth", "--family", "cascade", "--J", "7", "--s", "0.8", "--alpha", "0.6,1.4", "--out", "k.grd"]);
    let from_field = ok_json(dir, &["detect", "--in", "k.grd"]);
    assert!((from_field["s_hat"].as_f64().unwrap() - 0.8).abs() < 1e-9);
    let alpha: Vec<f64> = serde_json::from_value(from_field["alpha_hat"].clone()).unwrap();
    assert!((alpha[0] - 0.6).abs() < 1e-9 && (alpha[1] - 1.4).abs() < 1e-9);

    ok_json(dir, &["transform", "--in", "k.grd", "--out", "k.hwc"]);
    let from_coeffs = ok_json(dir, &["detect", "--in", "k.hwc"]);
    assert_eq!(from_coeffs["alpha_hat"], from_field["alpha_hat"]);
}

#[test]
fn experiment_report_to_file() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    std::fs::write(
        dir.join("exp.toml"),
        "experiment = \"haar-sobolev\"\nlevel = 5\ncorpus_size = 4\nband_cap = 6\n",
    )
    .unwrap();
    let out = hypwave(dir, &["experiment", "--config", "exp.toml", "--seed", "3", "--threads", "1", "--report", "r.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("r.json")).unwrap()).unwrap();
    assert_eq!(report["schema"], "hypwave-report/1");
    assert_eq!(report["experiment"], "haar-sobolev");
    assert!(report["verdicts"].as_array().is_some_and(|v| !v.is_empty()));

    let again = hypwave(dir, &["experiment", "--config", "exp.toml", "--seed", "3", "--report", "s.json"]);
    assert!(again.status.success());
    let strip = |v: &mut Value| v.as_object_mut().unwrap().remove("wall_clock_s");
    let mut second: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("s.json")).unwrap()).unwrap();
    let mut first = report;
    strip(&mut first);
    strip(&mut second);
    assert_eq!(first, second);

    assert_eq!(hypwave(dir, &["experiment", "no-such-thing"]).status.code(), Some(2));
    assert_eq!(hypwave(dir, &["experiment", "--config", "absent.toml"]).status.code(), Some(3));
    std::fs::write(dir.join("bad.toml"), "experiment = \"haar-sobolev\"\nlevle = 5\n").unwrap();
    assert_eq!(hypwave(dir, &["experiment", "--config", "bad.toml"]).status.code(), Some(2));
}
