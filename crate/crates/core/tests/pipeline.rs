use hypwave::error::{Error, FormatError};
use hypwave::estimate::{detect_anisotropy, DetectionOptions};
use hypwave::experiments::{ExperimentConfig, ExperimentReport, REPORT_SCHEMA};
use hypwave::field::DyadicGrid;
use hypwave::io::{read_coefficients, read_field, write_coefficients, write_field, encode_field};
use hypwave::params::{Anisotropy, NormParams};
use hypwave::seqnorm::ftilde_norm;
use hypwave::synth::{random_bandlimited, synth_cascade, CascadeMode, RngSpec, SpectrumProfile};
use hypwave::wavelet::{forward, inverse, WaveletSpec};

#[test]
fn files_survive_a_transform_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let grid = DyadicGrid::new(2, 6).unwrap();
    let f = random_bandlimited(grid, 12, SpectrumProfile::Flat, &RngSpec::new(2, 0)).unwrap();
    write_field(&f, dir.path().join("f.grd")).unwrap();
    let g = read_field(dir.path().join("f.grd")).unwrap();
    assert_eq!(f.values(), g.values());

    let spec = WaveletSpec::by_name("db2").unwrap();
    write_coefficients(&forward(&g, &spec).unwrap(), dir.path().join("c.hwc")).unwrap();
    let c = read_coefficients(dir.path().join("c.hwc")).unwrap();
    assert_eq!(c.spec(), &spec);
    let back = inverse(&c).unwrap();
    let err = f
        .values()
        .iter()
        .zip(back.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(err <= 1e-12 * f.max_modulus());
}

#[test]
fn corrupt_files_are_format_errors() {
    let dir = tempfile::tempdir().unwrap();
    let grid = DyadicGrid::new(1, 4).unwrap();
    let bytes = encode_field(&hypwave::field::SampledField::constant(grid, 1.0));

    let short = dir.path().join("short.grd");
    std::fs::write(&short, &bytes[..bytes.len() - 3]).unwrap();
    let e = read_field(&short).unwrap_err();
    assert!(e.is_io());
    assert!(matches!(e, Error::Format(FormatError::Truncated { .. })));

    let long = dir.path().join("long.grd");
    let mut extra = bytes.clone();
    extra.extend_from_slice(&[0; 5]);
    std::fs::write(&long, &extra).unwrap();
    assert!(matches!(read_field(&long), Err(Error::Format(FormatError::TrailingData(5)))));

    let hwc_as_grd = dir.path().join("c.hwc");
    write_coefficients(&forward(&read_field_bytes(&bytes), &WaveletSpec::Haar).unwrap(), &hwc_as_grd).unwrap();
    assert!(matches!(read_field(&hwc_as_grd), Err(Error::Format(FormatError::BadMagic { .. }))));

    assert!(matches!(read_field(dir.path().join("absent.grd")), Err(Error::Io(_))));
}

fn read_field_bytes(bytes: &[u8]) -> hypwave::field::SampledField {
    hypwave::io::decode_field(bytes).unwrap()
}

#[test]
fn cascade_detection_through_the_field_route() {
    let grid = DyadicGrid::new(2, 8).unwrap();
    let alpha = Anisotropy::new(vec![1.4, 0.6]).unwrap();
    let (f, truth) = synth_cascade(grid, 0.5, &alpha, &RngSpec::new(1, 0), CascadeMode::Deterministic, &WaveletSpec::Haar)
        .unwrap();
    assert_eq!(truth.params["alpha1"], 1.4);
    let c = forward(&f, &WaveletSpec::Haar).unwrap();
    let r = detect_anisotropy(&c, 2.0, &DetectionOptions::default()).unwrap();
    assert!((r.s_hat - 0.5).abs() < 1e-9);
    assert!((r.alpha_hat.alphas()[0] - 1.4).abs() < 1e-9);
    assert!(r.rss <= 1e-12 * r.levels_used as f64);

    // The coefficient norm of a cascade is finite below its smoothness.
    let below = NormParams::new(0.3, 2.0, 2.0, alpha.clone()).unwrap();
    let above = NormParams::new(0.7, 2.0, 2.0, alpha).unwrap();
    assert!(ftilde_norm(&c, &below).unwrap() < ftilde_norm(&c, &above).unwrap());
}

#[test]
fn experiment_reports_are_reproducible_json() {
    let mut cfg = ExperimentConfig::named("detection-benchmark").unwrap();
    if let ExperimentConfig::DetectionBenchmark(c) = &mut cfg {
        c.level = 7;
        c.realizations = 2;
    }
    *cfg.seed_mut() = 5;
    let a = cfg.run().unwrap();
    let b = cfg.run().unwrap();
    assert_eq!(a.schema, REPORT_SCHEMA);
    assert_eq!(a.verdicts, b.verdicts);
    let parsed: ExperimentReport = serde_json::from_str(&a.canonical_json()).unwrap();
    assert_eq!(parsed.verdicts, a.verdicts);

    let text = serde_json::to_string(&cfg).unwrap();
    assert!(text.contains("\"experiment\":\"detection-benchmark\""));
    let again: ExperimentConfig = serde_json::from_str(&text).unwrap();
    assert_eq!(again, cfg);
    let unknown = text.replacen('{', "{\"bogus\":1,", 1);
    assert!(serde_json::from_str::<ExperimentConfig>(&unknown).is_err());
}
