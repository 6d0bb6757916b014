use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use hypwave::bands::{
    besov_norm, mixed_sobolev_norm, sobolev_multiplier_norm, triebel_norm, Flavor, NormValue,
};
use hypwave::estimate::{detect_anisotropy, DetectionOptions};
use hypwave::experiments::ExperimentConfig;
use hypwave::field::{lp_norm, DyadicGrid};
use hypwave::io::{read_coefficients, read_field, write_coefficients, write_field};
use hypwave::params::{Anisotropy, NormParams};
use hypwave::seqnorm::{btilde_norm, ftilde_norm};
use hypwave::synth::{
    random_bandlimited, synth_cascade, synth_lemma1, synth_lemma2, synth_lemma3, CascadeMode,
    Lemma1Basis, RngSpec, SpectrumProfile,
};
use hypwave::wavelet::{admissibility_check, forward, inverse, Characterization, WaveletSpec};

use crate::{
    Cli, Command, DetectArgs, ExperimentArgs, Family, NormArgs, Profile, SeqSpace, SeqnormArgs,
    Space, SynthArgs, TransformArgs,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] hypwave::error::Error),
    #[error("{0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write report: {0}")]
    Write(std::io::Error),
    #[error("parameters outside the characterized range: {0}")]
    Inadmissible(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_io() => 3,
            CliError::Read { .. } | CliError::Write(_) => 3,
            CliError::Inadmissible(_) => 4,
            CliError::Lib(_) | CliError::Config(_) => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        // Fails only when a pool already exists, which is harmless here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let out = match &cli.command {
        Command::Synth(a) => synth(a)?,
        Command::Transform(a) => transform(a)?,
        Command::Norm(a) => norm(a)?,
        Command::Seqnorm(a) => seqnorm(a)?,
        Command::Detect(a) => detect(a)?,
        Command::Experiment(a) => return experiment(a, cli.report.as_deref()),
    };
    emit(&serde_json::to_string(&out).expect("json values serialize"), cli.report.as_deref())
}

fn emit(text: &str, report: Option<&Path>) -> Result<()> {
    match report {
        Some(path) => fs::write(path, format!("{text}\n")).map_err(CliError::Write),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn anisotropy(alpha: &Option<Vec<f64>>, d: usize) -> Result<Anisotropy> {
    let a = match alpha {
        Some(a) => Anisotropy::new(a.clone())?,
        None => Anisotropy::isotropic(d)?,
    };
    if a.dim() != d {
        return Err(CliError::Config(format!(
            "--alpha has {} entries for d={d}",
            a.dim()
        )));
    }
    Ok(a)
}

fn synth(a: &SynthArgs) -> Result<Value> {
    let grid = DyadicGrid::new(a.d, a.level)?;
    let rng = RngSpec::new(a.seed, a.stream);
    let need_n = || {
        a.n.ok_or_else(|| CliError::Config("this family needs --n".into()))
    };
    let (field, truth) = match a.family {
        Family::Cascade => {
            let alpha = anisotropy(&a.alpha, a.d)?;
            let mode = if a.rademacher {
                CascadeMode::Rademacher
            } else {
                CascadeMode::Deterministic
            };
            let spec = WaveletSpec::by_name(&a.wavelet)?;
            let (f, t) = synth_cascade(grid, a.s, &alpha, &rng, mode, &spec)?;
            (f, Some(t))
        }
        Family::Lacunary => {
            let basis = if a.haar {
                Lemma1Basis::Haar
            } else {
                Lemma1Basis::Tones
            };
            let (f, t) = synth_lemma1(grid, need_n()?, &rng, basis)?;
            (f, Some(t))
        }
        Family::Disjoint => {
            let (f, t) = synth_lemma2(grid, need_n()?, a.p)?;
            (f, Some(t))
        }
        Family::Kernel => {
            let (f, t) = synth_lemma3(grid, need_n()?)?;
            (f, Some(t))
        }
        Family::Bandlimited => {
            let profile = match a.profile {
                Profile::Flat => SpectrumProfile::Flat,
                Profile::Decay => SpectrumProfile::Decay { exponent: a.decay },
                Profile::Dc => SpectrumProfile::DcOnly,
            };
            (random_bandlimited(grid, a.cap, profile, &rng)?, None)
        }
    };
    write_field(&field, &a.out)?;
    Ok(json!({
        "out": a.out.display().to_string(),
        "d": a.d,
        "J": a.level,
        "ground_truth": truth.as_ref().map(to_value),
    }))
}

fn transform(a: &TransformArgs) -> Result<Value> {
    if a.inverse {
        let c = read_coefficients(&a.input)?;
        let f = inverse(&c)?;
        // Inputs from real fields come back real up to rounding.
        let f = if c.data().iter().all(|v| v.im == 0.0) {
            f.into_real()?
        } else {
            f
        };
        write_field(&f, &a.out)?;
        Ok(json!({ "out": a.out.display().to_string(), "wavelet": c.spec().name() }))
    } else {
        let spec = WaveletSpec::by_name(&a.wavelet)?;
        let f = read_field(&a.input)?;
        let c = forward(&f, &spec)?;
        write_coefficients(&c, &a.out)?;
        Ok(json!({ "out": a.out.display().to_string(), "wavelet": spec.name() }))
    }
}

fn norm(a: &NormArgs) -> Result<Value> {
    let f = read_field(&a.input)?;
    let d = f.grid().dim();
    let alpha = anisotropy(&a.alpha, d)?;
    let plain = |v: f64| NormValue {
        value: v,
        truncated: false,
    };
    let v = match a.space {
        Space::B => besov_norm(&f, &NormParams::new(a.s, a.p, a.q, alpha)?, Flavor::Classical)?,
        Space::F => triebel_norm(&f, &NormParams::new(a.s, a.p, a.q, alpha)?, Flavor::Classical)?,
        Space::W => plain(sobolev_multiplier_norm(&f, a.s, &alpha, a.p)?),
        Space::Bt => besov_norm(&f, &NormParams::new(a.s, a.p, a.q, alpha)?, Flavor::Hyperbolic)?,
        Space::Ft => triebel_norm(&f, &NormParams::new(a.s, a.p, a.q, alpha)?, Flavor::Hyperbolic)?,
        Space::Wt => triebel_norm(&f, &NormParams::new(a.s, a.p, 2.0, alpha)?, Flavor::Hyperbolic)?,
        Space::SrB => besov_norm(&f, &NormParams::mixed(a.r, a.p, a.q, d)?, Flavor::Hyperbolic)?,
        Space::SrF => triebel_norm(&f, &NormParams::mixed(a.r, a.p, a.q, d)?, Flavor::Hyperbolic)?,
        Space::SrW => plain(mixed_sobolev_norm(&f, a.r, a.p)?),
        Space::L2 => plain(lp_norm(&f, 2.0)?),
        Space::Lp => plain(lp_norm(&f, a.p)?),
    };
    Ok(json!({ "norm": v.value, "truncated": v.truncated }))
}

fn seqnorm(a: &SeqnormArgs) -> Result<Value> {
    let c = read_coefficients(&a.input)?;
    let alpha = anisotropy(&a.alpha, c.grid().dim())?;
    let params = NormParams::new(a.s, a.p, a.q, alpha)?;
    let characterization = match (c.spec().is_haar(), a.space) {
        (true, _) => Characterization::HaarF,
        (false, SeqSpace::Ft) => Characterization::GeneralF,
        (false, SeqSpace::Bt) => Characterization::GeneralB,
    };
    let report = admissibility_check(c.spec(), &params, characterization);
    if a.strict && !report.valid {
        let failed: Vec<&str> = report
            .inequalities
            .iter()
            .filter(|i| !i.holds)
            .map(|i| i.name.as_str())
            .collect();
        return Err(CliError::Inadmissible(failed.join("; ")));
    }
    let value = match a.space {
        SeqSpace::Bt => btilde_norm(&c, &params)?,
        SeqSpace::Ft => ftilde_norm(&c, &params)?,
    };
    Ok(json!({ "norm": value, "admissibility": to_value(&report) }))
}

fn detect(a: &DetectArgs) -> Result<Value> {
    let is_hwc = a.input.extension().is_some_and(|e| e == "hwc");
    let c = if is_hwc {
        read_coefficients(&a.input)?
    } else {
        forward(&read_field(&a.input)?, &WaveletSpec::by_name(&a.wavelet)?)?
    };
    let opts = DetectionOptions {
        alpha_step: a.alpha_step,
        j_min: a.j_min,
        j_max: a.j_max,
    };
    Ok(to_value(&detect_anisotropy(&c, a.p, &opts)?))
}

fn experiment(a: &ExperimentArgs, report: Option<&Path>) -> Result<()> {
    let mut cfg = match (&a.config, &a.name) {
        (Some(path), name) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Read {
                path: path.display().to_string(),
                source,
            })?;
            let mut table: toml::Table =
                toml::from_str(&text).map_err(|e| CliError::Config(format!("config: {e}")))?;
            if let Some(name) = name {
                table.insert("experiment".into(), toml::Value::String(name.clone()));
            }
            table
                .try_into::<ExperimentConfig>()
                .map_err(|e| CliError::Config(format!("config: {e}")))?
        }
        (None, Some(name)) => ExperimentConfig::named(name)?,
        (None, None) => {
            return Err(CliError::Config(
                "give an experiment name or --config".into(),
            ))
        }
    };
    if let Some(seed) = a.seed {
        *cfg.seed_mut() = seed;
    }
    let result = cfg.run()?;
    emit(&result.canonical_json(), report)
}
