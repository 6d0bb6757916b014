//! Exponent fitting and anisotropy detection from level statistics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Anisotropy;
use crate::seqnorm::level_statistics;
use crate::wavelet::CoefficientField;

/// Least-squares line `y = slope x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

fn line_fit(xs: &[f64], ys: &[f64]) -> Option<(LineFit, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 1e-300 || sxx <= 1e-24 * xs.iter().map(|x| x * x).sum::<f64>() {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    let tss: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r2 = if tss == 0.0 { 1.0 } else { 1.0 - rss / tss };
    Some((LineFit { slope, intercept, r2 }, rss))
}

/// Ordinary least squares on the given coordinates; callers pass logarithms.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() {
        return Err(Error::param(format!(
            "{} abscissae but {} ordinates",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: xs.len(),
        });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::param("non-finite coordinate"));
    }
    line_fit(xs, ys)
        .map(|(fit, _)| fit)
        .ok_or_else(|| Error::Degenerate("all abscissae are equal".into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectionOptions {
    pub alpha_step: f64,
    /// Levels with `max_i j_i < j_min` are ignored.
    pub j_min: usize,
    /// Levels with `max_i j_i > j_max` are ignored.
    pub j_max: Option<usize>,
}

impl Default for DetectionOptions {
    fn default() -> Self {
        Self {
            alpha_step: 0.05,
            j_min: 2,
            j_max: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    pub s_hat: f64,
    pub alpha_hat: Anisotropy,
    pub intercept: f64,
    pub rss: f64,
    pub levels_used: usize,
}

/// Minimum number of levels entering the regression.
pub const MIN_LEVELS: usize = 6;

/// Grid `{alpha : sum alpha_i = d, alpha_i >= step}` in lexicographic order,
/// as integer multiples of `step`.
fn simplex_grid(d: usize, step: f64) -> Result<Vec<Vec<usize>>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::param(format!("alpha step must lie in (0, 1], got {step}")));
    }
    let units = d as f64 / step;
    let total = units.round();
    if (units - total).abs() > 1e-9 {
        return Err(Error::param(format!("alpha step {step} does not divide d={d}")));
    }
    let total = total as usize;
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(d);
    fn rec(d: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() + 1 == d {
            if left >= 1 {
                cur.push(left);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        let rest = d - cur.len() - 1;
        for n in 1..=left.saturating_sub(rest) {
            cur.push(n);
            rec(d, left - n, cur, out);
            cur.pop();
        }
    }
    rec(d, total, &mut cur, &mut out);
    Ok(out)
}

/// Regresses `T(j)` against `max_i(j_i / alpha_i)` over a grid of
/// anisotropies and returns the best fit.
pub fn detect_anisotropy(
    c: &CoefficientField,
    p: f64,
    options: &DetectionOptions,
) -> Result<DetectionResult> {
    let d = c.grid().dim();
    let stats = level_statistics(c, p)?;
    if stats.iter().all(|s| s.value.is_none()) {
        return Err(Error::Degenerate("all coefficients vanish".into()));
    }
    let levels: Vec<(Vec<usize>, f64)> = stats
        .into_iter()
        .filter_map(|s| {
            let top = *s.scale.iter().max().expect("non-empty scale");
            let keep = top >= options.j_min && options.j_max.map_or(true, |m| top <= m);
            s.value.filter(|_| keep).map(|v| (s.scale, v))
        })
        .collect();
    if levels.len() < MIN_LEVELS {
        return Err(Error::InsufficientData {
            needed: MIN_LEVELS,
            got: levels.len(),
        });
    }
    let ys: Vec<f64> = levels.iter().map(|(_, v)| *v).collect();
    let step = options.alpha_step;
    let candidates = simplex_grid(d, step)?;
    let fits: Vec<Option<(LineFit, f64)>> = candidates
        .par_iter()
        .map(|units| {
            let xs: Vec<f64> = levels
                .iter()
                .map(|(j, _)| {
                    j.iter()
                        .zip(units)
                        .map(|(&ji, &u)| ji as f64 / (u as f64 * step))
                        .fold(0.0, f64::max)
                })
                .collect();
            line_fit(&xs, &ys)
        })
        .collect();
    let tie = 1e-13 * levels.len() as f64;
    let mut best: Option<(usize, LineFit, f64)> = None;
    for (i, fit) in fits.into_iter().enumerate() {
        if let Some((f, rss)) = fit {
            if best.as_ref().map_or(true, |b| rss < b.2 - tie) {
                best = Some((i, f, rss));
            }
        }
    }
    let (i, fit, rss) =
        best.ok_or_else(|| Error::Degenerate("no candidate separates the levels".into()))?;
    let alphas: Vec<f64> = candidates[i].iter().map(|&u| u as f64 * step).collect();
    Ok(DetectionResult {
        s_hat: -fit.slope,
        alpha_hat: Anisotropy::new(alphas)?,
        intercept: fit.intercept,
        rss,
        levels_used: levels.len(),
    })
}
