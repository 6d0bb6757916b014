//! Anisotropy vectors and the parameter record shared by every norm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{check_exponent, MAX_DIM};

/// Positive per-axis weights summing to the dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Anisotropy {
    alphas: Vec<f64>,
}

impl Anisotropy {
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        let d = alphas.len();
        if d == 0 || d > MAX_DIM {
            return Err(Error::param(format!("anisotropy needs 1..=3 entries, got {d}")));
        }
        if let Some(a) = alphas.iter().find(|a| !(**a > 0.0) || !a.is_finite()) {
            return Err(Error::param(format!("anisotropy entries must be positive, got {a}")));
        }
        let sum: f64 = alphas.iter().sum();
        if (sum - d as f64).abs() > 1e-9 {
            return Err(Error::param(format!(
                "anisotropy entries must sum to d={d}, got {sum}"
            )));
        }
        Ok(Self { alphas })
    }

    pub fn isotropic(d: usize) -> Result<Self> {
        Self::new(vec![1.0; d])
    }

    pub fn dim(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn min(&self) -> f64 {
        self.alphas.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.alphas.iter().copied().fold(0.0, f64::max)
    }

    /// `max_i j_i / alpha_i`.
    pub fn scaled_level(&self, j: &[usize]) -> f64 {
        j.iter()
            .zip(&self.alphas)
            .map(|(&ji, &a)| ji as f64 / a)
            .fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<f64>> for Anisotropy {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Anisotropy> for Vec<f64> {
    fn from(a: Anisotropy) -> Self {
        a.alphas
    }
}

/// How scale vectors are weighted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum WeightMode {
    /// `2^{s max_i(j_i/alpha_i)}`.
    AnisoSup,
    /// Dominating mixed smoothness `2^{r |j|_1}`.
    Mixed { r: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub alpha: Anisotropy,
    pub weight_mode: WeightMode,
}

impl NormParams {
    pub fn new(s: f64, p: f64, q: f64, alpha: Anisotropy) -> Result<Self> {
        check_exponent("p", p)?;
        check_exponent("q", q)?;
        if !s.is_finite() {
            return Err(Error::param(format!("s must be finite, got {s}")));
        }
        Ok(Self {
            s,
            p,
            q,
            alpha,
            weight_mode: WeightMode::AnisoSup,
        })
    }

    /// Dominating-mixed parameters; `alpha` only fixes the dimension.
    pub fn mixed(r: f64, p: f64, q: f64, d: usize) -> Result<Self> {
        if !r.is_finite() {
            return Err(Error::param(format!("r must be finite, got {r}")));
        }
        let mut params = Self::new(0.0, p, q, Anisotropy::isotropic(d)?)?;
        params.weight_mode = WeightMode::Mixed { r };
        Ok(params)
    }

    pub fn dim(&self) -> usize {
        self.alpha.dim()
    }

    /// `max{1/p - 1, 1/q - 1, 0}`.
    pub fn sigma_pq(&self) -> f64 {
        (1.0 / self.p - 1.0).max(1.0 / self.q - 1.0).max(0.0)
    }

    /// `max{1/p - 1, 0}`.
    pub fn sigma_p(&self) -> f64 {
        (1.0 / self.p - 1.0).max(0.0)
    }

    /// Weight of the scale vector `j`.
    pub fn weight(&self, j: &[usize]) -> f64 {
        match self.weight_mode {
            WeightMode::AnisoSup => (self.s * self.alpha.scaled_level(j)).exp2(),
            WeightMode::Mixed { r } => (r * j.iter().sum::<usize>() as f64).exp2(),
        }
    }
}

/// Power sum helper: `(sum_i a_i^q)^{1/q}` or the max for `q = inf`.
pub(crate) fn lq_combine(values: impl IntoIterator<Item = f64>, q: f64) -> f64 {
    if q.is_infinite() {
        values.into_iter().fold(0.0, f64::max)
    } else {
        values.into_iter().map(|v| v.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(s: f64, alpha: Vec<f64>) -> NormParams {
        NormParams::new(s, 2.0, 2.0, Anisotropy::new(alpha).unwrap()).unwrap()
    }

    #[test]
    fn anisotropy_validation() {
        assert!(Anisotropy::new(vec![0.5, 1.5]).is_ok());
        assert!(Anisotropy::new(vec![0.5, 1.4]).is_err());
        assert!(Anisotropy::new(vec![0.0, 2.0]).is_err());
        assert!(Anisotropy::new(vec![]).is_err());
        assert!(Anisotropy::new(vec![1.0; 4]).is_err());
        let a = Anisotropy::new(vec![0.6, 1.4]).unwrap();
        assert_eq!((a.min(), a.max()), (0.6, 1.4));
    }

    #[test]
    fn weight_examples() {
        assert_eq!(params(1.7, vec![0.5, 1.5]).weight(&[0, 0]), 1.0);
        assert_eq!(params(1.0, vec![1.0, 1.0]).weight(&[2, 3]), 8.0);
        assert_eq!(params(2.0, vec![0.5, 1.5]).weight(&[2, 3]), 256.0);
        let mixed = NormParams::mixed(0.5, 2.0, 2.0, 2).unwrap();
        assert_eq!(mixed.weight(&[1, 3]), 4.0);
    }

    #[test]
    fn sigma_accessors() {
        let a = Anisotropy::isotropic(1).unwrap();
        let p = NormParams::new(0.0, 0.5, 0.25, a.clone()).unwrap();
        assert_eq!(p.sigma_p(), 1.0);
        assert_eq!(p.sigma_pq(), 3.0);
        let p = NormParams::new(0.0, 2.0, f64::INFINITY, a).unwrap();
        assert_eq!(p.sigma_pq(), 0.0);
    }

    #[test]
    fn anisotropy_serde_checks_sum() {
        let a: Anisotropy = serde_json::from_str("[0.5, 1.5]").unwrap();
        assert_eq!(a.alphas(), &[0.5, 1.5]);
        assert!(serde_json::from_str::<Anisotropy>("[0.5, 1.0]").is_err());
    }

    proptest! {
        #[test]
        fn weight_shift_bound(
            s in -3.0f64..3.0,
            a1 in 0.2f64..1.8,
            j in proptest::collection::vec(0usize..12, 2),
            l in proptest::collection::vec(-5i64..6, 2),
        ) {
            let p = params(s, vec![a1, 2.0 - a1]);
            let shifted: Vec<usize> = j.iter().zip(&l).map(|(&a, &b)| (a as i64 + b).max(0) as usize).collect();
            let delta: Vec<i64> = shifted.iter().zip(&j).map(|(&a, &b)| a as i64 - b as i64).collect();
            let norm = delta.iter().zip(p.alpha.alphas()).map(|(&d, &a)| d.abs() as f64 / a).fold(0.0, f64::max);
            let ratio = p.weight(&j) / p.weight(&shifted);
            prop_assert!(ratio <= (norm * s.abs()).exp2() * (1.0 + 1e-12));
        }

        #[test]
        fn weight_monotone_in_s(s1 in -2.0f64..2.0, ds in 0.0f64..2.0, j in proptest::collection::vec(0usize..10, 2)) {
            let lo = params(s1, vec![0.7, 1.3]).weight(&j);
            let hi = params(s1 + ds, vec![0.7, 1.3]).weight(&j);
            prop_assert!(lo <= hi);
        }
    }
}
