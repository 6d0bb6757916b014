//! Sequence-space norms of coefficient fields and per-level statistics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{check_exponent, lp_norm_moduli, modulus, Power};
use crate::params::{lq_combine, NormParams};
use crate::wavelet::{level_count, CellMap, CoefficientField};

fn check_dims(c: &CoefficientField, params: &NormParams) -> Result<()> {
    if params.dim() != c.grid().dim() {
        return Err(Error::IncompatibleGrid(format!(
            "parameters for d={} applied to {}-dimensional coefficients",
            params.dim(),
            c.grid().dim()
        )));
    }
    Ok(())
}

/// `(mu(j) sum_k |lambda|^p)^{1/p}`, the L_p norm of `sum_k lambda chi_{j,k}`.
fn level_norm(block: &[num_complex::Complex64], measure: f64, p: f64) -> f64 {
    if p.is_infinite() {
        block.iter().map(|&v| modulus(v)).fold(0.0, f64::max)
    } else {
        let pow = Power::new(p);
        (measure * block.iter().map(|&v| pow.apply(modulus(v))).sum::<f64>()).powf(1.0 / p)
    }
}

/// `b~` norm: `l_q` over scales of the weighted level `L_p` norms.
pub fn btilde_norm(c: &CoefficientField, params: &NormParams) -> Result<f64> {
    check_dims(c, params)?;
    let levels = c
        .scales()
        .into_iter()
        .map(|j| params.weight(&j) * level_norm(c.block(&j), CellMap::measure(&j), params.p));
    Ok(lq_combine(levels, params.q))
}

/// `f~` norm: the pointwise `l_q` sum over scales is materialized on the
/// finest grid, where every cell indicator is constant, then measured in
/// `L_p`.
pub fn ftilde_norm(c: &CoefficientField, params: &NormParams) -> Result<f64> {
    check_dims(c, params)?;
    if params.p.is_infinite() {
        return Err(Error::Unsupported("f~ norms need p < inf".into()));
    }
    let grid = c.grid();
    let (d, level, n) = (grid.dim(), grid.level(), grid.side());
    let q = params.q;
    let pow_q = Power::new(q);
    let root_q = Power::new(1.0 / q);
    let scales = c.scales();
    // cell[j][t]: cell index at axis level j of sample t, or usize::MAX.
    let cell: Vec<Vec<usize>> = (0..=level)
        .map(|j| {
            (0..n)
                .map(|t| CellMap::cell_of_sample(level, j, t).unwrap_or(usize::MAX))
                .collect()
        })
        .collect();
    let weights: Vec<f64> = scales
        .iter()
        .map(|j| {
            let w = params.weight(j);
            if q.is_infinite() {
                w
            } else {
                w.powf(q)
            }
        })
        .collect();
    let mut acc = vec![0.0f64; grid.len()];
    acc.par_chunks_mut(n).enumerate().for_each(|(row, out)| {
        let idx = grid.unflatten(row * n);
        for (j, &w) in scales.iter().zip(&weights) {
            let mut pos = 0usize;
            let mut inside = true;
            for axis in 0..d - 1 {
                let k = cell[j[axis]][idx[axis]];
                if k == usize::MAX {
                    inside = false;
                    break;
                }
                pos = pos * level_count(j[axis]) + k;
            }
            if !inside {
                continue;
            }
            let last = j[d - 1];
            let base = pos * level_count(last);
            let block = c.block(j);
            for (t, o) in out.iter_mut().enumerate() {
                let k = cell[last][t];
                if k == usize::MAX {
                    continue;
                }
                let m = modulus(block[base + k]);
                if q.is_infinite() {
                    *o = o.max(w * m);
                } else {
                    *o += w * pow_q.apply(m);
                }
            }
        }
        if q.is_finite() {
            out.iter_mut().for_each(|v| *v = root_q.apply(*v));
        }
    });
    Ok(lp_norm_moduli(&acc, params.p))
}

/// Per-scale statistic of a coefficient field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelStatistic {
    pub scale: Vec<usize>,
    /// `log2` of the per-coefficient `p`-mean of `|lambda|`; `None` when the
    /// whole level vanishes.
    pub value: Option<f64>,
}

/// `T(j) = log2((mu_s(j) sum_k |lambda_{j,k}|^p)^{1/p})` with the strict
/// support measure `mu_s(j) = 1 / count(j)`.
pub fn level_statistics(c: &CoefficientField, p: f64) -> Result<Vec<LevelStatistic>> {
    check_exponent("p", p)?;
    Ok(c.scales()
        .into_iter()
        .map(|j| {
            let block = c.block(&j);
            let norm = level_norm(block, CellMap::support_measure(&j), p);
            let value = (norm > 0.0).then(|| norm.log2());
            LevelStatistic { scale: j, value }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{lp_norm, DyadicGrid, SampledField};
    use crate::params::Anisotropy;
    use crate::wavelet::{forward, WaveletSpec};
    use num_complex::Complex64;

    fn params(s: f64, p: f64, q: f64) -> NormParams {
        NormParams::new(s, p, q, Anisotropy::isotropic(2).unwrap()).unwrap()
    }

    fn coefficients(grid: DyadicGrid, seed: u64) -> CoefficientField {
        let mut state = seed;
        let data = (0..grid.len())
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                let a = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                let b = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
                Complex64::new(a, b)
            })
            .collect();
        CoefficientField::from_data(grid, WaveletSpec::Haar, data).unwrap()
    }

    #[test]
    fn single_coefficient() {
        let g = DyadicGrid::new(2, 3).unwrap();
        let mut c = CoefficientField::zeros(g, WaveletSpec::Haar);
        c.set(&[1, 0], &[0, 0], Complex64::new(1.0, 0.0));
        let pr = params(1.0, 2.0, 3.0);
        let want = 2.0 * 0.5f64.sqrt();
        assert!((btilde_norm(&c, &pr).unwrap() - want).abs() < 1e-14);
        assert!((ftilde_norm(&c, &pr).unwrap() - want).abs() < 1e-14);
        let zero = CoefficientField::zeros(g, WaveletSpec::Haar);
        assert_eq!(btilde_norm(&zero, &pr).unwrap(), 0.0);
        assert_eq!(ftilde_norm(&zero, &pr).unwrap(), 0.0);
    }

    #[test]
    fn constant_field_gives_modulus() {
        let g = DyadicGrid::new(2, 4).unwrap();
        let c = forward(&SampledField::constant(g, -1.75), &WaveletSpec::Haar).unwrap();
        for pr in [params(0.8, 3.0, 1.0), params(-1.0, 0.5, 4.0)] {
            assert!((ftilde_norm(&c, &pr).unwrap() - 1.75).abs() < 1e-12);
            assert!((btilde_norm(&c, &pr).unwrap() - 1.75).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_exponents_agree() {
        let g = DyadicGrid::new(2, 4).unwrap();
        let c = coefficients(g, 3);
        for p in [0.7, 1.0, 2.0, 3.5] {
            let pr = params(0.6, p, p);
            let b = btilde_norm(&c, &pr).unwrap();
            let f = ftilde_norm(&c, &pr).unwrap();
            assert!((b - f).abs() < 1e-12 * b);
        }
    }

    #[test]
    fn parseval_at_zero_smoothness() {
        let g = DyadicGrid::new(2, 5).unwrap();
        let f = SampledField::from_real_fn(g, |x| (9.0 * x[0]).sin() * (x[1] - 0.3).abs());
        let c = forward(&f, &WaveletSpec::Haar).unwrap();
        let v = ftilde_norm(&c, &params(0.0, 2.0, 2.0)).unwrap();
        assert!((v - lp_norm(&f, 2.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn level_statistics_examples() {
        let g = DyadicGrid::new(2, 4).unwrap();
        let mut c = CoefficientField::zeros(g, WaveletSpec::Haar);
        c.set(&[3, 2], &[1, 0], Complex64::new(1.0, 0.0));
        let stats = level_statistics(&c, 2.0).unwrap();
        for s in &stats {
            if s.scale == vec![3, 2] {
                let want = 0.5 * CellMap::support_measure(&[3, 2]).log2();
                assert!((s.value.unwrap() - want).abs() < 1e-14);
            } else {
                assert!(s.value.is_none());
            }
        }
        let rich = coefficients(g, 9);
        let base = level_statistics(&rich, 3.0).unwrap();
        let scaled = level_statistics(&rich.scaled(4.0), 3.0).unwrap();
        for (a, b) in base.iter().zip(&scaled) {
            assert!((b.value.unwrap() - a.value.unwrap() - 2.0).abs() < 1e-12);
        }
        assert!(level_statistics(&rich, 0.0).is_err());
    }

    #[test]
    fn infinite_exponents() {
        let g = DyadicGrid::new(2, 3).unwrap();
        let c = coefficients(g, 5);
        let pr = params(0.0, f64::INFINITY, f64::INFINITY);
        let max = c.data().iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!((btilde_norm(&c, &pr).unwrap() - max).abs() < 1e-15);
        assert!(ftilde_norm(&c, &pr).is_err());
        let fq = ftilde_norm(&c, &params(0.0, 2.0, f64::INFINITY)).unwrap();
        assert!(fq > 0.0 && fq <= max);
    }
}
