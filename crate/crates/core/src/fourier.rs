//! Discrete Fourier transforms on the torus lattice.
//!
//! Coefficients follow `f(x) = sum_m F(m) e^{2 pi i <m,x>}`, so `F` is the
//! unnormalized forward FFT divided by `2^{dJ}`. Storage is FFT order: the
//! position `t` along an axis holds frequency `t` for `t < 2^{J-1}` and
//! `t - 2^J` otherwise.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::field::{map_lines, DyadicGrid, SampledField, MAX_DIM};

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: DyadicGrid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: DyadicGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::IncompatibleGrid(format!(
                "{} coefficients for a grid of {} samples",
                coeffs.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: DyadicGrid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> DyadicGrid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Integer frequency vector at a flat storage position.
    pub fn frequency(&self, flat: usize) -> [i64; MAX_DIM] {
        let idx = self.grid.unflatten(flat);
        let mut m = [0; MAX_DIM];
        for axis in 0..self.grid.dim() {
            m[axis] = self.grid.frequency(idx[axis]);
        }
        m
    }

    fn flat_of(&self, m: &[i64]) -> Option<usize> {
        if m.len() != self.grid.dim() {
            return None;
        }
        let mut idx = [0; MAX_DIM];
        for (axis, &mi) in m.iter().enumerate() {
            idx[axis] = self.grid.position(mi)?;
        }
        Some(self.grid.flatten(&idx))
    }

    /// Coefficient at frequency `m`; zero if not representable.
    pub fn get(&self, m: &[i64]) -> Complex64 {
        self.flat_of(m)
            .map(|c| self.coeffs[c])
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn set(&mut self, m: &[i64], value: Complex64) -> Result<()> {
        let c = self
            .flat_of(m)
            .ok_or_else(|| Error::param(format!("frequency {m:?} is not representable")))?;
        self.coeffs[c] = value;
        Ok(())
    }

    /// Zeroes every coefficient with some `|m_i| > radius`. Returns true when
    /// the removed part was not negligible (above `1e-12` of the largest
    /// coefficient).
    pub fn truncate(&mut self, radius: i64) -> bool {
        let max = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let grid = self.grid;
        let d = grid.dim();
        let mut lost = false;
        for (flat, c) in self.coeffs.iter_mut().enumerate() {
            let idx = grid.unflatten(flat);
            if idx[..d].iter().any(|&t| grid.frequency(t).abs() > radius) {
                if c.norm() > 1e-12 * max {
                    lost = true;
                }
                *c = Complex64::new(0.0, 0.0);
            }
        }
        lost
    }

    /// Largest `|m_i|` over coefficients above `tol` times the maximum.
    pub fn support_radius(&self, tol: f64) -> i64 {
        let max = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let d = self.grid.dim();
        let mut r = 0;
        for (flat, c) in self.coeffs.iter().enumerate() {
            if c.norm() > tol * max {
                let m = self.frequency(flat);
                r = m[..d].iter().fold(r, |acc, v| acc.max(v.abs()));
            }
        }
        r
    }

    /// Per-axis marginal support: `active[axis][t]` is true when some nonzero
    /// coefficient sits at position `t` along `axis`.
    pub(crate) fn marginal_support(&self) -> Vec<Vec<bool>> {
        let g = self.grid;
        let mut active = vec![vec![false; g.side()]; g.dim()];
        for (flat, c) in self.coeffs.iter().enumerate() {
            if c.re != 0.0 || c.im != 0.0 {
                let idx = g.unflatten(flat);
                for axis in 0..g.dim() {
                    active[axis][idx[axis]] = true;
                }
            }
        }
        active
    }
}

/// Forward transform.
pub fn dft(f: &SampledField) -> SpectralField {
    let grid = f.grid();
    let mut data = f.values().to_vec();
    transform(&mut data, grid, false);
    let scale = 1.0 / grid.len() as f64;
    data.par_iter_mut().for_each(|v| *v *= scale);
    SpectralField { grid, coeffs: data }
}

/// Inverse transform; the result is marked real when `real` is set.
pub fn idft_with(spec: &SpectralField, real: bool) -> SampledField {
    let grid = spec.grid;
    let mut data = spec.coeffs.clone();
    transform(&mut data, grid, true);
    SampledField::with_flag(grid, data, real)
}

/// Inverse transform of a general spectrum.
pub fn idft(spec: &SpectralField) -> SampledField {
    idft_with(spec, false)
}

fn transform(data: &mut [Complex64], grid: DyadicGrid, inverse: bool) {
    let n = grid.side();
    let mut planner = FftPlanner::new();
    let fft: Arc<dyn Fft<f64>> = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let scratch_len = fft.get_inplace_scratch_len();
    for axis in 0..grid.dim() {
        map_lines(
            data,
            grid,
            axis,
            || vec![Complex64::new(0.0, 0.0); scratch_len],
            |scratch, line| fft.process_with_scratch(line, scratch),
        );
    }
}
