//! Dyadic grids on the unit torus, sampled fields and discrete L_p norms.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 3;

/// Chunk length of the fixed-order reductions.
const REDUCE_CHUNK: usize = 1 << 12;

/// Per-axis level cap for each dimension.
pub fn max_level(d: usize) -> Option<usize> {
    match d {
        1 => Some(14),
        2 => Some(11),
        3 => Some(7),
        _ => None,
    }
}

/// Uniform dyadic grid with `2^J` samples per axis on `[0,1)^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicGrid {
    d: usize,
    level: usize,
}

impl DyadicGrid {
    pub fn new(d: usize, level: usize) -> Result<Self> {
        let cap = max_level(d)
            .ok_or_else(|| Error::param(format!("dimension d={d} outside 1..=3")))?;
        if level < 1 || level > cap {
            return Err(Error::param(format!(
                "level J={level} outside 1..={cap} for d={d}"
            )));
        }
        Ok(Self { d, level })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Samples per axis.
    pub fn side(&self) -> usize {
        1 << self.level
    }

    /// Total number of samples.
    pub fn len(&self) -> usize {
        1 << (self.d * self.level)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Stride of `axis` in the row-major layout (the last axis is contiguous).
    pub fn stride(&self, axis: usize) -> usize {
        1 << (self.level * (self.d - 1 - axis))
    }

    /// Multi-index of a flat position; entries past `d` are zero.
    pub fn unflatten(&self, mut flat: usize) -> [usize; MAX_DIM] {
        let mut idx = [0; MAX_DIM];
        let mask = self.side() - 1;
        for axis in (0..self.d).rev() {
            idx[axis] = flat & mask;
            flat >>= self.level;
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx[..self.d]
            .iter()
            .fold(0, |acc, &i| (acc << self.level) | i)
    }

    /// Sample coordinates `k 2^{-J}` of a flat position.
    pub fn point(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.unflatten(flat);
        let h = 1.0 / self.side() as f64;
        let mut x = [0.0; MAX_DIM];
        for axis in 0..self.d {
            x[axis] = idx[axis] as f64 * h;
        }
        x
    }

    /// Largest band index that fits without wraparound, `J - 2`.
    pub fn band_cap(&self) -> Result<usize> {
        self.level
            .checked_sub(2)
            .ok_or_else(|| Error::param(format!("band analysis needs J >= 2, got J={}", self.level)))
    }

    /// Half-width `2^{J-2}` of the usable frequency box.
    pub fn usable_radius(&self) -> Result<i64> {
        Ok(1i64 << self.band_cap()?)
    }

    /// Integer frequency of FFT position `t` along one axis.
    pub fn frequency(&self, t: usize) -> i64 {
        let n = self.side();
        if t < n / 2 {
            t as i64
        } else {
            t as i64 - n as i64
        }
    }

    /// FFT position of integer frequency `m`, if representable.
    pub fn position(&self, m: i64) -> Option<usize> {
        let half = (self.side() / 2) as i64;
        if m < -half || m >= half {
            None
        } else if m >= 0 {
            Some(m as usize)
        } else {
            Some((m + 2 * half) as usize)
        }
    }
}

/// Complex samples on a dyadic grid, row-major with axis 1 slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledField {
    grid: DyadicGrid,
    values: Vec<Complex64>,
    real: bool,
}

impl SampledField {
    pub fn new(grid: DyadicGrid, values: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        Ok(Self {
            grid,
            values,
            real: false,
        })
    }

    pub fn from_real(grid: DyadicGrid, values: Vec<f64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        Ok(Self {
            grid,
            values: values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
            real: true,
        })
    }

    /// Samples `f(x_c)` at every grid point.
    pub fn from_fn(grid: DyadicGrid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.len())
            .map(|c| f(&grid.point(c)[..grid.dim()]))
            .collect();
        Self {
            grid,
            values,
            real: false,
        }
    }

    pub fn from_real_fn(grid: DyadicGrid, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|c| Complex64::new(f(&grid.point(c)[..grid.dim()]), 0.0))
            .collect();
        Self {
            grid,
            values,
            real: true,
        }
    }

    pub fn constant(grid: DyadicGrid, c: f64) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(c, 0.0); grid.len()],
            real: true,
        }
    }

    pub fn grid(&self) -> DyadicGrid {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Marks the field real-valued, dropping imaginary parts that are
    /// rounding noise. Fails if some imaginary part is significant.
    pub fn into_real(mut self) -> Result<Self> {
        let max = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let worst = self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        if worst > 1e-12 * max.max(f64::MIN_POSITIVE) && worst > 0.0 {
            return Err(Error::param(format!(
                "field has imaginary parts up to {worst:e} (max modulus {max:e})"
            )));
        }
        self.values.iter_mut().for_each(|v| v.im = 0.0);
        self.real = true;
        Ok(self)
    }

    pub(crate) fn with_flag(grid: DyadicGrid, values: Vec<Complex64>, real: bool) -> Self {
        let mut f = Self {
            grid,
            values,
            real,
        };
        if real {
            f.values.iter_mut().for_each(|v| v.im = 0.0);
        }
        f
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
            real: self.real,
        }
    }

    /// Samples of `x -> f(factor * x)` on the same grid; the spectrum moves
    /// from `m` to `factor * m`.
    pub fn dilate(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !factor.is_power_of_two() {
            return Err(Error::param(format!(
                "dilation factor {factor} must be a power of two"
            )));
        }
        let g = self.grid;
        let mask = g.side() - 1;
        let values = (0..g.len())
            .map(|c| {
                let mut idx = g.unflatten(c);
                for i in idx.iter_mut().take(g.dim()) {
                    *i = (*i * factor) & mask;
                }
                self.values[g.flatten(&idx)]
            })
            .collect();
        Ok(Self {
            grid: g,
            values,
            real: self.real,
        })
    }

    /// Largest modulus.
    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

fn check_len(grid: &DyadicGrid, len: usize) -> Result<()> {
    if len != grid.len() {
        return Err(Error::IncompatibleGrid(format!(
            "{len} values for a grid of {} samples",
            grid.len()
        )));
    }
    Ok(())
}

/// Checks an integrability exponent in `(0, inf]`.
pub fn check_exponent(name: &str, p: f64) -> Result<()> {
    if p.is_nan() || p <= 0.0 {
        return Err(Error::param(format!("{name} must lie in (0, inf], got {p}")));
    }
    Ok(())
}

/// Discrete L_p norm `(2^{-dJ} sum |f|^p)^{1/p}`, or the max modulus for
/// `p = inf`.
pub fn lp_norm(f: &SampledField, p: f64) -> Result<f64> {
    check_exponent("p", p)?;
    let moduli: Vec<f64> = f.values.iter().map(|&v| modulus(v)).collect();
    Ok(lp_norm_moduli(&moduli, p))
}

/// L_p norm of nonnegative samples under the uniform probability measure.
pub(crate) fn lp_norm_moduli(moduli: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return moduli.iter().copied().fold(0.0, f64::max);
    }
    let pow = Power::new(p);
    let total = ordered_sum(moduli, |v| pow.apply(v));
    (total / moduli.len() as f64).powf(1.0 / p)
}

/// `|v|` without the overflow guard of `hypot`.
#[inline]
pub(crate) fn modulus(v: Complex64) -> f64 {
    (v.re * v.re + v.im * v.im).sqrt()
}

/// `x -> x^e` for `x >= 0`, with closed forms for common exponents.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Power {
    One,
    Two,
    Three,
    Four,
    Half,
    ThreeHalves,
    Quarter,
    General(f64),
}

impl Power {
    pub(crate) fn new(e: f64) -> Self {
        match e {
            e if e == 1.0 => Power::One,
            e if e == 2.0 => Power::Two,
            e if e == 3.0 => Power::Three,
            e if e == 4.0 => Power::Four,
            e if e == 0.5 => Power::Half,
            e if e == 1.5 => Power::ThreeHalves,
            e if e == 0.25 => Power::Quarter,
            e => Power::General(e),
        }
    }

    #[inline]
    pub(crate) fn apply(self, x: f64) -> f64 {
        match self {
            Power::One => x,
            Power::Two => x * x,
            Power::Three => x * x * x,
            Power::Four => {
                let y = x * x;
                y * y
            }
            Power::Half => x.sqrt(),
            Power::ThreeHalves => x * x.sqrt(),
            Power::Quarter => x.sqrt().sqrt(),
            Power::General(e) => x.powf(e),
        }
    }
}

/// Sum of `map(v)` over fixed-size chunks, combined in chunk order, so the
/// result does not depend on the thread count.
pub(crate) fn ordered_sum(values: &[f64], map: impl Fn(f64) -> f64 + Sync) -> f64 {
    let partial: Vec<f64> = values
        .par_chunks(REDUCE_CHUNK)
        .map(|chunk| chunk.iter().map(|&v| map(v)).sum::<f64>())
        .collect();
    partial.iter().sum()
}

/// Applies `op` to every line of `data` along `axis`. Lines along the last
/// axis are processed in place; other axes go through a transposed buffer.
/// `init` builds per-worker scratch state.
pub(crate) fn map_lines<S>(
    data: &mut [Complex64],
    grid: DyadicGrid,
    axis: usize,
    init: impl Fn() -> S + Sync + Send,
    op: impl Fn(&mut S, &mut [Complex64]) + Sync + Send,
) {
    let n = grid.side();
    let inner = grid.stride(axis);
    if inner == 1 {
        data.par_chunks_mut(n).for_each_init(&init, |s, line| op(s, line));
        return;
    }
    let block = n * inner;
    let mut buffer = vec![Complex64::new(0.0, 0.0); block];
    for chunk in data.chunks_mut(block) {
        transpose(chunk, &mut buffer, n, inner);
        buffer.par_chunks_mut(n).for_each_init(&init, |s, line| op(s, line));
        transpose(&buffer, chunk, inner, n);
    }
}

/// `dst[c * rows + r] = src[r * cols + c]`, tiled for cache reuse.
fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    const TILE: usize = 32;
    for r0 in (0..rows).step_by(TILE) {
        for c0 in (0..cols).step_by(TILE) {
            for r in r0..(r0 + TILE).min(rows) {
                for c in c0..(c0 + TILE).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}
