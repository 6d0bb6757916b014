//! Hyperbolic (full tensor-product) wavelet analysis and synthesis.
//!
//! Each axis gets a complete periodized 1-D pyramid. Along one axis the
//! output is in Mallat order: position 0 holds level 0 and positions
//! `2^{j-1}..2^j` hold level `j >= 1`. Coefficients are stored
//! dual-normalized, `lambda = 2^{|j|_1} <f, psi_{j,k}>`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::bands::lex_indices;
use crate::error::{Error, Result};
use crate::field::{map_lines, DyadicGrid, SampledField, MAX_DIM};
use crate::params::NormParams;

/// 4-tap orthonormal filter with two vanishing moments.
pub const DAUBECHIES_4: [f64; 4] = [
    0.482_962_913_144_534_14,
    0.836_516_303_737_807_9,
    0.224_143_868_042_013_38,
    -0.129_409_522_551_260_38,
];

/// 8-tap orthonormal filter with four vanishing moments.
pub const DAUBECHIES_8: [f64; 8] = [
    0.230_377_813_308_896_5,
    0.714_846_570_552_915_6,
    0.630_880_767_929_858_9,
    -0.027_983_769_416_859_854,
    -0.187_034_811_719_093_08,
    0.030_841_381_835_560_764,
    0.032_883_011_666_885_2,
    -0.010_597_401_785_069_032,
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WaveletSpec {
    Haar,
    Cqf {
        name: String,
        filter: Vec<f64>,
        vanishing_moments: u32,
        smoothness: u32,
    },
}

impl WaveletSpec {
    /// Validated orthonormal filter wavelet.
    pub fn cqf(name: &str, filter: Vec<f64>, vanishing_moments: u32, smoothness: u32) -> Result<Self> {
        let spec = WaveletSpec::Cqf {
            name: name.to_string(),
            filter,
            vanishing_moments,
            smoothness,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Built-in wavelets by name: `haar`, `db2` (4 taps), `db4` (8 taps).
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "haar" => Ok(WaveletSpec::Haar),
            "db2" => Self::cqf("db2", DAUBECHIES_4.to_vec(), 2, 1),
            "db4" => Self::cqf("db4", DAUBECHIES_8.to_vec(), 4, 1),
            other => Err(Error::param(format!("unknown wavelet {other:?} (haar, db2, db4)"))),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            WaveletSpec::Haar => "haar",
            WaveletSpec::Cqf { name, .. } => name,
        }
    }

    /// Low-pass filter; Haar is `[1/sqrt2, 1/sqrt2]`.
    pub fn filter(&self) -> Vec<f64> {
        match self {
            WaveletSpec::Haar => vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2],
            WaveletSpec::Cqf { filter, .. } => filter.clone(),
        }
    }

    /// Declared vanishing moments (`L`).
    pub fn vanishing_moments(&self) -> u32 {
        match self {
            WaveletSpec::Haar => 1,
            WaveletSpec::Cqf { vanishing_moments, .. } => *vanishing_moments,
        }
    }

    /// Declared smoothness (`K`).
    pub fn smoothness(&self) -> u32 {
        match self {
            WaveletSpec::Haar => 0,
            WaveletSpec::Cqf { smoothness, .. } => *smoothness,
        }
    }

    pub fn is_haar(&self) -> bool {
        matches!(self, WaveletSpec::Haar)
    }

    /// Checks the filter sum, orthonormality of even shifts and the declared
    /// vanishing moments of the associated high-pass filter.
    pub fn validate(&self) -> Result<()> {
        let h = self.filter();
        if h.len() < 2 || h.len() % 2 != 0 {
            return Err(Error::param(format!("filter length {} must be even and >= 2", h.len())));
        }
        let sum: f64 = h.iter().sum();
        if (sum - std::f64::consts::SQRT_2).abs() > 1e-10 {
            return Err(Error::param(format!("filter sums to {sum}, expected sqrt(2)")));
        }
        for shift in (0..h.len()).step_by(2) {
            let dot: f64 = h.iter().zip(&h[shift..]).map(|(a, b)| a * b).sum();
            let want = if shift == 0 { 1.0 } else { 0.0 };
            if (dot - want).abs() > 1e-10 {
                return Err(Error::param(format!(
                    "filter is not orthonormal at shift {shift}: {dot}"
                )));
            }
        }
        let vm = self.vanishing_moments();
        if vm == 0 {
            return Err(Error::param("at least one vanishing moment is required"));
        }
        let g = highpass(&h);
        for beta in 0..vm as i32 {
            let (moment, scale) = g.iter().enumerate().fold((0.0, 0.0), |(m, s), (n, &gn)| {
                let t = (n as f64).powi(beta) * gn;
                (m + t, s + t.abs())
            });
            if moment.abs() > 1e-8 * scale.max(1.0) {
                return Err(Error::param(format!(
                    "declared {vm} vanishing moments, but moment {beta} is {moment:e}"
                )));
            }
        }
        Ok(())
    }
}

/// `g_n = (-1)^n h_{L-1-n}`.
fn highpass(h: &[f64]) -> Vec<f64> {
    let l = h.len();
    (0..l)
        .map(|n| if n % 2 == 0 { h[l - 1 - n] } else { -h[l - 1 - n] })
        .collect()
}

/// Coefficients per axis at level `j`: 1 at `j = 0`, `2^{j-1}` otherwise.
pub fn level_count(j: usize) -> usize {
    if j == 0 {
        1
    } else {
        1 << (j - 1)
    }
}

/// Cell geometry of the coefficient `(j, k)`.
///
/// The cell of a level-`j` coefficient is the left half of its Haar support,
/// `[2^{-(j-1)} k, 2^{-(j-1)} k + 2^{-j})`, and `[0,1)` at level 0. Cells at one
/// level are disjoint and have measure `2^{-j}`.
#[derive(Clone, Copy, Debug, Default)]
pub struct CellMap;

impl CellMap {
    pub fn interval(j: usize, k: usize) -> (f64, f64) {
        if j == 0 {
            return (0.0, 1.0);
        }
        let start = k as f64 * (-(j as f64 - 1.0)).exp2();
        (start, start + (-(j as f64)).exp2())
    }

    /// Measure `2^{-|j|_1}` of a tensor cell.
    pub fn measure(j: &[usize]) -> f64 {
        (-(j.iter().sum::<usize>() as f64)).exp2()
    }

    /// Measure of the strict Haar support, `prod_i 2^{-max(j_i - 1, 0)}`.
    pub fn support_measure(j: &[usize]) -> f64 {
        j.iter().map(|&ji| 1.0 / level_count(ji) as f64).product()
    }

    /// Index `k` of the level-`j` cell containing sample `t` of a level-`J`
    /// axis, if any.
    pub fn cell_of_sample(grid_level: usize, j: usize, t: usize) -> Option<usize> {
        if j == 0 {
            return Some(0);
        }
        let k = t >> (grid_level + 1 - j);
        let in_left = (t >> (grid_level - j)) & 1 == 0;
        in_left.then_some(k)
    }
}

/// Dual-normalized hyperbolic wavelet coefficients, stored block by block in
/// lexicographic order of the scale vector.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientField {
    grid: DyadicGrid,
    spec: WaveletSpec,
    data: Vec<Complex64>,
    offsets: Vec<usize>,
}

impl CoefficientField {
    pub fn zeros(grid: DyadicGrid, spec: WaveletSpec) -> Self {
        let offsets = block_offsets(grid);
        Self {
            grid,
            spec,
            data: vec![Complex64::new(0.0, 0.0); grid.len()],
            offsets,
        }
    }

    /// Wraps coefficients laid out block by block in lexicographic order.
    pub fn from_data(grid: DyadicGrid, spec: WaveletSpec, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::IncompatibleGrid(format!(
                "{} coefficients for a grid of {} samples",
                data.len(),
                grid.len()
            )));
        }
        let offsets = block_offsets(grid);
        Ok(Self {
            grid,
            spec,
            data,
            offsets,
        })
    }

    pub fn grid(&self) -> DyadicGrid {
        self.grid
    }

    pub fn spec(&self) -> &WaveletSpec {
        &self.spec
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// All scale vectors `{0..=J}^d` in lexicographic order.
    pub fn scales(&self) -> Vec<Vec<usize>> {
        lex_indices(self.grid.dim(), self.grid.level())
    }

    fn scale_id(&self, j: &[usize]) -> usize {
        let base = self.grid.level() + 1;
        j.iter().fold(0, |acc, &v| acc * base + v)
    }

    fn check_scale(&self, j: &[usize]) {
        assert!(
            j.len() == self.grid.dim() && j.iter().all(|&v| v <= self.grid.level()),
            "scale vector {j:?} outside the grid"
        );
    }

    /// Block of `prod_i n(j_i)` coefficients, `k` row-major.
    pub fn block(&self, j: &[usize]) -> &[Complex64] {
        self.check_scale(j);
        let id = self.scale_id(j);
        &self.data[self.offsets[id]..self.offsets[id + 1]]
    }

    pub fn block_mut(&mut self, j: &[usize]) -> &mut [Complex64] {
        self.check_scale(j);
        let id = self.scale_id(j);
        &mut self.data[self.offsets[id]..self.offsets[id + 1]]
    }

    fn block_position(j: &[usize], k: &[usize]) -> usize {
        j.iter()
            .zip(k)
            .fold(0, |acc, (&ji, &ki)| acc * level_count(ji) + ki)
    }

    pub fn get(&self, j: &[usize], k: &[usize]) -> Complex64 {
        self.block(j)[Self::block_position(j, k)]
    }

    pub fn set(&mut self, j: &[usize], k: &[usize], value: Complex64) {
        let pos = Self::block_position(j, k);
        self.block_mut(j)[pos] = value;
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= c);
        out
    }
}

fn block_offsets(grid: DyadicGrid) -> Vec<usize> {
    let mut offsets = vec![0];
    for j in lex_indices(grid.dim(), grid.level()) {
        let size: usize = j.iter().map(|&v| level_count(v)).product();
        offsets.push(offsets.last().unwrap() + size);
    }
    offsets
}

/// Position along one axis of coefficient `(j, k)` in Mallat order.
fn mallat_position(j: usize, k: usize) -> usize {
    if j == 0 {
        0
    } else {
        (1 << (j - 1)) + k
    }
}

fn check_transform_grid(grid: DyadicGrid, spec: &WaveletSpec) -> Result<()> {
    spec.validate()?;
    let taps = spec.filter().len();
    if !spec.is_haar() && (grid.side() / 2) < taps {
        return Err(Error::IncompatibleGrid(format!(
            "filter with {taps} taps needs 2^(J-1) >= {taps}, got J={}",
            grid.level()
        )));
    }
    Ok(())
}

fn analysis_step(x: &[Complex64], h: &[f64], g: &[f64], out: &mut [Complex64]) {
    let len = x.len();
    let half = len / 2;
    for k in 0..half {
        let mut a = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for (n, (&hn, &gn)) in h.iter().zip(g).enumerate() {
            let v = x[(2 * k + n) % len];
            a += v * hn;
            d += v * gn;
        }
        out[k] = a;
        out[half + k] = d;
    }
}

fn synthesis_step(src: &[Complex64], h: &[f64], g: &[f64], out: &mut [Complex64]) {
    let len = src.len();
    let half = len / 2;
    out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
    for k in 0..half {
        let a = src[k];
        let d = src[half + k];
        for (n, (&hn, &gn)) in h.iter().zip(g).enumerate() {
            out[(2 * k + n) % len] += a * hn + d * gn;
        }
    }
}

fn pyramid_forward(line: &mut [Complex64], scratch: &mut [Complex64], h: &[f64], g: &[f64]) {
    let mut len = line.len();
    while len >= 2 {
        analysis_step(&line[..len], h, g, &mut scratch[..len]);
        line[..len].copy_from_slice(&scratch[..len]);
        len /= 2;
    }
}

fn pyramid_inverse(line: &mut [Complex64], scratch: &mut [Complex64], h: &[f64], g: &[f64]) {
    let mut len = 2;
    while len <= line.len() {
        synthesis_step(&line[..len], h, g, &mut scratch[..len]);
        line[..len].copy_from_slice(&scratch[..len]);
        len *= 2;
    }
}

/// Analysis of a sampled field.
pub fn forward(f: &SampledField, spec: &WaveletSpec) -> Result<CoefficientField> {
    let grid = f.grid();
    check_transform_grid(grid, spec)?;
    let h = spec.filter();
    let g = highpass(&h);
    let norm = (-((grid.dim() * grid.level()) as f64) / 2.0).exp2();
    let mut data: Vec<Complex64> = f.values().iter().map(|v| v * norm).collect();
    for axis in 0..grid.dim() {
        map_lines(
            &mut data,
            grid,
            axis,
            || vec![Complex64::new(0.0, 0.0); grid.side()],
            |scratch, line| pyramid_forward(line, scratch, &h, &g),
        );
    }
    let mut out = CoefficientField::zeros(grid, spec.clone());
    for j in out.scales() {
        let gain = ((j.iter().sum::<usize>()) as f64 / 2.0).exp2();
        let block = out.block_mut(&j);
        for_each_position(grid, &j, |pos, flat| block[pos] = data[flat] * gain);
    }
    Ok(out)
}

/// Synthesis `f = sum lambda_{j,k} psi_{j,k}`.
pub fn inverse(c: &CoefficientField) -> Result<SampledField> {
    let grid = c.grid;
    check_transform_grid(grid, &c.spec)?;
    let h = c.spec.filter();
    let g = highpass(&h);
    let mut data = vec![Complex64::new(0.0, 0.0); grid.len()];
    for j in c.scales() {
        let gain = (-((j.iter().sum::<usize>()) as f64) / 2.0).exp2();
        let block = c.block(&j);
        for_each_position(grid, &j, |pos, flat| data[flat] = block[pos] * gain);
    }
    for axis in 0..grid.dim() {
        map_lines(
            &mut data,
            grid,
            axis,
            || vec![Complex64::new(0.0, 0.0); grid.side()],
            |scratch, line| pyramid_inverse(line, scratch, &h, &g),
        );
    }
    let norm = ((grid.dim() * grid.level()) as f64 / 2.0).exp2();
    data.iter_mut().for_each(|v| *v *= norm);
    SampledField::new(grid, data)
}

/// Calls `visit(block_position, flat_tensor_position)` for every `k` of the
/// block `j`.
fn for_each_position(grid: DyadicGrid, j: &[usize], mut visit: impl FnMut(usize, usize)) {
    let d = grid.dim();
    let counts: Vec<usize> = j.iter().map(|&v| level_count(v)).collect();
    let total: usize = counts.iter().product();
    let mut k = [0usize; MAX_DIM];
    let mut idx = [0usize; MAX_DIM];
    for pos in 0..total {
        let mut rest = pos;
        for axis in (0..d).rev() {
            k[axis] = rest % counts[axis];
            rest /= counts[axis];
        }
        for axis in 0..d {
            idx[axis] = mallat_position(j[axis], k[axis]);
        }
        visit(pos, grid.flatten(&idx));
    }
}

/// `h_{j,k}` at sample `t` of a level-`J` axis.
pub fn haar_value(grid_level: usize, j: usize, k: usize, t: usize) -> f64 {
    if j == 0 {
        return 1.0;
    }
    let width = 1usize << (grid_level + 1 - j);
    let start = k * width;
    if t < start || t >= start + width {
        0.0
    } else if t - start < width / 2 {
        FRAC_1_SQRT_2
    } else {
        -FRAC_1_SQRT_2
    }
}

/// Samples of the tensor Haar function `h_{j,k}`.
pub fn haar_function(grid: DyadicGrid, j: &[usize], k: &[usize]) -> Result<SampledField> {
    check_haar_index(grid, j, k)?;
    let values = (0..grid.len())
        .map(|c| {
            let idx = grid.unflatten(c);
            (0..grid.dim())
                .map(|i| haar_value(grid.level(), j[i], k[i], idx[i]))
                .product()
        })
        .collect();
    SampledField::from_real(grid, values)
}

fn check_haar_index(grid: DyadicGrid, j: &[usize], k: &[usize]) -> Result<()> {
    if j.len() != grid.dim() || k.len() != grid.dim() {
        return Err(Error::param("index length differs from the grid dimension"));
    }
    for (&ji, &ki) in j.iter().zip(k) {
        if ji > grid.level() || ki >= level_count(ji) {
            return Err(Error::param(format!("index (j={ji}, k={ki}) outside the grid")));
        }
    }
    Ok(())
}

/// Direct evaluation of `2^{|j|_1} 2^{-dJ} sum_c f(x_c) h_{j,k}(x_c)`.
pub fn brute_pairing(f: &SampledField, j: &[usize], k: &[usize], spec: &WaveletSpec) -> Result<Complex64> {
    if !spec.is_haar() {
        return Err(Error::Unsupported(
            "brute-force pairing needs closed-form basis values (haar only)".into(),
        ));
    }
    let grid = f.grid();
    check_haar_index(grid, j, k)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (c, v) in f.values().iter().enumerate() {
        let idx = grid.unflatten(c);
        let w: f64 = (0..grid.dim())
            .map(|i| haar_value(grid.level(), j[i], k[i], idx[i]))
            .product();
        if w != 0.0 {
            acc += v * w;
        }
    }
    let scale = (j.iter().sum::<usize>() as f64).exp2() / grid.len() as f64;
    Ok(acc * scale)
}

/// Which theorem's parameter range to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Characterization {
    /// Smooth wavelets for the Triebel-Lizorkin scale.
    GeneralF,
    /// Smooth wavelets for the Besov scale.
    GeneralB,
    /// Haar system for the Triebel-Lizorkin scale.
    HaarF,
    /// Haar system for the Sobolev scale.
    HaarSobolev,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`; positive when the strict inequality `lhs < rhs` holds.
    pub margin: f64,
    pub holds: bool,
}

impl Inequality {
    fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            margin: rhs - lhs,
            holds: lhs < rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub characterization: Characterization,
    pub inequalities: Vec<Inequality>,
    pub valid: bool,
}

/// Checks the parameter range in which `spec` characterizes the space. For
/// dominating mixed weights `|r|` takes the place of `|s| / alpha_min`.
pub fn admissibility_check(
    spec: &WaveletSpec,
    params: &NormParams,
    characterization: Characterization,
) -> AdmissibilityReport {
    let smooth = match params.weight_mode {
        crate::params::WeightMode::AnisoSup => params.s.abs() / params.alpha.min(),
        crate::params::WeightMode::Mixed { r } => r.abs(),
    };
    let (p, q) = (params.p, params.q);
    let inequalities = match characterization {
        Characterization::GeneralF | Characterization::GeneralB => {
            let sigma = if characterization == Characterization::GeneralF {
                params.sigma_pq()
            } else {
                params.sigma_p()
            };
            vec![
                Inequality::new("K > sigma + |s|/alpha_min", sigma + smooth, spec.smoothness() as f64),
                Inequality::new("L > sigma + |s|/alpha_min", sigma + smooth, spec.vanishing_moments() as f64),
            ]
        }
        Characterization::HaarF => vec![
            Inequality::new("|s|/alpha_min < 1/p", smooth, 1.0 / p),
            Inequality::new("|s|/alpha_min < 1/q", smooth, 1.0 / q),
            Inequality::new("|s|/alpha_min < 1 - 1/p", smooth, 1.0 - 1.0 / p),
            Inequality::new("|s|/alpha_min < 1 - 1/q", smooth, 1.0 - 1.0 / q),
        ],
        Characterization::HaarSobolev => vec![
            Inequality::new("|s|/alpha_min < 1/p", smooth, 1.0 / p),
            Inequality::new("|s|/alpha_min < 1 - 1/p", smooth, 1.0 - 1.0 / p),
        ],
    };
    let valid = inequalities.iter().all(|i| i.holds);
    AdmissibilityReport {
        characterization,
        inequalities,
        valid,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Anisotropy;

    fn grid(d: usize, j: usize) -> DyadicGrid {
        DyadicGrid::new(d, j).unwrap()
    }

    fn pattern(g: DyadicGrid) -> SampledField {
        SampledField::from_real_fn(g, |x| {
            x.iter().enumerate().map(|(i, v)| ((i + 2) as f64 * v * 7.3).sin()).sum::<f64>() + x[0] * x[0]
        })
    }

    #[test]
    fn builtin_filters_validate() {
        for name in ["haar", "db2", "db4"] {
            WaveletSpec::by_name(name).unwrap().validate().unwrap();
        }
        assert!(WaveletSpec::cqf("bad", vec![0.5, 0.5], 1, 0).is_err());
        assert!(WaveletSpec::cqf("db2x", DAUBECHIES_4.to_vec(), 3, 1).is_err());
        assert!(WaveletSpec::cqf("db4-as-3", DAUBECHIES_8.to_vec(), 3, 3).is_ok());
        assert!(WaveletSpec::by_name("sym9").is_err());
    }

    #[test]
    fn constant_has_only_coarse_coefficient() {
        let g = grid(2, 4);
        let c = forward(&SampledField::constant(g, 2.5), &WaveletSpec::Haar).unwrap();
        assert!((c.get(&[0, 0], &[0, 0]).re - 2.5).abs() < 1e-14);
        let rest: f64 = c.data().iter().skip(1).map(|v| v.norm()).sum();
        assert!(rest < 1e-13);
    }

    #[test]
    fn two_point_example() {
        let g = grid(1, 1);
        let f = SampledField::from_real(g, vec![1.0, -1.0]).unwrap();
        let c = forward(&f, &WaveletSpec::Haar).unwrap();
        assert!(c.get(&[0], &[0]).norm() < 1e-15);
        assert!((c.get(&[1], &[0]).re - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn unit_coefficient_synthesizes_basis_function() {
        let g = grid(2, 3);
        let mut c = CoefficientField::zeros(g, WaveletSpec::Haar);
        c.set(&[1, 0], &[0, 0], Complex64::new(1.0, 0.0));
        let f = inverse(&c).unwrap();
        for (idx, v) in f.values().iter().enumerate() {
            let x1 = g.point(idx)[0];
            let want = if x1 < 0.5 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
            assert!((v.re - want).abs() < 1e-14);
        }
        let zero = inverse(&CoefficientField::zeros(g, WaveletSpec::Haar)).unwrap();
        assert_eq!(zero.max_modulus(), 0.0);
    }

    #[test]
    fn pyramid_matches_brute_force() {
        let g = grid(2, 4);
        let f = pattern(g);
        let c = forward(&f, &WaveletSpec::Haar).unwrap();
        for j in c.scales() {
            for k0 in 0..level_count(j[0]) {
                for k1 in 0..level_count(j[1]) {
                    let b = brute_pairing(&f, &j, &[k0, k1], &WaveletSpec::Haar).unwrap();
                    assert!((b - c.get(&j, &[k0, k1])).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn brute_pairing_dual_normalization() {
        let g = grid(2, 4);
        let h = haar_function(g, &[2, 3], &[1, 2]).unwrap();
        let same = brute_pairing(&h, &[2, 3], &[1, 2], &WaveletSpec::Haar).unwrap();
        assert!((same.re - 1.0).abs() < 1e-14);
        let other = brute_pairing(&h, &[2, 3], &[0, 2], &WaveletSpec::Haar).unwrap();
        assert!(other.norm() < 1e-14);
        let one = SampledField::constant(g, 1.0);
        assert!(brute_pairing(&one, &[0, 2], &[0, 1], &WaveletSpec::Haar).unwrap().norm() < 1e-14);
        let db2 = WaveletSpec::by_name("db2").unwrap();
        assert!(matches!(brute_pairing(&one, &[0, 0], &[0, 0], &db2), Err(Error::Unsupported(_))));
    }

    #[test]
    fn round_trips() {
        for (d, j) in [(1, 8), (2, 5), (3, 3)] {
            let g = grid(d, j);
            let f = pattern(g);
            for name in ["haar", "db2", "db4"] {
                let spec = WaveletSpec::by_name(name).unwrap();
                if name == "db4" && g.side() / 2 < 8 {
                    assert!(forward(&f, &spec).is_err());
                    continue;
                }
                let back = inverse(&forward(&f, &spec).unwrap()).unwrap();
                for (a, b) in back.values().iter().zip(f.values()) {
                    assert!((a - b).norm() < 1e-12, "{name} d={d}");
                }
            }
        }
    }

    #[test]
    fn cqf_is_orthonormal_after_renormalization() {
        let g = grid(2, 5);
        let f = pattern(g);
        let spec = WaveletSpec::by_name("db2").unwrap();
        let c = forward(&f, &spec).unwrap();
        let energy: f64 = c
            .scales()
            .iter()
            .map(|j| CellMap::measure(j) * c.block(j).iter().map(|v| v.norm_sqr()).sum::<f64>())
            .sum();
        let l2: f64 = f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / g.len() as f64;
        assert!((energy - l2).abs() < 1e-12 * l2);
    }

    #[test]
    fn cell_geometry() {
        assert_eq!(CellMap::interval(0, 0), (0.0, 1.0));
        assert_eq!(CellMap::interval(1, 0), (0.0, 0.5));
        assert_eq!(CellMap::interval(3, 2), (0.5, 0.625));
        assert_eq!(CellMap::measure(&[1, 0]), 0.5);
        assert_eq!(CellMap::support_measure(&[1, 0]), 1.0);
        assert_eq!(CellMap::support_measure(&[3, 2]), 0.125);
        // J = 3: level 2 has cells [0, 1/4) and [1/2, 3/4).
        let cells: Vec<Option<usize>> = (0..8).map(|t| CellMap::cell_of_sample(3, 2, t)).collect();
        assert_eq!(cells, vec![Some(0), Some(0), None, None, Some(1), Some(1), None, None]);
    }

    #[test]
    fn block_sizes_cover_grid() {
        let g = grid(3, 3);
        let c = CoefficientField::zeros(g, WaveletSpec::Haar);
        let total: usize = c.scales().iter().map(|j| c.block(j).len()).sum();
        assert_eq!(total, g.len());
        assert_eq!(c.block(&[3, 0, 2]).len(), 8);
    }

    #[test]
    fn admissibility_examples() {
        let iso = Anisotropy::isotropic(2).unwrap();
        let p = |s: f64, p: f64, q: f64| NormParams::new(s, p, q, iso.clone()).unwrap();
        let haar = WaveletSpec::Haar;
        assert!(admissibility_check(&haar, &p(0.0, 2.0, 2.0), Characterization::HaarSobolev).valid);
        assert!(!admissibility_check(&haar, &p(1.0, 2.0, 2.0), Characterization::HaarSobolev).valid);
        let k3 = WaveletSpec::cqf("db4-as-3", DAUBECHIES_8.to_vec(), 3, 3).unwrap();
        let report = admissibility_check(&k3, &p(1.0, 2.0, 2.0), Characterization::GeneralF);
        assert!(report.valid);
        assert_eq!(report.inequalities.len(), 2);
        assert!((report.inequalities[0].margin - 2.0).abs() < 1e-15);
        let quasi = admissibility_check(&k3, &p(1.0, 0.25, 2.0), Characterization::GeneralF);
        assert!(!quasi.valid);
        let fine_q = p(1.0, 2.0, 0.25);
        assert!(!admissibility_check(&k3, &fine_q, Characterization::GeneralF).valid);
        assert!(admissibility_check(&k3, &fine_q, Characterization::GeneralB).valid);
        let haar_f = admissibility_check(&haar, &p(0.2, 2.0, 3.0), Characterization::HaarF);
        assert!(haar_f.valid);
        assert!(!admissibility_check(&haar, &p(0.2, 2.0, 1.0), Characterization::HaarF).valid);
    }
}
