//! Littlewood-Paley resolutions of unity and the Fourier-side norms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{lp_norm_moduli, modulus, DyadicGrid, Power, SampledField};
use crate::fourier::{dft, idft_with, SpectralField};
use crate::params::{lq_combine, Anisotropy, NormParams, WeightMode};

/// `S(t) = g(t) / (g(t) + g(1-t))` with `g(t) = exp(-1/t)` for `t > 0`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// Equal to 1 on `[-1,1]`, 0 outside `[-2,2]`.
pub fn theta0(xi: f64) -> f64 {
    smooth_step(2.0 - xi.abs())
}

/// Axis profile of the anisotropic ladder: 1 on `[-1,1]`, 0 outside
/// `[-2^a, 2^a]`.
pub fn aniso_theta0(xi: f64, a: f64) -> f64 {
    let top = a.exp2();
    smooth_step((top - xi.abs()) / (top - 1.0))
}

/// Tabulated `theta_j(m)` for `j = 0..=j_max`, `|m| <= 2^{j_max+1}`.
#[derive(Clone, Debug)]
pub struct UnivariateResolution {
    j_max: usize,
    radius: i64,
    table: Vec<Vec<f64>>,
}

impl UnivariateResolution {
    pub fn new(j_max: usize) -> Self {
        let radius = 1i64 << (j_max + 1);
        let dilated = |j: usize, m: i64| theta0(m as f64 / (j as f64).exp2());
        let table = (0..=j_max)
            .map(|j| {
                (-radius..=radius)
                    .map(|m| {
                        if j == 0 {
                            dilated(0, m)
                        } else {
                            dilated(j, m) - dilated(j - 1, m)
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            j_max,
            radius,
            table,
        }
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    /// `theta_j(m)`; zero for `j > j_max` or `m` past the table.
    pub fn value(&self, j: usize, m: i64) -> f64 {
        if j > self.j_max || m.abs() > self.radius {
            return 0.0;
        }
        self.table[j][(m + self.radius) as usize]
    }
}

/// Tensor products `theta_j(m) = prod_i theta_{j_i}(m_i)`.
#[derive(Clone, Debug)]
pub struct HyperbolicResolution {
    d: usize,
    base: UnivariateResolution,
}

impl HyperbolicResolution {
    pub fn new(d: usize, j_max: usize) -> Self {
        Self {
            d,
            base: UnivariateResolution::new(j_max),
        }
    }

    /// Ladder with the band cap `J - 2` of `grid`.
    pub fn for_grid(grid: DyadicGrid) -> Result<Self> {
        Ok(Self::new(grid.dim(), grid.band_cap()?))
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn base(&self) -> &UnivariateResolution {
        &self.base
    }

    pub fn j_max(&self) -> usize {
        self.base.j_max
    }

    pub fn value(&self, j: &[usize], m: &[i64]) -> f64 {
        j.iter()
            .zip(m)
            .map(|(&ji, &mi)| self.base.value(ji, mi))
            .product()
    }

    /// All scale vectors in lexicographic order.
    pub fn bands(&self) -> Vec<Vec<usize>> {
        lex_indices(self.d, self.j_max())
    }
}

/// Classical anisotropic ladder `phi_j^alpha`.
#[derive(Clone, Debug)]
pub struct AnisotropicResolution {
    alpha: Anisotropy,
    j_max: usize,
    radius: i64,
    /// `profiles[i][j][m + radius] = theta_0^{(i)}(2^{-j alpha_i} m)`.
    profiles: Vec<Vec<Vec<f64>>>,
}

impl AnisotropicResolution {
    /// Ladder whose partition of unity covers `|m_i| <= 2^{box_exponent}`;
    /// tables extend to twice that radius.
    pub fn new(alpha: Anisotropy, box_exponent: usize) -> Self {
        let j_max = aniso_level_cap(&alpha, box_exponent);
        let radius = 1i64 << (box_exponent + 1);
        let profiles = alpha
            .alphas()
            .iter()
            .map(|&a| {
                (0..=j_max)
                    .map(|j| {
                        let scale = (-(j as f64) * a).exp2();
                        (-radius..=radius)
                            .map(|m| aniso_theta0(m as f64 * scale, a))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self {
            alpha,
            j_max,
            radius,
            profiles,
        }
    }

    pub fn for_grid(grid: DyadicGrid, alpha: Anisotropy) -> Result<Self> {
        if alpha.dim() != grid.dim() {
            return Err(Error::IncompatibleGrid(format!(
                "anisotropy of length {} on a {}-dimensional grid",
                alpha.dim(),
                grid.dim()
            )));
        }
        Ok(Self::new(alpha, grid.band_cap()?))
    }

    pub fn alpha(&self) -> &Anisotropy {
        &self.alpha
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    fn profile(&self, axis: usize, j: usize, m: i64) -> f64 {
        if m.abs() > self.radius {
            return 0.0;
        }
        self.profiles[axis][j][(m + self.radius) as usize]
    }

    pub fn value(&self, j: usize, m: &[i64]) -> f64 {
        if j > self.j_max {
            return 0.0;
        }
        let outer: f64 = m
            .iter()
            .enumerate()
            .map(|(i, &mi)| self.profile(i, j, mi))
            .product();
        if j == 0 {
            return outer;
        }
        let inner: f64 = m
            .iter()
            .enumerate()
            .map(|(i, &mi)| self.profile(i, j - 1, mi))
            .product();
        outer - inner
    }
}

/// Smallest level whose rectangle `|m_i| <= 2^{j alpha_i}` contains the box
/// `|m_i| <= 2^{box_exponent}`.
pub fn aniso_level_cap(alpha: &Anisotropy, box_exponent: usize) -> usize {
    let need = box_exponent as f64 / alpha.min();
    let j = need.ceil();
    if j - need > 1.0 - 1e-9 {
        j as usize - 1
    } else {
        j as usize
    }
}

pub(crate) fn lex_indices(d: usize, cap: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; d];
    loop {
        out.push(cur.clone());
        let mut axis = d;
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            if cur[axis] < cap {
                cur[axis] += 1;
                cur[axis + 1..].iter_mut().for_each(|v| *v = 0);
                break;
            }
        }
    }
}

/// Band family used by a norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    Classical,
    Hyperbolic,
}

/// A norm value with the spectral truncation flag.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    pub value: f64,
    /// Set when the input had spectral content outside the usable box.
    pub truncated: bool,
}

fn check_grid_res(grid: DyadicGrid, j_max: usize) -> Result<()> {
    if grid.band_cap()? != j_max {
        return Err(Error::IncompatibleGrid(format!(
            "resolution built for band cap {j_max}, grid has cap {}",
            grid.band_cap()?
        )));
    }
    Ok(())
}

/// Per-axis table `v[t] = value(frequency(t))`.
fn axis_table(grid: DyadicGrid, value: impl Fn(i64) -> f64) -> Vec<f64> {
    (0..grid.side()).map(|t| value(grid.frequency(t))).collect()
}

/// Writes `coeffs * prod_i tables[i]` into `out`.
fn apply_separable(grid: DyadicGrid, coeffs: &[Complex64], tables: &[Vec<f64>], out: &mut [Complex64]) {
    let n = grid.side();
    let d = grid.dim();
    let last = &tables[d - 1];
    for (row, (src, dst)) in coeffs.chunks(n).zip(out.chunks_mut(n)).enumerate() {
        let idx = grid.unflatten(row * n);
        let factor: f64 = (0..d - 1).map(|i| tables[i][idx[i]]).product();
        if factor == 0.0 {
            dst.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            continue;
        }
        for ((s, o), &w) in src.iter().zip(dst.iter_mut()).zip(last) {
            *o = s * (factor * w);
        }
    }
}

fn apply_aniso(
    grid: DyadicGrid,
    coeffs: &[Complex64],
    outer: &[Vec<f64>],
    inner: Option<&[Vec<f64>]>,
    out: &mut [Complex64],
) {
    let n = grid.side();
    let d = grid.dim();
    for (row, (src, dst)) in coeffs.chunks(n).zip(out.chunks_mut(n)).enumerate() {
        let idx = grid.unflatten(row * n);
        let fo: f64 = (0..d - 1).map(|i| outer[i][idx[i]]).product();
        let fi: f64 = inner.map_or(0.0, |t| (0..d - 1).map(|i| t[i][idx[i]]).product());
        for (t, (s, o)) in src.iter().zip(dst.iter_mut()).enumerate() {
            let a = fo * outer[d - 1][t];
            let b = inner.map_or(0.0, |tab| fi * tab[d - 1][t]);
            *o = s * (a - b);
        }
    }
}

/// `Delta_j f = F^{-1}(theta_j F f)` for a scale vector `j`.
pub fn hyperbolic_project(
    f: &SampledField,
    j: &[usize],
    res: &HyperbolicResolution,
) -> Result<SampledField> {
    let grid = f.grid();
    check_grid_res(grid, res.j_max())?;
    if j.len() != grid.dim() {
        return Err(Error::param(format!("scale vector of length {} in d={}", j.len(), grid.dim())));
    }
    if j.iter().any(|&v| v > res.j_max()) {
        return Err(Error::BandRange {
            band: j.to_vec(),
            cap: res.j_max(),
        });
    }
    let spec = dft(f);
    let tables: Vec<Vec<f64>> = j
        .iter()
        .map(|&ji| axis_table(grid, |m| res.base.value(ji, m)))
        .collect();
    let mut out = SpectralField::zeros(grid);
    apply_separable(grid, spec.coeffs(), &tables, out.coeffs_mut());
    Ok(idft_with(&out, f.is_real()))
}

fn aniso_tables(grid: DyadicGrid, res: &AnisotropicResolution, j: usize) -> Vec<Vec<f64>> {
    (0..grid.dim())
        .map(|i| axis_table(grid, |m| res.profile(i, j, m)))
        .collect()
}

/// `Delta_j^alpha f = F^{-1}(phi_j^alpha F f)`.
pub fn anisotropic_project(
    f: &SampledField,
    j: usize,
    res: &AnisotropicResolution,
) -> Result<SampledField> {
    let grid = f.grid();
    if res.alpha.dim() != grid.dim() {
        return Err(Error::IncompatibleGrid("anisotropy dimension differs from grid".into()));
    }
    let expected = AnisotropicResolution::new(res.alpha.clone(), grid.band_cap()?);
    if expected.j_max != res.j_max || expected.radius != res.radius {
        return Err(Error::IncompatibleGrid("resolution built for another grid level".into()));
    }
    if j > res.j_max {
        return Err(Error::BandRange {
            band: vec![j],
            cap: res.j_max,
        });
    }
    let spec = dft(f);
    let outer = aniso_tables(grid, res, j);
    let inner = (j > 0).then(|| aniso_tables(grid, res, j - 1));
    let mut out = SpectralField::zeros(grid);
    apply_aniso(grid, spec.coeffs(), &outer, inner.as_deref(), out.coeffs_mut());
    Ok(idft_with(&out, f.is_real()))
}

/// Band analysis of one field: streams `(band index, |Delta f|)` pairs in
/// lexicographic band order, skipping bands whose multiplier vanishes on the
/// spectrum.
struct BandStream {
    grid: DyadicGrid,
    spec: SpectralField,
    real: bool,
    truncated: bool,
    ladder: Ladder,
}

enum Ladder {
    Hyperbolic(HyperbolicResolution),
    Classical(AnisotropicResolution),
}

impl BandStream {
    fn new(f: &SampledField, flavor: Flavor, alpha: &Anisotropy) -> Result<Self> {
        let grid = f.grid();
        if alpha.dim() != grid.dim() {
            return Err(Error::IncompatibleGrid(format!(
                "parameters for d={} applied to a {}-dimensional field",
                alpha.dim(),
                grid.dim()
            )));
        }
        let mut spec = dft(f);
        let truncated = spec.truncate(grid.usable_radius()?);
        let ladder = match flavor {
            Flavor::Hyperbolic => Ladder::Hyperbolic(HyperbolicResolution::for_grid(grid)?),
            Flavor::Classical => Ladder::Classical(AnisotropicResolution::for_grid(grid, alpha.clone())?),
        };
        Ok(Self {
            grid,
            spec,
            real: f.is_real(),
            truncated,
            ladder,
        })
    }

    fn for_each(&self, mut visit: impl FnMut(&[usize], &[f64])) {
        let grid = self.grid;
        let mut buf = SpectralField::zeros(grid);
        let mut emit = |index: &[usize], buf: &SpectralField| {
            let band = idft_with(buf, self.real);
            let moduli: Vec<f64> = if self.real {
                band.values().iter().map(|v| v.re.abs()).collect()
            } else {
                band.values().iter().map(|&v| modulus(v)).collect()
            };
            visit(index, &moduli);
        };
        match &self.ladder {
            Ladder::Hyperbolic(res) => {
                let support = self.spec.marginal_support();
                let tables: Vec<Vec<f64>> = (0..=res.j_max())
                    .map(|j| axis_table(grid, |m| res.base.value(j, m)))
                    .collect();
                let live: Vec<Vec<bool>> = support
                    .iter()
                    .map(|active| {
                        tables
                            .iter()
                            .map(|t| t.iter().zip(active).any(|(&v, &a)| a && v != 0.0))
                            .collect()
                    })
                    .collect();
                for j in res.bands() {
                    if j.iter().enumerate().any(|(i, &ji)| !live[i][ji]) {
                        continue;
                    }
                    let axis: Vec<Vec<f64>> = j.iter().map(|&ji| tables[ji].clone()).collect();
                    apply_separable(grid, self.spec.coeffs(), &axis, buf.coeffs_mut());
                    emit(&j, &buf);
                }
            }
            Ladder::Classical(res) => {
                let mut prev: Option<Vec<Vec<f64>>> = None;
                for j in 0..=res.j_max {
                    let outer = aniso_tables(grid, res, j);
                    apply_aniso(grid, self.spec.coeffs(), &outer, prev.as_deref(), buf.coeffs_mut());
                    if buf.coeffs().iter().any(|c| c.re != 0.0 || c.im != 0.0) {
                        emit(&[j], &buf);
                    }
                    prev = Some(outer);
                }
            }
        }
    }
}

fn band_weight(params: &NormParams, flavor: Flavor, index: &[usize]) -> Result<f64> {
    match (flavor, params.weight_mode) {
        (Flavor::Hyperbolic, _) => Ok(params.weight(index)),
        (Flavor::Classical, WeightMode::AnisoSup) => Ok((params.s * index[0] as f64).exp2()),
        (Flavor::Classical, WeightMode::Mixed { .. }) => Err(Error::Unsupported(
            "dominating mixed weights are defined on hyperbolic bands only".into(),
        )),
    }
}

/// Band moduli of one field, kept in memory so several parameter sets can be
/// evaluated without recomputing the projections.
#[derive(Clone, Debug)]
pub struct BandDecomposition {
    flavor: Flavor,
    truncated: bool,
    bands: Vec<(Vec<usize>, Vec<f64>)>,
}

impl BandDecomposition {
    /// `alpha` selects the classical ladder; it is ignored for the
    /// hyperbolic flavor apart from the dimension check.
    pub fn new(f: &SampledField, flavor: Flavor, alpha: &Anisotropy) -> Result<Self> {
        let stream = BandStream::new(f, flavor, alpha)?;
        let mut bands = Vec::new();
        stream.for_each(|j, m| bands.push((j.to_vec(), m.to_vec())));
        Ok(Self {
            flavor,
            truncated: stream.truncated,
            bands,
        })
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Indices of the bands with nonzero multiplier on the spectrum.
    pub fn indices(&self) -> impl Iterator<Item = &[usize]> {
        self.bands.iter().map(|(j, _)| j.as_slice())
    }

    pub fn besov(&self, params: &NormParams) -> Result<f64> {
        let mut acc = BesovAcc::new(params);
        for (j, m) in &self.bands {
            acc.add(band_weight(params, self.flavor, j)?, m);
        }
        Ok(acc.finish())
    }

    pub fn triebel(&self, params: &NormParams) -> Result<f64> {
        check_triebel(params)?;
        let mut acc = TriebelAcc::new(params, self.bands.first().map_or(0, |b| b.1.len()));
        for (j, m) in &self.bands {
            acc.add(band_weight(params, self.flavor, j)?, m);
        }
        Ok(acc.finish())
    }
}

struct BesovAcc {
    p: f64,
    q: f64,
    levels: Vec<f64>,
}

impl BesovAcc {
    fn new(params: &NormParams) -> Self {
        Self {
            p: params.p,
            q: params.q,
            levels: Vec::new(),
        }
    }

    fn add(&mut self, weight: f64, moduli: &[f64]) {
        self.levels.push(weight * lp_norm_moduli(moduli, self.p));
    }

    fn finish(self) -> f64 {
        lq_combine(self.levels, self.q)
    }
}

struct TriebelAcc {
    p: f64,
    q: f64,
    acc: Vec<f64>,
}

impl TriebelAcc {
    fn new(params: &NormParams, len: usize) -> Self {
        Self {
            p: params.p,
            q: params.q,
            acc: vec![0.0; len],
        }
    }

    fn add(&mut self, weight: f64, moduli: &[f64]) {
        if self.acc.len() != moduli.len() {
            self.acc.resize(moduli.len(), 0.0);
        }
        if self.q.is_infinite() {
            for (a, &m) in self.acc.iter_mut().zip(moduli) {
                *a = a.max(weight * m);
            }
        } else {
            let wq = weight.powf(self.q);
            let pow = Power::new(self.q);
            for (a, &m) in self.acc.iter_mut().zip(moduli) {
                *a += wq * pow.apply(m);
            }
        }
    }

    fn finish(mut self) -> f64 {
        if self.acc.is_empty() {
            return 0.0;
        }
        if self.q.is_finite() {
            let pow = Power::new(1.0 / self.q);
            self.acc.iter_mut().for_each(|a| *a = pow.apply(*a));
        }
        lp_norm_moduli(&self.acc, self.p)
    }
}

fn check_triebel(params: &NormParams) -> Result<()> {
    if params.p.is_infinite() {
        return Err(Error::Unsupported("Triebel-Lizorkin norms need p < inf".into()));
    }
    Ok(())
}

/// Besov norm over the classical anisotropic or the hyperbolic ladder.
pub fn besov_norm(f: &SampledField, params: &NormParams, flavor: Flavor) -> Result<NormValue> {
    let stream = BandStream::new(f, flavor, &params.alpha)?;
    band_weight(params, flavor, &vec![0; f.grid().dim()])?;
    let mut acc = BesovAcc::new(params);
    let mut err = None;
    stream.for_each(|j, m| match band_weight(params, flavor, j) {
        Ok(w) => acc.add(w, m),
        Err(e) => err = Some(e),
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(NormValue {
        value: acc.finish(),
        truncated: stream.truncated,
    })
}

/// Triebel-Lizorkin norm: pointwise `l_q` over bands, then `L_p`.
pub fn triebel_norm(f: &SampledField, params: &NormParams, flavor: Flavor) -> Result<NormValue> {
    check_triebel(params)?;
    let stream = BandStream::new(f, flavor, &params.alpha)?;
    band_weight(params, flavor, &vec![0; f.grid().dim()])?;
    let mut acc = TriebelAcc::new(params, f.grid().len());
    let mut err = None;
    stream.for_each(|j, m| match band_weight(params, flavor, j) {
        Ok(w) => acc.add(w, m),
        Err(e) => err = Some(e),
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(NormValue {
        value: acc.finish(),
        truncated: stream.truncated,
    })
}

fn check_sobolev_p(p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Unsupported(format!("Sobolev norms need 1 < p < inf, got {p}")));
    }
    Ok(())
}

/// `m_{alpha,s}(m) = (sum_i (1 + m_i^2)^{1/(2 alpha_i)})^s`.
pub fn sobolev_multiplier(m: &[i64], s: f64, alpha: &Anisotropy) -> f64 {
    m.iter()
        .zip(alpha.alphas())
        .map(|(&mi, &a)| (1.0 + (mi * mi) as f64).powf(0.5 / a))
        .sum::<f64>()
        .powf(s)
}

/// Applies `m_{alpha,s}` as a Fourier multiplier.
pub fn apply_sobolev_multiplier(f: &SampledField, s: f64, alpha: &Anisotropy) -> Result<SampledField> {
    let grid = f.grid();
    if alpha.dim() != grid.dim() {
        return Err(Error::IncompatibleGrid("anisotropy dimension differs from grid".into()));
    }
    let mut spec = dft(f);
    let d = grid.dim();
    let axis: Vec<Vec<f64>> = alpha
        .alphas()
        .iter()
        .map(|&a| axis_table(grid, |m| (1.0 + (m * m) as f64).powf(0.5 / a)))
        .collect();
    for (flat, c) in spec.coeffs_mut().iter_mut().enumerate() {
        let idx = grid.unflatten(flat);
        let base: f64 = (0..d).map(|i| axis[i][idx[i]]).sum();
        *c *= base.powf(s);
    }
    Ok(idft_with(&spec, f.is_real()))
}

/// `||F^{-1}(m_{alpha,s} F f)||_p`.
pub fn sobolev_multiplier_norm(f: &SampledField, s: f64, alpha: &Anisotropy, p: f64) -> Result<f64> {
    check_sobolev_p(p)?;
    let g = apply_sobolev_multiplier(f, s, alpha)?;
    let moduli: Vec<f64> = g.values().iter().map(|&v| modulus(v)).collect();
    Ok(lp_norm_moduli(&moduli, p))
}

/// Dominating mixed Sobolev norm with multiplier `prod_i (1 + m_i^2)^{r/2}`.
pub fn mixed_sobolev_norm(f: &SampledField, r: f64, p: f64) -> Result<f64> {
    check_sobolev_p(p)?;
    let grid = f.grid();
    let spec = dft(f);
    let table = axis_table(grid, |m| (1.0 + (m * m) as f64).powf(r / 2.0));
    let tables = vec![table; grid.dim()];
    let mut out = SpectralField::zeros(grid);
    apply_separable(grid, spec.coeffs(), &tables, out.coeffs_mut());
    let g = idft_with(&out, f.is_real());
    let moduli: Vec<f64> = g.values().iter().map(|&v| modulus(v)).collect();
    Ok(lp_norm_moduli(&moduli, p))
}
