//! Test-function generators: wavelet cascades, the three lacunary/disjoint/
//! kernel families, the tensor embedding and random band-limited fields.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bands::theta0;
use crate::error::{Error, Result};
use crate::field::{DyadicGrid, SampledField};
use crate::fourier::{dft, idft_with, SpectralField};
use crate::params::Anisotropy;
use crate::wavelet::{inverse, CoefficientField, WaveletSpec};

/// Name of the generator behind [`RngSpec`].
pub const RNG_ALGORITHM: &str = "chacha20";

/// Seeded ChaCha20 stream. Equal `(seed, stream)` pairs give equal
/// sequences on every platform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngSpec {
    pub seed: u64,
    #[serde(default)]
    pub stream: u64,
}

impl RngSpec {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        Self { stream, ..self }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// `constant + per_inverse_p / p + per_inverse_q / q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exponent {
    pub constant: f64,
    pub per_inverse_p: f64,
    pub per_inverse_q: f64,
}

impl Exponent {
    pub const fn fixed(v: f64) -> Self {
        Self {
            constant: v,
            per_inverse_p: 0.0,
            per_inverse_q: 0.0,
        }
    }

    pub const fn inverse_p() -> Self {
        Self {
            constant: 0.0,
            per_inverse_p: 1.0,
            per_inverse_q: 0.0,
        }
    }

    pub const fn inverse_q() -> Self {
        Self {
            constant: 0.0,
            per_inverse_p: 0.0,
            per_inverse_q: 1.0,
        }
    }

    pub fn resolve(&self, p: f64, q: f64) -> f64 {
        self.constant + self.per_inverse_p / p + self.per_inverse_q / q
    }
}

/// What a target exponent measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    /// `L_p` norm of the field.
    Lp,
    /// Zero-smoothness Besov norm.
    Besov0,
    /// Zero-smoothness Triebel-Lizorkin norm.
    Triebel0,
    /// Ratio of hyperbolic to classical Triebel-Lizorkin norms.
    TriebelRatio,
}

/// How the exponent enters: `norm ~ n^e` (log-log) or `norm ~ 2^{e N}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Growth {
    Power,
    Exponential,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    Equal,
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub quantity: Quantity,
    pub growth: Growth,
    pub bound: Bound,
    pub exponent: Exponent,
    /// Parameter ranges where the target applies, free text.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Target {
    fn power(quantity: Quantity, exponent: Exponent) -> Self {
        Self {
            quantity,
            growth: Growth::Power,
            bound: Bound::Equal,
            exponent,
            note: None,
        }
    }
}

/// Parameters and expected exponents of a generated family member.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub family: String,
    pub params: BTreeMap<String, f64>,
    /// Number of summands, the abscissa of every power-law fit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<usize>,
    pub targets: Vec<Target>,
}

impl GroundTruth {
    fn new(family: &str, params: &[(&str, f64)], terms: Option<usize>, targets: Vec<Target>) -> Self {
        Self {
            family: family.into(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            terms,
            targets,
        }
    }

    pub fn target(&self, quantity: Quantity) -> Option<&Target> {
        self.targets.iter().find(|t| t.quantity == quantity)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CascadeMode {
    /// Every sign is `+1`.
    Deterministic,
    /// Independent uniform signs.
    Rademacher,
}

fn rademacher(rng: &mut ChaCha20Rng) -> f64 {
    if rng.gen::<bool>() {
        1.0
    } else {
        -1.0
    }
}

/// Coefficients `lambda_{j,k} = 2^{-s max_i(j_i/alpha_i)} eps_{j,k}`.
pub fn cascade_coefficients(
    grid: DyadicGrid,
    s: f64,
    alpha: &Anisotropy,
    rng: &RngSpec,
    mode: CascadeMode,
    spec: &WaveletSpec,
) -> Result<CoefficientField> {
    if alpha.dim() != grid.dim() {
        return Err(Error::IncompatibleGrid(format!(
            "anisotropy of dimension {} on a {}-dimensional grid",
            alpha.dim(),
            grid.dim()
        )));
    }
    if !s.is_finite() {
        return Err(Error::param(format!("smoothness must be finite, got {s}")));
    }
    spec.validate()?;
    let mut c = CoefficientField::zeros(grid, spec.clone());
    let mut gen = rng.rng();
    for j in c.scales() {
        let amp = (-s * alpha.scaled_level(&j)).exp2();
        for v in c.block_mut(&j) {
            let sign = match mode {
                CascadeMode::Deterministic => 1.0,
                CascadeMode::Rademacher => rademacher(&mut gen),
            };
            *v = Complex64::new(amp * sign, 0.0);
        }
    }
    Ok(c)
}

/// Field whose coefficients follow the anisotropic weight law exactly.
pub fn synth_cascade(
    grid: DyadicGrid,
    s: f64,
    alpha: &Anisotropy,
    rng: &RngSpec,
    mode: CascadeMode,
    spec: &WaveletSpec,
) -> Result<(SampledField, GroundTruth)> {
    let c = cascade_coefficients(grid, s, alpha, rng, mode, spec)?;
    let f = inverse(&c)?.into_real()?;
    let mut params = vec![("s", s)];
    let names = ["alpha1", "alpha2", "alpha3"];
    for (name, &a) in names.iter().zip(alpha.alphas()) {
        params.push((name, a));
    }
    let truth = GroundTruth::new("cascade", &params, None, Vec::new());
    Ok((f, truth))
}

/// Building blocks of the lacunary family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lemma1Basis {
    /// `sum_{j=0}^{N} eps_j sum_k psi_{j,k}` with `L_inf`-normalized Haar
    /// wavelets (`N + 1` summands).
    Haar,
    /// `sum_{j=0}^{N-1} eps_j cos(2 pi 2^j x)` (`N` summands), one tone per
    /// Littlewood-Paley band.
    Tones,
}

fn require_1d(grid: DyadicGrid) -> Result<()> {
    if grid.dim() != 1 {
        return Err(Error::param(format!(
            "family is one-dimensional, grid has d={}",
            grid.dim()
        )));
    }
    Ok(())
}

fn require_level(n: usize, bound: usize, what: &str) -> Result<()> {
    if n > bound {
        return Err(Error::param(format!("{what}: N={n} exceeds {bound}")));
    }
    Ok(())
}

/// `cos(2 pi 2^j t / n)` with the phase reduced exactly.
fn dyadic_cos(j: usize, t: usize, level: usize) -> f64 {
    let n = 1usize << level;
    let phase = (t << j) & (n - 1);
    (2.0 * PI * phase as f64 / n as f64).cos()
}

/// Lacunary sum with Rademacher signs.
pub fn synth_lemma1(
    grid: DyadicGrid,
    n: usize,
    rng: &RngSpec,
    basis: Lemma1Basis,
) -> Result<(SampledField, GroundTruth)> {
    require_1d(grid)?;
    let cap = grid.band_cap()?;
    // Haar summands reach level N+1 <= J-1; tones reach 2^{N-1} <= 2^{J-2}.
    let bound = match basis {
        Lemma1Basis::Haar => cap,
        Lemma1Basis::Tones => cap + 1,
    };
    require_level(n, bound, "lacunary family")?;
    let big_j = grid.level();
    let mut gen = rng.rng();
    let (values, terms) = match basis {
        Lemma1Basis::Haar => {
            let signs: Vec<f64> = (0..=n).map(|_| rademacher(&mut gen)).collect();
            let values = (0..grid.len())
                .map(|t| {
                    signs
                        .iter()
                        .enumerate()
                        .map(|(j, e)| if (t >> (big_j - 1 - j)) & 1 == 0 { *e } else { -e })
                        .sum()
                })
                .collect();
            (values, n + 1)
        }
        Lemma1Basis::Tones => {
            if n == 0 {
                return Err(Error::param("the tone basis needs N >= 1"));
            }
            let signs: Vec<f64> = (0..n).map(|_| rademacher(&mut gen)).collect();
            let values = (0..grid.len())
                .map(|t| {
                    signs
                        .iter()
                        .enumerate()
                        .map(|(j, e)| e * dyadic_cos(j, t, big_j))
                        .sum()
                })
                .collect();
            (values, n)
        }
    };
    let truth = GroundTruth::new(
        "lacunary",
        &[("N", n as f64)],
        Some(terms),
        vec![
            Target::power(Quantity::Lp, Exponent::fixed(0.5)),
            Target::power(Quantity::Besov0, Exponent::inverse_q()),
            Target::power(Quantity::Triebel0, Exponent::fixed(0.5)),
        ],
    );
    Ok((SampledField::from_real(grid, values)?, truth))
}

/// Disjointly supported Haar wavelets: summand `j = 0..=N` has support
/// `[1 - 2^{-j}, 1 - 2^{-(j+1)})` and amplitude `2^{(j+1)/p}`, so
/// `||f||_p = (N+1)^{1/p}`.
pub fn synth_lemma2(grid: DyadicGrid, n: usize, p: f64) -> Result<(SampledField, GroundTruth)> {
    require_1d(grid)?;
    crate::field::check_exponent("p", p)?;
    let big_j = grid.level();
    // The narrowest summand spans 2^{J-N-1} samples; it needs two.
    if n + 2 > big_j {
        return Err(Error::param(format!(
            "cannot pack {} disjoint wavelets on 2^{big_j} samples",
            n + 1
        )));
    }
    let side = grid.side();
    let mut values = vec![0.0; side];
    for j in 0..=n {
        let width = side >> (j + 1);
        let start = side - (side >> j);
        let amp = ((j + 1) as f64 / p).exp2();
        for (i, v) in values[start..start + width].iter_mut().enumerate() {
            *v = if i < width / 2 { amp } else { -amp };
        }
    }
    let truth = GroundTruth::new(
        "disjoint",
        &[("N", n as f64), ("p", p)],
        Some(n + 1),
        vec![
            Target::power(Quantity::Lp, Exponent::inverse_p()),
            Target::power(Quantity::Besov0, Exponent::inverse_q()),
        ],
    );
    Ok((SampledField::from_real(grid, values)?, truth))
}

/// Dilated kernel with spectrum `theta0(m / 2^N)`.
pub fn synth_lemma3(grid: DyadicGrid, n: usize) -> Result<(SampledField, GroundTruth)> {
    require_1d(grid)?;
    let cap = grid.band_cap()?;
    // Support reaches |m| < 2^{N+1}, inside the usable box for N <= J-3.
    if cap == 0 {
        return Err(Error::param("grid too small for the kernel family"));
    }
    require_level(n, cap - 1, "kernel family")?;
    let mut spec = SpectralField::zeros(grid);
    let scale = (n as f64).exp2();
    let radius = 1i64 << (n + 1);
    for m in -radius..=radius {
        let v = theta0(m as f64 / scale);
        if v != 0.0 {
            spec.set(&[m], Complex64::new(v, 0.0))?;
        }
    }
    let lp = Target {
        quantity: Quantity::Lp,
        growth: Growth::Exponential,
        bound: Bound::Equal,
        exponent: Exponent {
            constant: 1.0,
            per_inverse_p: -1.0,
            per_inverse_q: 0.0,
        },
        note: None,
    };
    let triebel = Target {
        quantity: Quantity::Triebel0,
        growth: Growth::Power,
        bound: Bound::AtLeast,
        exponent: Exponent::inverse_p(),
        note: Some("p >= 1".into()),
    };
    let truth = GroundTruth::new("kernel", &[("N", n as f64)], Some(n), vec![lp, triebel]);
    Ok((idft_with(&spec, true), truth))
}

/// Threshold of the interval rule for the embedding tones.
pub fn interval_threshold(alpha_min: f64) -> f64 {
    8.0 * alpha_min / (3.0 * alpha_min + 12.0)
}

/// Tone exponent `k_i` for axis `i`: `floor(l alpha_i)`, or one more when the
/// fractional part reaches the interval threshold.
pub fn embed_level(l: usize, alpha_i: f64, alpha_min: f64) -> usize {
    let x = l as f64 * alpha_i;
    // Snap values within rounding of an integer.
    let r = x.round();
    let x = if (x - r).abs() < 1e-9 { r } else { x };
    let base = x.floor();
    let frac = x - base;
    if frac < interval_threshold(alpha_min) {
        base as usize
    } else {
        base as usize + 1
    }
}

/// Lifts a 1-D field `g` to `d` dimensions: `f(x) = prod_{i<d} cos(2 pi
/// 2^{k_i} x_i) g(x_d)` with `k_i = embed_level(l, alpha_i)`.
pub fn tensor_embed(g: &SampledField, l: usize, alpha: &Anisotropy) -> Result<SampledField> {
    require_1d(g.grid())?;
    let d = alpha.dim();
    let level = g.grid().level();
    let grid = DyadicGrid::new(d, level)?;
    let radius = grid.usable_radius()?;
    let alphas = alpha.alphas();
    let limit = (l as f64 * alphas[d - 1]).exp2() * (1.0 + 1e-12);
    let support = dft(g).support_radius(1e-12);
    if support as f64 > limit || support > radius {
        return Err(Error::SupportViolation(format!(
            "spectrum of g reaches |m|={support}, beyond 2^(l*alpha_d) = {:.3} or the usable radius {radius}",
            limit
        )));
    }
    let ks: Vec<usize> = alphas[..d - 1]
        .iter()
        .map(|&a| embed_level(l, a, alpha.min()))
        .collect();
    for (i, &k) in ks.iter().enumerate() {
        if k >= 63 || (1i64 << k) > radius {
            return Err(Error::param(format!(
                "axis {i}: tone 2^{k} lies outside the usable radius {radius}; increase J or lower l"
            )));
        }
    }
    let tables: Vec<Vec<f64>> = ks
        .iter()
        .map(|&k| (0..grid.side()).map(|t| dyadic_cos(k, t, level)).collect())
        .collect();
    let gv = g.values();
    let n = grid.side();
    let values = (0..grid.len())
        .map(|c| {
            let idx = grid.unflatten(c);
            let factor: f64 = (0..d - 1).map(|i| tables[i][idx[i]]).product();
            gv[c % n] * factor
        })
        .collect();
    let f = SampledField::new(grid, values)?;
    if g.is_real() {
        f.into_real()
    } else {
        Ok(f)
    }
}

/// Spectral amplitude profile of [`random_bandlimited`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case")]
pub enum SpectrumProfile {
    Flat,
    /// Amplitude `(1 + |m|^2)^{-exponent/2}`.
    Decay { exponent: f64 },
    /// Only the zero frequency.
    DcOnly,
}

impl SpectrumProfile {
    fn amplitude(&self, m: &[i64]) -> f64 {
        match self {
            SpectrumProfile::Flat => 1.0,
            SpectrumProfile::Decay { exponent } => {
                let r2: f64 = m.iter().map(|&v| (v * v) as f64).sum();
                (1.0 + r2).powf(-exponent / 2.0)
            }
            SpectrumProfile::DcOnly => {
                if m.iter().all(|&v| v == 0) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Real field with Gaussian spectral coefficients on `|m_i| <= cap`.
///
/// Two normals are drawn for every in-box frequency in storage order, so the
/// stream consumption does not depend on the profile.
pub fn random_bandlimited(
    grid: DyadicGrid,
    cap: i64,
    profile: SpectrumProfile,
    rng: &RngSpec,
) -> Result<SampledField> {
    let radius = grid.usable_radius()?;
    if cap < 0 || cap > radius {
        return Err(Error::param(format!(
            "band cap {cap} outside 0..={radius} for this grid"
        )));
    }
    let d = grid.dim();
    let mut gen = rng.rng();
    let mut raw = SpectralField::zeros(grid);
    for flat in 0..grid.len() {
        let m = raw.frequency(flat);
        if m[..d].iter().any(|v| v.abs() > cap) {
            continue;
        }
        let re: f64 = gen.sample(StandardNormal);
        let im: f64 = gen.sample(StandardNormal);
        raw.coeffs_mut()[flat] = Complex64::new(re, im) * profile.amplitude(&m[..d]);
    }
    let mut sym = SpectralField::zeros(grid);
    for flat in 0..grid.len() {
        let m = raw.frequency(flat);
        let neg: Vec<i64> = m[..d].iter().map(|v| -v).collect();
        let v = (raw.coeffs()[flat] + raw.get(&neg).conj()) * 0.5;
        sym.coeffs_mut()[flat] = v;
    }
    Ok(idft_with(&sym, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::lp_norm;
    use crate::params::NormParams;
    use crate::seqnorm::btilde_norm;
    use crate::wavelet::forward;

    #[test]
    fn rng_contract() {
        let a: Vec<u64> = (0..4).map(|_| RngSpec::new(5, 1).rng().gen()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let mut r1 = RngSpec::new(5, 1).rng();
        let mut r2 = RngSpec::new(5, 2).rng();
        assert_ne!(r1.gen::<u64>(), r2.gen::<u64>());
        // Stream 0 is the default ChaCha20 stream.
        let first: u64 = RngSpec::new(0, 0).rng().gen();
        let again: u64 = ChaCha20Rng::seed_from_u64(0).gen();
        assert_eq!(first, again);
    }

    #[test]
    fn cascade_weight_law() {
        let g = DyadicGrid::new(2, 5).unwrap();
        let alpha = Anisotropy::isotropic(2).unwrap();
        let c = cascade_coefficients(g, 1.0, &alpha, &RngSpec::new(1, 0), CascadeMode::Deterministic, &WaveletSpec::Haar)
            .unwrap();
        assert!((c.get(&[3, 1], &[0, 0]).re - 0.125).abs() < 1e-15);
        let (f, _) = synth_cascade(g, 1.0, &alpha, &RngSpec::new(1, 0), CascadeMode::Deterministic, &WaveletSpec::Haar)
            .unwrap();
        let back = forward(&f, &WaveletSpec::Haar).unwrap();
        for (a, b) in back.data().iter().zip(c.data()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_smoothness_cascade_btilde() {
        let g = DyadicGrid::new(2, 4).unwrap();
        let alpha = Anisotropy::isotropic(2).unwrap();
        let c = cascade_coefficients(g, 0.0, &alpha, &RngSpec::new(0, 0), CascadeMode::Deterministic, &WaveletSpec::Haar)
            .unwrap();
        let params = NormParams::new(0.0, 1.0, 1.0, alpha).unwrap();
        // Per axis: 1 + sum_{j=1}^{J} 2^{-j} 2^{j-1}.
        let want = (1.0 + 4.0 / 2.0f64).powi(2);
        assert!((btilde_norm(&c, &params).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn rademacher_cascade_has_signs() {
        let g = DyadicGrid::new(2, 4).unwrap();
        let alpha = Anisotropy::new(vec![0.6, 1.4]).unwrap();
        let c = cascade_coefficients(g, 0.8, &alpha, &RngSpec::new(3, 0), CascadeMode::Rademacher, &WaveletSpec::Haar)
            .unwrap();
        let neg = c.data().iter().filter(|v| v.re < 0.0).count();
        assert!(neg > 50 && neg < 200);
        for j in c.scales() {
            let want = (-0.8 * alpha.scaled_level(&j)).exp2();
            assert!(c.block(&j).iter().all(|v| (v.norm() - want).abs() < 1e-15));
        }
    }

    #[test]
    fn lacunary_tones_occupy_single_bands() {
        let g = DyadicGrid::new(1, 8).unwrap();
        let (f, truth) = synth_lemma1(g, 5, &RngSpec::new(9, 0), Lemma1Basis::Tones).unwrap();
        assert_eq!(truth.terms, Some(5));
        let spec = dft(&f);
        for (flat, c) in spec.coeffs().iter().enumerate() {
            let m = spec.frequency(flat)[0].unsigned_abs();
            let expected = m.is_power_of_two() && m <= 16;
            assert_eq!(c.norm() > 1e-12, expected, "m={m}");
            if expected {
                assert!((c.norm() - 0.5).abs() < 1e-12);
            }
        }
        // Khintchine at p=2: ||f||_2^2 = N/2 exactly.
        assert!((lp_norm(&f, 2.0).unwrap().powi(2) - 2.5).abs() < 1e-12);
        assert!(synth_lemma1(g, 7, &RngSpec::new(9, 0), Lemma1Basis::Tones).is_ok());
        assert!(synth_lemma1(g, 8, &RngSpec::new(9, 0), Lemma1Basis::Tones).is_err());
        assert!(synth_lemma1(g, 7, &RngSpec::new(9, 0), Lemma1Basis::Haar).is_err());
    }

    #[test]
    fn lacunary_haar_sum() {
        let g = DyadicGrid::new(1, 6).unwrap();
        let (f, truth) = synth_lemma1(g, 0, &RngSpec::new(2, 0), Lemma1Basis::Haar).unwrap();
        assert_eq!(truth.terms, Some(1));
        assert!(f.values().iter().all(|v| (v.re.abs() - 1.0).abs() < 1e-15));
        let (f, _) = synth_lemma1(g, 3, &RngSpec::new(2, 0), Lemma1Basis::Haar).unwrap();
        let c = forward(&f, &WaveletSpec::Haar).unwrap();
        // Mass sits on levels 1..=4 only, one constant modulus per level.
        for j in 0..=6 {
            let block = c.block(&[j]);
            let max = block.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if (1..=4).contains(&j) {
                assert!(block.iter().all(|v| (v.norm() - max).abs() < 1e-12 && max > 0.5));
            } else {
                assert!(max < 1e-12);
            }
        }
    }

    #[test]
    fn disjoint_family_norms() {
        let g = DyadicGrid::new(1, 10).unwrap();
        for p in [1.0, 2.0, 3.5] {
            for n in [0, 3, 8] {
                let (f, _) = synth_lemma2(g, n, p).unwrap();
                let want = ((n + 1) as f64).powf(1.0 / p);
                assert!((lp_norm(&f, p).unwrap() - want).abs() < 1e-12 * want);
            }
        }
        let (f, _) = synth_lemma2(g, 0, 2.0).unwrap();
        // Single wavelet of measure 1/2 and amplitude 2^{1/2}.
        assert!((lp_norm(&f, 2.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(synth_lemma2(g, 9, 2.0).is_err());
    }

    #[test]
    fn kernel_family_spectrum() {
        let g = DyadicGrid::new(1, 9).unwrap();
        let (f, _) = synth_lemma3(g, 0).unwrap();
        assert!(dft(&f).support_radius(1e-14) <= 1);
        let (f, _) = synth_lemma3(g, 6).unwrap();
        let spec = dft(&f);
        assert!(spec.support_radius(1e-14) < 128);
        assert!((spec.get(&[40]).re - theta0(40.0 / 64.0)).abs() < 1e-12);
        assert!(synth_lemma3(g, 7).is_err());
    }

    #[test]
    fn embedding_of_constant_is_a_tone() {
        let g = SampledField::constant(DyadicGrid::new(1, 6).unwrap(), 1.0);
        let alpha = Anisotropy::isotropic(2).unwrap();
        let f = tensor_embed(&g, 3, &alpha).unwrap();
        let spec = dft(&f);
        for (flat, c) in spec.coeffs().iter().enumerate() {
            let m = spec.frequency(flat);
            let want = if m[0].abs() == 8 && m[1] == 0 { 0.5 } else { 0.0 };
            assert!((c.norm() - want).abs() < 1e-12);
        }
        assert!(tensor_embed(&g, 5, &alpha).is_err());
        let (wide, _) = synth_lemma1(DyadicGrid::new(1, 6).unwrap(), 4, &RngSpec::new(0, 0), Lemma1Basis::Tones).unwrap();
        assert!(matches!(tensor_embed(&wide, 2, &alpha), Err(Error::SupportViolation(_))));
    }

    #[test]
    fn interval_rule() {
        assert_eq!(embed_level(9, 1.0, 1.0), 9);
        // alpha = (0.5, 1.5): sigma = 4/13.5 ~ 0.296.
        assert_eq!(embed_level(3, 0.5, 0.5), 2);
        assert_eq!(embed_level(5, 0.5, 0.5), 3);
        assert_eq!(embed_level(10, 0.5, 0.5), 5);
        assert_eq!(embed_level(4, 0.55, 0.55), 2);
    }

    #[test]
    fn bandlimited_generator() {
        let g = DyadicGrid::new(2, 5).unwrap();
        let rng = RngSpec::new(11, 3);
        let a = random_bandlimited(g, 6, SpectrumProfile::Flat, &rng).unwrap();
        let b = random_bandlimited(g, 6, SpectrumProfile::Flat, &rng).unwrap();
        assert_eq!(a, b);
        assert!(a.is_real());
        assert!(dft(&a).support_radius(1e-13) <= 6);
        let dc = random_bandlimited(g, 6, SpectrumProfile::DcOnly, &rng).unwrap();
        let v0 = dc.values()[0].re;
        assert!(v0 != 0.0 && dc.values().iter().all(|v| (v.re - v0).abs() < 1e-14));
        let decay = random_bandlimited(g, 8, SpectrumProfile::Decay { exponent: 1.0 }, &rng).unwrap();
        assert!(dft(&decay).support_radius(1e-13) <= 8);
        assert!(random_bandlimited(g, 9, SpectrumProfile::Flat, &rng).is_err());
    }
}
