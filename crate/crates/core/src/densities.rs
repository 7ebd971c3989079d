//! Analytic ground-truth densities: evaluation, sampling, characteristic
//! functions, and the closed-form Gaussian smoothing used for exact L2 inner
//! products against Gaussian-kernel estimators.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::math::{self, FRAC_1_SQRT_2PI};
use crate::rng::{SeedProvenance, StreamRng};

/// Weight-sum tolerance for mixtures.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Half-width, in component standard deviations, of Gaussian support windows.
const GAUSSIAN_WINDOW_SDS: f64 = 8.0;

/// Identifiers of the built-in catalog.
pub const CATALOG: [&str; 6] = ["gaussian", "exponential", "claw", "smooth_comb", "dens1", "dens2"];

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    dim: usize,
    weights: Vec<f64>,
    /// `k × dim`, row per component
    means: Vec<f64>,
    /// `k × dim` diagonal variances
    variances: Vec<f64>,
}

impl GaussianMixture {
    pub fn new(weights: Vec<f64>, means: Vec<Vec<f64>>, variances: Vec<Vec<f64>>) -> Result<Self> {
        let k = weights.len();
        if k == 0 {
            return Err(Error::invalid("mixture needs at least one component"));
        }
        if means.len() != k || variances.len() != k {
            return Err(Error::invalid("mixture weights, means and variances differ in length"));
        }
        let dim = means[0].len();
        if dim == 0 {
            return Err(Error::invalid("mixture dimension must be positive"));
        }
        if means.iter().chain(&variances).any(|r| r.len() != dim) {
            return Err(Error::invalid("mixture components disagree on dimension"));
        }
        validate_weights(&weights)?;
        let means: Vec<f64> = means.into_iter().flatten().collect();
        let variances: Vec<f64> = variances.into_iter().flatten().collect();
        if means.iter().any(|m| !m.is_finite()) {
            return Err(Error::invalid("mixture means must be finite"));
        }
        if variances.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::invalid("mixture variances must be positive and finite"));
        }
        Ok(GaussianMixture { dim, weights, means, variances })
    }

    /// One-dimensional mixture from weights, means and standard deviations.
    pub fn univariate(weights: &[f64], means: &[f64], sds: &[f64]) -> Result<Self> {
        Self::new(
            weights.to_vec(),
            means.iter().map(|&m| vec![m]).collect(),
            sds.iter().map(|&s| vec![s * s]).collect(),
        )
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn components(&self) -> usize {
        self.weights.len()
    }
    pub fn mean(&self, k: usize) -> &[f64] {
        &self.means[k * self.dim..(k + 1) * self.dim]
    }
    pub fn variance(&self, k: usize) -> &[f64] {
        &self.variances[k * self.dim..(k + 1) * self.dim]
    }

    /// `Σ_k w_k Π_j N(x_j − μ_kj; σ²_kj + extra_var)`
    fn convolved(&self, x: &[f64], extra_var: f64) -> f64 {
        (0..self.components())
            .map(|k| {
                let mu = self.mean(k);
                let var = self.variance(k);
                self.weights[k]
                    * (0..self.dim).map(|j| math::normal_pdf(x[j] - mu[j], var[j] + extra_var)).product::<f64>()
            })
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponential {
    rate: f64,
}

impl Exponential {
    pub fn new(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::invalid("exponential rate must be positive and finite"));
        }
        Ok(Exponential { rate })
    }
    pub fn rate(&self) -> f64 {
        self.rate
    }
}

/// `w·φ(x) + (1−w)·Σ_{i=1}^T 1{x ∈ (2(i−1)/T, (2i−1)/T]}`: a standard Gaussian
/// mixed with `T` unit-height blocks of width `1/T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockOscillatorMixture {
    blocks: usize,
    gaussian_weight: f64,
}

impl BlockOscillatorMixture {
    pub fn new(blocks: usize, gaussian_weight: f64) -> Result<Self> {
        if blocks < 1 {
            return Err(Error::invalid("block count must be at least 1"));
        }
        if !(0.0..=1.0).contains(&gaussian_weight) {
            return Err(Error::invalid("Gaussian mixing weight must lie in [0, 1]"));
        }
        Ok(BlockOscillatorMixture { blocks, gaussian_weight })
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }
    pub fn gaussian_weight(&self) -> f64 {
        self.gaussian_weight
    }

    /// Open-left, closed-right interval of block `i ∈ 1..=T`.
    pub fn interval(&self, i: usize) -> (f64, f64) {
        let t = self.blocks as f64;
        (2.0 * (i as f64 - 1.0) / t, (2.0 * i as f64 - 1.0) / t)
    }

    fn in_blocks(&self, x: f64) -> bool {
        if !(x > 0.0) {
            return false;
        }
        let guess = math::ceil(x * self.blocks as f64 / 2.0) as usize;
        (guess.saturating_sub(1).max(1)..=(guess + 1).min(self.blocks)).any(|i| {
            let (a, b) = self.interval(i);
            x > a && x <= b
        })
    }

    fn block_edges(&self) -> Vec<f64> {
        (1..=self.blocks).flat_map(|i| {
            let (a, b) = self.interval(i);
            [a, b]
        })
        .collect()
    }
}

type EvalFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type SampleFn = dyn Fn(&mut StreamRng, &mut [f64]) + Send + Sync;
type CharFn = dyn Fn(&[f64]) -> Complex64 + Send + Sync;

/// A user-supplied density.
#[derive(Clone)]
pub struct CustomDensity {
    dim: usize,
    eval: Arc<EvalFn>,
    sampler: Arc<SampleFn>,
    char_fn: Option<Arc<CharFn>>,
    sup_norm: f64,
    window: Vec<(f64, f64)>,
}

impl CustomDensity {
    /// `sampler` writes one point into the provided buffer of length `dim`.
    pub fn new(
        dim: usize,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        sampler: impl Fn(&mut StreamRng, &mut [f64]) + Send + Sync + 'static,
        sup_norm: f64,
        window: Vec<(f64, f64)>,
    ) -> Result<Self> {
        if dim == 0 || window.len() != dim {
            return Err(Error::invalid("custom density needs one support window per dimension"));
        }
        if !(sup_norm.is_finite() && sup_norm > 0.0) {
            return Err(Error::invalid("sup-norm bound must be positive and finite"));
        }
        if window.iter().any(|&(a, b)| !(a.is_finite() && b.is_finite() && a < b)) {
            return Err(Error::invalid("support window must be a finite nonempty box"));
        }
        Ok(CustomDensity { dim, eval: Arc::new(eval), sampler: Arc::new(sampler), char_fn: None, sup_norm, window })
    }

    pub fn with_char_fn(mut self, cf: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static) -> Self {
        self.char_fn = Some(Arc::new(cf));
        self
    }
}

impl fmt::Debug for CustomDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomDensity")
            .field("dim", &self.dim)
            .field("has_char_fn", &self.char_fn.is_some())
            .field("sup_norm", &self.sup_norm)
            .field("window", &self.window)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum DensityKind {
    GaussianMixture(GaussianMixture),
    Exponential(Exponential),
    BlockOscillatorMixture(BlockOscillatorMixture),
    Custom(CustomDensity),
}

/// An analytic density with a display name. Immutable once built.
#[derive(Debug, Clone)]
pub struct DensityModel {
    name: String,
    kind: DensityKind,
}

impl DensityModel {
    pub fn new(name: impl Into<String>, kind: DensityKind) -> Self {
        DensityModel { name: name.into(), kind }
    }

    pub fn standard_gaussian() -> Self {
        let mix = GaussianMixture::univariate(&[1.0], &[0.0], &[1.0]).expect("valid");
        Self::new("gaussian", DensityKind::GaussianMixture(mix))
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        Ok(Self::new("exponential", DensityKind::Exponential(Exponential::new(rate)?)))
    }

    /// Marron & Wand (1992) density #10, the claw:
    /// `½N(0,1) + Σ_{l=0}^{4} (1/10) N(l/2 − 1, (1/10)²)`.
    pub fn claw() -> Self {
        let mut w = vec![0.5];
        let mut mu = vec![0.0];
        let mut sd = vec![1.0];
        for l in 0..5 {
            w.push(0.1);
            mu.push(l as f64 / 2.0 - 1.0);
            sd.push(0.1);
        }
        let mix = GaussianMixture::univariate(&w, &mu, &sd).expect("valid");
        Self::new("claw", DensityKind::GaussianMixture(mix))
    }

    /// Marron & Wand (1992) density #14, the smooth comb:
    /// `Σ_{l=0}^{5} (2^{5−l}/63) N((65 − 96·2^{−l})/21, (32/63)²/2^{2l})`.
    pub fn smooth_comb() -> Self {
        let mut w = Vec::new();
        let mut mu = Vec::new();
        let mut sd = Vec::new();
        for l in 0..6 {
            let half_l = math::powi(0.5, l);
            w.push(math::powi(2.0, 5 - l) / 63.0);
            mu.push((65.0 - 96.0 * half_l) / 21.0);
            sd.push(32.0 / 63.0 * half_l);
        }
        let mix = GaussianMixture::univariate(&w, &mu, &sd).expect("valid");
        Self::new("smooth_comb", DensityKind::GaussianMixture(mix))
    }

    pub fn block_oscillator(name: impl Into<String>, blocks: usize, gaussian_weight: f64) -> Result<Self> {
        let b = BlockOscillatorMixture::new(blocks, gaussian_weight)?;
        Ok(Self::new(name, DensityKind::BlockOscillatorMixture(b)))
    }

    /// Half Gaussian, half 14 oscillating blocks.
    pub fn dens1() -> Self {
        Self::block_oscillator("dens1", 14, 0.5).expect("valid")
    }

    /// Half Gaussian, half 10 oscillating blocks.
    pub fn dens2() -> Self {
        Self::block_oscillator("dens2", 10, 0.5).expect("valid")
    }

    /// Looks up a built-in model by id (see [`CATALOG`]).
    pub fn catalog(id: &str) -> Result<Self> {
        match id {
            "gaussian" | "normal" => Ok(Self::standard_gaussian()),
            "exponential" => Self::exponential(1.0),
            "claw" => Ok(Self::claw()),
            "smooth_comb" => Ok(Self::smooth_comb()),
            "dens1" => Ok(Self::dens1()),
            "dens2" => Ok(Self::dens2()),
            other => Err(Error::invalid(format!("unknown density id '{other}'"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            DensityKind::GaussianMixture(g) => g.dim,
            DensityKind::Exponential(_) | DensityKind::BlockOscillatorMixture(_) => 1,
            DensityKind::Custom(c) => c.dim,
        }
    }

    /// `p(x)`
    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim(), "point dimension does not match the density");
        match &self.kind {
            DensityKind::GaussianMixture(g) => g.convolved(x, 0.0),
            DensityKind::Exponential(e) => {
                if x[0] < 0.0 {
                    0.0
                } else {
                    e.rate * math::exp(-e.rate * x[0])
                }
            }
            DensityKind::BlockOscillatorMixture(b) => {
                let gauss = b.gaussian_weight * math::std_normal_pdf(x[0]);
                if b.in_blocks(x[0]) {
                    gauss + (1.0 - b.gaussian_weight)
                } else {
                    gauss
                }
            }
            DensityKind::Custom(c) => (c.eval)(x),
        }
    }

    /// Scalar evaluation for one-dimensional models.
    pub fn eval1(&self, x: f64) -> f64 {
        self.eval(core::slice::from_ref(&x))
    }

    /// Draws `n` i.i.d. points from the stream identified by `seed`.
    pub fn sample(&self, n: usize, seed: SeedProvenance) -> Result<SamplePoints> {
        if n == 0 {
            return Err(Error::invalid("sample size must be at least 1"));
        }
        let d = self.dim();
        let mut rng = seed.rng();
        let mut data = vec![0.0; n * d];
        for point in data.chunks_exact_mut(d) {
            self.draw(&mut rng, point);
        }
        let mut s = SamplePoints::new(d, data)?;
        s.provenance = Some(seed);
        Ok(s)
    }

    fn draw(&self, rng: &mut StreamRng, out: &mut [f64]) {
        match &self.kind {
            DensityKind::GaussianMixture(g) => {
                let k = pick_component(rng, &g.weights);
                let mu = g.mean(k);
                let var = g.variance(k);
                for j in 0..g.dim {
                    let z: f64 = rng.sample(StandardNormal);
                    out[j] = mu[j] + math::sqrt(var[j]) * z;
                }
            }
            DensityKind::Exponential(e) => {
                let z: f64 = rng.sample(Exp1);
                out[0] = z / e.rate;
            }
            DensityKind::BlockOscillatorMixture(b) => {
                let u: f64 = rng.random();
                if u < b.gaussian_weight {
                    out[0] = rng.sample(StandardNormal);
                } else {
                    let i = rng.random_range(1..=b.blocks);
                    let (lo, hi) = b.interval(i);
                    // (lo, hi]: 1 − U with U ∈ [0, 1) is in (0, 1]
                    let v: f64 = 1.0 - rng.random::<f64>();
                    out[0] = lo + v * (hi - lo);
                }
            }
            DensityKind::Custom(c) => (c.sampler)(rng, out),
        }
    }

    /// Characteristic function `φ(t) = E e^{i tᵀX}`.
    pub fn char_fn(&self, t: &[f64]) -> Result<Complex64> {
        if t.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: t.len() });
        }
        Ok(match &self.kind {
            DensityKind::GaussianMixture(g) => (0..g.components())
                .map(|k| {
                    let mu = g.mean(k);
                    let var = g.variance(k);
                    let phase: f64 = (0..g.dim).map(|j| t[j] * mu[j]).sum();
                    let damp: f64 = (0..g.dim).map(|j| -0.5 * var[j] * t[j] * t[j]).sum();
                    Complex64::from_polar(g.weights[k] * math::exp(damp), phase)
                })
                .sum(),
            DensityKind::Exponential(e) => Complex64::new(e.rate, 0.0) / Complex64::new(e.rate, -t[0]),
            DensityKind::BlockOscillatorMixture(b) => {
                let s = t[0];
                let gauss = b.gaussian_weight * math::exp(-0.5 * s * s);
                let blocks: Complex64 = (1..=b.blocks)
                    .map(|i| {
                        let (lo, hi) = b.interval(i);
                        let width = hi - lo;
                        // ∫_lo^hi e^{isx} dx = width · sinc(s·width/2) · e^{is(lo+hi)/2}
                        Complex64::from_polar(width * sinc(0.5 * s * width), 0.5 * s * (lo + hi))
                    })
                    .sum();
                blocks * (1.0 - b.gaussian_weight) + gauss
            }
            DensityKind::Custom(c) => match &c.char_fn {
                Some(cf) => cf(t),
                None => return Err(Error::unsupported(format!("density '{}' has no characteristic function", self.name))),
            },
        })
    }

    pub fn has_char_fn(&self) -> bool {
        !matches!(&self.kind, DensityKind::Custom(c) if c.char_fn.is_none())
    }

    /// Upper bound `L` on `‖p‖_∞`.
    pub fn sup_norm_bound(&self) -> f64 {
        match &self.kind {
            DensityKind::GaussianMixture(g) => (0..g.components())
                .map(|k| {
                    g.weights[k]
                        * g.variance(k).iter().map(|v| 1.0 / math::sqrt(2.0 * math::PI * v)).product::<f64>()
                })
                .sum(),
            DensityKind::Exponential(e) => e.rate,
            DensityKind::BlockOscillatorMixture(b) => {
                b.gaussian_weight * FRAC_1_SQRT_2PI + (1.0 - b.gaussian_weight)
            }
            DensityKind::Custom(c) => c.sup_norm,
        }
    }

    /// Box outside of which the density carries less than ~1e-14 mass.
    pub fn support_window(&self) -> Vec<(f64, f64)> {
        match &self.kind {
            DensityKind::GaussianMixture(g) => (0..g.dim)
                .map(|j| {
                    let mut lo = f64::INFINITY;
                    let mut hi = f64::NEG_INFINITY;
                    let mut sd_max = 0.0f64;
                    for k in 0..g.components() {
                        lo = lo.min(g.mean(k)[j]);
                        hi = hi.max(g.mean(k)[j]);
                        sd_max = sd_max.max(math::sqrt(g.variance(k)[j]));
                    }
                    (lo - GAUSSIAN_WINDOW_SDS * sd_max, hi + GAUSSIAN_WINDOW_SDS * sd_max)
                })
                .collect(),
            DensityKind::Exponential(e) => vec![(0.0, 40.0 / e.rate)],
            DensityKind::BlockOscillatorMixture(_) => vec![(-8.0, 8.0)],
            DensityKind::Custom(c) => c.window.clone(),
        }
    }

    /// Points of discontinuity (one-dimensional models only).
    pub fn discontinuities(&self) -> Vec<f64> {
        match &self.kind {
            DensityKind::Exponential(_) => vec![0.0],
            DensityKind::BlockOscillatorMixture(b) => b.block_edges(),
            _ => Vec::new(),
        }
    }

    /// Distribution function of a one-dimensional model.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        match &self.kind {
            DensityKind::GaussianMixture(g) if g.dim == 1 => Ok((0..g.components())
                .map(|k| g.weights[k] * math::std_normal_cdf((x - g.mean(k)[0]) / math::sqrt(g.variance(k)[0])))
                .sum()),
            DensityKind::Exponential(e) => Ok(if x <= 0.0 { 0.0 } else { 1.0 - math::exp(-e.rate * x) }),
            DensityKind::BlockOscillatorMixture(b) => {
                let blocks: f64 = (1..=b.blocks)
                    .map(|i| {
                        let (lo, hi) = b.interval(i);
                        (x - lo).clamp(0.0, hi - lo)
                    })
                    .sum();
                Ok(b.gaussian_weight * math::std_normal_cdf(x) + (1.0 - b.gaussian_weight) * blocks)
            }
            _ => Err(Error::unsupported("closed-form CDF is only available for built-in univariate models")),
        }
    }

    /// `‖p‖² = ∫ p²`, in closed form.
    pub fn l2_norm_sq(&self) -> Result<f64> {
        match &self.kind {
            DensityKind::GaussianMixture(g) => {
                let k = g.components();
                let mut total = 0.0;
                for a in 0..k {
                    for b in 0..k {
                        let mut prod = g.weights[a] * g.weights[b];
                        for j in 0..g.dim {
                            prod *= math::normal_pdf(
                                g.mean(a)[j] - g.mean(b)[j],
                                g.variance(a)[j] + g.variance(b)[j],
                            );
                        }
                        total += prod;
                    }
                }
                Ok(total)
            }
            DensityKind::Exponential(e) => Ok(0.5 * e.rate),
            DensityKind::BlockOscillatorMixture(b) => {
                let w = b.gaussian_weight;
                let gauss_mass_on_blocks: f64 = (1..=b.blocks)
                    .map(|i| {
                        let (lo, hi) = b.interval(i);
                        math::std_normal_cdf(hi) - math::std_normal_cdf(lo)
                    })
                    .sum();
                Ok(w * w * 0.5 / math::sqrt(math::PI)
                    + 2.0 * w * (1.0 - w) * gauss_mass_on_blocks
                    + (1.0 - w) * (1.0 - w))
            }
            DensityKind::Custom(_) => Err(Error::unsupported("closed-form L2 norm of a custom density")),
        }
    }

    /// `(p ⋆ N(0, s²I))(x) = ∫ p(y) Π_j φ_s(x_j − y_j) dy`.
    ///
    /// For a Gaussian-kernel estimator with bandwidth `s` centred at `X_i`,
    /// `⟨K_s(· − X_i), p⟩` is exactly this quantity at `x = X_i`.
    pub fn gaussian_smoothed(&self, x: &[f64], s: f64) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        match &self.kind {
            DensityKind::GaussianMixture(g) => Ok(g.convolved(x, s * s)),
            DensityKind::Exponential(e) => {
                // rate · exp(−rate·x + rate²s²/2) · Φ(x/s − rate·s)
                let r = e.rate;
                let log_v = math::ln(r) - r * x[0] + 0.5 * r * r * s * s + math::ln_std_normal_cdf(x[0] / s - r * s);
                Ok(math::exp(log_v))
            }
            DensityKind::BlockOscillatorMixture(b) => {
                let gauss = b.gaussian_weight * math::normal_pdf(x[0], 1.0 + s * s);
                let blocks: f64 = (1..=b.blocks)
                    .map(|i| {
                        let (lo, hi) = b.interval(i);
                        math::std_normal_cdf((x[0] - lo) / s) - math::std_normal_cdf((x[0] - hi) / s)
                    })
                    .sum();
                Ok(gauss + (1.0 - b.gaussian_weight) * blocks)
            }
            DensityKind::Custom(_) => Err(Error::unsupported("Gaussian smoothing of a custom density")),
        }
    }

    pub fn supports_gaussian_smoothing(&self) -> bool {
        !matches!(self.kind, DensityKind::Custom(_))
    }
}

fn validate_weights(w: &[f64]) -> Result<()> {
    if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::invalid("mixture weights must be nonnegative"));
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::invalid(format!("mixture weights sum to {sum}, not 1")));
    }
    Ok(())
}

fn pick_component(rng: &mut StreamRng, weights: &[f64]) -> usize {
    if weights.len() == 1 {
        return 0;
    }
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return k;
        }
    }
    weights.len() - 1
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        math::sin(x) / x
    }
}

/// `n` points in `R^d`, stored row-major, with the seed that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePoints {
    dim: usize,
    data: Vec<f64>,
    provenance: Option<SeedProvenance>,
}

impl SamplePoints {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if data.is_empty() {
            return Err(Error::invalid("sample must contain at least one point"));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::invalid("coordinate count is not a multiple of the dimension"));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("coordinate {} of point {}", i % dim, i / dim)));
        }
        Ok(SamplePoints { dim, data, provenance: None })
    }

    pub fn from_scalars(xs: Vec<f64>) -> Result<Self> {
        Self::new(1, xs)
    }

    pub fn with_provenance(mut self, p: SeedProvenance) -> Self {
        self.provenance = Some(p);
        self
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.data.len() / self.dim
    }
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }
    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
    pub fn provenance(&self) -> Option<SeedProvenance> {
        self.provenance
    }
    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    /// Points at the given indices, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<SamplePoints> {
        let mut data = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            if i >= self.n() {
                return Err(Error::invalid(format!("index {i} out of range for {} points", self.n())));
            }
            data.extend_from_slice(self.point(i));
        }
        SamplePoints::new(self.dim, data)
    }
}

impl fmt::Display for DensityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl DensityKind {
    /// Variant tag as used in fixture files.
    pub fn tag(&self) -> &'static str {
        match self {
            DensityKind::GaussianMixture(_) => "GaussianMixture",
            DensityKind::Exponential(_) => "Exponential",
            DensityKind::BlockOscillatorMixture(_) => "BlockOscillatorMixture",
            DensityKind::Custom(_) => "Custom",
        }
    }
}
