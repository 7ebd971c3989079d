//! Kernel density estimators, the geometric bandwidth grid, split sizes, the
//! Fourier representation of MISE, and Pinsker minimax quantities.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::densities::{DensityModel, SamplePoints};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::math::{self, PI};
use crate::quadrature::{integrate, integrate_to_infinity, Tolerance};

/// `p̂(x) = (m h^d)^{-1} Σᵢ K((Xᵢ − x)/h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KdeEstimator {
    points: Arc<SamplePoints>,
    bandwidth: f64,
    kernel: KernelSpec,
    norm: f64,
}

impl KdeEstimator {
    pub fn fit(points: impl Into<Arc<SamplePoints>>, bandwidth: f64, kernel: KernelSpec) -> Result<Self> {
        let points = points.into();
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(Error::invalid(format!("bandwidth must be positive, got {bandwidth}")));
        }
        if points.dim() != kernel.dim() {
            return Err(Error::DimensionMismatch { expected: kernel.dim(), found: points.dim() });
        }
        if !kernel.spatially_evaluable() {
            return Err(Error::unsupported(format!("kernel {} has no spatial form in d = {}", kernel.name(), kernel.dim())));
        }
        let m = points.n() as f64;
        let norm = 1.0 / (m * math::powi(bandwidth, points.dim() as i32));
        Ok(KdeEstimator { points, bandwidth, kernel, norm })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }
    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }
    pub fn points(&self) -> &SamplePoints {
        &self.points
    }
    pub fn shared_points(&self) -> &Arc<SamplePoints> {
        &self.points
    }
    pub fn m(&self) -> usize {
        self.points.n()
    }
    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    /// Unnormalized `K((Xᵢ − x)/h)`.
    #[inline]
    fn term(&self, i: usize, x: &[f64]) -> f64 {
        let xi = self.points.point(i);
        let h = self.bandwidth;
        if xi.len() == 1 {
            self.kernel.eval1((xi[0] - x[0]) / h)
        } else {
            // only the Gaussian kernel is spatially evaluable for d ≥ 2
            let r2: f64 = xi.iter().zip(x).map(|(a, b)| ((a - b) / h) * ((a - b) / h)).sum();
            math::exp(-0.5 * r2) * math::powi(math::FRAC_1_SQRT_2PI, xi.len() as i32)
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim(), "point dimension does not match the estimator");
        self.norm * math::pairwise_sum_by(self.m(), |i| self.term(i, x))
    }

    pub fn eval1(&self, x: f64) -> f64 {
        self.eval(core::slice::from_ref(&x))
    }

    /// Values at every point of `grid`; identical to the pointwise loop.
    pub fn eval_batch(&self, grid: &SamplePoints) -> Vec<f64> {
        grid.iter().map(|x| self.eval(x)).collect()
    }

    /// Leave-one-out value `p̂_{−i}(Xᵢ) = ((m−1)h^d)^{-1} Σ_{j≠i} K((X_j − Xᵢ)/h)`.
    pub fn loo_eval(&self, i: usize) -> Result<f64> {
        let m = self.m();
        if m < 2 {
            return Err(Error::invalid("leave-one-out needs at least two training points"));
        }
        if i >= m {
            return Err(Error::invalid(format!("index {i} out of range for {m} points")));
        }
        let xi = self.points.point(i);
        let s = math::pairwise_sum_by(m, |j| if j == i { 0.0 } else { self.term(j, xi) });
        Ok(s / ((m - 1) as f64 * math::powi(self.bandwidth, self.dim() as i32)))
    }

    /// Empirical characteristic function `m^{-1} Σ e^{i tXᵢ}` of the training
    /// points (one-dimensional).
    pub fn empirical_cf(&self, t: f64) -> Complex64 {
        empirical_cf(&self.points, t)
    }
}

/// Empirical characteristic function of a one-dimensional sample.
pub fn empirical_cf(points: &SamplePoints, t: f64) -> Complex64 {
    let xs = points.as_slice();
    let m = xs.len() as f64;
    let re = math::pairwise_sum_by(xs.len(), |i| math::cos(t * xs[i]));
    let im = math::pairwise_sum_by(xs.len(), |i| math::sin(t * xs[i]));
    Complex64::new(re / m, im / m)
}

/// Fits a KDE (free-function form).
pub fn fit_kde(points: impl Into<Arc<SamplePoints>>, bandwidth: f64, kernel: KernelSpec) -> Result<KdeEstimator> {
    KdeEstimator::fit(points, bandwidth, kernel)
}

/// Weakly geometric bandwidth grid on `[h₀, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthGrid {
    pub n: usize,
    pub dim: usize,
    pub a0: f64,
    pub h0: f64,
    pub a_n: f64,
    values: Vec<f64>,
}

impl BandwidthGrid {
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `h₀ = (n log n)^{−1/d}`, `a_n = a₀/log n`, `h_j = (1+a_n)^j h₀` for
/// `j ≤ M−2 = max{j : h₀(1+a_n)^j < 1}`, and `h_{M−1} = 1`.
pub fn bandwidth_grid(n: usize, dim: usize, a0: f64) -> Result<BandwidthGrid> {
    if n < 3 {
        return Err(Error::invalid("bandwidth grid needs n ≥ 3"));
    }
    if dim == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    if !(a0.is_finite() && a0 > 0.0) {
        return Err(Error::invalid("a0 must be positive"));
    }
    let log_n = math::ln(n as f64);
    let h0 = math::powf(n as f64 * log_n, -1.0 / dim as f64);
    let a_n = a0 / log_n;
    let mut values = Vec::new();
    let mut j = 0i32;
    loop {
        let h = h0 * math::powf(1.0 + a_n, j as f64);
        if h >= 1.0 {
            break;
        }
        values.push(h);
        j += 1;
    }
    values.push(1.0);
    Ok(BandwidthGrid { n, dim, a0, h0, a_n, values })
}

/// How a sample of size `n` is divided into training and validation parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitScheme {
    /// `m = ⌊n(1 − 1/log n)⌋`, `ℓ = n − m ≥ n/log n`.
    Asymptotic,
    /// `m = ⌈n/2⌉`, `ℓ = ⌊n/2⌋`: training gets the odd point.
    EqualHalves,
    /// `m = round(f·n)` clamped to `[1, n−1]`.
    TrainingFraction(f64),
}

/// Training and validation sizes `(m, ℓ)` with `m + ℓ = n`.
///
/// The asymptotic scheme gives `m = 0` at `n = 3`; callers that fit
/// estimators on the training part will reject that.
pub fn split_sizes(n: usize, scheme: SplitScheme) -> Result<(usize, usize)> {
    if n < 3 {
        return Err(Error::invalid("splitting needs n ≥ 3"));
    }
    let m = match scheme {
        SplitScheme::Asymptotic => {
            let nf = n as f64;
            math::floor(nf * (1.0 - 1.0 / math::ln(nf))) as usize
        }
        SplitScheme::EqualHalves => n.div_ceil(2),
        SplitScheme::TrainingFraction(f) => {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::invalid("training fraction must lie in (0, 1)"));
            }
            (libm::round(f * n as f64) as usize).clamp(1, n - 1)
        }
    };
    Ok((m, n - m))
}

/// Quadrature tolerance used by the Fourier-domain risk routines.
pub fn fourier_tolerance() -> Tolerance {
    Tolerance::new(1e-14, 1e-9).with_max_segments(8000)
}

/// Exact MISE of a one-dimensional KDE with `n` points and bandwidth `h`:
///
/// `(2π)^{-1} ∫ |1 − F[K](ht)|² |φ(t)|² + n^{-1}(1 − |φ(t)|²) F[K](ht)² dt`.
pub fn fourier_mise<C>(kernel: &KernelSpec, h: f64, n: usize, cf: C) -> Result<f64>
where
    C: Fn(f64) -> Complex64,
{
    if kernel.dim() != 1 {
        return Err(Error::unsupported("Fourier MISE is implemented for d = 1"));
    }
    if !(h > 0.0) || n == 0 {
        return Err(Error::invalid("fourier_mise needs h > 0 and n ≥ 1"));
    }
    let inv_n = 1.0 / n as f64;
    let integrand = |t: f64| {
        let phi2 = cf(t).norm_sqr();
        let fk = kernel.ft_radial(h * t);
        let bias = 1.0 - fk;
        bias * bias * phi2 + inv_n * (1.0 - phi2) * fk * fk
    };
    let tol = fourier_tolerance();
    let t_k = kernel.ft_support().unwrap_or_else(|| kernel.ft_cutoff(1e-12)) / h;
    let body = integrate(integrand, 0.0, t_k, tol)?;
    let tail = integrate_to_infinity(integrand, t_k, tol)?;
    // even integrand: (2π)^{-1}·2∫₀^∞
    Ok((body.value + tail.value) / PI)
}

/// [`fourier_mise`] for a density model's characteristic function.
pub fn fourier_mise_for(kernel: &KernelSpec, h: f64, n: usize, truth: &DensityModel) -> Result<f64> {
    if !truth.has_char_fn() {
        return Err(Error::unsupported(format!("density '{}' has no characteristic function", truth.name())));
    }
    fourier_mise(kernel, h, n, |t| truth.char_fn(&[t]).unwrap_or_default())
}

/// Sobolev functional `∫ |t|^{2β} |φ(t)|² dt` of a one-dimensional density.
pub fn sobolev_functional(truth: &DensityModel, beta: f64) -> Result<f64> {
    if truth.dim() != 1 {
        return Err(Error::unsupported("Sobolev functional is implemented for d = 1"));
    }
    if !truth.has_char_fn() {
        return Err(Error::unsupported(format!("density '{}' has no characteristic function", truth.name())));
    }
    let f = |t: f64| math::powf(t, 2.0 * beta) * truth.char_fn(&[t]).map(|c| c.norm_sqr()).unwrap_or(0.0);
    let tol = fourier_tolerance();
    let body = integrate(f, 0.0, 1.0, tol)?;
    let tail = integrate_to_infinity(f, 1.0, tol)?;
    Ok(2.0 * (body.value + tail.value))
}

/// Pinsker minimax constant and optimal bandwidth constant for `Θ(β, Q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimaxQuantities {
    pub beta: f64,
    pub q: f64,
    pub dim: usize,
    /// `C* = [Q(2β+d)]^{d/(2β+d)} / (d(2π)^d) · (βS_d/(β+d))^{2β/(2β+d)}`
    pub c_star: f64,
    /// `D* = (βS_d / (Q(β+d)(2β+d)))^{1/(2β+d)}`
    pub d_star: f64,
    /// Surface of the unit sphere in `R^d`.
    pub s_d: f64,
}

impl MinimaxQuantities {
    pub fn new(beta: f64, q: f64, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        let d = dim as f64;
        if !(beta.is_finite() && beta > d / 2.0) {
            return Err(Error::invalid(format!("need β > d/2, got β = {beta}, d = {dim}")));
        }
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::invalid("Q must be positive"));
        }
        let s_d = math::unit_sphere_surface(dim);
        let denom = 2.0 * beta + d;
        let c_star = math::powf(q * denom, d / denom) / (d * math::powi(2.0 * PI, dim as i32))
            * math::powf(beta * s_d / (beta + d), 2.0 * beta / denom);
        let d_star = math::powf(beta * s_d / (q * (beta + d) * denom), 1.0 / denom);
        Ok(MinimaxQuantities { beta, q, dim, c_star, d_star, s_d })
    }

    /// `h*(n) = D* n^{−1/(2β+d)}`
    pub fn optimal_bandwidth(&self, n: usize) -> f64 {
        self.d_star * math::powf(n as f64, -1.0 / (2.0 * self.beta + self.dim as f64))
    }

    /// `C* n^{−2β/(2β+d)}`
    pub fn risk_bound(&self, n: usize) -> f64 {
        let d = self.dim as f64;
        self.c_star * math::powf(n as f64, -2.0 * self.beta / (2.0 * self.beta + d))
    }

    /// Relative residual of `∫ ‖t‖^β F[K_β](ht) dt = Q n h^β`, with the left
    /// side integrated radially by quadrature.
    pub fn bandwidth_equation_residual(&self, n: usize, h: f64) -> Result<f64> {
        let (b, d) = (self.beta, self.dim as f64);
        let lhs = self.s_d
            * integrate(
                |r| math::powf(r, b + d - 1.0) * (1.0 - math::powf(h * r, b)).max(0.0),
                0.0,
                1.0 / h,
                Tolerance::new(0.0, 1e-13),
            )?
            .value;
        let rhs = self.q * n as f64 * math::powf(h, b);
        Ok((lhs - rhs).abs() / rhs)
    }
}

/// `C*` of [`MinimaxQuantities`].
pub fn pinsker_constant(beta: f64, q: f64, dim: usize) -> Result<f64> {
    Ok(MinimaxQuantities::new(beta, q, dim)?.c_star)
}

/// `h*(n)` of [`MinimaxQuantities`].
pub fn pinsker_optimal_bandwidth(beta: f64, q: f64, dim: usize, n: usize) -> Result<f64> {
    Ok(MinimaxQuantities::new(beta, q, dim)?.optimal_bandwidth(n))
}
