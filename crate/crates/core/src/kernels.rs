//! Kernel catalog with spatial and Fourier-domain evaluation.
//!
//! All transforms use `F[K](t) = ∫ e^{i xᵀt} K(x) dx`. Every catalog kernel is
//! radial in frequency, so transforms are evaluated through `‖t‖`.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{self, PI};
use crate::quadrature::{integrate, Tolerance};

/// Chebyshev abscissae in the Pinsker spatial table.
pub const PINSKER_TABLE_NODES: usize = 4096;
/// Right end of the tabulated range; beyond it the asymptotic expansion is used.
pub const PINSKER_TABLE_XMAX: f64 = 500.0;

#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    /// Standard `N(0, I_d)` density.
    Gaussian { dim: usize },
    /// Fourier transform `(1 − ‖t‖^β)₊`.
    Pinsker(PinskerKernel),
    /// `½ e^{−|x|/√2} sin(|x|/√2 + π/4)`, transform `1/(1 + t⁴)`. One-dimensional.
    Silverman,
    /// `sin(x)/(πx)`, transform `1{|t| ≤ 1}`. One-dimensional, not integrable.
    Sinc,
}

#[derive(Debug, Clone)]
pub struct PinskerKernel {
    beta: f64,
    dim: usize,
    table: Option<Arc<SpatialTable>>,
}

impl PartialEq for PinskerKernel {
    fn eq(&self, other: &Self) -> bool {
        self.beta == other.beta && self.dim == other.dim
    }
}

impl PinskerKernel {
    pub fn beta(&self) -> f64 {
        self.beta
    }
}

impl KernelSpec {
    pub fn gaussian(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("kernel dimension must be positive"));
        }
        Ok(KernelSpec::Gaussian { dim })
    }

    /// Pinsker kernel of smoothness `beta`. In one dimension the spatial form
    /// is tabulated eagerly.
    pub fn pinsker(beta: f64, dim: usize) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::invalid("Pinsker exponent must be positive"));
        }
        if dim == 0 {
            return Err(Error::invalid("kernel dimension must be positive"));
        }
        let table = if dim == 1 { Some(Arc::new(SpatialTable::pinsker(beta)?)) } else { None };
        Ok(KernelSpec::Pinsker(PinskerKernel { beta, dim, table }))
    }

    /// Parses `"gaussian"`, `"pinsker:<beta>"`, `"silverman"` or `"sinc"`.
    pub fn parse(name: &str, dim: usize) -> Result<Self> {
        let lower = name.trim().to_ascii_lowercase();
        let one_d = |k: KernelSpec| {
            if dim == 1 {
                Ok(k)
            } else {
                Err(Error::unsupported(format!("kernel '{lower}' is only defined for d = 1")))
            }
        };
        match lower.as_str() {
            "gaussian" => Self::gaussian(dim),
            "silverman" => one_d(KernelSpec::Silverman),
            "sinc" => one_d(KernelSpec::Sinc),
            s => match s.strip_prefix("pinsker:") {
                Some(b) => {
                    let beta: f64 = b.parse().map_err(|_| Error::invalid(format!("bad Pinsker exponent '{b}'")))?;
                    Self::pinsker(beta, dim)
                }
                None => Err(Error::invalid(format!("unknown kernel '{name}'"))),
            },
        }
    }

    pub fn name(&self) -> String {
        match self {
            KernelSpec::Gaussian { .. } => "gaussian".into(),
            KernelSpec::Pinsker(p) => format!("pinsker:{}", p.beta),
            KernelSpec::Silverman => "silverman".into(),
            KernelSpec::Sinc => "sinc".into(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            KernelSpec::Gaussian { dim } => *dim,
            KernelSpec::Pinsker(p) => p.dim,
            KernelSpec::Silverman | KernelSpec::Sinc => 1,
        }
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self, KernelSpec::Gaussian { .. })
    }

    /// `F[K]` as a function of `r = ‖t‖`, clamped to `[0, 1]`.
    #[inline]
    pub fn ft_radial(&self, r: f64) -> f64 {
        let r = r.abs();
        let v = match self {
            KernelSpec::Gaussian { .. } => math::exp(-0.5 * r * r),
            KernelSpec::Pinsker(p) => {
                if r >= 1.0 {
                    0.0
                } else {
                    1.0 - math::powf(r, p.beta)
                }
            }
            KernelSpec::Silverman => {
                let r2 = r * r;
                1.0 / (1.0 + r2 * r2)
            }
            KernelSpec::Sinc => {
                if r <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
        };
        v.clamp(0.0, 1.0)
    }

    /// `F[K](t)`
    pub fn ft(&self, t: &[f64]) -> f64 {
        self.ft_radial(crate::linalg::norm2(t))
    }

    /// Whether `F[K]` is infinitely differentiable at the origin.
    pub fn ft_smooth_at_origin(&self) -> bool {
        match self {
            KernelSpec::Pinsker(p) => p.beta % 2.0 == 0.0,
            _ => true,
        }
    }

    /// `(A, p)` with `K(x) ≈ A|x|^{−p}` as `|x| → ∞` up to oscillating terms,
    /// for one-dimensional kernels with algebraic tails.
    pub fn far_field(&self) -> Option<(f64, f64)> {
        match self {
            KernelSpec::Pinsker(p) if p.dim == 1 => {
                let b = p.beta;
                Some((-math::tgamma(b + 1.0) * math::cos(0.5 * PI * (b + 1.0)) / PI, b + 1.0))
            }
            _ => None,
        }
    }

    /// Radius of the support of `F[K]` when it is compact.
    pub fn ft_support(&self) -> Option<f64> {
        match self {
            KernelSpec::Pinsker(_) | KernelSpec::Sinc => Some(1.0),
            _ => None,
        }
    }

    /// Smallest radius beyond which `F[K] ≤ eps`.
    pub fn ft_cutoff(&self, eps: f64) -> f64 {
        match self {
            KernelSpec::Gaussian { .. } => math::sqrt(-2.0 * math::ln(eps)),
            KernelSpec::Silverman => math::powf(1.0 / eps - 1.0, 0.25),
            KernelSpec::Pinsker(_) | KernelSpec::Sinc => 1.0,
        }
    }

    /// Spatial value `K(x)`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        match self {
            KernelSpec::Gaussian { dim } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                Ok(math::exp(-0.5 * r2) * math::powi(math::FRAC_1_SQRT_2PI, *dim as i32))
            }
            KernelSpec::Pinsker(p) if p.table.is_none() => Err(Error::unsupported(format!(
                "spatial Pinsker kernel in d = {}; use Fourier-domain routines",
                p.dim
            ))),
            _ => Ok(self.eval1(x[0])),
        }
    }

    /// Spatial value of a kernel on the real line.
    ///
    /// # Panics
    /// On a Pinsker kernel of dimension ≥ 2.
    #[inline]
    pub fn eval1(&self, x: f64) -> f64 {
        match self {
            KernelSpec::Gaussian { .. } => math::std_normal_pdf(x),
            KernelSpec::Pinsker(p) => p.table.as_ref().expect("spatial table exists only for d = 1").eval(x),
            KernelSpec::Silverman => {
                let a = x.abs() * math::FRAC_1_SQRT_2;
                0.5 * math::exp(-a) * math::sin(a + 0.25 * PI)
            }
            KernelSpec::Sinc => {
                if x.abs() < 1e-8 {
                    1.0 / PI
                } else {
                    math::sin(x) / (PI * x)
                }
            }
        }
    }

    /// Whether [`KernelSpec::eval`] is available.
    pub fn spatially_evaluable(&self) -> bool {
        !matches!(self, KernelSpec::Pinsker(p) if p.table.is_none())
    }

    /// `‖K‖² = ∫ K² = (2π)^{-d} ∫ F[K]²`.
    pub fn l2_norm_sq(&self) -> f64 {
        match self {
            KernelSpec::Gaussian { dim } => math::powf(4.0 * PI, -(*dim as f64) / 2.0),
            KernelSpec::Pinsker(p) => pinsker_ft_l2_norm_sq(p.beta, p.dim) / math::powi(2.0 * PI, p.dim as i32),
            KernelSpec::Silverman => 3.0 * math::SQRT_2 / 16.0,
            KernelSpec::Sinc => 1.0 / PI,
        }
    }
}

/// `Q_d(β) = 1/d − 2/(β+d) + 1/(2β+d)`.
pub fn pinsker_q(beta: f64, dim: usize) -> f64 {
    let d = dim as f64;
    1.0 / d - 2.0 / (beta + d) + 1.0 / (2.0 * beta + d)
}

/// `∫ F[K_β]² = S_d Q_d(β)`, the frequency-domain squared norm of the Pinsker kernel.
pub fn pinsker_ft_l2_norm_sq(beta: f64, dim: usize) -> f64 {
    math::unit_sphere_surface(dim) * pinsker_q(beta, dim)
}

/// Tabulated `K(x) = (1/π) ∫₀¹ F(t) cos(tx) dt` on Chebyshev-spaced nodes of
/// `[0, x_max]`, with symmetric extension and an asymptotic tail.
#[derive(Debug, Clone)]
pub struct SpatialTable {
    beta: f64,
    x_max: f64,
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl SpatialTable {
    pub fn pinsker(beta: f64) -> Result<Self> {
        let n = PINSKER_TABLE_NODES;
        let x_max = PINSKER_TABLE_XMAX;
        let nodes: Vec<f64> = (0..n).map(|k| chebyshev_node(k, n, x_max)).collect();
        let tol = Tolerance::new(1e-13, 1e-12).with_max_segments(4000);
        let values = nodes
            .iter()
            .map(|&x| {
                integrate(|t| (1.0 - math::powf(t, beta)) * math::cos(t * x), 0.0, 1.0, tol).map(|r| r.value / PI)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(SpatialTable { beta, x_max, nodes, values })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = x.abs();
        if x > self.x_max {
            return self.tail(x);
        }
        let n = self.nodes.len();
        // invert x_k = (x_max/2)(1 − cos(πk/(n−1)))
        let pos = (n - 1) as f64 / PI * math::acos((1.0 - 2.0 * x / self.x_max).clamp(-1.0, 1.0));
        let k = (math::floor(pos) as usize).clamp(1, n - 3);
        let xs = &self.nodes[k - 1..k + 3];
        let ys = &self.values[k - 1..k + 3];
        let mut acc = 0.0;
        for i in 0..4 {
            let mut li = 1.0;
            for j in 0..4 {
                if i != j {
                    li *= (x - xs[j]) / (xs[i] - xs[j]);
                }
            }
            acc += li * ys[i];
        }
        acc
    }

    /// `π K(x) ≈ −β cos x / x² − Γ(β+1) cos(π(β+1)/2) / x^{β+1}`
    fn tail(&self, x: f64) -> f64 {
        let b = self.beta;
        let end = -b * math::cos(x) / (x * x);
        let origin = -math::tgamma(b + 1.0) * math::cos(0.5 * PI * (b + 1.0)) / math::powf(x, b + 1.0);
        (end + origin) / PI
    }
}

fn chebyshev_node(k: usize, n: usize, x_max: f64) -> f64 {
    0.5 * x_max * (1.0 - math::cos(PI * k as f64 / (n - 1) as f64))
}

/// Outcome of [`validate_kernel`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibilityReport {
    pub passed: bool,
    /// Largest distance of `F[K]` outside `[0, 1]` on the grid.
    pub range_violation: f64,
    /// Largest increase of `F[K]` between consecutive grid radii.
    pub monotonicity_violation: f64,
    pub grid_points: usize,
    pub grid_max_radius: f64,
}

/// Default grid for [`validate_kernel`].
pub const VALIDATION_POINTS: usize = 10_000;
pub const VALIDATION_MAX_RADIUS: f64 = 50.0;

/// Checks that `F[K]` lies in `[0, 1]` and is radially nonincreasing, which
/// gives `F[K](h't) ≥ F[K](ht)` for all `h > h' > 0`.
pub fn validate_kernel(k: &KernelSpec) -> AdmissibilityReport {
    // evaluate the unclamped transform so genuine violations show up
    validate_ft(|r| raw_ft(k, r), VALIDATION_MAX_RADIUS, VALIDATION_POINTS)
}

fn raw_ft(k: &KernelSpec, r: f64) -> f64 {
    match k {
        KernelSpec::Pinsker(p) => (1.0 - math::powf(r, p.beta)).max(0.0),
        _ => k.ft_radial(r),
    }
}

/// [`validate_kernel`] for an arbitrary radial transform.
pub fn validate_ft<F: Fn(f64) -> f64>(ft: F, max_radius: f64, points: usize) -> AdmissibilityReport {
    let mut range_violation = 0.0f64;
    let mut monotonicity_violation = 0.0f64;
    let mut prev = f64::INFINITY;
    for i in 0..points {
        let r = max_radius * i as f64 / (points - 1) as f64;
        let v = ft(r);
        range_violation = range_violation.max(-v).max(v - 1.0);
        if v.is_nan() {
            range_violation = f64::INFINITY;
        }
        monotonicity_violation = monotonicity_violation.max(v - prev);
        prev = v;
    }
    AdmissibilityReport {
        passed: range_violation <= 0.0 && monotonicity_violation <= 1e-15,
        range_violation,
        monotonicity_violation,
        grid_points: points,
        grid_max_radius: max_radius,
    }
}

/// Pinsker exponents `β_1 = d/2`, `β_j = β_{j−1} + N^{−1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PinskerFamily {
    dim: usize,
    betas: Vec<f64>,
}

impl PinskerFamily {
    pub fn betas(&self) -> &[f64] {
        &self.betas
    }
    pub fn len(&self) -> usize {
        self.betas.len()
    }
    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kernels(&self) -> Result<Vec<KernelSpec>> {
        self.betas.iter().map(|&b| KernelSpec::pinsker(b, self.dim)).collect()
    }
}

pub fn pinsker_family(count: usize, dim: usize) -> Result<PinskerFamily> {
    if count < 2 {
        return Err(Error::invalid("a Pinsker family needs at least two kernels"));
    }
    if dim == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    let step = 1.0 / math::sqrt(count as f64);
    let first = dim as f64 / 2.0;
    let betas = (0..count).map(|j| first + j as f64 * step).collect();
    Ok(PinskerFamily { dim, betas })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_to_infinity, Tolerance};

    #[test]
    fn pinsker_ft_values() {
        let k = KernelSpec::pinsker(2.0, 1).unwrap();
        assert_eq!(k.ft(&[0.0]), 1.0);
        assert!((k.ft(&[0.5]) - 0.75).abs() < 1e-15);
        assert_eq!(k.ft(&[1.0]), 0.0);
        assert_eq!(k.ft(&[-3.0]), 0.0);
    }

    #[test]
    fn spatial_values_at_origin() {
        assert!((KernelSpec::gaussian(1).unwrap().eval(&[0.0]).unwrap() - math::FRAC_1_SQRT_2PI).abs() < 1e-16);
        let p = KernelSpec::pinsker(2.0, 1).unwrap();
        assert!((p.eval1(0.0) - 2.0 / (3.0 * PI)).abs() < 1e-12);
        assert!((KernelSpec::Sinc.eval1(0.0) - 1.0 / PI).abs() < 1e-16);
    }

    #[test]
    fn pinsker_table_matches_closed_form_beta_one() {
        // (1/π)∫₀¹(1−t)cos(tx)dt = (1 − cos x)/(π x²)
        let p = KernelSpec::pinsker(1.0, 1).unwrap();
        for &x in &[0.3, 1.0, 7.7, 42.0, 199.0, 480.0, 510.0, 900.0] {
            let exact = (1.0 - math::cos(x)) / (PI * x * x);
            assert!((p.eval1(x) - exact).abs() < 1e-7, "x = {x}: {} vs {exact}", p.eval1(x));
            assert_eq!(p.eval1(x), p.eval1(-x));
        }
    }

    #[test]
    fn pinsker_d2_spatial_is_unsupported() {
        let p = KernelSpec::pinsker(1.5, 2).unwrap();
        assert!(matches!(p.eval(&[0.0, 0.0]), Err(Error::Unsupported(_))));
        assert!(!p.spatially_evaluable());
    }

    #[test]
    fn l2_norms_match_plancherel_quadrature() {
        let tol = Tolerance::new(1e-15, 1e-12);
        for k in [
            KernelSpec::gaussian(1).unwrap(),
            KernelSpec::pinsker(2.0, 1).unwrap(),
            KernelSpec::pinsker(0.5, 1).unwrap(),
            KernelSpec::Silverman,
            KernelSpec::Sinc,
        ] {
            let q = match k.ft_support() {
                Some(r) => integrate(|t| k.ft_radial(t).powi(2), 0.0, r, tol).unwrap().value,
                None => integrate_to_infinity(|t| k.ft_radial(t).powi(2), 0.0, tol).unwrap().value,
            } / PI;
            assert!((q - k.l2_norm_sq()).abs() < 1e-8, "{}: {q} vs {}", k.name(), k.l2_norm_sq());
        }
        assert!((KernelSpec::gaussian(1).unwrap().l2_norm_sq() - 0.5 / math::sqrt(PI)).abs() < 1e-15);
        assert!((KernelSpec::Sinc.l2_norm_sq() - 1.0 / PI).abs() < 1e-15);
        assert!((KernelSpec::pinsker(2.0, 1).unwrap().l2_norm_sq() - 8.0 / (15.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn pinsker_frequency_norm() {
        assert!((pinsker_ft_l2_norm_sq(2.0, 1) - 16.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn validation_reports() {
        assert!(validate_kernel(&KernelSpec::pinsker(1.0, 1).unwrap()).passed);
        assert!(validate_kernel(&KernelSpec::gaussian(1).unwrap()).passed);
        assert!(validate_kernel(&KernelSpec::Silverman).passed);
        assert!(validate_kernel(&KernelSpec::Sinc).passed);
        let bad = validate_ft(math::cos, VALIDATION_MAX_RADIUS, VALIDATION_POINTS);
        assert!(!bad.passed);
        assert!(bad.range_violation > 0.9);
        assert!(bad.monotonicity_violation > 0.0);
    }

    #[test]
    fn family_exponents() {
        let f = pinsker_family(4, 1).unwrap();
        assert_eq!(f.betas(), &[0.5, 1.0, 1.5, 2.0]);
        let f = pinsker_family(2, 2).unwrap();
        assert!((f.betas()[0] - 1.0).abs() < 1e-15);
        assert!((f.betas()[1] - (1.0 + 1.0 / math::SQRT_2)).abs() < 1e-15);
        assert!(pinsker_family(1, 1).is_err());
    }

    #[test]
    fn parse_round_trip() {
        for name in ["gaussian", "pinsker:2", "silverman", "sinc"] {
            assert_eq!(KernelSpec::parse(name, 1).unwrap().name(), name);
        }
        assert!(KernelSpec::parse("epanechnikov", 1).is_err());
        assert!(KernelSpec::parse("sinc", 2).is_err());
        assert!(KernelSpec::parse("pinsker:x", 1).is_err());
    }
}
