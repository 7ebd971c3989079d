//! One-dimensional quadrature: adaptive Gauss–Kronrod (7/15), composite
//! Gauss–Legendre and the trapezoid rule.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

// Kronrod abscissae; the odd-indexed ones are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_segments: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-13, rel: 1e-10, max_segments: 2000 }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel, ..Default::default() }
    }

    pub fn with_max_segments(mut self, n: usize) -> Self {
        self.max_segments = n;
        self
    }
}

#[derive(Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = kronrod.abs();
    let mut fv = [0.0f64; 14];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        kronrod += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[2 * j] - mean).abs() + (fv[2 * j + 1] - mean).abs());
    }
    let value = kronrod * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        let scale = math::powf(200.0 * error / resasc, 1.5);
        error = if scale < 1.0 { resasc * scale } else { resasc };
    }
    let roundoff = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && error < roundoff {
        error = roundoff;
    }
    Segment { a, b, value, error }
}

/// Adaptive Gauss–Kronrod integration of `f` over the finite interval `[a, b]`.
///
/// Bisects the segment with the largest error estimate until the summed error
/// falls below `max(tol.abs, tol.rel·|I|)`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::NonFinite("integration bounds".into()));
    }
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let mut segments = Vec::with_capacity(64);
    segments.push(gk15(&mut f, a, b));
    let mut evaluations = 15;
    loop {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let err: f64 = segments.iter().map(|s| s.error).sum();
        if !total.is_finite() {
            return Err(Error::NonFinite("integrand".into()));
        }
        if err <= tol.abs.max(tol.rel * total.abs()) {
            return Ok(Integral { value: total, error: err, evaluations });
        }
        if segments.len() >= tol.max_segments {
            return Err(Error::QuadratureNonConvergence { estimate: total, error: err });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, s)| if s.error > acc.1 { (i, s.error) } else { acc });
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            // interval can no longer be bisected in floating point
            return Err(Error::QuadratureNonConvergence { estimate: total, error: err });
        }
        segments.push(gk15(&mut f, s.a, mid));
        segments.push(gk15(&mut f, mid, s.b));
        evaluations += 30;
    }
}

/// Integrates `f` over `[a, b]` after splitting at the given breakpoints, which
/// are clipped to the interval. Tolerances apply to each piece.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<Integral> {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.sort_unstable_by(|x, y| x.total_cmp(y));
    pts.dedup();
    let mut out = Integral { value: 0.0, error: 0.0, evaluations: 0 };
    let mut lo = a;
    for hi in pts.into_iter().chain(core::iter::once(b)) {
        let piece = integrate(&mut f, lo, hi, tol)?;
        out.value += piece.value;
        out.error += piece.error;
        out.evaluations += piece.evaluations;
        lo = hi;
    }
    Ok(out)
}

/// Integral of `f` over `[a, ∞)` via the substitution `t = a + (1−u)/u`.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(mut f: F, a: f64, tol: Tolerance) -> Result<Integral> {
    integrate(
        |u| {
            let t = a + (1.0 - u) / u;
            let v = f(t) / (u * u);
            if v.is_finite() { v } else { 0.0 }
        },
        0.0,
        1.0,
        tol,
    )
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre order must be positive");
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = math::cos(math::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// A fixed set of abscissae and weights, reusable across integrands.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Composite Gauss–Legendre rule with `panels` equal panels of `order`
    /// points between each consecutive pair of `edges`.
    pub fn composite_gauss_legendre(edges: &[f64], panels: usize, order: usize) -> Rule {
        let (x, w) = gauss_legendre(order);
        let mut nodes = Vec::with_capacity(edges.len().saturating_sub(1) * panels * order);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for win in edges.windows(2) {
            let (lo, hi) = (win[0], win[1]);
            let width = (hi - lo) / panels as f64;
            for p in 0..panels {
                let a = lo + p as f64 * width;
                let c = a + 0.5 * width;
                for (xi, wi) in x.iter().zip(&w) {
                    nodes.push(c + 0.5 * width * xi);
                    weights.push(0.5 * width * wi);
                }
            }
        }
        Rule { nodes, weights }
    }

    /// Trapezoid rule with `n` equispaced nodes on `[a, b]`.
    pub fn trapezoid(a: f64, b: f64, n: usize) -> Rule {
        assert!(n >= 2, "trapezoid rule needs at least two nodes");
        let step = (b - a) / (n - 1) as f64;
        let nodes = (0..n).map(|i| a + i as f64 * step).collect();
        let weights = (0..n)
            .map(|i| if i == 0 || i == n - 1 { 0.5 * step } else { step })
            .collect();
        Rule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn apply<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        math::pairwise_sum_by(self.nodes.len(), |i| self.weights[i] * f(self.nodes[i]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_polynomial_is_exact() {
        let r = integrate(|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, Tolerance::default()).unwrap();
        // ∫ x³ − 2x + 1 over [-1, 3] = 20 − 8 + 4
        assert!((r.value - 16.0).abs() < 1e-12);
    }

    #[test]
    fn gk_oscillatory() {
        let r = integrate(|x| math::cos(50.0 * x), 0.0, 1.0, Tolerance::new(1e-14, 1e-12)).unwrap();
        assert!((r.value - math::sin(50.0) / 50.0).abs() < 1e-12);
    }

    #[test]
    fn gk_reports_nonconvergence() {
        let tol = Tolerance::new(0.0, 1e-15).with_max_segments(3);
        let err = integrate(|x| 1.0 / math::sqrt(x), 0.0, 1.0, tol).unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { .. }));
    }

    #[test]
    fn semi_infinite_gaussian_tail() {
        let r = integrate_to_infinity(|t| math::exp(-t * t), 0.0, Tolerance::default()).unwrap();
        assert!((r.value - 0.5 * math::sqrt(math::PI)).abs() < 1e-10);
    }

    #[test]
    fn gauss_legendre_weights_and_moments() {
        for n in [1usize, 2, 5, 16, 33] {
            let (x, w) = gauss_legendre(n);
            let total: f64 = w.iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "n={n}");
            // exact for degree 2n-1
            let deg = 2 * n - 2;
            let m: f64 = x.iter().zip(&w).map(|(x, w)| w * math::powi(*x, deg as i32)).sum();
            assert!((m - 2.0 / (deg as f64 + 1.0)).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn composite_rule_handles_breaks() {
        let rule = Rule::composite_gauss_legendre(&[-1.0, 0.0, 2.0], 4, 8);
        let v = rule.apply(|x| if x < 0.0 { 0.0 } else { x });
        assert!((v - 2.0).abs() < 1e-13);
    }
}
