//! Scalar helpers on top of `libm`, so results do not depend on the
//! platform's libm when `std` is linked.

pub use core::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

/// `1/√(2π)`
pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
/// `ln √(2π)`
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}
#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}
#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}
#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}
#[inline]
pub fn powi(x: f64, n: i32) -> f64 {
    let mut acc = 1.0;
    let mut base = if n < 0 { 1.0 / x } else { x };
    let mut k = n.unsigned_abs();
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        base *= base;
        k >>= 1;
    }
    acc
}
#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}
#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}
#[inline]
pub fn sincos(x: f64) -> (f64, f64) {
    libm::sincos(x)
}
#[inline]
pub fn acos(x: f64) -> f64 {
    libm::acos(x)
}
#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}
#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}
#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}
#[inline]
pub fn tgamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Density of `N(0, var)` at `x`.
#[inline]
pub fn normal_pdf(x: f64, var: f64) -> f64 {
    exp(-0.5 * x * x / var) / sqrt(2.0 * PI * var)
}

/// Standard normal density.
#[inline]
pub fn std_normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * exp(-0.5 * x * x)
}

/// Standard normal CDF `Φ(z)`.
#[inline]
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// `ln Φ(z)`, accurate in the far lower tail where `Φ` underflows.
pub fn ln_std_normal_cdf(z: f64) -> f64 {
    if z > -30.0 {
        return ln(std_normal_cdf(z));
    }
    // Mills-ratio expansion: Φ(z) ≈ φ(z)/|z| · (1 − 1/z² + 3/z⁴ − 15/z⁶)
    let z2 = z * z;
    let series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
    -0.5 * z2 - LN_SQRT_2PI - ln(-z) + ln(series)
}

/// Surface area of the unit sphere in `R^d`, `2π^{d/2}/Γ(d/2)`.
pub fn unit_sphere_surface(d: usize) -> f64 {
    let half = d as f64 / 2.0;
    2.0 * powf(PI, half) / tgamma(half)
}

const PAIRWISE_BLOCK: usize = 32;

/// Pairwise (cascade) summation of `f(0) + … + f(n-1)`.
///
/// The association order depends only on `n`, so any two callers summing the
/// same terms get bit-identical results.
pub fn pairwise_sum_by<F: FnMut(usize) -> f64>(n: usize, mut f: F) -> f64 {
    fn rec<F: FnMut(usize) -> f64>(lo: usize, hi: usize, f: &mut F) -> f64 {
        let len = hi - lo;
        if len <= PAIRWISE_BLOCK {
            let mut s = 0.0;
            for i in lo..hi {
                s += f(i);
            }
            s
        } else {
            let mid = lo + len / 2;
            rec(lo, mid, f) + rec(mid, hi, f)
        }
    }
    rec(0, n, &mut f)
}

/// Pairwise summation of a slice.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    pairwise_sum_by(xs.len(), |i| xs[i])
}

/// Sample mean and unbiased sample standard deviation.
pub fn mean_and_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(xs) / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss = pairwise_sum_by(n, |i| {
        let d = xs[i] - mean;
        d * d
    });
    (mean, sqrt(ss / (n - 1) as f64))
}
