//! Small dense symmetric linear algebra for Gram systems.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Dense square matrix stored row-major. Used for Gram matrices, which are
/// symmetric by construction; symmetry is checked, not assumed, by the
/// solvers that need it.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds from row-major data of length `n²`.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: data.len() });
        }
        Ok(SymMatrix { n, data })
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(n: usize, mut f: F) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i + 1..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Fails unless the matrix is symmetric within `tol` relative to its
    /// largest entry.
    pub fn check_symmetric(&self, tol: f64) -> Result<()> {
        let scale = self.data.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
        let asym = self.max_asymmetry();
        if asym > tol * scale {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(())
    }

    pub fn mat_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    /// `xᵀ A x`
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.mat_vec(x))
    }

    pub fn scaled(&self, c: f64) -> Self {
        SymMatrix { n: self.n, data: self.data.iter().map(|v| c * v).collect() }
    }

    /// Largest absolute eigenvalue estimate by power iteration.
    pub fn power_norm(&self, iterations: usize) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        // deterministic start with no zero components
        let mut v: Vec<f64> = (0..self.n).map(|i| 1.0 + 0.1 * (i as f64 + 1.0).recip()).collect();
        let mut lambda = 0.0;
        for _ in 0..iterations {
            let w = self.mat_vec(&v);
            let norm = norm2(&w);
            if norm == 0.0 {
                return 0.0;
            }
            lambda = norm / norm2(&v);
            v = w.into_iter().map(|x| x / norm).collect();
        }
        lambda
    }

    /// Eigendecomposition by cyclic Jacobi rotations. Returns eigenvalues and
    /// the matching unit eigenvectors (as rows of the second return value).
    pub fn symmetric_eigen(&self) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        self.check_symmetric(1e-10)?;
        let n = self.n;
        let mut a = self.data.clone();
        // symmetrize exactly so rotations stay consistent
        for i in 0..n {
            for j in i + 1..n {
                let m = 0.5 * (a[i * n + j] + a[j * n + i]);
                a[i * n + j] = m;
                a[j * n + i] = m;
            }
        }
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().max(f64::MIN_POSITIVE);
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i * n + j] * a[i * n + j])
                .sum();
            if off <= 1e-30 * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[p * n + q];
                    if apq.abs() < f64::MIN_POSITIVE {
                        continue;
                    }
                    let app = a[p * n + p];
                    let aqq = a[q * n + q];
                    let theta = (aqq - app) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + math::sqrt(theta * theta + 1.0));
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / math::sqrt(t * t + 1.0);
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let values = (0..n).map(|i| a[i * n + i]).collect();
        let vectors = (0..n).map(|j| (0..n).map(|k| v[k * n + j]).collect()).collect();
        Ok((values, vectors))
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    math::sqrt(dot(a, a))
}
