//! Dense QP on the simplex `Λ^M = {λ ≥ 0, Σλ ≤ 1}`:
//! minimize `λᵀGλ − 2bᵀλ`, plus the unconstrained minimum-norm solve.
//!
//! The constrained solver is projected gradient with Barzilai–Borwein steps
//! and a backtracking safeguard. Accepted steps never increase the objective.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, SymMatrix};

/// Default KKT residual target.
pub const DEFAULT_KKT_TOL: f64 = 1e-8;
/// Default iteration cap.
pub const DEFAULT_MAX_ITER: usize = 100_000;
/// Power iterations used to estimate `σ_max(G)`.
const POWER_ITERATIONS: usize = 50;
/// Feasibility slack accepted by [`kkt_residual`].
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct QpProblem {
    g: SymMatrix,
    b: Vec<f64>,
    pub kkt_tol: f64,
    pub max_iter: usize,
    /// Keep the objective after every accepted step in [`QpSolution::history`].
    pub record_history: bool,
}

impl QpProblem {
    pub fn new(g: SymMatrix, b: Vec<f64>) -> Result<Self> {
        if g.dim() != b.len() {
            return Err(Error::DimensionMismatch { expected: g.dim(), found: b.len() });
        }
        if g.dim() == 0 {
            return Err(Error::invalid("empty quadratic program"));
        }
        if !g.is_finite() || b.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("quadratic program data".into()));
        }
        g.check_symmetric(1e-10)?;
        Ok(QpProblem { g, b, kkt_tol: DEFAULT_KKT_TOL, max_iter: DEFAULT_MAX_ITER, record_history: false })
    }

    pub fn g(&self) -> &SymMatrix {
        &self.g
    }
    pub fn b(&self) -> &[f64] {
        &self.b
    }
    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// `λᵀGλ − 2bᵀλ`
    pub fn objective(&self, lambda: &[f64]) -> f64 {
        self.g.quad_form(lambda) - 2.0 * dot(&self.b, lambda)
    }

    /// `2(Gλ − b)`
    pub fn gradient(&self, lambda: &[f64]) -> Vec<f64> {
        self.g.mat_vec(lambda).into_iter().zip(&self.b).map(|(gl, b)| 2.0 * (gl - b)).collect()
    }

    fn fixed_step(&self) -> f64 {
        1.0 / (2.0 * self.g.power_norm(POWER_ITERATIONS) + f64::EPSILON)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QpStatus {
    Converged,
    MaxIter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution {
    pub lambda: Vec<f64>,
    pub objective: f64,
    pub kkt_residual: f64,
    pub iterations: usize,
    pub status: QpStatus,
    pub history: Vec<f64>,
}

/// Euclidean projection onto `{λ ≥ 0, Σλ ≤ 1}`.
pub fn simplex_project(v: &[f64]) -> Vec<f64> {
    let positive: Vec<f64> = v.iter().map(|x| x.max(0.0)).collect();
    if positive.iter().sum::<f64>() <= 1.0 {
        return positive;
    }
    // the Σλ ≤ 1 face is active: project onto the probability simplex
    let mut u = v.to_vec();
    u.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// Distance of `λ` from its projected-gradient image at the fixed step
/// `η = 1/(2σ_max(G) + ε)`; zero exactly at minimizers.
pub fn kkt_residual(p: &QpProblem, lambda: &[f64]) -> Result<f64> {
    check_feasible(lambda)?;
    Ok(residual_with(lambda, &p.gradient(lambda), p.fixed_step()))
}

fn residual_with(lambda: &[f64], grad: &[f64], eta: f64) -> f64 {
    let stepped: Vec<f64> = lambda.iter().zip(grad).map(|(l, g)| l - eta * g).collect();
    let proj = simplex_project(&stepped);
    norm2(&lambda.iter().zip(&proj).map(|(a, b)| a - b).collect::<Vec<_>>())
}

fn check_feasible(lambda: &[f64]) -> Result<()> {
    if lambda.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("weight vector".into()));
    }
    let min = lambda.iter().cloned().fold(f64::INFINITY, f64::min);
    let sum: f64 = lambda.iter().sum();
    if min < -FEASIBILITY_TOL || sum > 1.0 + FEASIBILITY_TOL {
        return Err(Error::Infeasible(alloc::format!("min {min:e}, sum {sum}")));
    }
    Ok(())
}

/// Minimizes `λᵀGλ − 2bᵀλ` over `Λ^M`.
///
/// With `G = 0` the minimizer is the vertex at the largest `b_j` (lowest index
/// on ties), or the origin when every `b_j ≤ 0`.
pub fn solve_simplex_qp(p: &QpProblem) -> Result<QpSolution> {
    let m = p.dim();
    let sigma = p.g.power_norm(POWER_ITERATIONS);
    if sigma == 0.0 {
        let mut lambda = vec![0.0; m];
        let (best, bmax) = p.b.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        if bmax > 0.0 {
            lambda[best] = 1.0;
        }
        let objective = p.objective(&lambda);
        return Ok(QpSolution { lambda, objective, kkt_residual: 0.0, iterations: 0, status: QpStatus::Converged, history: Vec::new() });
    }
    let eta = 1.0 / (2.0 * sigma + f64::EPSILON);
    let mut lambda = simplex_project(&p.b.iter().map(|b| 2.0 * eta * b).collect::<Vec<_>>());
    let mut f = p.objective(&lambda);
    let mut grad = p.gradient(&lambda);
    let mut alpha = eta;
    let mut history = Vec::new();
    if p.record_history {
        history.push(f);
    }
    let mut iterations = 0;
    let mut residual = residual_with(&lambda, &grad, eta);
    while residual > p.kkt_tol && iterations < p.max_iter {
        iterations += 1;
        let (cand, f_cand) = loop {
            let cand = simplex_project(&lambda.iter().zip(&grad).map(|(l, g)| l - alpha * g).collect::<Vec<_>>());
            let d: Vec<f64> = cand.iter().zip(&lambda).map(|(c, l)| c - l).collect();
            let f_cand = p.objective(&cand);
            let model = f + dot(&grad, &d) + dot(&d, &d) / (2.0 * alpha);
            // slack for rounding in the objective evaluation
            let slack = 1e-15 * (f.abs() + 1.0);
            if f_cand <= model + slack && f_cand <= f + slack {
                break (cand, f_cand);
            }
            alpha *= 0.5;
            if alpha < 1e-12 * eta {
                // no representable decrease left; keep the current point
                break (lambda.clone(), f);
            }
        };
        let s: Vec<f64> = cand.iter().zip(&lambda).map(|(c, l)| c - l).collect();
        let new_grad = p.gradient(&cand);
        let y: Vec<f64> = new_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sty = dot(&s, &y);
        let sts = dot(&s, &s);
        if sts == 0.0 {
            // stalled at the rounding floor
            lambda = cand;
            grad = new_grad;
            residual = residual_with(&lambda, &grad, eta);
            break;
        }
        alpha = if sty > 0.0 { (sts / sty).clamp(1e-3 * eta, 1e6 * eta) } else { eta };
        lambda = cand;
        f = f_cand;
        grad = new_grad;
        if p.record_history {
            history.push(f);
        }
        residual = residual_with(&lambda, &grad, eta);
    }
    let status = if residual <= p.kkt_tol { QpStatus::Converged } else { QpStatus::MaxIter };
    Ok(QpSolution { objective: p.objective(&lambda), lambda, kkt_residual: residual, iterations, status, history })
}

/// Minimum-norm least-squares solution of `Gλ = b` via the symmetric
/// eigendecomposition; eigen-directions with `|e| ≤ rank_tol·max|e|` are dropped.
pub fn solve_min_norm(g: &SymMatrix, b: &[f64], rank_tol: f64) -> Result<Vec<f64>> {
    if g.dim() != b.len() {
        return Err(Error::DimensionMismatch { expected: g.dim(), found: b.len() });
    }
    let (values, vectors) = g.symmetric_eigen()?;
    let top = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut lambda = vec![0.0; b.len()];
    if top == 0.0 {
        return Ok(lambda);
    }
    for (e, v) in values.iter().zip(&vectors) {
        if e.abs() > rank_tol * top {
            let c = dot(v, b) / e;
            for (l, vi) in lambda.iter_mut().zip(v) {
                *l += c * vi;
            }
        }
    }
    Ok(lambda)
}
