//! Gram systems, linear and convex aggregation weights, and split-averaged
//! aggregates of kernel density estimators.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::densities::{DensityModel, SamplePoints};
use crate::error::{Error, Result};
use crate::fourier::{self, band_rule, edges_from, EcfTable};
use crate::kde::{split_sizes, KdeEstimator, SplitScheme};
use crate::kernels::{KernelSpec, PinskerFamily};
use crate::linalg::SymMatrix;
use crate::math::{self, PI};
use crate::quadrature::{integrate_to_infinity, Rule, Tolerance};
use crate::rng::SeedProvenance;
use crate::simplex_qp::{solve_min_norm, solve_simplex_qp, QpProblem, QpStatus};

/// Relative eigenvalue cutoff for the minimum-norm linear solve.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// How `⟨p_j, p_k⟩` is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerProductBackend {
    /// Exact double sum for Gaussian-kernel KDEs.
    GaussianClosedForm,
    /// `(2π)^{-1} ∫ F[K₁](h₁t) F[K₂](h₂t) φ̂₁(t) conj φ̂₂(t) dt`, `d = 1`.
    FourierQuadrature,
    /// Composite Gauss–Legendre product rule in space, `d ≤ 2`.
    SpatialQuadrature,
    /// Closed form when every component is Gaussian, else Fourier in `d = 1`,
    /// else spatial.
    Auto,
}

impl InnerProductBackend {
    pub fn tag(self) -> &'static str {
        match self {
            InnerProductBackend::GaussianClosedForm => "gaussian_closed_form",
            InnerProductBackend::FourierQuadrature => "fourier_quadrature",
            InnerProductBackend::SpatialQuadrature => "spatial_quadrature",
            InnerProductBackend::Auto => "auto",
        }
    }

    /// Concrete backend for `components`.
    pub fn resolve(self, components: &[&KdeEstimator]) -> Result<Self> {
        let dim = components.first().map_or(1, |c| c.dim());
        if components.iter().any(|c| c.dim() != dim) {
            return Err(Error::invalid("components of different dimensions"));
        }
        let all_gaussian = components.iter().all(|c| c.kernel().is_gaussian());
        let resolved = match self {
            InnerProductBackend::Auto if all_gaussian => InnerProductBackend::GaussianClosedForm,
            InnerProductBackend::Auto if dim == 1 => InnerProductBackend::FourierQuadrature,
            InnerProductBackend::Auto => InnerProductBackend::SpatialQuadrature,
            other => other,
        };
        match resolved {
            InnerProductBackend::GaussianClosedForm if !all_gaussian => {
                Err(Error::unsupported("closed-form inner products need Gaussian kernels"))
            }
            InnerProductBackend::FourierQuadrature if dim != 1 => {
                Err(Error::unsupported("Fourier inner products are implemented for d = 1"))
            }
            InnerProductBackend::SpatialQuadrature if dim > 2 => {
                Err(Error::unsupported("spatial inner products are implemented for d ≤ 2"))
            }
            r => Ok(r),
        }
    }
}

/// `(m₁m₂)^{-1} Σᵢⱼ N(Xᵢ − Yⱼ; 0, vI)`.
pub fn gaussian_cross_sum(a: &SamplePoints, b: &SamplePoints, var: f64) -> f64 {
    let d = a.dim();
    let norm = math::powf(2.0 * PI * var, -0.5 * d as f64);
    let scale = -0.5 / var;
    let (xa, xb) = (a.as_slice(), b.as_slice());
    let s = if d == 1 {
        math::pairwise_sum_by(a.n(), |i| {
            let x = xa[i];
            math::pairwise_sum_by(b.n(), |k| {
                let t = x - xb[k];
                math::exp(scale * t * t)
            })
        })
    } else {
        math::pairwise_sum_by(a.n(), |i| {
            let x = a.point(i);
            math::pairwise_sum_by(b.n(), |k| {
                let r2: f64 = x.iter().zip(b.point(k)).map(|(u, v)| (u - v) * (u - v)).sum();
                math::exp(scale * r2)
            })
        })
    };
    norm * s / (a.n() as f64 * b.n() as f64)
}

/// `⟨p₁, p₂⟩` for two fitted estimators.
pub fn inner_product(a: &KdeEstimator, b: &KdeEstimator, backend: InnerProductBackend) -> Result<f64> {
    Ok(gram_matrix(&[a, b], backend)?.1.get(0, 1))
}

fn gram_matrix(components: &[&KdeEstimator], backend: InnerProductBackend) -> Result<(InnerProductBackend, SymMatrix)> {
    if components.is_empty() {
        return Err(Error::invalid("at least one component is required"));
    }
    let backend = backend.resolve(components)?;
    let g = match backend {
        InnerProductBackend::GaussianClosedForm => gaussian_gram(components),
        InnerProductBackend::FourierQuadrature => fourier_gram(components),
        InnerProductBackend::SpatialQuadrature => spatial_gram(components)?,
        InnerProductBackend::Auto => unreachable!("resolved above"),
    };
    if !g.is_finite() {
        return Err(Error::NonFinite("Gram matrix".into()));
    }
    Ok((backend, g))
}

fn gaussian_gram(cs: &[&KdeEstimator]) -> SymMatrix {
    let m = cs.len();
    let mut g = SymMatrix::zeros(m);
    for j in 0..m {
        for k in j..m {
            let var = cs[j].bandwidth() * cs[j].bandwidth() + cs[k].bandwidth() * cs[k].bandwidth();
            let v = gaussian_cross_sum(cs[j].points(), cs[k].points(), var);
            g.set(j, k, v);
            g.set(k, j, v);
        }
    }
    g
}

fn fourier_gram(cs: &[&KdeEstimator]) -> SymMatrix {
    let spread = cs.iter().map(|c| fourier::max_abs(c.points())).fold(0.0, f64::max);
    let edges = edges_from(cs.iter().map(|c| fourier::frequency_cutoff(c)));
    // φ̂₁ conj φ̂₂ oscillates at frequencies up to 2·max|x|
    let rule = band_rule(&edges, 2.0 * spread + 1.0, fourier::needs_grading(cs.iter().copied()));
    let table = EcfTable::new(cs.iter().copied(), &rule.nodes);
    let fts: Vec<Vec<f64>> = cs
        .iter()
        .map(|c| rule.nodes.iter().map(|&t| c.kernel().ft_radial(c.bandwidth() * t)).collect())
        .collect();
    let m = cs.len();
    let mut g = SymMatrix::zeros(m);
    for j in 0..m {
        for k in j..m {
            let (pj, pk) = (table.of(j), table.of(k));
            let v = math::pairwise_sum_by(rule.len(), |q| {
                rule.weights[q] * fts[j][q] * fts[k][q] * (pj[q] * pk[q].conj()).re
            }) / PI;
            g.set(j, k, v);
            g.set(k, j, v);
        }
    }
    g
}

/// How far (in bandwidths) a kernel's spatial mass reaches for quadrature.
pub fn spatial_reach(kernel: &KernelSpec) -> f64 {
    match kernel {
        KernelSpec::Gaussian { .. } => 12.0,
        KernelSpec::Silverman => 60.0,
        KernelSpec::Pinsker(_) => 400.0,
        KernelSpec::Sinc => 4000.0,
    }
}

/// Per-dimension box holding all the spatial mass of `kde`.
pub fn kde_window(kde: &KdeEstimator) -> Vec<(f64, f64)> {
    let reach = spatial_reach(kde.kernel()) * kde.bandwidth();
    (0..kde.dim())
        .map(|j| {
            let (lo, hi) = kde
                .points()
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x[j]), hi.max(x[j])));
            (lo - reach, hi + reach)
        })
        .collect()
}

fn spatial_rule(lo: f64, hi: f64, h_min: f64) -> Rule {
    let panels = (math::ceil((hi - lo) / (0.5 * h_min)) as usize).max(16);
    Rule::composite_gauss_legendre(&[lo, hi], panels, 8)
}

fn spatial_gram(cs: &[&KdeEstimator]) -> Result<SymMatrix> {
    let dim = cs[0].dim();
    let h_min = cs.iter().map(|c| c.bandwidth()).fold(f64::INFINITY, f64::min);
    let windows: Vec<Vec<(f64, f64)>> = cs.iter().map(|c| kde_window(c)).collect();
    let bounds: Vec<(f64, f64)> = (0..dim)
        .map(|j| {
            let lo = windows.iter().map(|w| w[j].0).fold(f64::INFINITY, f64::min);
            let hi = windows.iter().map(|w| w[j].1).fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        })
        .collect();
    let rules: Vec<Rule> = bounds.iter().map(|&(lo, hi)| spatial_rule(lo, hi, h_min)).collect();
    let (nodes, weights) = tensor_nodes(&rules);
    let values: Vec<Vec<f64>> = cs.iter().map(|c| nodes.chunks_exact(dim).map(|x| c.eval(x)).collect()).collect();
    let m = cs.len();
    let mut g = SymMatrix::zeros(m);
    for j in 0..m {
        for k in j..m {
            let mut v = math::pairwise_sum_by(weights.len(), |q| weights[q] * values[j][q] * values[k][q]);
            if dim == 1 {
                v += far_field_overlap(cs[j], cs[k], bounds[0].0, bounds[0].1)?;
            }
            g.set(j, k, v);
            g.set(k, j, v);
        }
    }
    Ok(g)
}

/// `∫ p_j p_k` outside `[lo, hi]` from the algebraic far fields of both
/// estimators; zero unless both kernels have one.
fn far_field_overlap(a: &KdeEstimator, b: &KdeEstimator, lo: f64, hi: f64) -> Result<f64> {
    let (Some(fa), Some(fb)) = (a.kernel().far_field(), b.kernel().far_field()) else {
        return Ok(0.0);
    };
    let field = |c: &KdeEstimator, (amp, p): (f64, f64), x: f64| {
        let s = math::pairwise_sum_by(c.m(), |i| math::powf((x - c.points().point(i)[0]).abs(), -p));
        amp * math::powf(c.bandwidth(), p - 1.0) * s / c.m() as f64
    };
    let tol = Tolerance::new(1e-16, 1e-8);
    let right = integrate_to_infinity(|x| field(a, fa, x) * field(b, fb, x), hi, tol)?.value;
    let left = integrate_to_infinity(|x| field(a, fa, -x) * field(b, fb, -x), -lo, tol)?.value;
    Ok(right + left)
}

/// Row-major nodes and weights of the tensor product of one-dimensional rules.
pub fn tensor_nodes(rules: &[Rule]) -> (Vec<f64>, Vec<f64>) {
    let dim = rules.len();
    let total: usize = rules.iter().map(Rule::len).product();
    let mut nodes = Vec::with_capacity(total * dim);
    let mut weights = Vec::with_capacity(total);
    let mut idx = vec![0usize; dim];
    for _ in 0..total {
        let mut w = 1.0;
        for (j, r) in rules.iter().enumerate() {
            nodes.push(r.nodes[idx[j]]);
            w *= r.weights[idx[j]];
        }
        weights.push(w);
        for j in (0..dim).rev() {
            idx[j] += 1;
            if idx[j] < rules[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
    (nodes, weights)
}

/// The quadratic objective `λᵀGλ − 2bᵀλ` of an aggregation problem.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSystem {
    pub g: SymMatrix,
    pub b: Vec<f64>,
    pub backend: InnerProductBackend,
    /// Size of the sample behind `b`.
    pub validation_size: usize,
}

impl GramSystem {
    pub fn new(g: SymMatrix, b: Vec<f64>, backend: InnerProductBackend, validation_size: usize) -> Result<Self> {
        if g.dim() != b.len() {
            return Err(Error::DimensionMismatch { expected: g.dim(), found: b.len() });
        }
        g.check_symmetric(1e-10)?;
        Ok(GramSystem { g, b, backend, validation_size })
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }
    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    pub fn objective(&self, lambda: &[f64]) -> f64 {
        self.g.quad_form(lambda) - 2.0 * crate::linalg::dot(&self.b, lambda)
    }
}

/// `G` from pairwise inner products and `b_j = ℓ^{-1} Σᵢ p_j(Xᵢ)` over `validation`.
pub fn gram_system(components: &[KdeEstimator], validation: &SamplePoints, backend: InnerProductBackend) -> Result<GramSystem> {
    let refs: Vec<&KdeEstimator> = components.iter().collect();
    let (backend, g) = gram_matrix(&refs, backend)?;
    if components.iter().any(|c| c.dim() != validation.dim()) {
        return Err(Error::DimensionMismatch { expected: components[0].dim(), found: validation.dim() });
    }
    let ell = validation.n() as f64;
    let b = components
        .iter()
        .map(|c| math::pairwise_sum_by(validation.n(), |i| c.eval(validation.point(i))) / ell)
        .collect();
    GramSystem::new(g, b, backend, validation.n())
}

/// `b*_j = ⟨p_j, p⟩` against the true density.
pub fn exact_b(components: &[KdeEstimator], truth: &DensityModel) -> Result<Vec<f64>> {
    components.iter().map(|c| exact_inner_with_truth(c, truth)).collect()
}

/// `⟨p̂, p⟩` for a fitted estimator and the true density.
pub fn exact_inner_with_truth(c: &KdeEstimator, truth: &DensityModel) -> Result<f64> {
    if c.dim() != truth.dim() {
        return Err(Error::DimensionMismatch { expected: truth.dim(), found: c.dim() });
    }
    if c.kernel().is_gaussian() && truth.supports_gaussian_smoothing() {
        let pts = c.points();
        let mut acc = Vec::with_capacity(pts.n());
        for x in pts.iter() {
            acc.push(truth.gaussian_smoothed(x, c.bandwidth())?);
        }
        return Ok(math::pairwise_sum(&acc) / pts.n() as f64);
    }
    if c.dim() == 1 && truth.has_char_fn() {
        let edges = edges_from([fourier::frequency_cutoff(c)]);
        let rule = band_rule(&edges, fourier::max_abs(c.points()) + 1.0, fourier::needs_grading([c]));
        let table = EcfTable::new([c], &rule.nodes);
        let ecf = table.of(0);
        let mut acc = Vec::with_capacity(rule.len());
        for (q, &t) in rule.nodes.iter().enumerate() {
            let phi = truth.char_fn(&[t])?;
            acc.push(rule.weights[q] * c.kernel().ft_radial(c.bandwidth() * t) * (ecf[q] * phi.conj()).re);
        }
        return Ok(math::pairwise_sum(&acc) / PI);
    }
    Err(Error::unsupported(format!("exact inner product of a {} KDE with '{}'", c.kernel().name(), truth.name())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggregateMode {
    /// `λ ∈ R^M`, minimum-norm solution of `Gλ = b`.
    Linear,
    /// `λ` in the simplex `{λ ≥ 0, Σλ ≤ 1}`.
    Convex,
}

impl AggregateMode {
    pub fn tag(self) -> &'static str {
        match self {
            AggregateMode::Linear => "linear",
            AggregateMode::Convex => "convex",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateWeights {
    pub lambda: Vec<f64>,
    pub mode: AggregateMode,
    pub objective: f64,
    /// Simplex KKT residual, convex mode only.
    pub kkt_residual: Option<f64>,
    pub iterations: usize,
}

/// Minimum-norm solution of `Gλ = b`.
pub fn linear_weights(sys: &GramSystem, rank_tol: f64) -> Result<AggregateWeights> {
    let lambda = solve_min_norm(&sys.g, &sys.b, rank_tol)?;
    Ok(AggregateWeights { objective: sys.objective(&lambda), lambda, mode: AggregateMode::Linear, kkt_residual: None, iterations: 0 })
}

/// Minimizer of `λᵀGλ − 2bᵀλ` over the simplex.
pub fn convex_weights(sys: &GramSystem) -> Result<AggregateWeights> {
    let p = QpProblem::new(sys.g.clone(), sys.b.clone())?;
    let s = solve_simplex_qp(&p)?;
    if s.status != QpStatus::Converged {
        return Err(Error::SolverNonConvergence { iterations: s.iterations, residual: s.kkt_residual });
    }
    Ok(AggregateWeights {
        lambda: s.lambda,
        mode: AggregateMode::Convex,
        objective: s.objective,
        kkt_residual: Some(s.kkt_residual),
        iterations: s.iterations,
    })
}

pub fn solve_weights(sys: &GramSystem, mode: AggregateMode) -> Result<AggregateWeights> {
    match mode {
        AggregateMode::Linear => linear_weights(sys, DEFAULT_RANK_TOL),
        AggregateMode::Convex => convex_weights(sys),
    }
}

/// A training/validation partition of `0..n`, both parts sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
}

/// `count` independent uniformly random partitions with sizes from [`split_sizes`].
pub fn make_splits(n: usize, scheme: SplitScheme, count: usize, seed: SeedProvenance) -> Result<Vec<Split>> {
    if count == 0 {
        return Err(Error::invalid("at least one split is required"));
    }
    let (m, _) = split_sizes(n, scheme)?;
    Ok((0..count)
        .map(|s| {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut seed.child(s as u64).rng());
            let mut train = idx[..m].to_vec();
            let mut validation = idx[m..].to_vec();
            train.sort_unstable();
            validation.sort_unstable();
            Split { train, validation }
        })
        .collect())
}

/// `Σ λ_j p_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedAggregate {
    pub components: Vec<KdeEstimator>,
    pub weights: AggregateWeights,
}

impl WeightedAggregate {
    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        math::pairwise_sum_by(self.components.len(), |j| {
            let l = self.weights.lambda[j];
            if l == 0.0 {
                0.0
            } else {
                l * self.components[j].eval(x)
            }
        })
    }
}

/// Aggregates `components` with weights fitted on `validation`.
pub fn aggregate(
    components: Vec<KdeEstimator>,
    validation: &SamplePoints,
    mode: AggregateMode,
    backend: InnerProductBackend,
) -> Result<WeightedAggregate> {
    let sys = gram_system(&components, validation, backend)?;
    let weights = solve_weights(&sys, mode)?;
    Ok(WeightedAggregate { components, weights })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitRecord {
    pub id: usize,
    pub split: Split,
    pub aggregate: WeightedAggregate,
}

/// Pointwise mean of per-split aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragedAggregate {
    pub splits: Vec<SplitRecord>,
}

impl AveragedAggregate {
    pub fn dim(&self) -> usize {
        self.splits[0].aggregate.dim()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        math::pairwise_sum_by(self.splits.len(), |s| self.splits[s].aggregate.eval(x)) / self.splits.len() as f64
    }
}

/// Builds the component estimators from a training subsample.
pub trait EstimatorFactory {
    fn build(&self, training: Arc<SamplePoints>) -> Result<Vec<KdeEstimator>>;
}

impl<F> EstimatorFactory for F
where
    F: Fn(Arc<SamplePoints>) -> Result<Vec<KdeEstimator>>,
{
    fn build(&self, training: Arc<SamplePoints>) -> Result<Vec<KdeEstimator>> {
        self(training)
    }
}

/// One KDE per (kernel, bandwidth) pair, kernel-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorPool {
    pub kernels: Vec<KernelSpec>,
    pub bandwidths: Vec<f64>,
}

impl EstimatorPool {
    pub fn single_kernel(kernel: KernelSpec, bandwidths: &[f64]) -> Self {
        EstimatorPool { kernels: vec![kernel], bandwidths: bandwidths.to_vec() }
    }

    pub fn len(&self) -> usize {
        self.kernels.len() * self.bandwidths.len()
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(kernel, bandwidth)` of pool entry `k`.
    pub fn entry(&self, k: usize) -> (&KernelSpec, f64) {
        let nb = self.bandwidths.len();
        (&self.kernels[k / nb], self.bandwidths[k % nb])
    }
}

impl EstimatorFactory for EstimatorPool {
    fn build(&self, training: Arc<SamplePoints>) -> Result<Vec<KdeEstimator>> {
        let mut out = Vec::with_capacity(self.len());
        for k in &self.kernels {
            for &h in &self.bandwidths {
                out.push(KdeEstimator::fit(training.clone(), h, k.clone())?);
            }
        }
        Ok(out)
    }
}

/// Pool over every kernel of `family` and every bandwidth of `grid`.
pub fn multi_kernel_pool(family: &PinskerFamily, grid: &[f64]) -> Result<EstimatorPool> {
    if grid.is_empty() || grid.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
        return Err(Error::invalid("bandwidths must be positive"));
    }
    Ok(EstimatorPool { kernels: family.kernels()?, bandwidths: grid.to_vec() })
}

/// Averages `count` split aggregates: components come from `factory` on the
/// training part and weights from the validation part.
pub fn averaged_aggregate<F: EstimatorFactory + ?Sized>(
    sample: &SamplePoints,
    factory: &F,
    scheme: SplitScheme,
    count: usize,
    mode: AggregateMode,
    backend: InnerProductBackend,
    seed: SeedProvenance,
) -> Result<AveragedAggregate> {
    let splits = make_splits(sample.n(), scheme, count, seed)?;
    let mut records = Vec::with_capacity(splits.len());
    for (id, split) in splits.into_iter().enumerate() {
        let training = Arc::new(sample.subset(&split.train)?);
        let validation = sample.subset(&split.validation)?;
        let components = factory.build(training)?;
        let aggregate = aggregate(components, &validation, mode, backend)?;
        records.push(SplitRecord { id, split, aggregate });
    }
    Ok(AveragedAggregate { splits: records })
}
