//! Integrated squared error, Monte-Carlo MISE, grid-oracle risk and
//! comparator bandwidth selectors.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::aggregation::{self, kde_window, tensor_nodes, AveragedAggregate, InnerProductBackend, WeightedAggregate};
use crate::densities::{DensityModel, SamplePoints};
use crate::error::{Error, Result};
use crate::fourier::{self, band_rule, edges_from, EcfTable};
use crate::kde::KdeEstimator;
use crate::kernels::KernelSpec;
use crate::math::{self, PI};
use crate::quadrature::Rule;
use crate::rng::SeedProvenance;

/// An estimate that can be evaluated pointwise.
pub trait DensityEstimate {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> f64;

    /// `Σ w_c p_c` when the estimate is a finite combination of KDEs.
    fn kde_components(&self) -> Option<Vec<(f64, &KdeEstimator)>> {
        None
    }

    /// Box holding (numerically) all of the estimate's mass.
    fn window(&self) -> Option<Vec<(f64, f64)>> {
        let comps = self.kde_components()?;
        union_windows(comps.iter().map(|(_, c)| kde_window(c)))
    }
}

fn union_windows(ws: impl Iterator<Item = Vec<(f64, f64)>>) -> Option<Vec<(f64, f64)>> {
    ws.reduce(|a, b| a.iter().zip(&b).map(|(x, y)| (x.0.min(y.0), x.1.max(y.1))).collect())
}

impl DensityEstimate for KdeEstimator {
    fn dim(&self) -> usize {
        KdeEstimator::dim(self)
    }
    fn eval(&self, x: &[f64]) -> f64 {
        KdeEstimator::eval(self, x)
    }
    fn kde_components(&self) -> Option<Vec<(f64, &KdeEstimator)>> {
        Some(vec![(1.0, self)])
    }
}

impl DensityEstimate for WeightedAggregate {
    fn dim(&self) -> usize {
        WeightedAggregate::dim(self)
    }
    fn eval(&self, x: &[f64]) -> f64 {
        WeightedAggregate::eval(self, x)
    }
    fn kde_components(&self) -> Option<Vec<(f64, &KdeEstimator)>> {
        Some(
            self.weights
                .lambda
                .iter()
                .zip(&self.components)
                .filter(|(l, _)| **l != 0.0)
                .map(|(l, c)| (*l, c))
                .collect(),
        )
    }
}

impl DensityEstimate for AveragedAggregate {
    fn dim(&self) -> usize {
        AveragedAggregate::dim(self)
    }
    fn eval(&self, x: &[f64]) -> f64 {
        AveragedAggregate::eval(self, x)
    }
    fn kde_components(&self) -> Option<Vec<(f64, &KdeEstimator)>> {
        let s = self.splits.len() as f64;
        let mut out = Vec::new();
        for r in &self.splits {
            out.extend(r.aggregate.kde_components()?.into_iter().map(|(w, c)| (w / s, c)));
        }
        Some(out)
    }
}

/// The true density itself, as an "estimate".
impl DensityEstimate for DensityModel {
    fn dim(&self) -> usize {
        DensityModel::dim(self)
    }
    fn eval(&self, x: &[f64]) -> f64 {
        DensityModel::eval(self, x)
    }
    fn window(&self) -> Option<Vec<(f64, f64)>> {
        Some(self.support_window())
    }
}

/// An estimate given by a closure.
pub struct FnEstimate<F> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(&[f64]) -> f64> DensityEstimate for FnEstimate<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

impl<T: DensityEstimate + ?Sized> DensityEstimate for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (**self).eval(x)
    }
    fn kde_components(&self) -> Option<Vec<(f64, &KdeEstimator)>> {
        (**self).kde_components()
    }
    fn window(&self) -> Option<Vec<(f64, f64)>> {
        (**self).window()
    }
}

impl<T: DensityEstimate + ?Sized> DensityEstimate for alloc::boxed::Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (**self).eval(x)
    }
    fn kde_components(&self) -> Option<Vec<(f64, &KdeEstimator)>> {
        (**self).kde_components()
    }
    fn window(&self) -> Option<Vec<(f64, f64)>> {
        (**self).window()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureRule {
    Trapezoid,
    GaussLegendreComposite,
}

/// Spatial integration rule for [`ise`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    pub window: Vec<(f64, f64)>,
    /// Nodes per dimension.
    pub nodes: usize,
    pub rule: QuadratureRule,
    /// Interior points where the integrand may jump (`d = 1`).
    pub breakpoints: Vec<f64>,
}

pub const DEFAULT_ISE_NODES: usize = 4096;

impl QuadratureSpec {
    /// 4096 trapezoid nodes on the truth's support window, split at its jumps.
    pub fn for_truth(truth: &DensityModel) -> Self {
        QuadratureSpec {
            window: truth.support_window(),
            nodes: DEFAULT_ISE_NODES,
            rule: QuadratureRule::Trapezoid,
            breakpoints: truth.discontinuities(),
        }
    }

    /// [`QuadratureSpec::for_truth`] widened to the estimate's own window.
    pub fn covering<E: DensityEstimate + ?Sized>(truth: &DensityModel, est: &E) -> Self {
        let mut q = Self::for_truth(truth);
        if let Some(w) = est.window() {
            if w.len() == q.window.len() {
                q.window = q.window.iter().zip(&w).map(|(a, b)| (a.0.min(b.0), a.1.max(b.1))).collect();
            }
        }
        q
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }

    pub fn with_rule(mut self, rule: QuadratureRule) -> Self {
        self.rule = rule;
        self
    }

    fn rule_for(&self, j: usize) -> Rule {
        let (lo, hi) = self.window[j];
        let mut edges = vec![lo];
        if self.window.len() == 1 {
            let mut br: Vec<f64> = self.breakpoints.iter().copied().filter(|b| *b > lo && *b < hi).collect();
            br.sort_unstable_by(f64::total_cmp);
            br.dedup();
            edges.extend(br);
        }
        edges.push(hi);
        let pieces = edges.len() - 1;
        match self.rule {
            QuadratureRule::Trapezoid => {
                // distribute nodes over the pieces in proportion to their length
                let mut nodes = Vec::with_capacity(self.nodes + pieces);
                let mut weights = Vec::with_capacity(self.nodes + pieces);
                for w in edges.windows(2) {
                    let k = ((self.nodes as f64 * (w[1] - w[0]) / (hi - lo)) as usize).max(2);
                    let r = Rule::trapezoid(w[0], w[1], k);
                    nodes.extend(r.nodes);
                    weights.extend(r.weights);
                }
                Rule { nodes, weights }
            }
            QuadratureRule::GaussLegendreComposite => {
                let order = 8;
                let panels = (self.nodes / (order * pieces)).max(1);
                Rule::composite_gauss_legendre(&edges, panels, order)
            }
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if self.window.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: self.window.len() });
        }
        if self.nodes < 64 {
            return Err(Error::invalid("quadrature needs at least 64 nodes per dimension"));
        }
        if self.window.iter().any(|(a, b)| !(a.is_finite() && b.is_finite() && a < b)) {
            return Err(Error::invalid("quadrature window must be finite and nonempty"));
        }
        Ok(())
    }
}

/// `∫ (p̂ − p)²` over the window of `q`.
pub fn ise<E: DensityEstimate + ?Sized>(est: &E, truth: &DensityModel, q: &QuadratureSpec) -> Result<f64> {
    let dim = truth.dim();
    if est.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: est.dim() });
    }
    q.validate(dim)?;
    let rules: Vec<Rule> = (0..dim).map(|j| q.rule_for(j)).collect();
    let v = if dim == 1 {
        rules[0].apply(|x| {
            let d = est.eval(&[x]) - truth.eval(&[x]);
            d * d
        })
    } else {
        let (nodes, weights) = tensor_nodes(&rules);
        math::pairwise_sum_by(weights.len(), |i| {
            let x = &nodes[i * dim..(i + 1) * dim];
            let d = est.eval(x) - truth.eval(x);
            weights[i] * d * d
        })
    };
    Ok(v.max(0.0))
}

/// Gaussian bumps `Σ w_i N(x − c_i; h²I)` sharing one bandwidth.
#[derive(Debug, Clone, PartialEq)]
struct GaussianBlock {
    h: f64,
    centers: Vec<f64>,
    weights: Vec<f64>,
}

/// Groups the bumps of Gaussian-kernel components by bandwidth and merges
/// repeated centers, so repeated training points cost one term.
fn gaussian_blocks(comps: &[(f64, &KdeEstimator)], dim: usize) -> Vec<GaussianBlock> {
    let mut hs: Vec<f64> = comps.iter().map(|(_, c)| c.bandwidth()).collect();
    hs.sort_unstable_by(f64::total_cmp);
    hs.dedup();
    hs.into_iter()
        .map(|h| {
            let mut terms: Vec<(&[f64], f64)> = Vec::new();
            for (w, c) in comps.iter().filter(|(_, c)| c.bandwidth() == h) {
                let wi = w / c.m() as f64;
                terms.extend(c.points().iter().map(|x| (x, wi)));
            }
            terms.sort_by(|a, b| {
                a.0.iter().zip(b.0).map(|(u, v)| u.total_cmp(v)).find(|o| o.is_ne()).unwrap_or(core::cmp::Ordering::Equal)
            });
            let mut centers: Vec<f64> = Vec::with_capacity(terms.len() * dim);
            let mut weights: Vec<f64> = Vec::with_capacity(terms.len());
            for (x, w) in terms {
                let n = weights.len();
                if n > 0 && &centers[(n - 1) * dim..] == x {
                    weights[n - 1] += w;
                } else {
                    centers.extend_from_slice(x);
                    weights.push(w);
                }
            }
            GaussianBlock { h, centers, weights }
        })
        .collect()
}

fn block_inner(a: &GaussianBlock, b: &GaussianBlock, dim: usize, same: bool) -> f64 {
    let var = a.h * a.h + b.h * b.h;
    let norm = math::powf(2.0 * PI * var, -0.5 * dim as f64);
    let scale = -0.5 / var;
    let term = |i: usize, k: usize| {
        let r2: f64 = if dim == 1 {
            let t = a.centers[i] - b.centers[k];
            t * t
        } else {
            a.centers[i * dim..(i + 1) * dim]
                .iter()
                .zip(&b.centers[k * dim..(k + 1) * dim])
                .map(|(u, v)| (u - v) * (u - v))
                .sum()
        };
        math::exp(scale * r2)
    };
    let s = if same {
        let diag = math::pairwise_sum_by(a.weights.len(), |i| a.weights[i] * a.weights[i]);
        let off = math::pairwise_sum_by(a.weights.len(), |i| {
            a.weights[i] * math::pairwise_sum_by(i, |k| a.weights[k] * term(i, k))
        });
        diag + 2.0 * off
    } else {
        math::pairwise_sum_by(a.weights.len(), |i| {
            a.weights[i] * math::pairwise_sum_by(b.weights.len(), |k| b.weights[k] * term(i, k))
        })
    };
    norm * s
}

/// Exact ISE `‖p̂‖² − 2⟨p̂, p⟩ + ‖p‖²` of a combination of Gaussian-kernel
/// KDEs, using the truth's Gaussian smoothing for the cross term.
pub fn ise_exact<E: DensityEstimate + ?Sized>(est: &E, truth: &DensityModel) -> Result<f64> {
    let comps = est
        .kde_components()
        .ok_or_else(|| Error::unsupported("exact ISE needs a combination of kernel estimators"))?;
    if comps.iter().any(|(_, c)| !c.kernel().is_gaussian()) {
        return Err(Error::unsupported("exact ISE needs Gaussian kernels"));
    }
    if !truth.supports_gaussian_smoothing() {
        return Err(Error::unsupported(format!("exact ISE against '{}'", truth.name())));
    }
    let dim = truth.dim();
    if est.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: est.dim() });
    }
    let truth_norm = truth.l2_norm_sq()?;
    if comps.is_empty() {
        return Ok(truth_norm);
    }
    let blocks = gaussian_blocks(&comps, dim);
    let mut norm_terms = Vec::new();
    for a in 0..blocks.len() {
        for b in a..blocks.len() {
            let v = block_inner(&blocks[a], &blocks[b], dim, a == b);
            norm_terms.push(if a == b { v } else { 2.0 * v });
        }
    }
    let mut cross_terms = Vec::new();
    for blk in &blocks {
        for (i, w) in blk.weights.iter().enumerate() {
            cross_terms.push(w * truth.gaussian_smoothed(&blk.centers[i * dim..(i + 1) * dim], blk.h)?);
        }
    }
    let v = math::pairwise_sum(&norm_terms) - 2.0 * math::pairwise_sum(&cross_terms) + truth_norm;
    Ok(v.max(0.0))
}

/// ISE in the frequency domain, `π^{-1} ∫₀^∞ (|ŝ|² − 2 Re ŝφ̄) dt + ‖p‖²` with
/// `ŝ = Σ w_c F[K_c](h_c t) φ̂_c(t)` (`d = 1`). Suited to kernels with compactly supported transforms.
pub fn ise_fourier<E: DensityEstimate + ?Sized>(est: &E, truth: &DensityModel) -> Result<f64> {
    let comps = est
        .kde_components()
        .ok_or_else(|| Error::unsupported("Fourier ISE needs a combination of kernel estimators"))?;
    if truth.dim() != 1 || est.dim() != 1 {
        return Err(Error::unsupported("Fourier ISE is implemented for d = 1"));
    }
    if !truth.has_char_fn() {
        return Err(Error::unsupported(format!("density '{}' has no characteristic function", truth.name())));
    }
    if comps.is_empty() {
        return truth.l2_norm_sq();
    }
    let cf = |t: f64| truth.char_fn(&[t]).unwrap_or_default();
    let spread = comps.iter().map(|(_, c)| fourier::max_abs(c.points())).fold(0.0, f64::max);
    let edges = edges_from(comps.iter().map(|(_, c)| fourier::frequency_cutoff(c)));
    let rule = band_rule(&edges, 2.0 * spread + 1.0, fourier::needs_grading(comps.iter().map(|(_, c)| *c)));
    let table = EcfTable::new(comps.iter().map(|(_, c)| *c), &rule.nodes);
    // ‖p̂‖² − 2⟨p̂, p⟩ over the band where p̂ lives, ‖p‖² in closed form
    let body = math::pairwise_sum_by(rule.len(), |q| {
        let t = rule.nodes[q];
        let mut s = Complex64::new(0.0, 0.0);
        for (k, (w, c)) in comps.iter().enumerate() {
            s += table.of(k)[q] * (w * c.kernel().ft_radial(c.bandwidth() * t));
        }
        rule.weights[q] * (s.norm_sqr() - 2.0 * (s * cf(t).conj()).re)
    });
    Ok((body / PI + truth.l2_norm_sq()?).max(0.0))
}

/// How [`mise_mc`] measures each replication's ISE.
#[derive(Debug, Clone, PartialEq)]
pub enum IseMethod {
    /// Exact for Gaussian-kernel combinations, frequency domain for other
    /// kernels in `d = 1`, spatial quadrature otherwise.
    Auto,
    Exact,
    Fourier,
    /// Spatial quadrature; `None` uses [`QuadratureSpec::covering`].
    Quadrature(Option<QuadratureSpec>),
}

impl IseMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            IseMethod::Auto => "auto",
            IseMethod::Exact => "exact",
            IseMethod::Fourier => "fourier",
            IseMethod::Quadrature(_) => "quadrature",
        }
    }
}

/// ISE of `est` by `method`.
pub fn measure_ise<E: DensityEstimate + ?Sized>(est: &E, truth: &DensityModel, method: &IseMethod) -> Result<f64> {
    match method {
        IseMethod::Exact => ise_exact(est, truth),
        IseMethod::Fourier => ise_fourier(est, truth),
        IseMethod::Quadrature(Some(q)) => ise(est, truth, q),
        IseMethod::Quadrature(None) => ise(est, truth, &QuadratureSpec::covering(truth, est)),
        IseMethod::Auto => match est.kde_components() {
            Some(c) if c.iter().all(|(_, k)| k.kernel().is_gaussian()) && truth.supports_gaussian_smoothing() => {
                ise_exact(est, truth)
            }
            Some(_) if truth.dim() == 1 && truth.has_char_fn() => ise_fourier(est, truth),
            _ => ise(est, truth, &QuadratureSpec::covering(truth, est)),
        },
    }
}

/// Monte-Carlo MISE over `R` replications.
#[derive(Debug, Clone, PartialEq)]
pub struct MiseReport {
    pub estimator: String,
    pub density: String,
    pub n: usize,
    pub replications: usize,
    pub mean: f64,
    /// Sample standard deviation over `√R`.
    pub stderr: f64,
    pub ises: Option<Vec<f64>>,
    pub seed: u64,
    pub wall_time_secs: Option<f64>,
}

impl MiseReport {
    /// Summarizes per-replication ISEs (kept in `ises`).
    pub fn from_ises(estimator: impl Into<String>, density: impl Into<String>, n: usize, seed: u64, ises: Vec<f64>) -> Result<Self> {
        if ises.len() < 2 {
            return Err(Error::invalid("MISE needs at least two replications"));
        }
        let (mean, sd) = math::mean_and_sd(&ises);
        Ok(MiseReport {
            estimator: estimator.into(),
            density: density.into(),
            n,
            replications: ises.len(),
            mean,
            stderr: sd / math::sqrt(ises.len() as f64),
            ises: Some(ises),
            seed,
            wall_time_secs: None,
        })
    }
}

/// Sample for replication `rep`; the estimator's own randomness (splits) uses
/// [`replication_seed`]`(seed, rep).child(1)`.
pub fn replication_sample(truth: &DensityModel, n: usize, seed: SeedProvenance, rep: usize) -> Result<SamplePoints> {
    truth.sample(n, replication_seed(seed, rep).child(0))
}

pub fn replication_seed(seed: SeedProvenance, rep: usize) -> SeedProvenance {
    seed.child(rep as u64)
}

/// ISE of one replication.
pub fn replication_ise<B, E>(builder: &B, truth: &DensityModel, n: usize, method: &IseMethod, seed: SeedProvenance, rep: usize) -> Result<f64>
where
    B: Fn(&SamplePoints, SeedProvenance) -> Result<E> + ?Sized,
    E: DensityEstimate,
{
    let sample = replication_sample(truth, n, seed, rep)?;
    let est = builder(&sample, replication_seed(seed, rep).child(1))?;
    measure_ise(&est, truth, method)
}

/// Sequential Monte-Carlo MISE of `builder` over `r` samples of size `n`.
pub fn mise_mc<B, E>(
    label: &str,
    builder: &B,
    truth: &DensityModel,
    n: usize,
    r: usize,
    method: &IseMethod,
    seed: SeedProvenance,
) -> Result<MiseReport>
where
    B: Fn(&SamplePoints, SeedProvenance) -> Result<E> + ?Sized,
    E: DensityEstimate,
{
    if r < 2 {
        return Err(Error::invalid("MISE needs at least two replications"));
    }
    let ises = (0..r).map(|rep| replication_ise(builder, truth, n, method, seed, rep)).collect::<Result<Vec<_>>>()?;
    MiseReport::from_ises(label, truth.name(), n, seed.master, ises)
}

/// Per-bandwidth MISE curve and its minimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub best_h: f64,
    pub best: MiseReport,
    pub curve: Vec<(f64, MiseReport)>,
}

/// ISEs of one replication at every bandwidth, sharing the sample.
pub fn oracle_replication(
    grid: &[f64],
    kernel: &KernelSpec,
    truth: &DensityModel,
    n: usize,
    method: &IseMethod,
    seed: SeedProvenance,
    rep: usize,
) -> Result<Vec<f64>> {
    let sample = alloc::sync::Arc::new(replication_sample(truth, n, seed, rep)?);
    grid.iter()
        .map(|&h| measure_ise(&KdeEstimator::fit(sample.clone(), h, kernel.clone())?, truth, method))
        .collect()
}

impl OracleReport {
    /// Assembles the report from per-replication rows of [`oracle_replication`].
    pub fn from_replications(grid: &[f64], kernel: &KernelSpec, truth: &DensityModel, n: usize, seed: u64, rows: &[Vec<f64>]) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::invalid("bandwidth grid is empty"));
        }
        let mut curve = Vec::with_capacity(grid.len());
        for (j, &h) in grid.iter().enumerate() {
            let ises: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            curve.push((h, MiseReport::from_ises(format!("kde[{}] h={h}", kernel.name()), truth.name(), n, seed, ises)?));
        }
        // ties go to the smaller bandwidth
        let mut best = 0;
        for j in 1..curve.len() {
            let (hj, rj) = (&curve[j].0, &curve[j].1);
            let (hb, rb) = (&curve[best].0, &curve[best].1);
            if rj.mean < rb.mean || (rj.mean == rb.mean && hj < hb) {
                best = j;
            }
        }
        let (best_h, mut report) = curve[best].clone();
        report.estimator = String::from("oracle");
        Ok(OracleReport { best_h, best: report, curve })
    }
}

/// Best single bandwidth on `grid` by MISE, with common random numbers.
pub fn oracle_risk(
    grid: &[f64],
    kernel: &KernelSpec,
    truth: &DensityModel,
    n: usize,
    r: usize,
    method: &IseMethod,
    seed: SeedProvenance,
) -> Result<OracleReport> {
    if grid.is_empty() {
        return Err(Error::invalid("bandwidth grid is empty"));
    }
    let rows = (0..r).map(|rep| oracle_replication(grid, kernel, truth, n, method, seed, rep)).collect::<Result<Vec<_>>>()?;
    OracleReport::from_replications(grid, kernel, truth, n, seed.master, &rows)
}

/// UCV criterion `‖p̂_h‖² − (2/m) Σᵢ p̂_{h,−i}(Xᵢ)`.
pub fn ucv_criterion(points: &alloc::sync::Arc<SamplePoints>, kernel: &KernelSpec, h: f64, backend: InnerProductBackend) -> Result<f64> {
    let kde = KdeEstimator::fit(points.clone(), h, kernel.clone())?;
    let m = kde.m();
    if m < 2 {
        return Err(Error::invalid("UCV needs at least two points"));
    }
    let norm = aggregation::inner_product(&kde, &kde, backend)?;
    let loo = (0..m).map(|i| kde.loo_eval(i)).collect::<Result<Vec<_>>>()?;
    Ok(norm - 2.0 * math::pairwise_sum(&loo) / m as f64)
}

/// Candidate minimizing the UCV criterion (ties go to the smaller bandwidth).
pub fn ucv_select(points: &alloc::sync::Arc<SamplePoints>, kernel: &KernelSpec, candidates: &[f64], backend: InnerProductBackend) -> Result<f64> {
    if candidates.is_empty() || candidates.iter().any(|h| !(*h > 0.0)) {
        return Err(Error::invalid("UCV candidates must be positive"));
    }
    let mut best: Option<(f64, f64)> = None;
    for &h in candidates {
        let c = ucv_criterion(points, kernel, h, backend)?;
        best = match best {
            Some((bh, bc)) if bc < c || (bc == c && bh <= h) => Some((bh, bc)),
            _ => Some((h, c)),
        };
    }
    Ok(best.expect("candidates nonempty").0)
}

/// Linear-interpolation quantile of sorted data (`p ∈ [0, 1]`).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = math::floor(pos) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

fn rule_of_thumb(points: &SamplePoints, factor: f64) -> Result<f64> {
    if points.dim() != 1 {
        return Err(Error::unsupported("rule-of-thumb bandwidths are one-dimensional"));
    }
    let m = points.n();
    if m < 2 {
        return Err(Error::invalid("rule-of-thumb bandwidth needs at least two points"));
    }
    let xs = points.as_slice();
    let (_, sd) = math::mean_and_sd(xs);
    let mut sorted = xs.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let mut spread = sd.min(iqr / 1.34);
    if !(spread > 0.0) {
        spread = if sd > 0.0 { sd } else if iqr > 0.0 { iqr / 1.34 } else { 0.0 };
    }
    let scale = math::powf(m as f64, -0.2);
    if spread > 0.0 {
        Ok(factor * spread * scale)
    } else {
        Ok(scale * xs[0].abs().max(1.0) * 1e-3)
    }
}

/// `0.9 · min(sd, IQR/1.34) · m^{-1/5}`.
pub fn nrd0(points: &SamplePoints) -> Result<f64> {
    rule_of_thumb(points, 0.9)
}

/// `1.06 · min(sd, IQR/1.34) · m^{-1/5}`.
pub fn nrd(points: &SamplePoints) -> Result<f64> {
    rule_of_thumb(points, 1.06)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_estimate_gives_truth_norm() {
        let truth = DensityModel::standard_gaussian();
        let zero = FnEstimate { dim: 1, f: |_: &[f64]| 0.0 };
        let v = ise(&zero, &truth, &QuadratureSpec::for_truth(&truth)).unwrap();
        assert!((v - 0.5 / math::sqrt(PI)).abs() < 1e-12);
        assert_eq!(ise(&truth, &truth, &QuadratureSpec::for_truth(&truth)).unwrap(), 0.0);
    }

    #[test]
    fn shifted_gaussian_closed_form() {
        let truth = DensityModel::standard_gaussian();
        let shifted = FnEstimate { dim: 1, f: |x: &[f64]| math::std_normal_pdf(x[0] - 0.5) };
        // 2(‖φ‖² − ⟨φ, φ(· − 0.5)⟩) = 2(N(0; 2) − N(0.5; 2))
        let want = 2.0 * (math::normal_pdf(0.0, 2.0) - math::normal_pdf(0.5, 2.0));
        let q = QuadratureSpec::for_truth(&truth);
        assert!((ise(&shifted, &truth, &q).unwrap() - want).abs() < 1e-10);
    }

    #[test]
    fn exact_fourier_and_quadrature_agree() {
        let truth = DensityModel::standard_gaussian();
        let s = truth.sample(40, SeedProvenance::from_master(3)).unwrap();
        let k = KdeEstimator::fit(s, 0.3, KernelSpec::gaussian(1).unwrap()).unwrap();
        let a = ise_exact(&k, &truth).unwrap();
        let b = ise_fourier(&k, &truth).unwrap();
        let c = ise(&k, &truth, &QuadratureSpec::covering(&truth, &k)).unwrap();
        assert!((a - b).abs() < 1e-9 * a.max(1e-3), "{a} {b}");
        assert!((a - c).abs() < 1e-9 * a.max(1e-3), "{a} {c}");
    }

    #[test]
    fn nrd_ratio_and_fallback() {
        let p = SamplePoints::from_scalars(vec![0.1, -0.4, 2.0, 1.3, 0.7, -1.1]).unwrap();
        let r = nrd(&p).unwrap() / nrd0(&p).unwrap();
        assert!((r - 1.06 / 0.9).abs() < 1e-14);
        let same = SamplePoints::from_scalars(vec![2.0; 5]).unwrap();
        assert!((nrd0(&same).unwrap() - math::powf(5.0, -0.2) * 2.0e-3).abs() < 1e-15);
    }
}
