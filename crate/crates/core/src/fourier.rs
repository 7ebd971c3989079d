//! Frequency-domain building blocks shared by the Gram and risk routines:
//! a fixed quadrature rule resolving band-limited integrands on `[0, T]` and
//! tabulated empirical characteristic functions.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::densities::SamplePoints;
use crate::kde::KdeEstimator;
use crate::math::{self, PI};
use crate::quadrature::Rule;

const ORDER: usize = 8;
const MIN_PANELS: usize = 8;
const GRADING_LEVELS: i32 = 40;

/// Composite Gauss–Legendre rule over consecutive `edges` whose panels are at
/// most a quarter period of `max_freq` wide. With `graded`, the panel touching
/// the origin is refined geometrically toward it.
pub fn band_rule(edges: &[f64], max_freq: f64, graded: bool) -> Rule {
    let mut rule = Rule { nodes: Vec::new(), weights: Vec::new() };
    let quarter = if max_freq > 0.0 { 0.5 * PI / max_freq } else { f64::INFINITY };
    for win in edges.windows(2) {
        let len = win[1] - win[0];
        if len <= 0.0 {
            continue;
        }
        let panels = (math::ceil(len / quarter) as usize).max(MIN_PANELS);
        if graded && win[0] == 0.0 {
            let w = len / panels as f64;
            push(&mut rule, Rule::composite_gauss_legendre(&[0.0, w * math::powi(0.5, GRADING_LEVELS)], 1, ORDER));
            for k in (0..GRADING_LEVELS).rev() {
                let hi = w * math::powi(0.5, k);
                push(&mut rule, Rule::composite_gauss_legendre(&[0.5 * hi, hi], 1, ORDER));
            }
            if panels > 1 {
                push(&mut rule, Rule::composite_gauss_legendre(&[w, win[1]], panels - 1, ORDER));
            }
        } else {
            push(&mut rule, Rule::composite_gauss_legendre(win, panels, ORDER));
        }
    }
    rule
}

fn push(rule: &mut Rule, part: Rule) {
    rule.nodes.extend(part.nodes);
    rule.weights.extend(part.weights);
}

/// Whether any component's `F[K]` is non-smooth at the origin.
pub fn needs_grading<'a>(components: impl IntoIterator<Item = &'a KdeEstimator>) -> bool {
    components.into_iter().any(|c| !c.kernel().ft_smooth_at_origin())
}

/// Largest `|x|` over the points of a one-dimensional sample.
pub fn max_abs(points: &SamplePoints) -> f64 {
    points.as_slice().iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

/// Frequency beyond which every component's `F[K](h t)` is negligible.
pub fn frequency_cutoff(kde: &KdeEstimator) -> f64 {
    let k = kde.kernel();
    k.ft_support().unwrap_or_else(|| k.ft_cutoff(1e-13)) / kde.bandwidth()
}

/// Sorted, deduplicated `{0} ∪ {cutoffs}`.
pub fn edges_from(cutoffs: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut e: Vec<f64> = core::iter::once(0.0).chain(cutoffs).collect();
    e.sort_unstable_by(f64::total_cmp);
    e.dedup();
    e
}

/// Empirical characteristic functions of the distinct training samples among
/// `components`, tabulated on `nodes`.
pub struct EcfTable {
    samples: Vec<Arc<SamplePoints>>,
    values: Vec<Vec<Complex64>>,
    owner: Vec<usize>,
}

impl EcfTable {
    pub fn new<'a>(components: impl IntoIterator<Item = &'a KdeEstimator>, nodes: &[f64]) -> Self {
        let mut samples: Vec<Arc<SamplePoints>> = Vec::new();
        let mut owner = Vec::new();
        for c in components {
            let p = c.shared_points();
            let idx = match samples.iter().position(|s| Arc::ptr_eq(s, p) || **s == **p) {
                Some(i) => i,
                None => {
                    samples.push(p.clone());
                    samples.len() - 1
                }
            };
            owner.push(idx);
        }
        let values = samples.iter().map(|s| nodes.iter().map(|&t| crate::kde::empirical_cf(s, t)).collect()).collect();
        EcfTable { samples, values, owner }
    }

    /// Values for the `k`-th component passed to [`EcfTable::new`].
    pub fn of(&self, k: usize) -> &[Complex64] {
        &self.values[self.owner[k]]
    }

    /// Largest `|x|` over every tabulated sample.
    pub fn spread(&self) -> f64 {
        self.samples.iter().map(|s| max_abs(s)).fold(0.0, f64::max)
    }
}
