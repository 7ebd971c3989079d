#![allow(dead_code)]

use agg_density_core::quadrature::Rule;

/// Composite Gauss–Legendre integral over `[lo, hi]` split at `breaks`, with
/// panels no wider than `width`.
pub fn quad(f: impl Fn(f64) -> f64, lo: f64, hi: f64, breaks: &[f64], width: f64) -> f64 {
    let mut edges: Vec<f64> = breaks.iter().copied().filter(|b| *b > lo && *b < hi).collect();
    edges.push(lo);
    edges.push(hi);
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let mut total = 0.0;
    for w in edges.windows(2) {
        let panels = ((w[1] - w[0]) / width).ceil().max(1.0) as usize;
        let r = Rule::composite_gauss_legendre(w, panels, 10);
        total += r.nodes.iter().zip(&r.weights).map(|(x, wt)| wt * f(*x)).sum::<f64>();
    }
    total
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}
