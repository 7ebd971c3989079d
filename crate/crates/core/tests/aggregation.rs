mod common;

use std::sync::Arc;

use agg_density_core::aggregation::{
    aggregate, averaged_aggregate, convex_weights, exact_b, gram_system, inner_product, linear_weights, make_splits,
    multi_kernel_pool, AggregateMode, EstimatorPool, InnerProductBackend, DEFAULT_RANK_TOL,
};
use agg_density_core::densities::{DensityModel, SamplePoints};
use agg_density_core::kde::{KdeEstimator, SplitScheme};
use agg_density_core::kernels::{pinsker_family, KernelSpec};
use agg_density_core::risk::{ise_exact, ise_fourier};
use agg_density_core::SeedProvenance;
use common::{quad, rel_close};
use proptest::prelude::*;

fn gaussian() -> KernelSpec {
    KernelSpec::gaussian(1).unwrap()
}

fn sample(truth: &DensityModel, n: usize, seed: u64) -> Arc<SamplePoints> {
    Arc::new(truth.sample(n, SeedProvenance::from_master(seed)).unwrap())
}

fn pool(points: &Arc<SamplePoints>, hs: &[f64], kernel: &KernelSpec) -> Vec<KdeEstimator> {
    hs.iter().map(|&h| KdeEstimator::fit(points.clone(), h, kernel.clone()).unwrap()).collect()
}

#[test]
fn backends_agree_on_gaussian_components() {
    let truth = DensityModel::standard_gaussian();
    for seed in 0..5 {
        let a = KdeEstimator::fit(sample(&truth, 20, seed), 0.2 + 0.1 * seed as f64, gaussian()).unwrap();
        let b = KdeEstimator::fit(sample(&truth, 20, seed + 100), 0.35, gaussian()).unwrap();
        let closed = inner_product(&a, &b, InnerProductBackend::GaussianClosedForm).unwrap();
        let fourier = inner_product(&a, &b, InnerProductBackend::FourierQuadrature).unwrap();
        let spatial = inner_product(&a, &b, InnerProductBackend::SpatialQuadrature).unwrap();
        let direct = quad(|x| a.eval1(x) * b.eval1(x), -12.0, 12.0, &[], 0.02);
        assert!(rel_close(closed, direct, 1e-10), "{closed} {direct}");
        assert!(rel_close(fourier, direct, 1e-8), "{fourier} {direct}");
        assert!(rel_close(spatial, direct, 1e-8), "{spatial} {direct}");
    }
}

#[test]
fn pinsker_gram_fourier_matches_spatial() {
    let truth = DensityModel::standard_gaussian();
    let pts = sample(&truth, 15, 4);
    let fam = pinsker_family(2, 1).unwrap();
    let mut comps = Vec::new();
    for k in fam.kernels().unwrap() {
        comps.extend(pool(&pts, &[0.3, 0.6], &k));
    }
    comps.extend(pool(&pts, &[0.4], &gaussian()));
    let val = truth.sample(30, SeedProvenance::from_master(5)).unwrap();
    let f = gram_system(&comps, &val, InnerProductBackend::FourierQuadrature).unwrap();
    let s = gram_system(&comps, &val, InnerProductBackend::SpatialQuadrature).unwrap();
    for j in 0..comps.len() {
        for k in 0..comps.len() {
            let (x, y) = (f.g.get(j, k), s.g.get(j, k));
            assert!((x - y).abs() <= 1e-6 * x.abs().max(1e-3), "({j},{k}) {x} {y}");
        }
    }
    assert_eq!(f.b, s.b);
}

#[test]
fn objective_matches_direct_evaluation() {
    let truth = DensityModel::standard_gaussian();
    let pts = sample(&truth, 40, 1);
    let comps = pool(&pts, &[0.15, 0.4, 0.9], &gaussian());
    let val = truth.sample(25, SeedProvenance::from_master(2)).unwrap();
    let sys = gram_system(&comps, &val, InnerProductBackend::Auto).unwrap();
    let lambda = [0.2, 0.5, -0.1];
    let f = |x: f64| lambda.iter().zip(&comps).map(|(l, c)| l * c.eval1(x)).sum::<f64>();
    let norm = quad(|x| f(x) * f(x), -12.0, 12.0, &[], 0.02);
    let emp = val.iter().map(|z| f(z[0])).sum::<f64>() / val.n() as f64;
    let want = norm - 2.0 * emp;
    assert!((sys.objective(&lambda) - want).abs() < 1e-10, "{} {want}", sys.objective(&lambda));
}

#[test]
fn linear_weights_match_gram_schmidt_projection() {
    let truth = DensityModel::standard_gaussian();
    let comps: Vec<KdeEstimator> = [(0.2, 11), (0.5, 12), (1.0, 13), (0.35, 14)]
        .iter()
        .map(|&(h, s)| KdeEstimator::fit(sample(&truth, 10, s), h, gaussian()).unwrap())
        .collect();
    let val = truth.sample(30, SeedProvenance::from_master(9)).unwrap();
    // orthonormal basis on a tabulated grid, inner products by quadrature
    let rule = agg_density_core::quadrature::Rule::composite_gauss_legendre(&[-12.0, 12.0], 1200, 10);
    let tab: Vec<Vec<f64>> = comps.iter().map(|c| rule.nodes.iter().map(|&x| c.eval1(x)).collect()).collect();
    let vals: Vec<Vec<f64>> = comps.iter().map(|c| val.iter().map(|z| c.eval1(z[0])).collect()).collect();
    let ip = |a: &[f64], b: &[f64]| a.iter().zip(b).zip(&rule.weights).map(|((x, y), w)| x * y * w).sum::<f64>();
    let mut basis: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for (t, v) in tab.iter().zip(&vals) {
        let (mut t, mut v) = (t.clone(), v.clone());
        for (bt, bv) in &basis {
            let c = ip(&t, bt);
            t.iter_mut().zip(bt).for_each(|(x, y)| *x -= c * y);
            v.iter_mut().zip(bv).for_each(|(x, y)| *x -= c * y);
        }
        let n = ip(&t, &t).sqrt();
        basis.push((t.iter().map(|x| x / n).collect(), v.iter().map(|x| x / n).collect()));
    }
    // projection of the empirical functional onto the span
    let mut fitted = vec![0.0; rule.nodes.len()];
    for (bt, bv) in &basis {
        let c = bv.iter().sum::<f64>() / val.n() as f64;
        fitted.iter_mut().zip(bt).for_each(|(f, b)| *f += c * b);
    }
    let agg = aggregate(comps.clone(), &val, AggregateMode::Linear, InnerProductBackend::Auto).unwrap();
    let ours: Vec<f64> = rule.nodes.iter().map(|&x| agg.eval(&[x])).collect();
    let err = ip(&ours.iter().zip(&fitted).map(|(a, b)| a - b).collect::<Vec<_>>(), &ours.iter().zip(&fitted).map(|(a, b)| a - b).collect::<Vec<_>>());
    assert!(err.sqrt() < 1e-8 * ip(&fitted, &fitted).sqrt(), "{err}");
}

#[test]
fn duplicated_components_share_the_aggregate() {
    let truth = DensityModel::standard_gaussian();
    let pts = sample(&truth, 30, 21);
    let val = truth.sample(30, SeedProvenance::from_master(22)).unwrap();
    let single = aggregate(pool(&pts, &[0.3, 0.7], &gaussian()), &val, AggregateMode::Linear, InnerProductBackend::Auto).unwrap();
    let doubled = aggregate(pool(&pts, &[0.3, 0.3, 0.7], &gaussian()), &val, AggregateMode::Linear, InnerProductBackend::Auto).unwrap();
    assert!((doubled.weights.lambda[0] - doubled.weights.lambda[1]).abs() < 1e-10);
    for x in [-2.0, -0.5, 0.0, 0.4, 1.7] {
        assert!((single.eval(&[x]) - doubled.eval(&[x])).abs() < 1e-9);
    }
    let convex = aggregate(pool(&pts, &[0.3, 0.3, 0.7], &gaussian()), &val, AggregateMode::Convex, InnerProductBackend::Auto).unwrap();
    assert!(convex.weights.kkt_residual.unwrap() <= 1e-8);
}

#[test]
fn exact_b_matches_quadrature() {
    for truth in [DensityModel::standard_gaussian(), DensityModel::exponential(1.0).unwrap(), DensityModel::dens1(), DensityModel::claw()] {
        let pts = sample(&truth, 30, 31);
        let comps = pool(&pts, &[0.05, 0.3, 1.0], &gaussian());
        let b = exact_b(&comps, &truth).unwrap();
        let breaks = truth.discontinuities();
        for (c, bj) in comps.iter().zip(&b) {
            let direct = quad(|x| c.eval1(x) * truth.eval1(x), -15.0, 45.0, &breaks, 0.004);
            assert!((bj - direct).abs() < 1e-9 * direct.max(1e-3), "{} h={}: {bj} {direct}", truth.name(), c.bandwidth());
        }
    }
}

#[test]
fn empirical_b_is_unbiased() {
    let truth = DensityModel::standard_gaussian();
    let comps = pool(&sample(&truth, 20, 41), &[0.2, 0.8], &gaussian());
    let want = exact_b(&comps, &truth).unwrap();
    let reps = 400;
    let bs: Vec<Vec<f64>> = (0..reps)
        .map(|r| {
            let val = truth.sample(10, SeedProvenance::from_master(42).child(r)).unwrap();
            gram_system(&comps, &val, InnerProductBackend::Auto).unwrap().b
        })
        .collect();
    for j in 0..2 {
        let xs: Vec<f64> = bs.iter().map(|b| b[j]).collect();
        let mean = xs.iter().sum::<f64>() / reps as f64;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt();
        assert!((mean - want[j]).abs() < 4.0 * sd / (reps as f64).sqrt(), "{mean} {}", want[j]);
    }
}

#[test]
fn single_split_average_is_the_split_aggregate() {
    let truth = DensityModel::standard_gaussian();
    let s = truth.sample(60, SeedProvenance::from_master(51)).unwrap();
    let factory = EstimatorPool::single_kernel(gaussian(), &[0.2, 0.5, 1.0]);
    let seed = SeedProvenance::from_master(52);
    let avg = averaged_aggregate(&s, &factory, SplitScheme::EqualHalves, 1, AggregateMode::Convex, InnerProductBackend::Auto, seed).unwrap();
    let split = &make_splits(60, SplitScheme::EqualHalves, 1, seed).unwrap()[0];
    let train = Arc::new(s.subset(&split.train).unwrap());
    let direct = aggregate(pool(&train, &[0.2, 0.5, 1.0], &gaussian()), &s.subset(&split.validation).unwrap(), AggregateMode::Convex, InnerProductBackend::Auto).unwrap();
    for x in [-1.5, 0.0, 0.3, 2.2] {
        assert_eq!(avg.eval(&[x]), direct.eval(&[x]));
    }
}

#[test]
fn multi_kernel_pool_aggregates() {
    let truth = DensityModel::standard_gaussian();
    let s = truth.sample(80, SeedProvenance::from_master(61)).unwrap();
    let factory = multi_kernel_pool(&pinsker_family(2, 1).unwrap(), &[0.3, 0.6]).unwrap();
    let avg = averaged_aggregate(&s, &factory, SplitScheme::EqualHalves, 2, AggregateMode::Convex, InnerProductBackend::Auto, SeedProvenance::from_master(62)).unwrap();
    for r in &avg.splits {
        assert_eq!(r.aggregate.components.len(), 4);
        assert!(r.aggregate.weights.kkt_residual.unwrap() <= 1e-8);
    }
    assert!(ise_fourier(&avg, &truth).unwrap() < 0.05);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gram_is_positive_semidefinite(seed in 0u64..10_000, m in 1usize..7) {
        let truth = DensityModel::claw();
        let pts = sample(&truth, 12, seed);
        let hs: Vec<f64> = (0..m).map(|j| 0.01 * 3f64.powi(j as i32)).collect();
        let val = truth.sample(5, SeedProvenance::from_master(seed + 1)).unwrap();
        let sys = gram_system(&pool(&pts, &hs, &gaussian()), &val, InnerProductBackend::Auto).unwrap();
        let (eig, _) = sys.g.symmetric_eigen().unwrap();
        let tr = sys.g.trace();
        prop_assert!(eig.iter().all(|e| *e >= -1e-10 * tr));
        let lin = linear_weights(&sys, DEFAULT_RANK_TOL).unwrap();
        let cvx = convex_weights(&sys).unwrap();
        prop_assert!(lin.objective <= cvx.objective + 1e-9 * (1.0 + cvx.objective.abs()));
    }

    #[test]
    fn averaging_splits_never_hurts(seed in 0u64..10_000, count in 2usize..5) {
        let truth = DensityModel::standard_gaussian();
        let s = truth.sample(40, SeedProvenance::from_master(seed)).unwrap();
        let factory = EstimatorPool::single_kernel(gaussian(), &[0.1, 0.4, 1.2]);
        let avg = averaged_aggregate(&s, &factory, SplitScheme::EqualHalves, count, AggregateMode::Convex, InnerProductBackend::Auto, SeedProvenance::from_master(seed + 7)).unwrap();
        let mean_ise = avg.splits.iter().map(|r| ise_exact(&r.aggregate, &truth).unwrap()).sum::<f64>() / count as f64;
        prop_assert!(ise_exact(&avg, &truth).unwrap() <= mean_ise + 1e-12);
    }

    #[test]
    fn splits_partition_the_sample(n in 3usize..400, count in 1usize..6, seed in any::<u64>()) {
        for scheme in [SplitScheme::Asymptotic, SplitScheme::EqualHalves, SplitScheme::TrainingFraction(0.3)] {
            let splits = make_splits(n, scheme, count, SeedProvenance::from_master(seed)).unwrap();
            prop_assert_eq!(splits.len(), count);
            for s in &splits {
                let mut all: Vec<usize> = s.train.iter().chain(&s.validation).copied().collect();
                all.sort_unstable();
                prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
                prop_assert!(!s.validation.is_empty());
            }
        }
    }
}
