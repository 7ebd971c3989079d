mod common;

use agg_density_core::densities::{DensityModel, CATALOG};
use agg_density_core::kernels::{pinsker_family, KernelSpec};
use agg_density_core::SeedProvenance;
use common::quad;
use rand::Rng;

fn integration_range(truth: &DensityModel) -> (f64, f64) {
    let (lo, hi) = truth.support_window()[0];
    (lo.min(-10.0), hi.max(10.0))
}

#[test]
fn char_fn_matches_fourier_quadrature() {
    let mut rng = SeedProvenance::from_master(1).rng();
    for id in CATALOG {
        let truth = DensityModel::catalog(id).unwrap();
        if !truth.has_char_fn() {
            continue;
        }
        let (lo, hi) = integration_range(&truth);
        let breaks = truth.discontinuities();
        for _ in 0..100 {
            let t: f64 = rng.random_range(-20.0..20.0);
            let re = quad(|x| (t * x).cos() * truth.eval1(x), lo, hi, &breaks, 0.01);
            let im = quad(|x| (t * x).sin() * truth.eval1(x), lo, hi, &breaks, 0.01);
            let cf = truth.char_fn(&[t]).unwrap();
            assert!((cf.re - re).abs() < 1e-6 && (cf.im - im).abs() < 1e-6, "{id} t={t}: {cf} vs {re}+{im}i");
        }
    }
}

#[test]
fn samples_follow_the_cdf() {
    let n = 100_000;
    // Dvoretzky–Kiefer–Wolfowitz at level 1e-6
    let eps = ((2.0f64 / 1e-6).ln() / (2.0 * n as f64)).sqrt();
    for id in CATALOG {
        let truth = DensityModel::catalog(id).unwrap();
        let s = truth.sample(n, SeedProvenance::from_master(2)).unwrap();
        let (lo, hi) = integration_range(&truth);
        for k in 1..=20 {
            let p = k as f64 / 21.0;
            let (mut a, mut b) = (lo, hi);
            for _ in 0..100 {
                let mid = 0.5 * (a + b);
                if truth.cdf(mid).unwrap() < p {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            let x = 0.5 * (a + b);
            let emp = s.as_slice().iter().filter(|v| **v <= x).count() as f64 / n as f64;
            assert!((emp - truth.cdf(x).unwrap()).abs() <= eps, "{id} q={p}: {emp}");
        }
    }
}

#[test]
fn spatial_kernels_transform_to_their_ft() {
    for k in [KernelSpec::gaussian(1).unwrap(), KernelSpec::Silverman] {
        for i in 0..=40 {
            let t = 0.25 * i as f64;
            let num = quad(|x| (t * x).cos() * k.eval1(x), -60.0, 60.0, &[], 0.05);
            assert!((num - k.ft_radial(t)).abs() < 1e-6, "{} t={t}: {num}", k.name());
        }
    }
}

#[test]
fn transforms_are_radially_nonincreasing_in_unit_range() {
    let mut kernels = vec![KernelSpec::gaussian(1).unwrap(), KernelSpec::Silverman, KernelSpec::Sinc];
    kernels.extend(pinsker_family(4, 1).unwrap().kernels().unwrap());
    for k in kernels {
        let vals: Vec<f64> = (0..=2000).map(|i| k.ft_radial(0.005 * i as f64)).collect();
        assert_eq!(vals[0], 1.0);
        assert!(vals.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(vals.windows(2).all(|w| w[1] <= w[0]), "{}", k.name());
    }
}

#[test]
fn pinsker_kernels_integrate_to_one() {
    for k in pinsker_family(3, 1).unwrap().kernels().unwrap() {
        // ∫K = F[K](0); the algebraic tail beyond the window is added in closed form
        let r: f64 = 400.0;
        let (amp, p) = k.far_field().unwrap();
        let tail = 2.0 * amp * r.powf(1.0 - p) / (p - 1.0);
        let body = quad(|x| k.eval1(x), -r, r, &[], 0.05);
        assert!((body + tail - 1.0).abs() < 1e-4, "{}: {}", k.name(), body + tail);
    }
}
