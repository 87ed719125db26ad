mod common;

use centerout::pipeline::{fit_sample, FitConfig};
use centerout::risk::{gridpoint_heights, rho_hat, rho_hat_fresh, risk_report, risk_surface, polar_eval_grid};
use centerout::simulate::{sample_gaussian, sample_student_t};
use centerout::tails::{
    ecdf_distance, evi_sweep, hill_estimate, pareto_qq_data, ridge_estimate, y_values,
};
use centerout::{CenterOutwardFit, PairSet, PointSet, XiPolicy, YSeries};
use common::{median, regression_intercept, ridge_design, rng};
use proptest::prelude::*;
use rand::Rng;

fn gaussian_fit(n: usize, seed: u64, xi: XiPolicy) -> centerout::Fit {
    let s = sample_gaussian(n, 2, seed).unwrap();
    fit_sample(&s, &FitConfig { m: 1, seed: seed + 100, xi, grid: None }).unwrap()
}

#[test]
fn identity_coupling_risk() {
    let u = [[0.2f64, 0.0], [0.0, 0.4], [-0.6, 0.0], [0.0, -0.8]];
    let pairs = PairSet::new(PointSet::from_rows(&u).unwrap(), PointSet::from_rows(&u).unwrap()).unwrap();
    let fit = CenterOutwardFit::new(pairs, 300.0, 1).unwrap();
    // (1/n) sum |u_i|^2 = (0.04 + 0.16 + 0.36 + 0.64) / 4
    assert!((rho_hat(&fit) - 0.3).abs() < 1e-3);
    let y = y_values(&fit, false);
    for (v, r) in y.values.iter().zip(u) {
        assert_eq!(*v, r[0] * r[0] + r[1] * r[1]);
    }
}

#[test]
fn decomposition_identity_on_random_fits() {
    for seed in 0..10 {
        let fit = gaussian_fit(150, seed, XiPolicy::Paper);
        for p in [0.05, 0.2, 0.5, 0.8] {
            let r = risk_report(&fit, p).unwrap();
            assert!(r.decomposition_residual() < 1e-10);
            assert_eq!(r.n_tail, fit.pairs.u.rows().filter(|u| (u[0] * u[0] + u[1] * u[1]).sqrt() > 1.0 - p).count());
        }
    }
}

#[test]
fn outer_heights_exceed_inner_heights() {
    let fit = gaussian_fit(500, 3, XiPolicy::Paper);
    let grid = polar_eval_grid::<f64>(9, 64);
    let surf = risk_surface(&fit, &grid).unwrap();
    let avg = |r: f64| {
        let v: Vec<f64> = surf
            .iter()
            .filter(|(u, _)| ((u[0] * u[0] + u[1] * u[1]).sqrt() - r).abs() < 1e-9)
            .map(|(_, h)| *h)
            .collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    assert!(avg(0.9) > avg(0.3));
}

#[test]
fn fresh_draws_agree_with_gridpoint_average() {
    let fit = gaussian_fit(400, 5, XiPolicy::Paper);
    let (m, se) = rho_hat_fresh(&fit, 20_000, 1);
    assert!((m - rho_hat(&fit)).abs() < 5.0 * se + 0.02, "{m} +- {se} vs {}", rho_hat(&fit));
    assert_eq!(gridpoint_heights(&fit).len(), 400);
}

#[test]
fn smoothed_and_raw_observables_are_close() {
    let fit = gaussian_fit(300, 7, XiPolicy::Moderate);
    let raw = y_values(&fit, false);
    let smooth = y_values(&fit, true);
    assert!(smooth.smoothed && !raw.smoothed);
    for i in 0..fit.n() {
        let u = fit.pairs.u.row(i);
        let q = fit.smoothed_quantile(u);
        let dist = q.iter().zip(fit.pairs.x.row(i)).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let un = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((raw.values[i] - smooth.values[i]).abs() <= dist * un + 1e-12);
    }
}

fn pareto(n: usize, gamma: f64, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| (1.0 - r.random::<f64>()).powf(-gamma)).collect()
}

#[test]
fn hill_on_exact_pareto() {
    let est: Vec<f64> = (0..50)
        .map(|s| hill_estimate(&YSeries::from_values(pareto(1000, 1.0 / 3.0, s), false).unwrap(), 100).unwrap())
        .collect();
    let m = median(&est);
    assert!((0.28..=0.39).contains(&m), "{m}");
}

#[test]
fn pareto_qq_upper_slope() {
    let y = YSeries::from_values(pareto(5000, 0.5, 3), false).unwrap();
    let qq = pareto_qq_data(&y).unwrap();
    let top = &qq.points[qq.points.len() - 500..qq.points.len() - 1];
    let (mx, my) = (
        top.iter().map(|p| p.0).sum::<f64>() / top.len() as f64,
        top.iter().map(|p| p.1).sum::<f64>() / top.len() as f64,
    );
    let slope = top.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / top.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope - 0.5).abs() < 0.1, "{slope}");
}

#[test]
fn least_squares_matches_regression_oracle() {
    for seed in 0..20 {
        let v = pareto(400, 0.4, seed);
        let y = YSeries::from_values(v.clone(), false).unwrap();
        for k in [2, 5, 50, 200, 399] {
            for rho in [-0.5, -1.0, -2.0] {
                let (z, c) = ridge_design(&v, k, rho);
                let oracle = regression_intercept(&z, &c);
                let ls = ridge_estimate(&y, k, 0.0, rho).unwrap();
                assert!((ls - oracle).abs() < 1e-10 * (1.0 + oracle.abs()), "k {k}: {ls} vs {oracle}");
            }
        }
    }
}

#[test]
fn heavier_tails_give_larger_hill_on_observables() {
    let est = |nu: f64| {
        let v: Vec<f64> = (0..5)
            .map(|s| {
                let sample = sample_student_t(800, 2, nu, None, s).unwrap();
                let fit = fit_sample(&sample, &FitConfig { m: 1, seed: s, xi: XiPolicy::Paper, grid: None }).unwrap();
                hill_estimate(&y_values(&fit, false), 80).unwrap()
            })
            .collect();
        median(&v)
    };
    assert!(est(2.0) > est(6.0));
}

#[test]
fn ks_distance_to_oracle_is_small_for_large_gaussian_fit() {
    let spec = centerout::simulate::EllipticalSpec::standard(2, centerout::simulate::RadialLaw::GaussianChi).unwrap();
    let sample = sample_gaussian(1000, 2, 4).unwrap();
    let fit = fit_sample(&sample, &FitConfig { m: 1, seed: 2, xi: XiPolicy::Paper, grid: None }).unwrap();
    let d = ecdf_distance(&y_values(&fit, false).values, &spec.oracle_y(&sample)).unwrap();
    assert!(d < 0.1, "{d}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hill_scale_invariant(seed in 0u64..1000, scale in 0.01f64..100.0, k in 1usize..99) {
        let v = pareto(100, 0.5, seed);
        let a = YSeries::from_values(v.clone(), false).unwrap();
        let b = YSeries::from_values(v.iter().map(|x| x * scale).collect(), false).unwrap();
        prop_assert!((hill_estimate(&a, k).unwrap() - hill_estimate(&b, k).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn sorted_is_permutation(v in proptest::collection::vec(-10.0f64..10.0, 1..60)) {
        let y = YSeries::from_values(v.clone(), false).unwrap();
        let mut a = v.clone();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        prop_assert_eq!(&y.sorted, &a);
    }

    #[test]
    fn sweep_finite_and_ls_equals_ridge_zero(seed in 0u64..500, k_max in 2usize..150) {
        let y = YSeries::from_values(pareto(200, 0.3, seed), false).unwrap();
        let e = evi_sweep(&y, k_max, 0.0, -1.0).unwrap();
        prop_assert_eq!(e.ks.len(), k_max - 1);
        prop_assert!(e.hill.iter().chain(&e.ls).all(|v| v.is_finite()));
        prop_assert_eq!(&e.ls, &e.ridge);
    }
}
