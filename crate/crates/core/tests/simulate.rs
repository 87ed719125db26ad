mod common;

use centerout::simulate::{
    equicorrelation, sample_gaussian, sample_hyperbolic, true_elliptical_quantile, EllipticalSpec, RadialLaw,
};
use centerout::tails::hill_estimate;
use centerout::YSeries;
use common::{ball_point, rng};

#[test]
fn gaussian_mean_shrinks_like_root_n() {
    let (n, d) = (2000, 3);
    let bound = 5.0 * (d as f64 / n as f64).sqrt();
    let misses = (0..100)
        .filter(|&s| {
            let m = sample_gaussian(n, d, s).unwrap().rows.mean();
            m.iter().map(|v| v * v).sum::<f64>().sqrt() > bound
        })
        .count();
    assert!(misses <= 1, "{misses}");
}

#[test]
fn hyperbolic_modulus_has_tail_index_gamma() {
    let s = sample_hyperbolic(100_000, 2, 1.0 / 3.0, None, 1).unwrap();
    let norms: Vec<f64> = s.rows.rows().map(|r| (r[0] * r[0] + r[1] * r[1]).sqrt()).collect();
    let h = hill_estimate(&YSeries::from_values(norms, false).unwrap(), 1000).unwrap();
    assert!((h - 1.0 / 3.0).abs() < 0.04, "{h}");
}

#[test]
fn small_gamma_is_nearly_gaussian() {
    let s = sample_hyperbolic(100_000, 2, 0.01, Some(&equicorrelation(2, 0.0)), 2).unwrap();
    let x: Vec<f64> = s.rows.rows().map(|r| r[0]).collect();
    let m2 = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
    let m4 = x.iter().map(|v| v.powi(4)).sum::<f64>() / x.len() as f64;
    let kurt = m4 / (m2 * m2);
    assert!((2.85..3.3).contains(&kurt), "{kurt}");
}

#[test]
fn distribution_inverts_quantile_on_random_points() {
    let mut r = rng(3);
    for law in [RadialLaw::GaussianChi, RadialLaw::StudentT(5.0), RadialLaw::Hyperbolic(0.5)] {
        for d in 2..5 {
            let spec = EllipticalSpec::new(vec![0.3; d], equicorrelation(d, 0.4), law).unwrap();
            for _ in 0..50 {
                let u = ball_point(&mut r, d, 0.999);
                let back = spec.distribution(&true_elliptical_quantile(&u, &spec).unwrap());
                for (a, b) in back.iter().zip(&u) {
                    assert!((a - b).abs() < 1e-8, "{law:?} d={d}");
                }
            }
        }
    }
}

#[test]
fn covariance_estimate_is_consistent() {
    let sigma = equicorrelation(2, 0.5);
    let spec = EllipticalSpec::new(vec![0.0; 2], sigma.clone(), RadialLaw::GaussianChi).unwrap();
    let err = |n: usize| {
        let s = spec.sample(n, 7).unwrap();
        let mut c = [0.0; 4];
        for r in s.rows.rows() {
            for a in 0..2 {
                for b in 0..2 {
                    c[a * 2 + b] += r[a] * r[b] / n as f64;
                }
            }
        }
        c.iter().zip(&sigma).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    };
    assert!(err(100_000) < err(100));
}

#[test]
fn radial_quantiles() {
    assert!((RadialLaw::GaussianChi.quantile(0.5, 2) - 1.177410022515475).abs() < 1e-10);
    // t with nu = 1 in d = 1 is Cauchy: |X| has quantile tan(pi p / 2)
    let q = RadialLaw::StudentT(1.0).quantile(0.5, 1);
    assert!((q - 1.0).abs() < 1e-9, "{q}");
    assert_eq!(RadialLaw::Hyperbolic(0.25).quantile(0.7, 3), RadialLaw::StudentT(4.0).quantile(0.7, 3));
}
