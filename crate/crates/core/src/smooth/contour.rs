use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::CenterOutwardFit;
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::scalar::{norm, Scalar};

const MODULE: &str = "smooth_quantile";
const DIRECTION_SEED: u64 = 0xc0_47_0a;

#[derive(Debug, Clone, PartialEq)]
pub enum ContourMode<T> {
    /// Image of the sphere of radius `p`.
    Contour { p: T },
    /// Image of the ray `{c s : c in [0, 1)}`.
    SignCurve { direction: Vec<T> },
}

impl<T: Scalar> ContourMode<T> {
    pub fn trace(&self, fit: &CenterOutwardFit<T>, n_points: usize) -> Result<Vec<Vec<T>>> {
        match self {
            ContourMode::Contour { p } => quantile_contour(fit, *p, n_points),
            ContourMode::SignCurve { direction } => sign_curve(fit, direction, n_points),
        }
    }
}

/// Unit directions: equiangular for `d = 2`, `{-1, +1}` for `d = 1`, seeded
/// Gaussian draws otherwise.
pub(crate) fn sphere_directions<T: Scalar>(d: usize, count: usize) -> Vec<Vec<T>> {
    match d {
        1 => vec![vec![-T::one()], vec![T::one()]],
        2 => (0..count)
            .map(|k| {
                let th = T::lit(std::f64::consts::TAU * k as f64 / count as f64);
                vec![th.cos(), th.sin()]
            })
            .collect(),
        _ => {
            let mut rng = stream_rng(DIRECTION_SEED, d as u64);
            (0..count)
                .map(|_| loop {
                    let z: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
                    let r = z.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if r > 0.0 {
                        break z.iter().map(|v| T::lit(v / r)).collect();
                    }
                })
                .collect()
        }
    }
}

/// `{ Q(p v) : v on the unit sphere }` at `n_points` directions.
pub fn quantile_contour<T: Scalar>(
    fit: &CenterOutwardFit<T>,
    p: T,
    n_points: usize,
) -> Result<Vec<Vec<T>>> {
    if !(p > T::zero() && p < T::one()) {
        return Err(Error::invalid_argument(MODULE, format!("contour order {p} not in (0, 1)")));
    }
    let dirs = sphere_directions::<T>(fit.d(), n_points);
    Ok(dirs
        .par_iter()
        .map(|v| {
            let u: Vec<T> = v.iter().map(|&c| c * p).collect();
            fit.smoothed_quantile(&u)
        })
        .collect())
}

/// `{ Q(c s) : c = k / n_points, k = 0..n_points }` for a direction `s`.
pub fn sign_curve<T: Scalar>(
    fit: &CenterOutwardFit<T>,
    direction: &[T],
    n_points: usize,
) -> Result<Vec<Vec<T>>> {
    if direction.len() != fit.d() {
        return Err(Error::invalid_argument(MODULE, "direction has the wrong dimension"));
    }
    let r = norm(direction);
    if !(r > T::zero()) {
        return Err(Error::invalid_argument(MODULE, "direction must be nonzero"));
    }
    let s: Vec<T> = direction.iter().map(|&c| c / r).collect();
    Ok((0..n_points)
        .into_par_iter()
        .map(|k| {
            let c = T::from_count(k) / T::from_count(n_points);
            let u: Vec<T> = s.iter().map(|&v| v * c).collect();
            fit.smoothed_quantile(&u)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::PointSet;
    use crate::transport::PairSet;

    #[test]
    fn single_pair_contour_collapses() {
        let pairs = PairSet::new(
            PointSet::from_rows(&[[0.1, 0.2]]).unwrap(),
            PointSet::from_rows(&[[2.0, -3.0]]).unwrap(),
        )
        .unwrap();
        let fit = CenterOutwardFit::new(pairs, 1.0, 1).unwrap();
        for v in quantile_contour(&fit, 0.4, 16).unwrap() {
            assert_eq!(v, vec![2.0, -3.0]);
        }
        assert!(quantile_contour(&fit, 1.0, 4).is_err());
        assert!(quantile_contour(&fit, 0.0, 4).is_err());
        assert_eq!(sign_curve(&fit, &[1.0, 0.0], 5).unwrap().len(), 5);
        assert!(sign_curve(&fit, &[0.0, 0.0], 5).is_err());
    }

    #[test]
    fn directions_are_unit() {
        for d in [2usize, 3, 5] {
            for v in sphere_directions::<f64>(d, 20) {
                assert!((norm(&v) - 1.0).abs() < 1e-12);
            }
        }
    }
}
