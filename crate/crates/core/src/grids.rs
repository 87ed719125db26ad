//! Discrete approximations of the spherical uniform distribution on the
//! open unit ball, used as transport targets.
//!
//! Three constructions are provided:
//!
//! * [`make_polar_grid_2d`]: `n` distinct radii `i/(n+1)` with independent
//!   uniform angles (planar case).
//! * [`make_radial_rank_grid`]: Gaussian directions in any `d >= 2`, each
//!   scaled to the rank of its Gaussian modulus divided by `n+1`.
//! * [`make_factorized_grid`]: `n_S` directions times `n_R` radii plus `n0`
//!   copies of the origin.
//!
//! All generators are deterministic functions of `(seed, stream)`.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::points::PointSet;
use crate::rng::{stream_rng, StreamRng};
use crate::scalar::Scalar;

const MODULE: &str = "grids";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Factorized { n_r: usize, n_s: usize, n0: usize },
    RandomPolar2D,
    RadialRank,
}

/// Points in the open unit ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    pub points: PointSet<T>,
    pub kind: GridKind,
    pub seed: u64,
    pub stream: u64,
}

impl<T: Scalar> Grid<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }
}

/// Recipe for generating replicated grids of one kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridSpec {
    RandomPolar2D { n: usize },
    RadialRank { n: usize, d: usize },
    Factorized { n_r: usize, n_s: usize, n0: usize, d: usize },
}

impl GridSpec {
    /// Default w-type grid for `n` points in dimension `d`: polar for `d = 2`,
    /// radial-rank for `d >= 3`.
    pub fn w_grid(n: usize, d: usize) -> Result<Self> {
        match d {
            2 => Ok(GridSpec::RandomPolar2D { n }),
            d if d >= 3 => Ok(GridSpec::RadialRank { n, d }),
            _ => Err(Error::invalid_argument(MODULE, "random w-grids need d >= 2")),
        }
    }

    pub fn generate<T: Scalar>(&self, seed: u64, stream: u64) -> Result<Grid<T>> {
        match *self {
            GridSpec::RandomPolar2D { n } => polar_grid_2d(n, seed, stream),
            GridSpec::RadialRank { n, d } => radial_rank_grid(n, d, seed, stream),
            GridSpec::Factorized { n_r, n_s, n0, d } => {
                factorized_grid(n_r, n_s, n0, d, seed, stream)
            }
        }
    }
}

pub fn make_polar_grid_2d<T: Scalar>(n: usize, seed: u64) -> Result<Grid<T>> {
    polar_grid_2d(n, seed, 0)
}

pub fn make_radial_rank_grid<T: Scalar>(n: usize, d: usize, seed: u64) -> Result<Grid<T>> {
    radial_rank_grid(n, d, seed, 0)
}

pub fn make_factorized_grid<T: Scalar>(
    n_r: usize,
    n_s: usize,
    n0: usize,
    d: usize,
    seed: u64,
) -> Result<Grid<T>> {
    factorized_grid(n_r, n_s, n0, d, seed, 0)
}

fn rank_radius<T: Scalar>(rank: usize, n: usize) -> T {
    T::from_count(rank) / T::from_count(n + 1)
}

fn polar_grid_2d<T: Scalar>(n: usize, seed: u64, stream: u64) -> Result<Grid<T>> {
    if n == 0 {
        return Err(Error::invalid_argument(MODULE, "grid size must be at least 1"));
    }
    let mut rng = stream_rng(seed, stream);
    let mut data = Vec::with_capacity(2 * n);
    for i in 1..=n {
        let phi = T::lit(rng.random::<f64>() * TAU);
        let r: T = rank_radius(i, n);
        data.push(r * phi.cos());
        data.push(r * phi.sin());
    }
    Ok(Grid {
        points: PointSet::from_flat(data, 2)?,
        kind: GridKind::RandomPolar2D,
        seed,
        stream,
    })
}

fn gaussian_direction(rng: &mut StreamRng, d: usize) -> (Vec<f64>, f64) {
    loop {
        let z: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return (z.into_iter().map(|x| x / norm).collect(), norm);
        }
    }
}

fn radial_rank_grid<T: Scalar>(n: usize, d: usize, seed: u64, stream: u64) -> Result<Grid<T>> {
    if n == 0 {
        return Err(Error::invalid_argument(MODULE, "grid size must be at least 1"));
    }
    if d < 2 {
        return Err(Error::invalid_argument(MODULE, "radial-rank grids need d >= 2"));
    }
    let mut rng = stream_rng(seed, stream);
    let draws: Vec<(Vec<f64>, f64)> = (0..n).map(|_| gaussian_direction(&mut rng, d)).collect();

    // stable sort: equal moduli keep index order
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| draws[a].1.total_cmp(&draws[b].1));
    let mut rank = vec![0usize; n];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r + 1;
    }

    let mut data = Vec::with_capacity(n * d);
    for (i, (dir, _)) in draws.iter().enumerate() {
        let r: T = rank_radius(rank[i], n);
        data.extend(dir.iter().map(|&c| T::lit(c) * r));
    }
    Ok(Grid {
        points: PointSet::from_flat(data, d)?,
        kind: GridKind::RadialRank,
        seed,
        stream,
    })
}

fn factorized_grid<T: Scalar>(
    n_r: usize,
    n_s: usize,
    n0: usize,
    d: usize,
    seed: u64,
    stream: u64,
) -> Result<Grid<T>> {
    if d == 0 {
        return Err(Error::invalid_argument(MODULE, "dimension must be at least 1"));
    }
    if n0 >= n_r.min(n_s) {
        return Err(Error::invalid_argument(
            MODULE,
            format!("need 0 <= n0 < min(n_R, n_S); got n0={n0}, n_R={n_r}, n_S={n_s}"),
        ));
    }
    let mut rng = stream_rng(seed, stream);
    let mut data = Vec::with_capacity((n_r * n_s + n0) * d);
    for _ in 0..n_s {
        let (dir, _) = gaussian_direction(&mut rng, d);
        for k in 1..=n_r {
            let r: T = rank_radius(k, n_r);
            data.extend(dir.iter().map(|&c| T::lit(c) * r));
        }
    }
    data.extend(std::iter::repeat_n(T::zero(), n0 * d));
    Ok(Grid {
        points: PointSet::from_flat(data, d)?,
        kind: GridKind::Factorized { n_r, n_s, n0 },
        seed,
        stream,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::norm;

    fn sorted_norms(g: &Grid<f64>) -> Vec<f64> {
        let mut v: Vec<f64> = g.points.rows().map(norm).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn single_polar_point_has_norm_one_half() {
        let g = make_polar_grid_2d::<f64>(1, 99).unwrap();
        assert!((norm(g.points.row(0)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn polar_norms_are_rank_radii() {
        let g = make_polar_grid_2d::<f64>(1000, 3).unwrap();
        for (i, r) in sorted_norms(&g).iter().enumerate() {
            let want = (i + 1) as f64 / 1001.0;
            assert!((r - want).abs() <= 4.0 * f64::EPSILON * want, "{r} vs {want}");
        }
    }

    #[test]
    fn polar_is_deterministic_per_seed() {
        let a = make_polar_grid_2d::<f64>(4, 11).unwrap();
        let b = make_polar_grid_2d::<f64>(4, 11).unwrap();
        let c = make_polar_grid_2d::<f64>(4, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.points, c.points);
    }

    #[test]
    fn zero_size_is_rejected() {
        assert!(make_polar_grid_2d::<f64>(0, 1).is_err());
        assert!(make_radial_rank_grid::<f64>(0, 3, 1).is_err());
    }

    #[test]
    fn radial_rank_small_case() {
        let g = make_radial_rank_grid::<f64>(3, 3, 5).unwrap();
        let v = sorted_norms(&g);
        for (r, want) in v.iter().zip([0.25, 0.5, 0.75]) {
            assert!((r - want).abs() < 1e-15);
        }
    }

    #[test]
    fn radial_rank_rejects_d1() {
        let err = make_radial_rank_grid::<f64>(5, 1, 5).unwrap_err();
        assert_eq!(err.code(), "grids.invalid_argument");
    }

    #[test]
    fn factorized_counts() {
        let g = make_factorized_grid::<f64>(2, 3, 1, 2, 8).unwrap();
        assert_eq!(g.len(), 7);
        let v = sorted_norms(&g);
        assert_eq!(v[0], 0.0);
        for r in &v[1..4] {
            assert!((r - 1.0 / 3.0).abs() < 1e-15);
        }
        for r in &v[4..] {
            assert!((r - 2.0 / 3.0).abs() < 1e-15);
        }
        let one = make_factorized_grid::<f64>(1, 1, 0, 3, 8).unwrap();
        assert!((norm(one.points.row(0)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn factorized_rejects_large_n0() {
        assert!(make_factorized_grid::<f64>(2, 3, 2, 2, 1).is_err());
        assert!(make_factorized_grid::<f64>(3, 3, 3, 2, 1).is_err());
    }

    #[test]
    fn f32_grids_stay_in_ball() {
        let g = make_radial_rank_grid::<f32>(500, 4, 2).unwrap();
        assert!(g.points.rows().all(|r| norm(r) < 1.0));
    }
}
