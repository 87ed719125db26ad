//! Empirical center-outward distribution function as an optimal assignment
//! between a sample and a grid under squared Euclidean cost.

mod lsap;

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grids::Grid;
use crate::points::PointSet;
use crate::rng::stream_rng;
use crate::scalar::{dot, sq_dist, CompensatedSum, Scalar};

const MODULE: &str = "transport";

/// Observations `X_1, ..., X_n` in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    pub rows: PointSet<T>,
}

impl<T: Scalar> Sample<T> {
    pub fn new(rows: PointSet<T>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid_argument(MODULE, "sample must contain at least one row"));
        }
        if let Some(i) = rows.rows().position(|r| r.iter().any(|x| !x.is_finite())) {
            return Err(Error::invalid_data(MODULE, format!("non-finite entry in row {i}")));
        }
        Ok(Self { rows })
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        Self::new(PointSet::from_rows(rows)?)
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn d(&self) -> usize {
        self.rows.dim()
    }

    pub fn cast<U: Scalar>(&self) -> Sample<U> {
        Sample { rows: self.rows.cast() }
    }
}

/// Optimal bijection `X_i -> u_{sigma(i)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling<T> {
    /// `assignment[i]` is the grid index matched to observation `i`.
    pub assignment: Vec<usize>,
    pub total_cost: T,
    pub grid_seed: u64,
    pub grid_stream: u64,
}

impl<T: Scalar> Coupling<T> {
    /// Grid images `F_n(X_i) = u_{sigma(i)}` in sample order.
    pub fn images(&self, grid: &Grid<T>) -> PointSet<T> {
        let d = grid.dim();
        let mut data = Vec::with_capacity(self.assignment.len() * d);
        for &k in &self.assignment {
            data.extend_from_slice(grid.points.row(k));
        }
        PointSet::from_flat(data, d).expect("grid rows have consistent width")
    }
}

fn check_shapes<T: Scalar>(sample: &Sample<T>, grid: &Grid<T>) -> Result<()> {
    if sample.n() != grid.len() {
        return Err(Error::invalid_argument(
            MODULE,
            format!("sample has {} rows but grid has {} points", sample.n(), grid.len()),
        ));
    }
    if sample.d() != grid.dim() {
        return Err(Error::invalid_argument(
            MODULE,
            format!("sample dimension {} differs from grid dimension {}", sample.d(), grid.dim()),
        ));
    }
    Ok(())
}

/// Globally optimal assignment for `c(i,k) = |X_i - u_k|^2`.
pub fn solve_assignment<T: Scalar>(sample: &Sample<T>, grid: &Grid<T>) -> Result<Coupling<T>> {
    check_shapes(sample, grid)?;
    let n = sample.n();
    let mut cost = Vec::with_capacity(n * n);
    for x in sample.rows.rows() {
        for u in grid.points.rows() {
            cost.push(sq_dist(x, u));
        }
    }
    if let Some(pos) = cost.iter().position(|c| !c.is_finite()) {
        return Err(Error::invalid_data(
            MODULE,
            format!("non-finite cost between observation {} and gridpoint {}", pos / n, pos % n),
        ));
    }
    let assignment = lsap::solve_square(n, &cost);
    let total_cost = coupling_cost(sample, grid, &assignment)?;
    Ok(Coupling { assignment, total_cost, grid_seed: grid.seed, grid_stream: grid.stream })
}

/// `sum_i |X_i - u_{sigma(i)}|^2`, accumulated with compensation.
pub fn coupling_cost<T: Scalar>(sample: &Sample<T>, grid: &Grid<T>, sigma: &[usize]) -> Result<T> {
    check_shapes(sample, grid)?;
    if sigma.len() != sample.n() {
        return Err(Error::invalid_argument(
            MODULE,
            format!("permutation has length {}, expected {}", sigma.len(), sample.n()),
        ));
    }
    let mut seen = vec![false; sigma.len()];
    for &k in sigma {
        if k >= sigma.len() || std::mem::replace(&mut seen[k], true) {
            return Err(Error::invalid_argument(MODULE, "sigma is not a permutation"));
        }
    }
    let mut acc = CompensatedSum::new();
    for (x, &k) in sample.rows.rows().zip(sigma) {
        acc.add(sq_dist(x, grid.points.row(k)));
    }
    Ok(acc.value())
}

/// Paired gridpoints `u_i` and observations `X_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSet<T> {
    pub u: PointSet<T>,
    pub x: PointSet<T>,
}

impl<T: Scalar> PairSet<T> {
    pub fn new(u: PointSet<T>, x: PointSet<T>) -> Result<Self> {
        if u.len() != x.len() || u.dim() != x.dim() {
            return Err(Error::invalid_argument(
                MODULE,
                format!(
                    "paired sets differ in shape: {}x{} vs {}x{}",
                    u.len(),
                    u.dim(),
                    x.len(),
                    x.dim()
                ),
            ));
        }
        Ok(Self { u, x })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    /// Cross term of the cycle `a -> b`: `<u_a, x_b - x_a>`.
    #[inline]
    fn step(&self, a: usize, b: usize) -> T {
        let ua = self.u.row(a);
        dot(ua, self.x.row(b)) - dot(ua, self.x.row(a))
    }
}

const EXHAUSTIVE_LIMIT: f64 = 1e6;
const SAMPLED_CYCLES: usize = 100_000;
const CYCLE_SEED: u64 = 0x5eed_c1c1e;

fn cycle_count(n: usize, len: usize) -> f64 {
    // C(n, len) * (len - 1)!  =  n! / ((n - len)! * len)
    let mut c = 1.0f64;
    for t in 0..len {
        c *= (n - t) as f64;
    }
    c / len as f64
}

/// Tests `sum_t <u_{i_t}, x_{i_{t+1}} - x_{i_t}> <= 0` over cycles of length
/// `2..=max_cycle_len`. Exhaustive when the number of cycles is at most 10^6,
/// otherwise 10^5 cycles drawn uniformly from a fixed stream.
pub fn check_cyclical_monotonicity<T: Scalar>(pairs: &PairSet<T>, max_cycle_len: usize) -> bool {
    let n = pairs.len();
    let max_len = max_cycle_len.min(n);
    if max_len < 2 {
        return true;
    }
    let total: f64 = (2..=max_len).map(|l| cycle_count(n, l)).sum();
    let tol = T::lit(64.0) * T::epsilon();
    let ok = |sum: T, scale: T| sum <= tol * scale;

    if total <= EXHAUSTIVE_LIMIT {
        let mut steps = vec![T::zero(); n * n];
        let mut scales = vec![T::zero(); n * n];
        for a in 0..n {
            let ua = pairs.u.row(a);
            let ax = dot(ua, pairs.x.row(a));
            for b in 0..n {
                let bx = dot(ua, pairs.x.row(b));
                steps[a * n + b] = bx - ax;
                scales[a * n + b] = bx.abs() + ax.abs();
            }
        }
        let mut path = Vec::with_capacity(max_len);
        let mut used = vec![false; n];
        for first in 0..n {
            path.clear();
            path.push(first);
            used[first] = true;
            let fine = extend_cycles(
                n, max_len, &steps, &scales, &mut path, &mut used, T::zero(), T::zero(), &ok,
            );
            used[first] = false;
            if !fine {
                return false;
            }
        }
        true
    } else {
        let mut rng = stream_rng(CYCLE_SEED, n as u64);
        for _ in 0..SAMPLED_CYCLES {
            let len = rng.random_range(2..=max_len);
            let idx = index::sample(&mut rng, n, len).into_vec();
            let mut sum = T::zero();
            let mut scale = T::zero();
            for t in 0..len {
                let s = pairs.step(idx[t], idx[(t + 1) % len]);
                sum += s;
                scale += s.abs();
            }
            if !ok(sum, scale) {
                return false;
            }
        }
        true
    }
}

// Depth-first enumeration of cycles whose smallest index is `path[0]`.
#[allow(clippy::too_many_arguments)]
fn extend_cycles<T: Scalar>(
    n: usize,
    max_len: usize,
    steps: &[T],
    scales: &[T],
    path: &mut Vec<usize>,
    used: &mut [bool],
    partial: T,
    scale: T,
    ok: &impl Fn(T, T) -> bool,
) -> bool {
    let first = path[0];
    let last = *path.last().unwrap();
    if path.len() >= 2 {
        let close = last * n + first;
        if !ok(partial + steps[close], scale + scales[close]) {
            return false;
        }
    }
    if path.len() == max_len {
        return true;
    }
    for next in first + 1..n {
        if used[next] {
            continue;
        }
        let e = last * n + next;
        used[next] = true;
        path.push(next);
        let fine =
            extend_cycles(n, max_len, steps, scales, path, used, partial + steps[e], scale + scales[e], ok);
        path.pop();
        used[next] = false;
        if !fine {
            return false;
        }
    }
    true
}

/// Average over `m` grids of the optimal grid images of each observation.
///
/// Grids are solved independently (in parallel) and merged in grid order.
pub fn average_couplings<T: Scalar>(sample: &Sample<T>, grids: &[Grid<T>]) -> Result<PointSet<T>> {
    if grids.is_empty() {
        return Err(Error::invalid_argument(MODULE, "at least one grid is required"));
    }
    let images: Vec<PointSet<T>> = grids
        .par_iter()
        .map(|g| solve_assignment(sample, g).map(|c| c.images(g)))
        .collect::<Result<_>>()?;
    let m = T::from_count(images.len());
    let mut acc = vec![T::zero(); sample.n() * sample.d()];
    for img in &images {
        for (a, &b) in acc.iter_mut().zip(img.as_flat()) {
            *a += b;
        }
    }
    acc.iter_mut().for_each(|a| *a /= m);
    PointSet::from_flat(acc, sample.d())
}
