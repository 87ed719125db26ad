//! Potential constants `lambda` and margin `delta` of the piecewise-affine
//! potential `Psi_n(u) = max_i <u, X_i> - lambda_i`.
//!
//! Maximizing `delta` subject to `lambda_i - lambda_j <= c_ij - delta`, with
//! `c_ij = <u_i, X_i - X_j>`, is a system of difference constraints on the
//! complete digraph with arc `j -> i` of weight `c_ij`. It is feasible iff no
//! cycle has negative weight after subtracting `delta` from every arc, so the
//! optimal margin is the minimum cycle mean (Karp). Potentials are shortest
//! path distances (Bellman-Ford) at a margin slightly below the optimum so the
//! recovered `lambda` is strictly feasible.

use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};
use crate::transport::PairSet;

const MODULE: &str = "smooth_quantile";

/// Output of [`solve_lambda`].
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSolution<T> {
    /// Potential constants, shifted so that `min_i lambda_i = 0`.
    pub lambda: Vec<T>,
    /// Realized margin `min_{i != j} c_ij - (lambda_i - lambda_j)`.
    pub delta: T,
    /// Optimal margin (minimum cycle mean).
    pub max_margin: T,
}

/// Dense `c_ij = <u_i, X_i - X_j>`, diagonal set to `+inf`.
pub(crate) fn constraint_matrix<T: Scalar>(pairs: &PairSet<T>) -> Vec<T> {
    let n = pairs.len();
    let mut c = vec![T::zero(); n * n];
    for i in 0..n {
        let ui = pairs.u.row(i);
        let own = dot(ui, pairs.x.row(i));
        let row = &mut c[i * n..(i + 1) * n];
        for (j, cij) in row.iter_mut().enumerate() {
            *cij = if i == j { T::infinity() } else { own - dot(ui, pairs.x.row(j)) };
        }
    }
    c
}

/// Minimum mean weight over all directed cycles of the complete digraph whose
/// arc `j -> i` weighs `c[i * n + j]`.
///
/// Karp's recurrence with every node as a zero-cost start:
/// `D_0 = 0`, `D_k(i) = min_j D_{k-1}(j) + c_ij`, and
/// `mu* = min_i max_{0<=k<n} (D_n(i) - D_k(i)) / (n - k)`.
pub fn min_mean_cycle<T: Scalar>(n: usize, c: &[T]) -> T {
    assert!(n >= 2, "a cycle needs at least two nodes");
    let mut table = vec![T::zero(); (n + 1) * n];
    for k in 1..=n {
        let (done, rest) = table.split_at_mut(k * n);
        let prev = &done[(k - 1) * n..];
        let cur = &mut rest[..n];
        for (i, out) in cur.iter_mut().enumerate() {
            *out = min_plus_row(prev, &c[i * n..(i + 1) * n]);
        }
    }
    let last = &table[n * n..];
    let mut best = T::infinity();
    for i in 0..n {
        let mut worst = T::neg_infinity();
        for k in 0..n {
            let v = (last[i] - table[k * n + i]) / T::from_count(n - k);
            if v > worst {
                worst = v;
            }
        }
        if worst < best {
            best = worst;
        }
    }
    best
}

#[inline]
fn min_plus_row<T: Scalar>(prev: &[T], row: &[T]) -> T {
    // four independent accumulators keep the reduction vectorizable
    let mut acc = [T::infinity(); 4];
    let chunks = prev.chunks_exact(4).zip(row.chunks_exact(4));
    for (p, r) in chunks {
        for l in 0..4 {
            let v = p[l] + r[l];
            if v < acc[l] {
                acc[l] = v;
            }
        }
    }
    let tail = prev.len() - prev.len() % 4;
    let mut best = acc.iter().fold(T::infinity(), |a, &b| if b < a { b } else { a });
    for j in tail..prev.len() {
        let v = prev[j] + row[j];
        if v < best {
            best = v;
        }
    }
    best
}

/// Shortest-path potentials for `lambda_i - lambda_j <= c_ij - margin` from a
/// virtual source joined to every node at zero cost. This is the pointwise
/// largest feasible `lambda` with `lambda <= 0`.
fn potentials<T: Scalar>(n: usize, c: &[T], margin: T) -> Option<Vec<T>> {
    let mut dist = vec![T::zero(); n];
    for _ in 0..=n {
        let mut changed = false;
        for i in 0..n {
            let row = &c[i * n..(i + 1) * n];
            let mut best = dist[i];
            for (j, (&dj, &cij)) in dist.iter().zip(row).enumerate() {
                if j != i {
                    let v = dj + (cij - margin);
                    if v < best {
                        best = v;
                    }
                }
            }
            if best < dist[i] {
                dist[i] = best;
                changed = true;
            }
        }
        if !changed {
            return Some(dist);
        }
    }
    None
}

fn constraint_scale<T: Scalar>(c: &[T]) -> T {
    c.iter()
        .filter(|x| x.is_finite())
        .fold(T::zero(), |a, &x| a.max(x.abs()))
        .max(T::min_positive_value())
}

/// Margins at or below this are indistinguishable from zero.
pub(crate) fn degeneracy_tolerance<T: Scalar>(c: &[T]) -> T {
    T::lit(64.0) * T::epsilon() * constraint_scale(c)
}

/// Slack below the optimal margin used when recovering `lambda`:
/// `1e-9 * max |c_ij|`, but never more than half the margin.
pub(crate) fn feasibility_slack<T: Scalar>(c: &[T], max_margin: T) -> T {
    (T::lit(1e-9) * constraint_scale(c)).min(max_margin / T::lit(2.0))
}

fn worst_pair<T: Scalar>(n: usize, c: &[T]) -> (usize, usize) {
    let (mut i, mut j, mut worst) = (0, 1, T::infinity());
    for a in 0..n {
        for b in a + 1..n {
            let two = c[a * n + b] + c[b * n + a];
            if two < worst {
                (i, j, worst) = (a, b, two);
            }
        }
    }
    (i, j)
}

/// Solves for `(lambda, delta)` maximizing the margin `delta`.
pub fn solve_lambda<T: Scalar>(pairs: &PairSet<T>) -> Result<LambdaSolution<T>> {
    let n = pairs.len();
    if n < 2 {
        return Err(Error::invalid_argument(MODULE, "solve_lambda needs at least two pairs"));
    }
    if pairs.u.as_flat().iter().chain(pairs.x.as_flat()).any(|v| !v.is_finite()) {
        return Err(Error::invalid_data(MODULE, "pairs contain non-finite values"));
    }
    let c = constraint_matrix(pairs);
    let max_margin = min_mean_cycle(n, &c);
    let degenerate = |delta: T| {
        let (i, j) = worst_pair(n, &c);
        Error::DegenerateConfiguration { delta: delta.as_f64(), i, j }
    };
    if max_margin <= degeneracy_tolerance(&c) {
        return Err(degenerate(max_margin));
    }
    let eta = feasibility_slack(&c, max_margin);

    let mut lambda = potentials(n, &c, max_margin - eta).ok_or_else(|| {
        Error::invalid_data(MODULE, "shortest-path potentials did not converge")
    })?;
    let lo = lambda.iter().fold(T::infinity(), |a, &b| a.min(b));
    lambda.iter_mut().for_each(|l| *l -= lo);
    let delta = realized_margin(n, &c, &lambda);
    if !(delta > T::zero()) {
        return Err(degenerate(delta));
    }
    Ok(LambdaSolution { lambda, delta, max_margin })
}

pub(crate) fn realized_margin<T: Scalar>(n: usize, c: &[T], lambda: &[T]) -> T {
    let mut m = T::infinity();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let v = c[i * n + j] - (lambda[i] - lambda[j]);
                if v < m {
                    m = v;
                }
            }
        }
    }
    m
}
