//! Maximal-correlation risk measures from a fitted smoothed quantile map.
//!
//! The empirical risk is the average height `<u_i, Q(u_i)>` of the risk
//! surface over the fit's own gridpoints. Conditioning on `|u_i| > 1 - p`
//! gives the tail measure, on `|u_i| <= 1 - p` the trimmed one; at the
//! empirical level the two recombine into the global average with weights
//! `n_tail / n` and `1 - n_tail / n`.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::scalar::{dot, norm, Scalar};
use crate::smooth::CenterOutwardFit;

const MODULE: &str = "risk_measures";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskReport<T> {
    pub rho: T,
    pub p: T,
    pub rho_tail: T,
    pub rho_trimmed: T,
    pub n_tail: usize,
    pub n: usize,
    /// `n_tail rho_tail / (n rho)`.
    pub tail_share: T,
    /// `(n - n_tail) rho_trimmed / (n rho)`.
    pub trimmed_share: T,
}

impl<T: Scalar> RiskReport<T> {
    /// Relative residual of `n rho = n_tail rho_tail + (n - n_tail) rho_trimmed`.
    pub fn decomposition_residual(&self) -> T {
        let total = T::from_count(self.n) * self.rho;
        let parts = T::from_count(self.n_tail) * self.rho_tail
            + T::from_count(self.n - self.n_tail) * self.rho_trimmed;
        (total - parts).abs() / total.abs().max(T::min_positive_value())
    }
}

/// Heights `<u_i, Q(u_i)>` at the fit's gridpoints.
pub fn gridpoint_heights<T: Scalar>(fit: &CenterOutwardFit<T>) -> Vec<T> {
    let idx: Vec<usize> = (0..fit.n()).collect();
    idx.par_iter()
        .map(|&i| {
            let u = fit.pairs.u.row(i);
            dot(u, &fit.smoothed_quantile(u))
        })
        .collect()
}

pub fn rho_hat<T: Scalar>(fit: &CenterOutwardFit<T>) -> T {
    mean(&gridpoint_heights(fit))
}

fn mean<T: Scalar>(v: &[T]) -> T {
    v.iter().copied().sum::<T>() / T::from_count(v.len())
}

fn check_order<T: Scalar>(p: T) -> Result<()> {
    if p > T::zero() && p < T::one() {
        Ok(())
    } else {
        Err(Error::invalid_argument(MODULE, format!("tail order {p} not in (0, 1)")))
    }
}

fn conditional_mean<T: Scalar>(
    fit: &CenterOutwardFit<T>,
    heights: &[T],
    p: T,
    tail: bool,
) -> Result<(T, usize)> {
    check_order(p)?;
    let radius = T::one() - p;
    let picked: Vec<T> = fit
        .pairs
        .u
        .rows()
        .zip(heights)
        .filter(|(u, _)| (norm(u) > radius) == tail)
        .map(|(_, &h)| h)
        .collect();
    if picked.is_empty() {
        return Err(Error::InsufficientTailPoints {
            side: if tail { "tail" } else { "central" },
            radius: radius.as_f64(),
        });
    }
    Ok((mean(&picked), picked.len()))
}

/// Average height over gridpoints with `|u_i| > 1 - p`.
pub fn rho_tail<T: Scalar>(fit: &CenterOutwardFit<T>, p: T) -> Result<T> {
    conditional_mean(fit, &gridpoint_heights(fit), p, true).map(|r| r.0)
}

/// Average height over gridpoints with `|u_i| <= 1 - p`.
pub fn rho_trimmed<T: Scalar>(fit: &CenterOutwardFit<T>, p: T) -> Result<T> {
    conditional_mean(fit, &gridpoint_heights(fit), p, false).map(|r| r.0)
}

pub fn risk_report<T: Scalar>(fit: &CenterOutwardFit<T>, p: T) -> Result<RiskReport<T>> {
    let heights = gridpoint_heights(fit);
    let rho = mean(&heights);
    let (rho_tail, n_tail) = conditional_mean(fit, &heights, p, true)?;
    let (rho_trimmed, n_trim) = conditional_mean(fit, &heights, p, false)?;
    let n = fit.n();
    let total = T::from_count(n) * rho;
    Ok(RiskReport {
        rho,
        p,
        rho_tail,
        rho_trimmed,
        n_tail,
        n,
        tail_share: T::from_count(n_tail) * rho_tail / total,
        trimmed_share: T::from_count(n_trim) * rho_trimmed / total,
    })
}

/// Monte Carlo estimate of `E <U, Q(U)>` under fresh spherical-uniform draws,
/// returned with its standard error.
pub fn rho_hat_fresh<T: Scalar>(fit: &CenterOutwardFit<T>, draws: usize, seed: u64) -> (T, T) {
    let d = fit.d();
    let mut rng = stream_rng(seed, 0);
    let points: Vec<Vec<T>> = (0..draws)
        .map(|_| {
            let z: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let r = z.iter().map(|v| v * v).sum::<f64>().sqrt();
            let radius: f64 = rng.random();
            z.iter().map(|v| T::lit(v / r * radius)).collect()
        })
        .collect();
    let h: Vec<T> = points.par_iter().map(|u| dot(u, &fit.smoothed_quantile(u))).collect();
    let m = mean(&h);
    let var = h.iter().map(|&x| (x - m) * (x - m)).sum::<T>() / T::from_count(draws.max(2) - 1);
    (m, (var / T::from_count(draws)).sqrt())
}

/// Heights `<u, Q(u)>` at caller-chosen points.
pub fn risk_surface<T: Scalar>(
    fit: &CenterOutwardFit<T>,
    eval_grid: &[Vec<T>],
) -> Result<Vec<(Vec<T>, T)>> {
    if let Some(u) = eval_grid.iter().find(|u| u.len() != fit.d()) {
        return Err(Error::invalid_argument(
            MODULE,
            format!("evaluation point of dimension {} for a {}-dimensional fit", u.len(), fit.d()),
        ));
    }
    Ok(eval_grid
        .par_iter()
        .map(|u| (u.clone(), dot(u, &fit.smoothed_quantile(u))))
        .collect())
}

/// Planar polar evaluation grid: radii `k / (n_r + 1)` times `n_theta` angles.
pub fn polar_eval_grid<T: Scalar>(n_r: usize, n_theta: usize) -> Vec<Vec<T>> {
    let mut out = Vec::with_capacity(n_r * n_theta);
    for k in 1..=n_r {
        let r = T::from_count(k) / T::from_count(n_r + 1);
        for a in 0..n_theta {
            let th = T::lit(std::f64::consts::TAU * a as f64 / n_theta as f64);
            out.push(vec![r * th.cos(), r * th.sin()]);
        }
    }
    out
}
