//! Convex potential of the empirical quantile map and its log-sum-exp
//! smoothing.
//!
//! With affine pieces `psi_i(u) = <u, X_i> - lambda_i`, the smoothed potential
//! is `Psi_xi(u) = (1/xi) log sum_i exp(xi psi_i(u))` and its gradient, the
//! smoothed quantile map, is the softmax-weighted average of the `X_i`.
//! `xi` is stored through its logarithm and every exponential is taken after
//! subtracting the maximum, so evaluations stay finite for `ln xi` in the
//! hundreds.

mod contour;
mod lambda;

pub use contour::{quantile_contour, sign_curve, ContourMode};
pub use lambda::{min_mean_cycle, solve_lambda, LambdaSolution};

use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};
use crate::transport::PairSet;

const MODULE: &str = "smooth_quantile";

/// Log-weights below this are flushed to zero weight.
const LOG_UNDERFLOW: f64 = -745.0;

/// How the smoothing parameter is chosen for a fit of size `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XiPolicy {
    /// `ln xi = 300`, effectively the hard maximum.
    Paper,
    /// `xi = (ln n)^2`, so that `xi / ln n -> infinity`.
    Moderate,
    /// Explicit `ln xi`.
    Fixed(f64),
}

impl XiPolicy {
    pub const PAPER_LOG_XI: f64 = 300.0;

    pub fn xi_log(&self, n: usize) -> f64 {
        match *self {
            XiPolicy::Paper => Self::PAPER_LOG_XI,
            XiPolicy::Moderate => {
                // (ln n)^2 is below 1 for n <= 2; keep xi >= 1 there
                let ln_n = (n.max(3) as f64).ln();
                2.0 * ln_n.ln()
            }
            XiPolicy::Fixed(v) => v,
        }
    }

    pub fn name(&self) -> String {
        match self {
            XiPolicy::Paper => "paper".into(),
            XiPolicy::Moderate => "moderate".into(),
            XiPolicy::Fixed(v) => format!("fixed({v})"),
        }
    }
}

/// Softmax weights `w_i(u)` stored as logarithms.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<T> {
    pub log_weights: Vec<T>,
}

impl<T: Scalar> WeightVector<T> {
    pub fn weights(&self) -> Vec<T> {
        self.log_weights.iter().map(|l| l.exp()).collect()
    }
}

/// `J(u) = det grad Q(u)`, with its logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianDet<T> {
    pub det: T,
    pub log_det: T,
    /// Weighted covariance numerically singular; `det` is reported as 0.
    pub singular: bool,
}

/// Everything needed to evaluate the smoothed potential and quantile map.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterOutwardFit<T> {
    pub pairs: PairSet<T>,
    pub lambda: Vec<T>,
    pub delta: T,
    pub xi_log: T,
    pub m: usize,
}

impl<T: Scalar> CenterOutwardFit<T> {
    /// Solves for the potential constants of `pairs`.
    ///
    /// A single pair has no constraints: `lambda = [0]` and `delta = +inf`.
    pub fn new(pairs: PairSet<T>, xi_log: T, m: usize) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::invalid_argument(MODULE, "a fit needs at least one pair"));
        }
        if !xi_log.is_finite() {
            return Err(Error::invalid_argument(MODULE, "ln xi must be finite"));
        }
        let (lambda, delta) = if pairs.len() == 1 {
            (vec![T::zero()], T::infinity())
        } else {
            let s = solve_lambda(&pairs)?;
            (s.lambda, s.delta)
        };
        Ok(Self { pairs, lambda, delta, xi_log, m })
    }

    /// Reassembles a fit from stored parts, checking shapes and the
    /// normalization `min lambda = 0`.
    pub fn from_parts(
        pairs: PairSet<T>,
        lambda: Vec<T>,
        delta: T,
        xi_log: T,
        m: usize,
    ) -> Result<Self> {
        if lambda.len() != pairs.len() || pairs.is_empty() {
            return Err(Error::invalid_data(
                MODULE,
                format!("{} constants for {} pairs", lambda.len(), pairs.len()),
            ));
        }
        if !(delta > T::zero()) {
            return Err(Error::invalid_data(MODULE, "margin must be positive"));
        }
        let lo = lambda.iter().fold(T::infinity(), |a, &b| a.min(b));
        if lo != T::zero() {
            return Err(Error::invalid_data(MODULE, "constants must satisfy min lambda = 0"));
        }
        Ok(Self { pairs, lambda, delta, xi_log, m })
    }

    /// Same pairs and constants evaluated at a different `ln xi`.
    pub fn with_xi_log(&self, xi_log: T) -> Self {
        Self { xi_log, ..self.clone() }
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn d(&self) -> usize {
        self.pairs.dim()
    }

    pub fn xi(&self) -> T {
        self.xi_log.exp()
    }

    /// Affine pieces `psi_i(u)`.
    pub fn affine_values(&self, u: &[T]) -> Vec<T> {
        self.pairs.x.rows().zip(&self.lambda).map(|(x, &l)| dot(u, x) - l).collect()
    }

    /// `Psi_n(u) = max_i psi_i(u)` and the lowest maximizing index.
    pub fn psi_max(&self, u: &[T]) -> (T, usize) {
        argmax(&self.affine_values(u))
    }

    /// `xi (psi_i - max)`, computed as `-exp(ln xi + ln(max - psi_i))`.
    fn scaled_gaps(&self, psi: &[T], top: T) -> Vec<T> {
        psi.iter()
            .map(|&p| {
                let gap = top - p;
                if gap <= T::zero() {
                    T::zero()
                } else {
                    -(self.xi_log + gap.ln()).exp()
                }
            })
            .collect()
    }

    pub fn softmax_weights(&self, u: &[T]) -> WeightVector<T> {
        let psi = self.affine_values(u);
        let (top, _) = argmax(&psi);
        WeightVector { log_weights: log_softmax(&self.scaled_gaps(&psi, top)) }
    }

    /// `Psi_xi(u) = Psi_n(u) + (1/xi) log sum_i exp(xi (psi_i - Psi_n))`.
    pub fn smoothed_potential(&self, u: &[T]) -> T {
        let psi = self.affine_values(u);
        let (top, k) = argmax(&psi);
        let mut gaps = self.scaled_gaps(&psi, top);
        gaps[k] = T::neg_infinity();
        // log sum = ln(1 + rest), rest collecting every term but the maximum
        let rest = exp_sum(&gaps);
        if rest <= T::zero() {
            top
        } else {
            top + (rest.ln_1p().ln() - self.xi_log).exp()
        }
    }

    /// `Q(u) = sum_i w_i(u) X_i`.
    pub fn smoothed_quantile(&self, u: &[T]) -> Vec<T> {
        let w = self.softmax_weights(u).weights();
        self.weighted_mean(&w)
    }

    fn weighted_mean(&self, w: &[T]) -> Vec<T> {
        let mut q = vec![T::zero(); self.d()];
        for (x, &wi) in self.pairs.x.rows().zip(w) {
            if wi > T::zero() {
                for (a, &b) in q.iter_mut().zip(x) {
                    *a += wi * b;
                }
            }
        }
        q
    }

    /// `J(u) = xi^d det(sum_i w_i (X_i - Q(u))(X_i - Q(u))^T)`, evaluated in
    /// the log domain through a Cholesky factorization of the weighted
    /// covariance.
    pub fn jacobian_det(&self, u: &[T]) -> JacobianDet<T> {
        let w = self.softmax_weights(u).weights();
        let cov = self.weighted_covariance(&w);
        match crate::linalg::cholesky_log_det(&cov, self.d()) {
            Some(ld) => {
                let log_det = T::from_count(self.d()) * self.xi_log + ld;
                JacobianDet { det: log_det.exp(), log_det, singular: false }
            }
            None => JacobianDet { det: T::zero(), log_det: T::neg_infinity(), singular: true },
        }
    }

    /// Gradient of the smoothed quantile map, `xi` times the weighted
    /// covariance (row-major `d x d`).
    pub fn quantile_gradient(&self, u: &[T]) -> Vec<T> {
        let w = self.softmax_weights(u).weights();
        let xi = self.xi();
        self.weighted_covariance(&w).into_iter().map(|c| c * xi).collect()
    }

    fn weighted_covariance(&self, w: &[T]) -> Vec<T> {
        let d = self.d();
        let mean = self.weighted_mean(w);
        let mut cov = vec![T::zero(); d * d];
        let mut centered = vec![T::zero(); d];
        for (x, &wi) in self.pairs.x.rows().zip(w) {
            if wi <= T::zero() {
                continue;
            }
            for (c, (&a, &b)) in centered.iter_mut().zip(x.iter().zip(&mean)) {
                *c = a - b;
            }
            for r in 0..d {
                let s = wi * centered[r];
                for c in 0..=r {
                    cov[r * d + c] += s * centered[c];
                }
            }
        }
        for r in 0..d {
            for c in r + 1..d {
                cov[r * d + c] = cov[c * d + r];
            }
        }
        cov
    }
}

fn argmax<T: Scalar>(v: &[T]) -> (T, usize) {
    let mut best = (T::neg_infinity(), 0);
    for (i, &x) in v.iter().enumerate() {
        if x > best.0 {
            best = (x, i);
        }
    }
    best
}

fn exp_sum<T: Scalar>(t: &[T]) -> T {
    let floor = T::lit(LOG_UNDERFLOW);
    t.iter().filter(|&&x| x >= floor).map(|x| x.exp()).sum()
}

/// `log softmax` of values whose maximum is 0.
fn log_softmax<T: Scalar>(t: &[T]) -> Vec<T> {
    let floor = T::lit(LOG_UNDERFLOW);
    let lse = exp_sum(t).ln();
    t.iter()
        .map(|&x| if x < floor { T::neg_infinity() } else { x - lse })
        .collect()
}
