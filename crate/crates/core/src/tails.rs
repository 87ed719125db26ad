//! Tail observables `Y_i = <u_i, Q(u_i)>` and extreme value index
//! estimators built on their upper order statistics.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};
use crate::smooth::CenterOutwardFit;

const MODULE: &str = "extreme_tails";

/// Default exponent in the second-order regressors `(j / (k + 1))^{-rho}`.
pub const DEFAULT_SECOND_ORDER_RHO: f64 = -1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct YSeries<T> {
    pub values: Vec<T>,
    /// Ascending order statistics; ties keep index order.
    pub sorted: Vec<T>,
    pub smoothed: bool,
}

impl<T: Scalar> YSeries<T> {
    pub fn from_values(values: Vec<T>, smoothed: bool) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid_data(MODULE, "tail observables must be finite"));
        }
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Self { values, sorted, smoothed })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of nonpositive values, which carry no logarithm.
    pub fn dropped(&self) -> usize {
        self.sorted.iter().take_while(|v| **v <= T::zero()).count()
    }

    fn positive(&self) -> &[T] {
        &self.sorted[self.dropped()..]
    }

    /// `Y_{i,n}` with 1-based rank.
    fn order(&self, i: usize) -> T {
        self.sorted[i - 1]
    }
}

/// `Y_i` from the coupling pairs, or from the smoothed map when `smoothed`.
pub fn y_values<T: Scalar>(fit: &CenterOutwardFit<T>, smoothed: bool) -> YSeries<T> {
    let values: Vec<T> = if smoothed {
        let idx: Vec<usize> = (0..fit.n()).collect();
        idx.par_iter()
            .map(|&i| {
                let u = fit.pairs.u.row(i);
                dot(u, &fit.smoothed_quantile(u))
            })
            .collect()
    } else {
        fit.pairs.u.rows().zip(fit.pairs.x.rows()).map(|(u, x)| dot(u, x)).collect()
    };
    YSeries::from_values(values, smoothed).expect("fit values are finite")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParetoQq<T> {
    /// `(-log(1 - i/(n+1)), log Y_{i,n})` over the positive values, by
    /// increasing `i`.
    pub points: Vec<(T, T)>,
    pub dropped: usize,
}

pub fn pareto_qq_data<T: Scalar>(y: &YSeries<T>) -> Result<ParetoQq<T>> {
    let pos = y.positive();
    if pos.len() < 2 {
        return Err(Error::insufficient_data(
            MODULE,
            format!("{} positive values, need at least 2", pos.len()),
        ));
    }
    let n1 = T::from_count(pos.len() + 1);
    let points = pos
        .iter()
        .enumerate()
        .map(|(i, &v)| (-(T::one() - T::from_count(i + 1) / n1).ln(), v.ln()))
        .collect();
    Ok(ParetoQq { points, dropped: y.dropped() })
}

fn check_k<T: Scalar>(y: &YSeries<T>, k: usize, min_k: usize) -> Result<()> {
    let n = y.len();
    if k < min_k || k >= n {
        return Err(Error::invalid_argument(
            MODULE,
            format!("k = {k} outside [{min_k}, {}]", n.saturating_sub(1)),
        ));
    }
    if y.order(n - k) <= T::zero() {
        return Err(Error::insufficient_data(
            MODULE,
            format!("threshold order statistic Y_({},{n}) is not positive", n - k),
        ));
    }
    Ok(())
}

/// `H_{k,n} = (1/k) sum_{j<=k} log(Y_{n-j+1,n} / Y_{n-k,n})`.
pub fn hill_estimate<T: Scalar>(y: &YSeries<T>, k: usize) -> Result<T> {
    check_k(y, k, 1)?;
    Ok(hill_unchecked(y, k))
}

fn hill_unchecked<T: Scalar>(y: &YSeries<T>, k: usize) -> T {
    let n = y.len();
    let log_thr = y.order(n - k).ln();
    (1..=k).map(|j| y.order(n - j + 1).ln() - log_thr).sum::<T>() / T::from_count(k)
}

/// Ridge-corrected Hill estimator; `tau = 0` is the least-squares fit of the
/// scaled log-spacings on the second-order regressors.
pub fn ridge_estimate<T: Scalar>(y: &YSeries<T>, k: usize, tau: T, second_order_rho: T) -> Result<T> {
    check_k(y, k, 2)?;
    if tau < T::zero() || !tau.is_finite() {
        return Err(Error::invalid_argument(MODULE, format!("ridge parameter {tau} must be >= 0")));
    }
    if !(second_order_rho < T::zero()) {
        return Err(Error::invalid_argument(
            MODULE,
            format!("second-order exponent {second_order_rho} must be negative"),
        ));
    }
    let n = y.len();
    let kf = T::from_count(k);
    let k1 = T::from_count(k + 1);
    let c: Vec<T> = (1..=k).map(|j| (T::from_count(j) / k1).powf(-second_order_rho)).collect();
    let c_bar = c.iter().copied().sum::<T>() / kf;
    let mut num = T::zero();
    let mut den = kf * tau;
    for (j, &cj) in (1..=k).zip(&c) {
        let z = T::from_count(j) * (y.order(n - j + 1).ln() - y.order(n - j).ln());
        num += (cj - c_bar) * z;
        den += (cj - c_bar) * (cj - c_bar);
    }
    if !(den > T::zero()) {
        return Err(Error::invalid_data(MODULE, "regressors are constant"));
    }
    Ok(hill_unchecked(y, k) - c_bar * num / den)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EviEstimates<T> {
    pub ks: Vec<usize>,
    pub hill: Vec<T>,
    pub ls: Vec<T>,
    pub ridge: Vec<T>,
    pub tau: T,
    pub second_order_rho: T,
    pub dropped: usize,
}

/// Estimator curves for `k = 2..=k_max`.
pub fn evi_sweep<T: Scalar>(y: &YSeries<T>, k_max: usize, tau: T, second_order_rho: T) -> Result<EviEstimates<T>> {
    if k_max < 2 {
        return Err(Error::invalid_argument(MODULE, "k_max must be at least 2"));
    }
    let ks: Vec<usize> = (2..=k_max).collect();
    let rows: Vec<(T, T, T)> = ks
        .par_iter()
        .map(|&k| {
            Ok((
                hill_estimate(y, k)?,
                ridge_estimate(y, k, T::zero(), second_order_rho)?,
                ridge_estimate(y, k, tau, second_order_rho)?,
            ))
        })
        .collect::<Result<_>>()?;
    Ok(EviEstimates {
        ks,
        hill: rows.iter().map(|r| r.0).collect(),
        ls: rows.iter().map(|r| r.1).collect(),
        ridge: rows.iter().map(|r| r.2).collect(),
        tau,
        second_order_rho,
        dropped: y.dropped(),
    })
}

/// Two-sample Kolmogorov-Smirnov distance between the ECDFs of `a` and `b`.
pub fn ecdf_distance<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid_argument(MODULE, "both samples must be nonempty"));
    }
    let sort = |v: &[T]| {
        let mut s = v.to_vec();
        s.sort_by(|x, y| x.partial_cmp(y).unwrap());
        s
    };
    let (a, b) = (sort(a), sort(b));
    let (na, nb) = (T::from_count(a.len()), T::from_count(b.len()));
    let (mut i, mut j) = (0, 0);
    let mut best = T::zero();
    while i < a.len() && j < b.len() {
        let t = a[i].min(b[j]);
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        best = best.max((T::from_count(i) / na - T::from_count(j) / nb).abs());
    }
    Ok(best)
}
