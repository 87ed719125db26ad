//! End-to-end recipes shared by the command line tool and the tests.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grids::{GridKind, GridSpec};
use crate::io::{rolling_windows, GridRecord, TimeSeriesTable};
use crate::risk::risk_report;
use crate::scalar::Scalar;
use crate::simulate::{equicorrelation, EllipticalSpec, RadialLaw};
use crate::smooth::{CenterOutwardFit, XiPolicy};
use crate::tails::{hill_estimate, ridge_estimate, y_values, DEFAULT_SECOND_ORDER_RHO};
use crate::transport::{average_couplings, PairSet, Sample};

const MODULE: &str = "io_cli";

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    /// Grid recipe; `None` picks the w-grid for the sample's `(n, d)`.
    pub grid: Option<GridSpec>,
    pub m: usize,
    pub seed: u64,
    pub xi: XiPolicy,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self { grid: None, m: 1, seed: 0, xi: XiPolicy::Paper }
    }
}

impl FitConfig {
    fn grid_spec(&self, n: usize, d: usize) -> Result<GridSpec> {
        match self.grid {
            Some(g) => Ok(g),
            None => GridSpec::w_grid(n, d),
        }
    }

    pub fn grid_record(&self, n: usize, d: usize) -> Result<GridRecord> {
        let kind = match self.grid_spec(n, d)? {
            GridSpec::RandomPolar2D { .. } => "random_polar_2d".to_string(),
            GridSpec::RadialRank { .. } => "radial_rank".to_string(),
            GridSpec::Factorized { n_r, n_s, n0, .. } => format!("factorized(n_r={n_r},n_s={n_s},n0={n0})"),
        };
        Ok(GridRecord { kind, seed: self.seed, streams: (0..self.m as u64).collect() })
    }
}

/// Grids on streams `0..m` of `seed`, averaged couplings, potential constants.
pub fn fit_sample<T: Scalar>(sample: &Sample<T>, config: &FitConfig) -> Result<CenterOutwardFit<T>> {
    if config.m == 0 {
        return Err(Error::invalid_argument(MODULE, "m must be at least 1"));
    }
    let spec = config.grid_spec(sample.n(), sample.d())?;
    let grids = (0..config.m as u64)
        .map(|s| spec.generate(config.seed, s))
        .collect::<Result<Vec<_>>>()?;
    if let Some(g) = grids.iter().find(|g| g.len() != sample.n()) {
        let kind = match g.kind {
            GridKind::Factorized { .. } => "factorized",
            _ => "random",
        };
        return Err(Error::invalid_argument(
            MODULE,
            format!("{kind} grid has {} points for a sample of {}", g.len(), sample.n()),
        ));
    }
    let u = average_couplings(sample, &grids)?;
    let pairs = PairSet::new(u, sample.rows.clone())?;
    CenterOutwardFit::new(pairs, T::lit(config.xi.xi_log(sample.n())), config.m)
}

/// Parses `gaussian`, `t<nu>` / `t:<nu>`, `hyperbolic:<gamma>`.
///
/// Gaussian and t laws are spherical; the hyperbolic law uses unit variances
/// and correlations 0.5.
pub fn parse_distribution(name: &str, d: usize) -> Result<EllipticalSpec> {
    let lower = name.trim().to_ascii_lowercase();
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| Error::invalid_argument("simulate", format!("bad parameter in distribution '{name}'")))
    };
    let radial = if lower == "gaussian" || lower == "normal" {
        RadialLaw::GaussianChi
    } else if let Some(g) = lower.strip_prefix("hyperbolic:") {
        RadialLaw::Hyperbolic(num(g)?)
    } else if let Some(nu) = lower.strip_prefix("t:").or_else(|| lower.strip_prefix('t')) {
        RadialLaw::StudentT(num(nu)?)
    } else {
        return Err(Error::invalid_argument("simulate", format!("unknown distribution '{name}'")));
    };
    let sigma = match radial {
        RadialLaw::Hyperbolic(_) => equicorrelation(d, 0.5),
        _ => equicorrelation(d, 0.0),
    };
    EllipticalSpec::new(vec![0.0; d], sigma, radial)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RollingConfig {
    pub window_months: usize,
    pub step_months: usize,
    pub fit: FitConfig,
    /// Tail order for the tail/trimmed split.
    pub p: f64,
    /// Upper order statistics used by the Hill and ridge estimates.
    pub k: usize,
    pub tau: f64,
    pub second_order_rho: f64,
}

impl Default for RollingConfig {
    fn default() -> Self {
        Self {
            window_months: 36,
            step_months: 1,
            fit: FitConfig::default(),
            p: 0.05,
            k: 100,
            tau: 0.0,
            second_order_rho: DEFAULT_SECOND_ORDER_RHO,
        }
    }
}

/// One window of a rolling analysis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RollingRow {
    pub label: String,
    pub n: usize,
    pub rho: f64,
    pub rho_tail: f64,
    pub rho_trimmed: f64,
    pub n_tail: usize,
    pub tail_share: f64,
    /// Number of upper order statistics actually used (capped by the window).
    pub k: usize,
    pub hill: Option<f64>,
    pub ridge: Option<f64>,
    pub dropped: usize,
}

/// Fit, risk and tail index per trailing window, in label order.
pub fn rolling(table: &TimeSeriesTable, config: &RollingConfig) -> Result<Vec<RollingRow>> {
    let windows = rolling_windows(table, config.window_months, config.step_months)?;
    windows
        .par_iter()
        .map(|(label, sample)| {
            let fit = fit_sample(sample, &config.fit)?;
            let risk = risk_report(&fit, config.p)?;
            let y = y_values(&fit, false);
            let positive = y.len() - y.dropped();
            let k = config.k.min(positive.saturating_sub(1));
            let hill = hill_estimate(&y, k).ok();
            let ridge = ridge_estimate(&y, k, config.tau, config.second_order_rho).ok();
            Ok(RollingRow {
                label: label.clone(),
                n: fit.n(),
                rho: risk.rho,
                rho_tail: risk.rho_tail,
                rho_trimmed: risk.rho_trimmed,
                n_tail: risk.n_tail,
                tail_share: risk.tail_share,
                k,
                hill,
                ridge,
                dropped: y.dropped(),
            })
        })
        .collect()
}
