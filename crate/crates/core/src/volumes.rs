//! Volumes of center-outward quantile regions.
//!
//! For an elliptical law the region of order `p` is an ellipsoid and its
//! volume has a closed form. For a fit, the volume of `Q(p B_d)` is the
//! integral of `J = det grad Q` over the ball of radius `p`, computed in
//! polar coordinates.

use std::f64::consts::PI;

use gauss_quad::GaussLegendre;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::scalar::Scalar;
use crate::smooth::CenterOutwardFit;

const MODULE: &str = "volumes";

/// `ln xi` above which the Jacobian is a sum of near-delta spikes.
pub const SPIKY_LOG_XI: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VolumeMethod {
    ClosedFormElliptical,
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeCurve<T> {
    pub orders: Vec<T>,
    pub volumes: Vec<T>,
    pub method: VolumeMethod,
    pub std_errors: Option<Vec<T>>,
}

impl<T: Scalar> VolumeCurve<T> {
    /// Largest decrease between consecutive orders, 0 for a monotone curve.
    pub fn max_decrease(&self) -> T {
        self.volumes.windows(2).fold(T::zero(), |m, w| m.max(w[0] - w[1]))
    }
}

fn check_order(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid_argument(MODULE, format!("order {p} not in (0, 1)")))
    }
}

/// `ln(pi^{d/2} / Gamma(1 + d/2))`, the log-volume of the unit ball.
pub fn log_unit_ball_volume(d: usize) -> f64 {
    0.5 * d as f64 * PI.ln() - ln_gamma(1.0 + 0.5 * d as f64)
}

/// `|Sigma|^{1/2} pi^{d/2} / Gamma(1 + d/2) Q_R(p)^d`.
pub fn elliptical_volume(p: f64, d: usize, sigma_det: f64, q_r: impl Fn(f64) -> f64) -> Result<f64> {
    check_order(p)?;
    if !(sigma_det > 0.0) {
        return Err(Error::invalid_argument(MODULE, "scatter determinant must be positive"));
    }
    let q = q_r(p);
    if !q.is_finite() || q < 0.0 {
        return Err(Error::invalid_argument(MODULE, format!("radial quantile {q} at order {p}")));
    }
    if q == 0.0 {
        return Ok(0.0);
    }
    Ok((0.5 * sigma_det.ln() + log_unit_ball_volume(d) + d as f64 * q.ln()).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    /// Gauss-Legendre nodes per radial panel.
    pub radial_nodes: usize,
    /// Trapezoid nodes in the planar angle (and the azimuth for `d = 3`).
    pub angular_nodes: usize,
    /// Gauss-Legendre nodes in the polar angle for `d = 3`.
    pub polar_nodes: usize,
    /// Panel doublings before giving up.
    pub max_levels: usize,
    pub rel_tol: f64,
    /// Dimensions above this use Monte Carlo.
    pub quadrature_max_dim: usize,
    pub mc_points: usize,
    pub mc_seed: u64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            radial_nodes: 32,
            angular_nodes: 256,
            polar_nodes: 32,
            max_levels: 4,
            rel_tol: 1e-3,
            quadrature_max_dim: 3,
            mc_points: 100_000,
            mc_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeDiagnostics {
    pub method: VolumeMethod,
    /// Radial panels in the accepted estimate.
    pub panels: usize,
    pub evaluations: usize,
    /// Change between the last two refinements.
    pub last_change: f64,
    pub std_error: Option<f64>,
    pub warnings: Vec<String>,
}

fn eval_dets<T: Scalar>(fit: &CenterOutwardFit<T>, points: &[Vec<T>]) -> Vec<T> {
    points.par_iter().map(|u| fit.jacobian_det(u).det).collect()
}

/// Angular average of `J` on spheres of the given radii, times the sphere
/// measure `r^{d-1}` and the angular total.
fn shell_integrals<T: Scalar>(fit: &CenterOutwardFit<T>, radii: &[f64], spec: &QuadratureSpec) -> Vec<f64> {
    let dirs = sphere_rule(fit.d(), spec);
    let points: Vec<Vec<T>> = radii
        .iter()
        .flat_map(|&r| dirs.iter().map(move |(v, _)| v.iter().map(|c| T::lit(r * c)).collect()))
        .collect();
    let dets = eval_dets(fit, &points);
    let d = fit.d() as i32;
    radii
        .iter()
        .zip(dets.chunks(dirs.len()))
        .map(|(&r, chunk)| r.powi(d - 1) * chunk.iter().zip(&dirs).map(|(j, (_, w))| j.as_f64() * w).sum::<f64>())
        .collect()
}

/// Directions and weights integrating over the unit sphere.
fn sphere_rule(d: usize, spec: &QuadratureSpec) -> Vec<(Vec<f64>, f64)> {
    let na = spec.angular_nodes;
    let dphi = 2.0 * PI / na as f64;
    let azimuth = (0..na).map(move |a| {
        let phi = a as f64 * dphi;
        (phi.cos(), phi.sin())
    });
    match d {
        1 => vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)],
        2 => azimuth.map(|(c, s)| (vec![c, s], dphi)).collect(),
        _ => {
            let gl = GaussLegendre::new(spec.polar_nodes).expect("polar rule");
            let mut out = Vec::with_capacity(spec.polar_nodes * na);
            for &(x, w) in gl.as_node_weight_pairs() {
                let theta = 0.5 * PI * (x + 1.0);
                let (st, ct) = theta.sin_cos();
                for (c, s) in azimuth.clone() {
                    out.push((vec![st * c, st * s, ct], 0.5 * PI * w * st * dphi));
                }
            }
            out
        }
    }
}

fn panel_rule(p: f64, panels: usize, gl: &GaussLegendre) -> (Vec<f64>, Vec<f64>) {
    let h = p / panels as f64;
    let mut r = Vec::with_capacity(panels * gl.degree());
    let mut w = Vec::with_capacity(panels * gl.degree());
    for k in 0..panels {
        let mid = h * (k as f64 + 0.5);
        for &(x, wx) in gl.as_node_weight_pairs() {
            r.push(mid + 0.5 * h * x);
            w.push(0.5 * h * wx);
        }
    }
    (r, w)
}

/// `int_{p B_d} J(u) du` for the fit.
///
/// `d <= 3` uses Gauss-Legendre panels in the radius, doubled until two
/// successive estimates agree to `rel_tol`; higher dimensions use Monte Carlo
/// with stratified radii and report a standard error.
pub fn empirical_volume<T: Scalar>(
    fit: &CenterOutwardFit<T>,
    p: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, VolumeDiagnostics)> {
    check_order(p)?;
    let mut warnings = Vec::new();
    if fit.xi_log.as_f64() > SPIKY_LOG_XI {
        warnings.push(format!(
            "ln xi = {} makes the Jacobian spiky; volumes are unreliable",
            fit.xi_log
        ));
    }
    if fit.d() > spec.quadrature_max_dim.min(3) {
        return monte_carlo_volume(fit, p, spec, warnings);
    }
    if spec.radial_nodes == 0 || spec.angular_nodes == 0 || spec.polar_nodes == 0 {
        return Err(Error::invalid_argument(MODULE, "quadrature rule sizes must be positive"));
    }
    let gl = GaussLegendre::new(spec.radial_nodes)
        .map_err(|e| Error::invalid_argument(MODULE, e.to_string()))?;
    let per_radius = sphere_rule(fit.d(), spec).len();
    let mut prev: Option<f64> = None;
    let mut evaluations = 0;
    let mut est = 0.0;
    for level in 0..=spec.max_levels {
        let panels = 1 << level;
        let (r, w) = panel_rule(p, panels, &gl);
        evaluations += r.len() * per_radius;
        est = shell_integrals(fit, &r, spec).iter().zip(&w).map(|(s, w)| s * w).sum();
        if let Some(old) = prev {
            let change = (est - old).abs();
            if change <= spec.rel_tol * est.abs() {
                return Ok((
                    est,
                    VolumeDiagnostics {
                        method: VolumeMethod::Quadrature,
                        panels,
                        evaluations,
                        last_change: change,
                        std_error: None,
                        warnings,
                    },
                ));
            }
        }
        prev = Some(est);
    }
    Err(Error::AccuracyNotReached { best: est, levels: spec.max_levels })
}

fn monte_carlo_volume<T: Scalar>(
    fit: &CenterOutwardFit<T>,
    p: f64,
    spec: &QuadratureSpec,
    warnings: Vec<String>,
) -> Result<(f64, VolumeDiagnostics)> {
    let k = spec.mc_points;
    if k < 2 {
        return Err(Error::invalid_argument(MODULE, "Monte Carlo needs at least 2 points"));
    }
    let d = fit.d();
    let mut rng = stream_rng(spec.mc_seed, d as u64);
    let points: Vec<Vec<T>> = (0..k)
        .map(|i| {
            let z: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let nz = z.iter().map(|v| v * v).sum::<f64>().sqrt();
            let v: f64 = rng.random();
            let r = p * ((i as f64 + v) / k as f64).powf(1.0 / d as f64);
            z.iter().map(|c| T::lit(r * c / nz)).collect()
        })
        .collect();
    let dets: Vec<f64> = eval_dets(fit, &points).iter().map(|j| j.as_f64()).collect();
    let mean = dets.iter().sum::<f64>() / k as f64;
    let var = dets.iter().map(|j| (j - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    let ball = (log_unit_ball_volume(d) + d as f64 * p.ln()).exp();
    let se = ball * (var / k as f64).sqrt();
    Ok((
        ball * mean,
        VolumeDiagnostics {
            method: VolumeMethod::MonteCarlo,
            panels: 0,
            evaluations: k,
            last_change: 0.0,
            std_error: Some(se),
            warnings,
        },
    ))
}

/// Empirical volumes at each order.
pub fn empirical_volume_curve<T: Scalar>(
    fit: &CenterOutwardFit<T>,
    orders: &[f64],
    spec: &QuadratureSpec,
) -> Result<VolumeCurve<f64>> {
    let mut volumes = Vec::with_capacity(orders.len());
    let mut errors = Vec::with_capacity(orders.len());
    let mut method = VolumeMethod::Quadrature;
    for &p in orders {
        let (v, diag) = empirical_volume(fit, p, spec)?;
        volumes.push(v);
        errors.push(diag.std_error.unwrap_or(0.0));
        method = diag.method;
    }
    Ok(VolumeCurve {
        orders: orders.to_vec(),
        volumes,
        method,
        std_errors: (method == VolumeMethod::MonteCarlo).then_some(errors),
    })
}

pub fn elliptical_volume_curve(
    orders: &[f64],
    d: usize,
    sigma_det: f64,
    q_r: impl Fn(f64) -> f64,
) -> Result<VolumeCurve<f64>> {
    let volumes = orders
        .iter()
        .map(|&p| elliptical_volume(p, d, sigma_det, &q_r))
        .collect::<Result<_>>()?;
    Ok(VolumeCurve {
        orders: orders.to_vec(),
        volumes,
        method: VolumeMethod::ClosedFormElliptical,
        std_errors: None,
    })
}

/// Reference axis for volume QQ plots.
pub enum VolumeReference<'a> {
    /// Gaussian law with the given scatter determinant.
    GaussianChiSq { sigma_det: f64 },
    /// Elliptical law with a caller-supplied radial quantile function.
    UserQuantile { sigma_det: f64, q_r: &'a (dyn Fn(f64) -> f64 + Sync) },
    /// `(-log(1 - p), log V(p))`; linear for heavy tails.
    LogPareto,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeQq {
    pub orders: Vec<f64>,
    pub reference: Vec<f64>,
    pub empirical: Vec<f64>,
}

pub fn volume_qq_data<T: Scalar>(
    fit: &CenterOutwardFit<T>,
    reference: &VolumeReference<'_>,
    orders: &[f64],
    spec: &QuadratureSpec,
) -> Result<VolumeQq> {
    if orders.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid_argument(MODULE, "orders must be strictly increasing"));
    }
    let curve = empirical_volume_curve(fit, orders, spec)?;
    let d = fit.d();
    let (reference, empirical) = match reference {
        VolumeReference::GaussianChiSq { sigma_det } => {
            let law = crate::simulate::RadialLaw::GaussianChi;
            let r = elliptical_volume_curve(orders, d, *sigma_det, |p| law.quantile(p, d))?;
            (r.volumes, curve.volumes)
        }
        VolumeReference::UserQuantile { sigma_det, q_r } => {
            (elliptical_volume_curve(orders, d, *sigma_det, q_r)?.volumes, curve.volumes)
        }
        VolumeReference::LogPareto => (
            orders.iter().map(|p| -(1.0 - p).ln()).collect(),
            curve.volumes.iter().map(|v| v.ln()).collect(),
        ),
    };
    Ok(VolumeQq { orders: orders.to_vec(), reference, empirical })
}

/// `i / (count + 1)` for `i = 1..=count`.
pub fn uniform_orders(count: usize) -> Vec<f64> {
    (1..=count).map(|i| i as f64 / (count + 1) as f64).collect()
}
