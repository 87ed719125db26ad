//! Benchmark elliptical distributions and their exact center-outward
//! quantiles.
//!
//! `X = mu + Sigma^{1/2} R S` with `S` uniform on the sphere. The quantile
//! map sends `u` to `mu + Sigma^{1/2} (u / |u|) Q_R(|u|)` and the
//! distribution function inverts it.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use statrs::distribution::{ChiSquared as ChiSq, ContinuousCDF, FisherSnedecor};

use crate::error::{Error, Result};
use crate::points::PointSet;
use crate::rng::stream_rng;
use crate::transport::Sample;

const MODULE: &str = "simulate";

/// Law of the radius `|Sigma^{-1/2} (X - mu)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialLaw {
    /// `R^2 ~ chi^2_d`.
    GaussianChi,
    /// Multivariate Student t with `nu` degrees of freedom: `R^2 / d ~ F(d, nu)`.
    StudentT(f64),
    /// `(gamma D)^{-1/2} Y` with `D ~ chi^2_{1/gamma}`; the radius is that of a
    /// t law with `1/gamma` degrees of freedom.
    Hyperbolic(f64),
}

impl RadialLaw {
    fn dof(&self) -> Option<f64> {
        match *self {
            RadialLaw::GaussianChi => None,
            RadialLaw::StudentT(nu) => Some(nu),
            RadialLaw::Hyperbolic(g) => Some(1.0 / g),
        }
    }

    fn validate(&self) -> Result<()> {
        match self.dof() {
            Some(v) if !(v > 0.0 && v.is_finite()) => Err(Error::invalid_argument(
                MODULE,
                format!("radial law {self:?} needs a positive finite parameter"),
            )),
            _ => Ok(()),
        }
    }

    /// `Q_R(p)` in dimension `d`.
    pub fn quantile(&self, p: f64, d: usize) -> f64 {
        let df = d as f64;
        match self.dof() {
            None => ChiSq::new(df).unwrap().inverse_cdf(p).sqrt(),
            Some(nu) => (df * FisherSnedecor::new(df, nu).unwrap().inverse_cdf(p)).sqrt(),
        }
    }

    /// `F_R(r)` in dimension `d`.
    pub fn cdf(&self, r: f64, d: usize) -> f64 {
        let df = d as f64;
        match self.dof() {
            None => ChiSq::new(df).unwrap().cdf(r * r),
            Some(nu) => FisherSnedecor::new(df, nu).unwrap().cdf(r * r / df),
        }
    }

    /// Extreme value index of `R`: `1/nu` for t-type laws, 0 for Gaussian.
    pub fn tail_index(&self) -> f64 {
        self.dof().map_or(0.0, |v| 1.0 / v)
    }
}

#[derive(Debug, Clone)]
pub struct EllipticalSpec {
    pub mu: Vec<f64>,
    /// Row-major `d x d` scatter matrix.
    pub sigma: Vec<f64>,
    pub radial: RadialLaw,
    chol: DMatrix<f64>,
    sqrt: DMatrix<f64>,
    inv_sqrt: DMatrix<f64>,
}

impl EllipticalSpec {
    pub fn new(mu: Vec<f64>, sigma: Vec<f64>, radial: RadialLaw) -> Result<Self> {
        let d = mu.len();
        if d == 0 || sigma.len() != d * d {
            return Err(Error::invalid_argument(
                MODULE,
                format!("scatter matrix of {} entries for dimension {d}", sigma.len()),
            ));
        }
        radial.validate()?;
        let s = DMatrix::from_row_slice(d, d, &sigma);
        if (&s - s.transpose()).abs().max() > 1e-12 * s.abs().max() {
            return Err(Error::invalid_argument(MODULE, "scatter matrix is not symmetric"));
        }
        let chol = s
            .clone()
            .cholesky()
            .ok_or_else(|| Error::invalid_argument(MODULE, "scatter matrix is not positive definite"))?
            .l();
        let eig = SymmetricEigen::new(s);
        let root = eig.eigenvalues.map(f64::sqrt);
        let q = &eig.eigenvectors;
        let sqrt = q * DMatrix::from_diagonal(&root) * q.transpose();
        let inv_sqrt = q * DMatrix::from_diagonal(&root.map(|v| 1.0 / v)) * q.transpose();
        Ok(Self { mu, sigma, radial, chol, sqrt, inv_sqrt })
    }

    pub fn standard(d: usize, radial: RadialLaw) -> Result<Self> {
        Self::new(vec![0.0; d], identity(d), radial)
    }

    pub fn d(&self) -> usize {
        self.mu.len()
    }

    pub fn sigma_det(&self) -> f64 {
        self.chol.diagonal().product().powi(2)
    }

    /// Draws `n` observations from stream 0 of `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Sample<f64>> {
        if n == 0 {
            return Err(Error::invalid_argument(MODULE, "sample size must be positive"));
        }
        let d = self.d();
        let mut rng = stream_rng(seed, 0);
        let mixing = match self.radial.dof() {
            Some(nu) => Some(ChiSquared::new(nu).map_err(|e| Error::invalid_argument(MODULE, e.to_string()))?),
            None => None,
        };
        let mut data = Vec::with_capacity(n * d);
        for _ in 0..n {
            let z = DVector::from_iterator(d, (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)));
            let scale = match (&mixing, self.radial.dof()) {
                (Some(chi), Some(nu)) => (nu / chi.sample(&mut rng)).sqrt(),
                _ => 1.0,
            };
            let y = &self.chol * z;
            data.extend(y.iter().zip(&self.mu).map(|(v, m)| m + scale * v));
        }
        Sample::new(PointSet::from_flat(data, d)?)
    }

    /// `mu + Sigma^{1/2} (u / |u|) Q_R(|u|)` for `0 < |u| < 1`.
    pub fn quantile(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.d() {
            return Err(Error::invalid_argument(MODULE, "direction of the wrong dimension"));
        }
        let r = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::invalid_argument(
                MODULE,
                format!("|u| = {r} outside the open unit ball minus the origin"),
            ));
        }
        let scale = self.radial.quantile(r, self.d()) / r;
        let v = &self.sqrt * DVector::from_iterator(u.len(), u.iter().map(|x| x * scale));
        Ok(v.iter().zip(&self.mu).map(|(a, m)| a + m).collect())
    }

    /// Inverse of [`quantile`](Self::quantile); the center maps to 0.
    pub fn distribution(&self, x: &[f64]) -> Vec<f64> {
        let z = &self.inv_sqrt * DVector::from_iterator(x.len(), x.iter().zip(&self.mu).map(|(a, m)| a - m));
        let r = z.norm();
        if r == 0.0 {
            return vec![0.0; x.len()];
        }
        let s = self.radial.cdf(r, self.d()) / r;
        z.iter().map(|v| v * s).collect()
    }

    /// `Y_i = <F(X_i), X_i>` for each observation.
    pub fn oracle_y(&self, sample: &Sample<f64>) -> Vec<f64> {
        sample
            .rows
            .rows()
            .map(|x| self.distribution(x).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

fn identity(d: usize) -> Vec<f64> {
    let mut s = vec![0.0; d * d];
    for i in 0..d {
        s[i * d + i] = 1.0;
    }
    s
}

/// Unit diagonal, every off-diagonal entry equal to `rho`.
pub fn equicorrelation(d: usize, rho: f64) -> Vec<f64> {
    let mut s = vec![rho; d * d];
    for i in 0..d {
        s[i * d + i] = 1.0;
    }
    s
}

pub fn sample_gaussian(n: usize, d: usize, seed: u64) -> Result<Sample<f64>> {
    EllipticalSpec::standard(d, RadialLaw::GaussianChi)?.sample(n, seed)
}

/// Student t draws; `sigma = None` gives the spherical law.
pub fn sample_student_t(n: usize, d: usize, nu: f64, sigma: Option<&[f64]>, seed: u64) -> Result<Sample<f64>> {
    let s = sigma.map_or_else(|| identity(d), <[f64]>::to_vec);
    EllipticalSpec::new(vec![0.0; d], s, RadialLaw::StudentT(nu))?.sample(n, seed)
}

/// Elliptical hyperbolic draws; `sigma = None` uses off-diagonals 0.5.
pub fn sample_hyperbolic(n: usize, d: usize, gamma: f64, sigma: Option<&[f64]>, seed: u64) -> Result<Sample<f64>> {
    let s = sigma.map_or_else(|| equicorrelation(d, 0.5), <[f64]>::to_vec);
    EllipticalSpec::new(vec![0.0; d], s, RadialLaw::Hyperbolic(gamma))?.sample(n, seed)
}

pub fn true_elliptical_quantile(u: &[f64], spec: &EllipticalSpec) -> Result<Vec<f64>> {
    spec.quantile(u)
}
