//! Versioned JSON persistence of fits with bit-exact floating point values.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::hexfloat;
use super::output::to_sorted_json;
use crate::error::{Error, Result};
use crate::points::PointSet;
use crate::smooth::CenterOutwardFit;
use crate::transport::PairSet;

const MODULE: &str = "io_cli";

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridRecord {
    pub kind: String,
    pub seed: u64,
    /// One stream per averaged grid.
    pub streams: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Provenance {
    pub command_line: Vec<String>,
    /// SHA-256 of the input data file, when the sample came from one.
    pub input_digest: Option<String>,
    pub crate_version: String,
}

impl Provenance {
    pub fn new(command_line: Vec<String>, input_digest: Option<String>) -> Self {
        Self { command_line, input_digest, crate_version: env!("CARGO_PKG_VERSION").into() }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// On-disk form of a fit; every real is a hexadecimal float string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitArchive {
    pub format_version: u32,
    pub d: usize,
    pub n: usize,
    pub m: usize,
    pub xi_log: String,
    pub xi_policy: String,
    pub delta: String,
    pub lambda: Vec<String>,
    pub u: Vec<Vec<String>>,
    pub x: Vec<Vec<String>>,
    pub grids: GridRecord,
    pub provenance: Provenance,
}

fn hex_rows(p: &PointSet<f64>) -> Vec<Vec<String>> {
    p.rows().map(|r| r.iter().map(|&v| hexfloat::format(v)).collect()).collect()
}

fn parse_hex(s: &str, field: &str) -> Result<f64> {
    hexfloat::parse(s).ok_or_else(|| Error::invalid_data(MODULE, format!("bad float '{s}' in {field}")))
}

fn parse_rows(rows: &[Vec<String>], d: usize, field: &str) -> Result<PointSet<f64>> {
    let mut flat = Vec::with_capacity(rows.len() * d);
    for r in rows {
        if r.len() != d {
            return Err(Error::invalid_data(MODULE, format!("{field} row of length {} in dimension {d}", r.len())));
        }
        for s in r {
            flat.push(parse_hex(s, field)?);
        }
    }
    PointSet::from_flat(flat, d)
}

impl FitArchive {
    pub fn from_fit(fit: &CenterOutwardFit<f64>, xi_policy: &str, grids: GridRecord, provenance: Provenance) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            d: fit.d(),
            n: fit.n(),
            m: fit.m,
            xi_log: hexfloat::format(fit.xi_log),
            xi_policy: xi_policy.into(),
            delta: hexfloat::format(fit.delta),
            lambda: fit.lambda.iter().map(|&v| hexfloat::format(v)).collect(),
            u: hex_rows(&fit.pairs.u),
            x: hex_rows(&fit.pairs.x),
            grids,
            provenance,
        }
    }

    pub fn to_fit(&self) -> Result<CenterOutwardFit<f64>> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::invalid_data(
                MODULE,
                format!("archive format {} is not supported (expected {FORMAT_VERSION})", self.format_version),
            ));
        }
        let u = parse_rows(&self.u, self.d, "u")?;
        let x = parse_rows(&self.x, self.d, "x")?;
        if u.len() != self.n {
            return Err(Error::invalid_data(MODULE, format!("{} gridpoints for n = {}", u.len(), self.n)));
        }
        let lambda = self.lambda.iter().map(|s| parse_hex(s, "lambda")).collect::<Result<_>>()?;
        CenterOutwardFit::from_parts(
            PairSet::new(u, x)?,
            lambda,
            parse_hex(&self.delta, "delta")?,
            parse_hex(&self.xi_log, "xi_log")?,
            self.m,
        )
    }

    pub fn to_json(&self) -> Result<String> {
        to_sorted_json(self)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}
