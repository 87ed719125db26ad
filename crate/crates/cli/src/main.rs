//! Command line front end: simulate, fit, and derive risk, contour, volume
//! and tail-index reports. Every command writes into `--out-dir`.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use centerout::io::{to_sorted_json, ErrorRecord};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "centerout", version, about = "Center-outward quantiles and multivariate risk")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Directory receiving every output file.
    #[arg(long, global = true, env = "CENTEROUT_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,

    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true, env = "CENTEROUT_THREADS")]
    pub threads: Option<usize>,

    /// Run on a single thread.
    #[arg(long, global = true, env = "CENTEROUT_SEQUENTIAL")]
    pub sequential: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a benchmark sample and write it as CSV.
    Simulate(SimArgs),
    /// Fit the smoothed center-outward quantile map and archive it.
    Fit(FitArgs),
    /// Maximal-correlation risk with its tail/trimmed split.
    Risk(RiskArgs),
    /// Quantile contours of the fitted map.
    Contours(ContourArgs),
    /// Quantile-region volumes.
    Volumes(VolumeArgs),
    /// Hill, least-squares and ridge tail-index curves.
    Evi(EviArgs),
    /// Rolling-window fits on a dated CSV.
    Rolling(RollingArgs),
    /// Pareto or volume QQ data.
    Qq(QqArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    #[arg(long, env = "CENTEROUT_N", default_value_t = 1000)]
    pub n: usize,
    #[arg(long, env = "CENTEROUT_D", default_value_t = 2)]
    pub d: usize,
    /// gaussian, t<nu> (e.g. t3) or hyperbolic:<gamma>.
    #[arg(long, env = "CENTEROUT_DIST", default_value = "gaussian")]
    pub dist: String,
    #[arg(long, env = "CENTEROUT_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum XiPolicyArg {
    Paper,
    Moderate,
}

#[derive(Debug, Clone, Args)]
pub struct XiArgs {
    /// Smoothing policy: ln xi = 300 or xi = (ln n)^2.
    #[arg(long, env = "CENTEROUT_XI_POLICY", value_enum)]
    pub xi_policy: Option<XiPolicyArg>,
    /// Explicit ln xi, overriding the policy.
    #[arg(long, env = "CENTEROUT_XI_LOG", allow_negative_numbers = true)]
    pub xi_log: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub sim: SimArgs,
    /// Fit this CSV instead of a simulated sample.
    #[arg(long, env = "CENTEROUT_INPUT")]
    pub input: Option<PathBuf>,
    /// Date column of the input, excluded from the data.
    #[arg(long, env = "CENTEROUT_DATE_COLUMN")]
    pub date_column: Option<String>,
    #[arg(long, env = "CENTEROUT_LOG_RETURNS")]
    pub log_returns: bool,
    /// Number of averaged grids.
    #[arg(long, env = "CENTEROUT_M", default_value_t = 1)]
    pub m: usize,
    #[command(flatten)]
    pub xi: XiArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FitSource {
    /// Fit archive (default: <out-dir>/fit.json).
    #[arg(long, env = "CENTEROUT_FIT")]
    pub fit: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RiskArgs {
    #[command(flatten)]
    pub source: FitSource,
    /// Tail order.
    #[arg(long, env = "CENTEROUT_P", default_value_t = 0.05)]
    pub p: f64,
    #[command(flatten)]
    pub xi: XiArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ContourArgs {
    #[command(flatten)]
    pub source: FitSource,
    #[arg(long, env = "CENTEROUT_P", value_delimiter = ',', default_value = "0.2,0.4,0.6,0.8")]
    pub p: Vec<f64>,
    #[arg(long, default_value_t = 256)]
    pub points: usize,
    #[command(flatten)]
    pub xi: XiArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VolumeArgs {
    #[command(flatten)]
    pub source: FitSource,
    #[arg(
        long,
        env = "CENTEROUT_P",
        value_delimiter = ',',
        default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9"
    )]
    pub p: Vec<f64>,
    #[command(flatten)]
    pub xi: XiArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EviArgs {
    #[command(flatten)]
    pub source: FitSource,
    #[arg(long, env = "CENTEROUT_K_MAX", default_value_t = 200)]
    pub k_max: usize,
    #[arg(long, env = "CENTEROUT_TAU", default_value_t = 0.0)]
    pub tau: f64,
    /// Second-order exponent (negative).
    #[arg(long, env = "CENTEROUT_RHO2", default_value_t = -1.0, allow_negative_numbers = true)]
    pub rho2: f64,
    /// Use the smoothed map instead of the coupling.
    #[arg(long)]
    pub smoothed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QqKind {
    Pareto,
    Volume,
}

#[derive(Debug, Clone, Args)]
pub struct QqArgs {
    #[command(flatten)]
    pub source: FitSource,
    #[arg(long, value_enum, default_value = "pareto")]
    pub kind: QqKind,
    #[arg(long)]
    pub smoothed: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RollingArgs {
    #[arg(long, env = "CENTEROUT_INPUT")]
    pub input: PathBuf,
    #[arg(long, env = "CENTEROUT_DATE_COLUMN", default_value = "date")]
    pub date_column: String,
    #[arg(long, env = "CENTEROUT_LOG_RETURNS")]
    pub log_returns: bool,
    #[arg(long, env = "CENTEROUT_WINDOW_MONTHS", default_value_t = 36)]
    pub window_months: usize,
    #[arg(long, env = "CENTEROUT_STEP_MONTHS", default_value_t = 1)]
    pub step_months: usize,
    #[arg(long, env = "CENTEROUT_M", default_value_t = 1)]
    pub m: usize,
    #[arg(long, env = "CENTEROUT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "CENTEROUT_P", default_value_t = 0.05)]
    pub p: f64,
    /// Upper order statistics for the tail index.
    #[arg(long, env = "CENTEROUT_K_MAX", default_value_t = 100)]
    pub k_max: usize,
    #[arg(long, env = "CENTEROUT_TAU", default_value_t = 0.0)]
    pub tau: f64,
    #[arg(long, env = "CENTEROUT_RHO2", default_value_t = -1.0, allow_negative_numbers = true)]
    pub rho2: f64,
    #[command(flatten)]
    pub xi: XiArgs,
}

fn report_failure(out_dir: Option<&PathBuf>, record: &ErrorRecord) {
    let doc = serde_json::json!({ "error": record });
    let text = to_sorted_json(&doc).unwrap_or_else(|_| format!("{doc}\n"));
    eprint!("{text}");
    if let Some(dir) = out_dir {
        let _ = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(dir.join("error.json"), &text));
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let record = ErrorRecord { code: "io_cli.usage".into(), message: e.to_string().trim().to_string() };
            report_failure(None, &record);
            return ExitCode::from(2);
        }
    };
    let out_dir = cli.out_dir.clone();
    let argv: Vec<String> = std::env::args().collect();
    match commands::run(&cli, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report_failure(Some(&out_dir), &ErrorRecord::from(&e));
            ExitCode::FAILURE
        }
    }
}
