use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the library. Each variant maps to a stable,
/// module-qualified code via [`Error::code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("{module}: invalid argument: {msg}")]
    InvalidArgument { module: &'static str, msg: String },

    #[error("{module}: invalid data: {msg}")]
    InvalidData { module: &'static str, msg: String },

    #[error(
        "smooth_quantile: degenerate configuration: margin {delta:e} at or below tolerance \
         (pair {i}, {j})"
    )]
    DegenerateConfiguration { delta: f64, i: usize, j: usize },

    #[error("risk_measures: no gridpoints on the {side} side of radius {radius}")]
    InsufficientTailPoints { side: &'static str, radius: f64 },

    #[error("{module}: insufficient data: {msg}")]
    InsufficientData { module: &'static str, msg: String },

    #[error("volumes: accuracy not reached after {levels} refinements (best estimate {best})")]
    AccuracyNotReached { best: f64, levels: usize },

    #[error("io_cli: {path}: line {line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error("io_cli: {0}")]
    Io(#[from] std::io::Error),

    #[error("io_cli: json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io_cli: csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid_argument(module: &'static str, msg: impl Into<String>) -> Self {
        Error::InvalidArgument { module, msg: msg.into() }
    }

    pub(crate) fn invalid_data(module: &'static str, msg: impl Into<String>) -> Self {
        Error::InvalidData { module, msg: msg.into() }
    }

    pub(crate) fn insufficient_data(module: &'static str, msg: impl Into<String>) -> Self {
        Error::InsufficientData { module, msg: msg.into() }
    }

    /// Machine-readable code, e.g. `transport.invalid_argument`.
    pub fn code(&self) -> String {
        match self {
            Error::InvalidArgument { module, .. } => format!("{module}.invalid_argument"),
            Error::InvalidData { module, .. } => format!("{module}.invalid_data"),
            Error::DegenerateConfiguration { .. } => {
                "smooth_quantile.degenerate_configuration".into()
            }
            Error::InsufficientTailPoints { .. } => "risk_measures.insufficient_tail_points".into(),
            Error::InsufficientData { module, .. } => format!("{module}.insufficient_data"),
            Error::AccuracyNotReached { .. } => "volumes.accuracy_not_reached".into(),
            Error::Parse { .. } => "io_cli.parse".into(),
            Error::Io(_) => "io_cli.io".into(),
            Error::Json(_) => "io_cli.json".into(),
            Error::Csv(_) => "io_cli.csv".into(),
        }
    }
}
