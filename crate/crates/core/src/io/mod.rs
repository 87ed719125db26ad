//! File formats: CSV time series, fit archives and report writers.

pub mod archive;
pub mod hexfloat;
pub mod output;
pub mod table;

pub use archive::{sha256_hex, FitArchive, GridRecord, Provenance};
pub use output::{to_sorted_json, write_csv, write_report, ErrorRecord, Metadata};
pub use table::{load_csv, read_csv, rolling_windows, TimeSeriesTable};
