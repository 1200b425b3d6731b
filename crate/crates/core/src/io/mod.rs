//! File formats: price CSV, scenario TOML, settlement records.

mod prices;
mod report;
mod scenario_file;

use thiserror::Error;

pub use prices::{load_prices, parse_prices, PriceSet};
pub use report::{emit_report, parse_record, Format};
pub use scenario_file::{load_scenario, parse_scenario, scenario_to_toml};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error("line {line}: {msg}")]
    Row { line: u64, msg: String },
    #[error("line {line}: duplicate row for hhp {hhp}, market {market}")]
    DuplicateRow { line: u64, hhp: usize, market: String },
    #[error("{market}: missing hhp {hhp}")]
    MissingHhp { market: String, hhp: usize },
    #[error("scenario: {0}")]
    Toml(String),
    #[error("record: {0}")]
    Json(#[from] serde_json::Error),
}

pub(crate) fn read_file(path: &std::path::Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::File { path: path.display().to_string(), source })
}
