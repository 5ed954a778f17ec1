//! Text formats for systems, varieties and experiment configurations, and
//! CSV/JSON report writers.

mod doc;
mod parse;
mod report;

use thiserror::Error;

pub use doc::{
    parse_config, parse_system, parse_variety, system_to_json, variety_to_json, ExperimentConfig, LevelDocument,
    SystemDocument, VarietyDocument,
};
pub use parse::{format_polynomial, parse_polynomial, ParseError};
pub use report::{
    format_real, gap_table, growth_table, hit_table, orbit_table, periodic_table, to_json_text, write_report, Cell,
    Format, Report, Table,
};

use crate::dynmodp::DynError;
use crate::trisys::SystemError;

#[derive(Debug, Error)]
pub enum SysIoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("{location}: {source}")]
    Polynomial { location: String, source: ParseError },
    #[error("schema violation: {0}")]
    System(#[from] SystemError),
    #[error(transparent)]
    Variety(#[from] DynError),
}
