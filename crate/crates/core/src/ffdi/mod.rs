//! McArthur Mk5 forest fire danger index, the rule-table generator built on
//! it, and the class agreement metric.

mod agreement;
mod grid;
mod score;

pub use agreement::{agreement, Granularity};
pub use grid::{generate_rule_table, steps, GridBox, RuleGridSpec};
pub use score::{ffdi_score, weather_class, FfdiInput, DEFAULT_DROUGHT_FACTOR};

use thiserror::Error;

use crate::domain::DomainError;
use crate::rules::{RuleError, RuleSetError};

#[derive(Debug, Error)]
pub enum FfdiError {
    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("sequences differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("agreement of empty sequences is undefined")]
    EmptyInput,
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    RuleSet(#[from] RuleSetError),
}
