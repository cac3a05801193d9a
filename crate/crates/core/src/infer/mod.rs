//! Lazy, cached inference.
//!
//! A query for `[t1, t2)` first asks the coverage index which slots have not
//! been inferred yet. Only those ranges are materialised: the intersecting
//! weather graphs are loaded into a temporary index, every rule is fired, hits
//! at the same `(node, slot)` are resolved to the most severe class, and the
//! resulting events are committed to the FWI repository before the coverage
//! index is extended. The answer is then read back from the FWI repository.

mod coverage;
mod engine;
mod event;

pub use coverage::{missing_ranges, CoverageIndex};
pub use engine::{Clock, InferenceEngine};
pub use event::{events_from_graph, resolve_firings, FwiEvent};

use thiserror::Error;

use crate::store::{MatchError, StoreError};

#[derive(Debug, Error)]
pub enum InferError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Match(#[from] MatchError),
}
