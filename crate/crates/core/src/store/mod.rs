//! Triple model, property-partitioned repositories with a time-range catalog,
//! and the basic-graph-pattern matcher.

mod backend;
mod catalog;
mod graph;
mod index;
mod pattern;
mod pipeline;
mod repo;
pub mod term;
pub mod vocab;

use std::path::PathBuf;

use thiserror::Error;

use crate::domain::PropertyKind;
use crate::ingest::CleanError;

pub use backend::{Backend, FileBackend, LoadedState, MemoryBackend};
pub use catalog::{CatalogEntry, CatalogProperty, RepositoryId, StoreLayout};
pub use graph::{observations_to_graph, NamedGraph, Triple};
pub use index::{match_bgp, Binding, GraphIndex, MatchError};
pub use pattern::{CompareOp, Comparison, Filter, Interval, PatternTerm, TriplePattern};
pub use pipeline::{save_observations, SaveOutcome};
pub use repo::RepositorySet;
pub use term::{Decimal, Iri, Literal, Term};


#[derive(Debug, Error)]
pub enum StoreError {
    #[error("invalid IRI {0:?}")]
    InvalidIri(String),
    #[error("decimal literals must be finite")]
    NonFiniteLiteral,
    #[error("cannot decode term {0:?}")]
    Decode(String),
    #[error("observation batch is empty")]
    EmptyBatch,
    #[error("batch mixes {0} and {1}")]
    MixedProperties(PropertyKind, PropertyKind),
    #[error("batch holds {found} but {expected} was requested")]
    PropertyMismatch { expected: PropertyKind, found: PropertyKind },
    #[error("store layout is {found:?}, expected {expected:?}")]
    LayoutMismatch { expected: StoreLayout, found: StoreLayout },
    #[error("repository {0} does not exist in this layout")]
    NoSuchRepository(RepositoryId),
    #[error("{}:{line}: {message}", path.display())]
    Corrupt { path: PathBuf, line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Clean(#[from] CleanError),
    #[error("persistence failed: {0}")]
    Persist(String),
}
