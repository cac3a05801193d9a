use super::repo::RepositorySet;
use super::term::Iri;
use super::StoreError;
use crate::domain::PropertyKind;
use crate::ingest::{clean_stream, CleanConfig, NodeRegistry, Observation, OutlierReport};

/// Result of one cleaning-and-storage pass.
#[derive(Debug, Clone)]
pub struct SaveOutcome {
    /// New graph context, absent when cleaning left nothing to store.
    pub context: Option<Iri>,
    pub observations_stored: usize,
    pub triples: usize,
    pub report: OutlierReport,
}

/// Cleans a raw single-property batch and stores the survivors as one graph.
pub fn save_observations(
    repos: &RepositorySet,
    batch: &[Observation],
    property: PropertyKind,
    nodes: &NodeRegistry,
    cfg: &CleanConfig,
) -> Result<SaveOutcome, StoreError> {
    if let Some(o) = batch.iter().find(|o| o.property != property) {
        return Err(StoreError::PropertyMismatch { expected: property, found: o.property });
    }
    let (clean, report) = clean_stream(batch, nodes, cfg)?;
    if clean.is_empty() {
        return Ok(SaveOutcome { context: None, observations_stored: 0, triples: 0, report });
    }
    let context = repos.store_graph(&clean, property)?;
    let triples = repos.graph(&context).map_or(0, |g| g.len());
    Ok(SaveOutcome { context: Some(context), observations_stored: clean.len(), triples, report })
}
