use firewx_core::domain::slot_duration;
use firewx_core::ingest::parse_observations;
use firewx_core::store::save_observations;
use firewx_core::{PropertyKind, TimeRange};
use serde::Serialize;

use crate::{ApiError, AppState};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IngestResponse {
    /// Context IRI of the new graph; `null` when nothing survived cleaning.
    pub context: Option<String>,
    pub property: PropertyKind,
    pub observations: usize,
    pub triples: usize,
    pub outliers_removed: usize,
    /// Whether previously inferred events were dropped because the batch
    /// landed in an already-inferred period.
    pub invalidated: bool,
}

/// Parses observation CSV (local time), cleans it and stores the survivors
/// as one graph.
pub fn ingest_csv(state: &AppState, property: PropertyKind, csv: &str) -> Result<IngestResponse, ApiError> {
    let obs = parse_observations(csv, state.utc_offset).map_err(|e| ApiError::invalid("body", e.to_string()))?;
    if obs.is_empty() {
        return Err(ApiError::invalid("body", "no observations in body"));
    }
    if let Some((i, o)) = obs.iter().enumerate().find(|(_, o)| o.property != property) {
        return Err(ApiError::invalid(
            "property",
            format!("record {} is {} but the request names {property}", i + 1, o.property),
        ));
    }
    let repos = state.engine.repos();
    let out = save_observations(repos, &obs, property, &state.nodes, &state.clean)?;
    let lo = obs.iter().map(|o| o.time).min().expect("non-empty");
    let hi = obs.iter().map(|o| o.time).max().expect("non-empty");
    let span = TimeRange::new(lo, hi + slot_duration()).expect("positive span");
    let invalidated = out.context.is_some() && state.engine.invalidate(&span)?;
    Ok(IngestResponse {
        context: out.context.map(|c| c.as_str().to_string()),
        property,
        observations: out.observations_stored,
        triples: out.triples,
        outliers_removed: obs.len() - out.observations_stored,
        invalidated,
    })
}
