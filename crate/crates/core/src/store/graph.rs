use rustc_hash::FxHashSet;

use super::term::{Iri, Literal, Term};
use super::{vocab, StoreError};
use crate::domain::{PropertyKind, Timestamp};
use crate::ingest::Observation;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Iri, predicate: Iri, object: impl Into<Term>) -> Self {
        Self { subject, predicate, object: object.into() }
    }
}

/// Triples under one context IRI, deduplicated, in first-insertion order.
#[derive(Clone, Debug, PartialEq)]
pub struct NamedGraph {
    context: Iri,
    triples: Vec<Triple>,
}

impl NamedGraph {
    pub fn new(context: Iri, triples: impl IntoIterator<Item = Triple>) -> Self {
        let mut seen = FxHashSet::default();
        let triples = triples.into_iter().filter(|t| seen.insert(t.clone())).collect();
        Self { context, triples }
    }

    pub fn context(&self) -> &Iri {
        &self.context
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Earliest and latest timestamp literal attached through `predicate`.
    pub fn time_extent(&self, predicate: &Iri) -> Option<(Timestamp, Timestamp)> {
        self.triples
            .iter()
            .filter(|t| &t.predicate == predicate)
            .filter_map(|t| t.object.as_datetime())
            .fold(None, |acc, t| match acc {
                None => Some((t, t)),
                Some((lo, hi)) => Some((lo.min(t), hi.max(t))),
            })
    }
}

/// Converts a single-property batch to observation triples.
///
/// Each observation contributes its property, sampling time, unit, sensor and
/// value; each sensor contributes one platform triple. Values hang off the
/// observation node so joins stay per-observation.
pub fn observations_to_graph(batch: &[Observation], context: Iri) -> Result<NamedGraph, StoreError> {
    let property = single_property(batch)?;
    let (p_prop, p_time, p_unit, p_by, p_platform, p_value) = (
        vocab::observed_property(),
        vocab::sampling_time(),
        vocab::unit_of_measure(),
        vocab::observed_by(),
        vocab::deployed_on_platform(),
        vocab::has_value(),
    );
    let prop_iri = vocab::property_iri(property);
    let unit_iri = vocab::unit_iri(property);
    let mut triples = Vec::with_capacity(batch.len() * 6);
    for o in batch {
        let obs = vocab::observation_iri(&o.sensor_id, o.time);
        let sensor = vocab::sensor_iri(&o.sensor_id);
        triples.push(Triple::new(obs.clone(), p_prop.clone(), prop_iri.clone()));
        triples.push(Triple::new(obs.clone(), p_time.clone(), Literal::DateTime(o.time)));
        triples.push(Triple::new(obs.clone(), p_unit.clone(), unit_iri.clone()));
        triples.push(Triple::new(obs.clone(), p_by.clone(), sensor.clone()));
        triples.push(Triple::new(obs, p_value.clone(), Literal::decimal(o.value)?));
        triples.push(Triple::new(sensor, p_platform.clone(), vocab::node_iri(&o.node_id)));
    }
    Ok(NamedGraph::new(context, triples))
}

pub(crate) fn single_property(batch: &[Observation]) -> Result<PropertyKind, StoreError> {
    let first = batch.first().ok_or(StoreError::EmptyBatch)?.property;
    if let Some(other) = batch.iter().find(|o| o.property != first) {
        return Err(StoreError::MixedProperties(first, other.property));
    }
    Ok(first)
}
