use std::collections::BTreeMap;

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::domain::{FwiClass, Timestamp};
use crate::rules::{event_iri_for, RuleFiring};
use crate::store::{vocab, Iri, Literal, NamedGraph, Term, Triple};

/// A classified `(node, time)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FwiEvent {
    pub node_id: String,
    pub time: Timestamp,
    pub class: FwiClass,
    /// Rule whose class was kept.
    pub rule_name: String,
    /// Every rule that fired at this `(node, time)`, sorted.
    pub contributing_rules: Vec<String>,
    pub generated_at: Timestamp,
}

impl FwiEvent {
    pub fn event_iri(&self) -> Iri {
        event_iri_for(&self.rule_name, &node_term(&self.node_id), &time_term(self.time))
    }

    /// Triples persisted for this event: the constructed location, time and
    /// class, then provenance.
    pub fn to_triples(&self) -> Vec<Triple> {
        let ev = self.event_iri();
        let mut out = vec![
            Triple::new(ev.clone(), vocab::at_location(), node_term(&self.node_id)),
            Triple::new(ev.clone(), vocab::at_time(), time_term(self.time)),
            Triple::new(ev.clone(), vocab::rdf_type(), vocab::class_iri(self.class)),
        ];
        for r in &self.contributing_rules {
            out.push(Triple::new(ev.clone(), vocab::was_generated_by(), vocab::rule_iri(r)));
        }
        out.push(Triple::new(ev, vocab::generated_at_time(), Literal::DateTime(self.generated_at)));
        out
    }

    pub(crate) fn sort_key(&self) -> (Timestamp, &str) {
        (self.time, &self.node_id)
    }
}

fn node_term(node_id: &str) -> Term {
    Term::Iri(vocab::node_iri(node_id))
}

fn time_term(t: Timestamp) -> Term {
    Term::Literal(Literal::DateTime(t))
}

/// Collapses hits at the same `(location, time)` into one event.
///
/// The most severe class wins; among rules asserting that class the
/// lexicographically smallest name is kept. Firings whose location is not a
/// node IRI or whose time is not a timestamp are ignored.
pub fn resolve_firings<'a>(
    firings: impl IntoIterator<Item = (&'a str, RuleFiring)>,
    generated_at: Timestamp,
) -> Vec<FwiEvent> {
    let mut groups: BTreeMap<(Timestamp, String), Vec<(&'a str, FwiClass)>> = BTreeMap::new();
    for (rule, f) in firings {
        let Some(node) = f.location.as_iri().and_then(vocab::node_id_of) else { continue };
        let Some(time) = f.time.as_datetime() else { continue };
        groups.entry((time, node.to_string())).or_default().push((rule, f.class));
    }
    groups
        .into_iter()
        .map(|((time, node_id), hits)| {
            let (rule, class) = hits
                .iter()
                .copied()
                .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(a.0)))
                .expect("groups are non-empty");
            let mut contributing: Vec<String> = hits.iter().map(|(r, _)| r.to_string()).collect();
            contributing.sort();
            contributing.dedup();
            FwiEvent { node_id, time, class, rule_name: rule.to_string(), contributing_rules: contributing, generated_at }
        })
        .collect()
}

/// Reads the events stored in one FWI graph. Subjects lacking a location,
/// time or class are skipped.
pub fn events_from_graph(graph: &NamedGraph) -> Vec<FwiEvent> {
    #[derive(Default)]
    struct Partial {
        node: Option<String>,
        time: Option<Timestamp>,
        class: Option<FwiClass>,
        rules: Vec<String>,
        generated_at: Option<Timestamp>,
    }
    let at_location = vocab::at_location();
    let at_time = vocab::at_time();
    let rdf_type = vocab::rdf_type();
    let generated_by = vocab::was_generated_by();
    let generated_at = vocab::generated_at_time();

    let mut by_subject: FxHashMap<&Iri, Partial> = FxHashMap::default();
    let mut order = Vec::new();
    for t in graph.triples() {
        let p = by_subject.entry(&t.subject).or_insert_with(|| {
            order.push(&t.subject);
            Partial::default()
        });
        let pred = &t.predicate;
        if *pred == at_location {
            p.node = t.object.as_iri().and_then(vocab::node_id_of).map(str::to_string);
        } else if *pred == at_time {
            p.time = t.object.as_datetime();
        } else if *pred == rdf_type {
            p.class = t.object.as_iri().and_then(vocab::class_of);
        } else if *pred == generated_by {
            if let Some(r) = t.object.as_iri().and_then(vocab::rule_name_of) {
                p.rules.push(r.to_string());
            }
        } else if *pred == generated_at {
            p.generated_at = t.object.as_datetime();
        }
    }
    order
        .into_iter()
        .filter_map(|subject| {
            let mut p = by_subject.remove(subject)?;
            let (node_id, time, class) = (p.node?, p.time?, p.class?);
            p.rules.sort();
            p.rules.dedup();
            // The event IRI is derived from the kept rule, which identifies it
            // among the contributors.
            let loc = node_term(&node_id);
            let tt = time_term(time);
            let rule_name = p
                .rules
                .iter()
                .find(|r| event_iri_for(r, &loc, &tt) == *subject)
                .or(p.rules.first())
                .cloned()
                .unwrap_or_default();
            Some(FwiEvent {
                node_id,
                time,
                class,
                rule_name,
                contributing_rules: p.rules,
                generated_at: p.generated_at.unwrap_or(time),
            })
        })
        .collect()
}
