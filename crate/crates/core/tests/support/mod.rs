//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::BTreeSet;

use chrono::Duration;
use firewx_core::ingest::Observation;
use firewx_core::store::{Binding, Filter, Iri, NamedGraph, PatternTerm, Term, Triple, TriplePattern};
use firewx_core::{PropertyKind, Timestamp};
use rand::Rng;

/// Nested-loop evaluation in pattern order with no indexes: every pattern is
/// tried against every triple, and the filter is applied to finished rows.
pub fn nested_loop_bgp(triples: &[Triple], patterns: &[TriplePattern], filter: &Filter) -> Vec<Binding> {
    fn unify(slot: &PatternTerm, value: &Term, row: &mut Binding) -> bool {
        match slot {
            PatternTerm::Const(c) => c == value,
            PatternTerm::Var(v) => match row.get(v) {
                Some(bound) => bound == value,
                None => {
                    row.insert(v.clone(), value.clone());
                    true
                }
            },
        }
    }
    let mut rows = vec![Binding::new()];
    for p in patterns {
        let mut next = Vec::new();
        for row in &rows {
            for t in triples {
                let mut r = row.clone();
                if unify(&p.subject, &Term::Iri(t.subject.clone()), &mut r)
                    && unify(&p.predicate, &Term::Iri(t.predicate.clone()), &mut r)
                    && unify(&p.object, &t.object, &mut r)
                {
                    next.push(r);
                }
            }
        }
        rows = next;
    }
    let set: BTreeSet<Binding> = rows
        .into_iter()
        .filter(|r| filter.accepts(|v| r.get(v).and_then(Term::as_f64)))
        .collect();
    set.into_iter().collect()
}

/// Tries every assignment of the pattern variables to the terms occurring in
/// `triples`. Only usable with very few variables.
pub fn exhaustive_bgp(triples: &[Triple], patterns: &[TriplePattern], filter: &Filter) -> Vec<Binding> {
    let mut terms: BTreeSet<Term> = BTreeSet::new();
    for t in triples {
        terms.insert(Term::Iri(t.subject.clone()));
        terms.insert(Term::Iri(t.predicate.clone()));
        terms.insert(t.object.clone());
    }
    let terms: Vec<Term> = terms.into_iter().collect();
    let vars: Vec<String> = patterns
        .iter()
        .flat_map(|p| p.vars().map(str::to_string).collect::<Vec<_>>())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let present: BTreeSet<&Triple> = triples.iter().collect();
    let ground = |slot: &PatternTerm, row: &Binding| match slot {
        PatternTerm::Const(c) => c.clone(),
        PatternTerm::Var(v) => row[v].clone(),
    };
    let mut out = Vec::new();
    let total = terms.len().pow(vars.len() as u32);
    for mut code in 0..total {
        let mut row = Binding::new();
        for v in &vars {
            row.insert(v.clone(), terms[code % terms.len()].clone());
            code /= terms.len();
        }
        let all_present = patterns.iter().all(|p| {
            let (Term::Iri(s), Term::Iri(pr)) = (ground(&p.subject, &row), ground(&p.predicate, &row)) else {
                return false;
            };
            present.contains(&Triple::new(s, pr, ground(&p.object, &row)))
        });
        if all_present && filter.accepts(|v| row.get(v).and_then(Term::as_f64)) {
            out.push(row);
        }
    }
    out.sort();
    out
}

pub fn ts(s: &str) -> Timestamp {
    s.parse().expect("valid timestamp")
}

pub fn sensor_for(kind: PropertyKind, node: &str) -> String {
    let prefix = match kind {
        PropertyKind::AirTemperature => "AT",
        PropertyKind::RelativeHumidity => "RH",
        PropertyKind::WindSpeed => "WS",
    };
    format!("{prefix}_{node}")
}

/// Observation graphs for one `(node, time)` with the given readings; `None`
/// leaves that property out.
pub fn slot_graphs(node: &str, time: Timestamp, rh: Option<f64>, ws: Option<f64>, at: Option<f64>) -> Vec<NamedGraph> {
    [(PropertyKind::RelativeHumidity, rh), (PropertyKind::WindSpeed, ws), (PropertyKind::AirTemperature, at)]
        .into_iter()
        .filter_map(|(kind, v)| {
            let o = Observation::new(time, kind, sensor_for(kind, node), node, v?);
            let ctx = Iri::new(format!("urn:test:{kind}:{node}:{}", time.timestamp())).unwrap();
            Some(firewx_core::store::observations_to_graph(&[o], ctx).unwrap())
        })
        .collect()
}

/// A random small observation dataset around the example rule's bounds, with
/// some distractor triples, capped at `max_triples`.
pub fn random_dataset(rng: &mut impl Rng, max_triples: usize) -> Vec<Triple> {
    let base = ts("2012-01-02T12:00:00Z");
    let mut out: Vec<Triple> = Vec::new();
    let near = |rng: &mut dyn rand::RngCore, lo: f64, hi: f64| -> f64 {
        // Mostly close to the bounds so filters are exercised at their edges.
        let r: f64 = rand::Rng::random(rng);
        let v = if r < 0.3 { lo } else if r < 0.5 { hi } else { lo - 5.0 + rand::Rng::random::<f64>(rng) * (hi - lo + 10.0) };
        (v * 10.0).round() / 10.0
    };
    while out.len() < max_triples {
        let node = format!("SN_{}", rng.random_range(1..4));
        let time = base + Duration::minutes(10 * rng.random_range(0..3));
        let rh = rng.random_bool(0.9).then(|| near(rng, 80.0, 100.0));
        let ws = rng.random_bool(0.9).then(|| near(rng, 17.5, 24.4));
        let at = rng.random_bool(0.9).then(|| near(rng, 32.0, 41.0));
        for g in slot_graphs(&node, time, rh, ws, at) {
            out.extend(g.triples().iter().cloned());
        }
        if rng.random_bool(0.3) {
            // Value hanging off a sensor, as in the original listing.
            let s = firewx_core::store::vocab::sensor_iri(&sensor_for(PropertyKind::AirTemperature, &node));
            let v = firewx_core::store::Literal::decimal(near(rng, 32.0, 41.0)).unwrap();
            out.push(Triple::new(s, firewx_core::store::vocab::has_value(), v));
        }
    }
    let mut seen = BTreeSet::new();
    out.retain(|t| seen.insert(t.clone()));
    out.truncate(max_triples);
    out
}
