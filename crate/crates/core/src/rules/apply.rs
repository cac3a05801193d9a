use std::collections::{BTreeMap, BTreeSet};

use sha2::{Digest, Sha256};

use crate::domain::FwiClass;
use crate::store::{vocab, Binding, Filter, GraphIndex, Iri, MatchError, NamedGraph, PatternTerm, Term, Triple, TriplePattern};

use super::Rule;

/// One instantiation of a rule's event templates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuleFiring {
    pub event: Iri,
    pub location: Term,
    pub time: Term,
    pub class: FwiClass,
}

/// Deterministic event identity for `(rule, location, time)`.
pub fn event_iri_for(rule_name: &str, location: &Term, time: &Term) -> Iri {
    let mut h = Sha256::new();
    h.update(rule_name.as_bytes());
    h.update([0x1f]);
    h.update(location.encode().as_bytes());
    h.update([0x1f]);
    h.update(time.encode().as_bytes());
    vocab::event_iri(&hex::encode(h.finalize()))
}

impl Rule {
    /// Matches the WHERE block and returns one firing per solution, sorted.
    pub fn fire(&self, index: &GraphIndex) -> Result<Vec<RuleFiring>, MatchError> {
        let solutions = index.match_bgp(self.where_patterns(), self.filter())?;
        let mut out: Vec<RuleFiring> = solutions.iter().map(|b| self.firing(b)).collect();
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// The constructed triples of one solution, in template order.
    pub fn instantiate(&self, binding: &Binding) -> Vec<Triple> {
        let shape = self.shape();
        let event = event_iri_for(self.name(), &binding[&shape.location_var], &binding[&shape.time_var]);
        let resolve = |t: &PatternTerm| -> Term {
            match t {
                PatternTerm::Var(v) if *v == shape.event_var => Term::Iri(event.clone()),
                PatternTerm::Var(v) => binding[v].clone(),
                PatternTerm::Const(c) => c.clone(),
            }
        };
        self.construct()
            .iter()
            .filter_map(|t| {
                let Term::Iri(s) = resolve(&t.subject) else { return None };
                let Term::Iri(p) = resolve(&t.predicate) else { return None };
                Some(Triple::new(s, p, resolve(&t.object)))
            })
            .collect()
    }
}

impl Rule {
    fn firing(&self, b: &Binding) -> RuleFiring {
        let shape = self.shape();
        let location = b[&shape.location_var].clone();
        let time = b[&shape.time_var].clone();
        RuleFiring { event: event_iri_for(self.name(), &location, &time), location, time, class: shape.class }
    }
}

/// Fires every rule and returns `(rule position, firing)` pairs sorted by
/// position, each rule's firings sorted as by [`Rule::fire`].
///
/// Rules with an identical WHERE block share one unfiltered join. Each
/// rule's filter is then applied to the shared solutions, scanning only the
/// solutions inside its narrowest variable interval. The result equals firing
/// each rule on its own.
pub fn fire_rules(rules: &[Rule], index: &GraphIndex) -> Result<Vec<(usize, RuleFiring)>, MatchError> {
    let mut groups: Vec<(&[TriplePattern], Vec<usize>)> = Vec::new();
    for (i, r) in rules.iter().enumerate() {
        match groups.iter_mut().find(|(w, _)| *w == r.where_patterns()) {
            Some((_, members)) => members.push(i),
            None => groups.push((r.where_patterns(), vec![i])),
        }
    }
    let mut out = Vec::new();
    for (patterns, members) in groups {
        if let [only] = members[..] {
            out.extend(rules[only].fire(index)?.into_iter().map(|f| (only, f)));
            continue;
        }
        // Filter variables must be bound by the shared block, as for a
        // single rule.
        for &m in &members {
            if let Some(v) = rules[m].filter().vars().find(|v| !patterns.iter().any(|p| p.vars().any(|x| x == *v))) {
                return Err(MatchError::UnboundFilterVariable(v.to_string()));
            }
        }
        let solutions = index.match_bgp(patterns, &Filter::default())?;
        let columns = SortedColumns::new(&solutions, members.iter().flat_map(|&m| rules[m].filter().vars()));
        for &m in &members {
            let rule = &rules[m];
            let mut fired: Vec<RuleFiring> = columns
                .candidates(rule.filter(), solutions.len())
                .filter(|&i| rule.filter().accepts(|v| columns.value(v, i)))
                .map(|i| rule.firing(&solutions[i]))
                .collect();
            fired.sort();
            fired.dedup();
            out.extend(fired.into_iter().map(|f| (m, f)));
        }
    }
    out.sort_by_key(|(i, _)| *i);
    Ok(out)
}

/// Numeric value of each filter variable per solution, with solution
/// positions sorted by that value.
struct SortedColumns {
    columns: BTreeMap<String, (Vec<Option<f64>>, Vec<usize>)>,
}

impl SortedColumns {
    fn new<'a>(solutions: &[Binding], vars: impl Iterator<Item = &'a str>) -> Self {
        let mut columns = BTreeMap::new();
        for v in vars {
            if columns.contains_key(v) {
                continue;
            }
            let values: Vec<Option<f64>> = solutions.iter().map(|b| b.get(v).and_then(Term::as_f64)).collect();
            let mut order: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_some()).collect();
            order.sort_by(|&a, &b| values[a].unwrap().total_cmp(&values[b].unwrap()));
            columns.insert(v.to_string(), (values, order));
        }
        Self { columns }
    }

    fn value(&self, var: &str, i: usize) -> Option<f64> {
        self.columns.get(var).and_then(|(values, _)| values[i])
    }

    /// Solution positions that may satisfy `filter`: those inside the
    /// tightest single-variable interval, or all of them without a filter.
    fn candidates(&self, filter: &Filter, n: usize) -> Box<dyn Iterator<Item = usize> + '_> {
        let best = filter
            .intervals()
            .into_iter()
            .filter_map(|(var, iv)| {
                let (values, order) = self.columns.get(&var)?;
                let key = |i: &usize| values[*i].expect("ordered positions are numeric");
                let lo = order.partition_point(|i| if iv.lo_closed { key(i) < iv.lo } else { key(i) <= iv.lo });
                let hi = order.partition_point(|i| if iv.hi_closed { key(i) <= iv.hi } else { key(i) < iv.hi });
                Some(&order[lo..hi.max(lo)])
            })
            .min_by_key(|slice| slice.len());
        match best {
            Some(slice) => Box::new(slice.iter().copied()),
            None => Box::new(0..n),
        }
    }
}

/// Union of the constructed triples over every solution.
pub fn apply_rule_to_index(rule: &Rule, index: &GraphIndex) -> Result<BTreeSet<Triple>, MatchError> {
    let solutions = index.match_bgp(rule.where_patterns(), rule.filter())?;
    Ok(solutions.iter().flat_map(|b| rule.instantiate(b)).collect())
}

pub fn apply_rule<'a>(rule: &Rule, graphs: impl IntoIterator<Item = &'a NamedGraph>) -> Result<BTreeSet<Triple>, MatchError> {
    apply_rule_to_index(rule, &GraphIndex::from_graphs(graphs))
}


#[cfg(test)]
mod batch_tests {
    use super::*;
    use crate::domain::PropertyKind;
    use crate::ffdi::{generate_rule_table, RuleGridSpec};
    use crate::ingest::Observation;
    use crate::rules::{parse_rule, HIGH_RULE, HIGH_RULE_LISTING};
    use crate::store::observations_to_graph;
    use proptest::prelude::*;

    fn dataset(rows: &[(u8, u8, f64, f64, f64, u8)]) -> Vec<NamedGraph> {
        let base: crate::Timestamp = "2012-01-02T00:00:00Z".parse().unwrap();
        let mut graphs = Vec::new();
        for (i, &(node, slot, t, h, w, missing)) in rows.iter().enumerate() {
            let time = base + chrono::Duration::minutes(10 * i64::from(slot));
            for (j, (kind, v)) in [(PropertyKind::AirTemperature, t), (PropertyKind::RelativeHumidity, h), (PropertyKind::WindSpeed, w)]
                .into_iter()
                .enumerate()
            {
                if usize::from(missing) == j {
                    continue;
                }
                let o = Observation::new(time, kind, format!("{}_{node}", kind.name()), format!("SN_{node}"), v);
                let ctx = Iri::new(format!("urn:g:{i}:{j}")).unwrap();
                graphs.push(observations_to_graph(&[o], ctx).unwrap());
            }
        }
        graphs
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn batched_equals_individual(
            rows in prop::collection::vec((0u8..3, 0u8..4, 0.0f64..45.0, 0.0f64..100.0, 0.0f64..25.0, 0u8..6), 1..25)
        ) {
            let spec = RuleGridSpec {
                temperature: vec![0.0, 15.0, 30.0, 45.0],
                humidity: vec![0.0, 50.0, 80.0, 100.0],
                wind: vec![0.0, 5.0, 25.0],
                ..RuleGridSpec::default()
            };
            let mut rules = generate_rule_table(&spec).unwrap().rules().to_vec();
            rules.push(parse_rule(HIGH_RULE).unwrap());
            rules.push(parse_rule(HIGH_RULE_LISTING).unwrap().renamed("listing").unwrap());
            let index = GraphIndex::from_graphs(&dataset(&rows));
            let batched = fire_rules(&rules, &index).unwrap();
            let individual: Vec<(usize, RuleFiring)> = rules
                .iter()
                .enumerate()
                .flat_map(|(i, r)| r.fire(&index).unwrap().into_iter().map(move |f| (i, f)))
                .collect();
            prop_assert_eq!(batched, individual);
        }
    }
}
