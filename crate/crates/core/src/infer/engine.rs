use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use chrono::{SubsecRound, Utc};
use rustc_hash::FxHashMap;

use super::coverage::CoverageIndex;
use super::event::{events_from_graph, resolve_firings, FwiEvent};
use super::InferError;
use crate::domain::{PropertyKind, TimeRange, Timestamp};
use crate::rules::{fire_rules, RuleSet};
use crate::store::{CatalogProperty, GraphIndex, Iri, NamedGraph, RepositoryId, RepositorySet, StoreLayout};

/// Source of `generated_at` stamps.
pub type Clock = Arc<dyn Fn() -> Timestamp + Send + Sync>;

/// Query-triggered inference over one repository set.
pub struct InferenceEngine {
    repos: Arc<RepositorySet>,
    rules: Arc<RuleSet>,
    /// Held while materialising missing ranges.
    gate: Mutex<()>,
    evaluations: AtomicU64,
    clock: Clock,
    /// Parsed events per FWI context. FWI graphs are immutable once
    /// committed, so entries only go stale when the repository is cleared.
    parsed: Mutex<FxHashMap<Iri, Arc<Vec<FwiEvent>>>>,
}

impl std::fmt::Debug for InferenceEngine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InferenceEngine")
            .field("rules", &self.rules.len())
            .field("evaluations", &self.rule_evaluations())
            .finish_non_exhaustive()
    }
}

impl InferenceEngine {
    pub fn new(repos: Arc<RepositorySet>, rules: Arc<RuleSet>) -> Self {
        Self {
            repos,
            rules,
            gate: Mutex::new(()),
            evaluations: AtomicU64::new(0),
            clock: Arc::new(|| Utc::now().trunc_subsecs(0)),
            parsed: Mutex::new(FxHashMap::default()),
        }
    }

    pub fn with_clock(mut self, clock: Clock) -> Self {
        self.clock = clock;
        self
    }

    pub fn repos(&self) -> &Arc<RepositorySet> {
        &self.repos
    }

    pub fn rules(&self) -> &Arc<RuleSet> {
        &self.rules
    }

    /// Number of single-rule evaluations performed so far.
    pub fn rule_evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::Relaxed)
    }

    pub fn coverage(&self) -> CoverageIndex {
        CoverageIndex::from_ranges(self.repos.coverage())
    }

    /// Infers every uncovered slot of `req` and returns all events in `req`,
    /// sorted by `(time, node)`.
    pub fn infer_range(&self, req: &TimeRange) -> Result<Vec<FwiEvent>, InferError> {
        let aligned = req.align_to_slots();
        if !self.coverage().covers(&aligned) {
            let _gate = self.gate.lock().unwrap_or_else(|p| p.into_inner());
            // Another query may have filled the gap while this one waited.
            let missing = self.coverage().missing(&aligned);
            if !missing.is_empty() {
                self.materialise(&missing)?;
            }
        }
        Ok(self.search_fwis(req, None))
    }

    /// Events in `req`, restricted to `node_filter` when given. Triggers
    /// inference for uncovered slots first.
    pub fn query_fwi(&self, req: &TimeRange, node_filter: Option<&BTreeSet<String>>) -> Result<Vec<FwiEvent>, InferError> {
        let mut events = self.infer_range(req)?;
        if let Some(nodes) = node_filter {
            events.retain(|e| nodes.contains(&e.node_id));
        }
        Ok(events)
    }

    /// Read-only retrieval from the FWI repository.
    pub fn search_fwis(&self, req: &TimeRange, node_filter: Option<&BTreeSet<String>>) -> Vec<FwiEvent> {
        let entries = self.repos.catalog_lookup(CatalogProperty::Fwi, req);
        let mut out = Vec::new();
        for e in entries {
            for ev in self.events_of(&e.context).iter() {
                if req.contains(ev.time) && node_filter.is_none_or(|n| n.contains(&ev.node_id)) {
                    out.push(ev.clone());
                }
            }
        }
        out.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        out.dedup_by(|a, b| a.sort_key() == b.sort_key());
        out
    }

    /// Drops all stored events and coverage.
    pub fn reset(&self) -> Result<(), InferError> {
        let _gate = self.gate.lock().unwrap_or_else(|p| p.into_inner());
        self.repos.clear_fwi()?;
        self.parsed.lock().unwrap_or_else(|p| p.into_inner()).clear();
        Ok(())
    }

    /// Call after storing weather data spanning `range`. Events inferred
    /// before the data arrived would be stale, so if any covered slot
    /// overlaps the range all events and coverage are dropped. Returns
    /// whether anything was cleared.
    pub fn invalidate(&self, range: &TimeRange) -> Result<bool, InferError> {
        let aligned = range.align_to_slots();
        let touched = self.coverage().ranges().iter().any(|r| r.overlaps(&aligned));
        if touched {
            self.reset()?;
        }
        Ok(touched)
    }

    fn events_of(&self, context: &Iri) -> Arc<Vec<FwiEvent>> {
        if let Some(hit) = self.parsed.lock().unwrap_or_else(|p| p.into_inner()).get(context) {
            return hit.clone();
        }
        let events = Arc::new(self.repos.graph(context).map(|g| events_from_graph(&g)).unwrap_or_default());
        self.parsed.lock().unwrap_or_else(|p| p.into_inner()).insert(context.clone(), events.clone());
        events
    }

    /// Weather graphs that may hold observations in `range`.
    fn working_set(&self, range: &TimeRange) -> Vec<Arc<NamedGraph>> {
        match self.repos.layout() {
            StoreLayout::Partitioned => PropertyKind::ALL
                .into_iter()
                .flat_map(|k| self.repos.catalog_lookup(CatalogProperty::Observation(k), range))
                .filter_map(|e| self.repos.graph(&e.context))
                .collect(),
            // The undivided repository is scanned whole.
            StoreLayout::Single => self.repos.graphs_in(RepositoryId::Weather),
        }
    }

    /// Caller holds the inference gate.
    fn materialise(&self, missing: &[TimeRange]) -> Result<(), InferError> {
        let generated_at = (self.clock)();
        let mut committed = Vec::new();
        for range in missing {
            let graphs = self.working_set(range);
            let index = GraphIndex::from_graphs(graphs.iter().map(|g| g.as_ref()));
            let rules = self.rules.rules();
            self.evaluations.fetch_add(rules.len() as u64, Ordering::Relaxed);
            let hits: Vec<_> = fire_rules(rules, &index)?
                .into_iter()
                .filter(|(_, f)| f.time.as_datetime().is_some_and(|t| range.contains(t)))
                .map(|(i, f)| (rules[i].name(), f))
                .collect();
            drop(index);
            let existing: BTreeSet<(Timestamp, String)> =
                self.search_fwis(range, None).into_iter().map(|e| (e.time, e.node_id)).collect();
            let triples: Vec<_> = resolve_firings(hits, generated_at)
                .into_iter()
                .filter(|e| !existing.contains(&(e.time, e.node_id.clone())))
                .flat_map(|e| e.to_triples())
                .collect();
            self.repos.insert_fwi_graph(triples)?;
            committed.push(*range);
        }
        let mut cov = self.coverage();
        for r in committed {
            cov.insert(r);
        }
        self.repos.set_coverage(cov.into_ranges())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Observation;
    use crate::rules::{parse_rule, HIGH_RULE};

    fn t(s: &str) -> Timestamp {
        s.parse().unwrap()
    }

    fn ingest(repos: &RepositorySet, node: &str, time: &str, values: [Option<f64>; 3]) {
        let n: String = node.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        let kinds = [PropertyKind::RelativeHumidity, PropertyKind::WindSpeed, PropertyKind::AirTemperature];
        for (kind, v) in kinds.into_iter().zip(values) {
            if let Some(v) = v {
                let o = Observation::new(t(time), kind, format!("{}_{n}", kind.name()), node, v);
                repos.store_graph(&[o], kind).unwrap();
            }
        }
    }

    fn engine(layout: StoreLayout) -> InferenceEngine {
        let repos = Arc::new(RepositorySet::in_memory(layout));
        let rules = Arc::new(RuleSet::new(vec![parse_rule(HIGH_RULE).unwrap()], serde_json::Value::Null).unwrap());
        let now = t("2020-01-01T00:00:00Z");
        InferenceEngine::new(repos, rules).with_clock(Arc::new(move || now))
    }

    fn day() -> TimeRange {
        TimeRange::new(t("2012-01-02T00:00:00Z"), t("2012-01-03T00:00:00Z")).unwrap()
    }

    #[test]
    fn example_slot_yields_one_high_event_and_repeats_are_free() {
        for layout in [StoreLayout::Partitioned, StoreLayout::Single] {
            let eng = engine(layout);
            ingest(&eng.repos, "SN-node1", "2012-01-02T12:00:00Z", [Some(85.0), Some(23.3), Some(40.0)]);
            let first = eng.infer_range(&day()).unwrap();
            assert_eq!(first.len(), 1);
            assert_eq!(first[0].node_id, "SN-node1");
            assert_eq!(first[0].time, t("2012-01-02T12:00:00Z"));
            assert_eq!(first[0].class.label(), "high");
            assert_eq!(first[0].rule_name, "high");
            let evals = eng.rule_evaluations();
            assert_eq!(evals, 1);
            assert_eq!(eng.infer_range(&day()).unwrap(), first);
            assert_eq!(eng.rule_evaluations(), evals);
            assert!(eng.coverage().covers(&day()));
        }
    }

    #[test]
    fn missing_conjunct_gives_no_event() {
        let eng = engine(StoreLayout::Partitioned);
        ingest(&eng.repos, "SN_1", "2012-01-02T12:00:00Z", [Some(85.0), None, Some(40.0)]);
        assert!(eng.infer_range(&day()).unwrap().is_empty());
    }

    #[test]
    fn empty_store_extends_coverage() {
        let eng = engine(StoreLayout::Partitioned);
        assert!(eng.query_fwi(&day(), None).unwrap().is_empty());
        assert!(eng.coverage().covers(&day()));
    }

    #[test]
    fn node_filter_and_partial_coverage() {
        let eng = engine(StoreLayout::Partitioned);
        ingest(&eng.repos, "SN_1", "2012-01-02T12:00:00Z", [Some(85.0), Some(20.0), Some(35.0)]);
        ingest(&eng.repos, "SN_2", "2012-01-02T12:00:00Z", [Some(90.0), Some(18.0), Some(33.0)]);
        ingest(&eng.repos, "SN_1", "2012-01-02T18:00:00Z", [Some(90.0), Some(18.0), Some(33.0)]);
        let morning = TimeRange::new(t("2012-01-02T00:00:00Z"), t("2012-01-02T13:00:00Z")).unwrap();
        assert_eq!(eng.infer_range(&morning).unwrap().len(), 2);
        let all = eng.infer_range(&day()).unwrap();
        assert_eq!(all.len(), 3);
        assert_eq!(eng.rule_evaluations(), 2);
        let only: BTreeSet<String> = ["SN_2".to_string()].into();
        let filtered = eng.query_fwi(&day(), Some(&only)).unwrap();
        assert_eq!(filtered.len(), 1);
        assert_eq!(filtered[0].node_id, "SN_2");
    }

    #[test]
    fn late_data_invalidates_covered_ranges() {
        let eng = engine(StoreLayout::Partitioned);
        assert!(eng.infer_range(&day()).unwrap().is_empty());
        let other = TimeRange::new(t("2012-01-05T00:00:00Z"), t("2012-01-06T00:00:00Z")).unwrap();
        assert!(!eng.invalidate(&other).unwrap());
        ingest(&eng.repos, "SN_1", "2012-01-02T12:00:00Z", [Some(85.0), Some(20.0), Some(35.0)]);
        let slot = TimeRange::new(t("2012-01-02T12:00:00Z"), t("2012-01-02T12:00:01Z")).unwrap();
        assert!(eng.invalidate(&slot).unwrap());
        assert!(eng.coverage().is_empty());
        assert_eq!(eng.infer_range(&day()).unwrap().len(), 1);
    }
}
