use std::path::Path;
use std::sync::{Arc, Mutex, MutexGuard, RwLock, RwLockReadGuard, RwLockWriteGuard};

use rustc_hash::FxHashMap;

use super::backend::{Backend, FileBackend, MemoryBackend};
use super::catalog::{CatalogEntry, CatalogProperty, RepositoryId, StoreLayout};
use super::graph::{observations_to_graph, single_property, NamedGraph, Triple};
use super::term::Iri;
use super::{vocab, StoreError};
use crate::domain::{PropertyKind, TimeRange, Timestamp};
use crate::ingest::Observation;

#[derive(Default)]
struct State {
    catalog: Vec<CatalogEntry>,
    graphs: FxHashMap<Iri, Arc<NamedGraph>>,
    coverage: Vec<TimeRange>,
}

/// Property-partitioned repositories plus their catalog.
///
/// Readers never block each other. Writers serialise through one gate,
/// persist first, and publish to readers only after the catalog commit, so a
/// reader sees either a whole graph or none of it.
pub struct RepositorySet {
    layout: StoreLayout,
    backend: Box<dyn Backend>,
    state: RwLock<State>,
    /// Writer gate; holds the next context counter.
    writer: Mutex<u64>,
}

impl std::fmt::Debug for RepositorySet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RepositorySet").field("layout", &self.layout).finish_non_exhaustive()
    }
}

impl RepositorySet {
    /// Opens the store held by `backend`, initialising it with `layout` when
    /// empty.
    pub fn open(backend: impl Backend + 'static, layout: StoreLayout) -> Result<Self, StoreError> {
        let loaded = backend.load()?;
        match loaded.layout {
            Some(found) if found != layout => {
                return Err(StoreError::LayoutMismatch { expected: layout, found });
            }
            Some(_) => {}
            None => backend.write_catalog(layout, &loaded.catalog)?,
        }
        let counter = loaded
            .catalog
            .iter()
            .map(|e| &e.context)
            .chain(&loaded.orphans)
            .filter_map(|c| c.as_str().rsplit(':').next()?.parse::<u64>().ok())
            .max()
            .map_or(0, |m| m + 1);
        let graphs = loaded.graphs.into_iter().map(|(_, g)| (g.context().clone(), Arc::new(g))).collect();
        Ok(Self {
            layout,
            backend: Box::new(backend),
            state: RwLock::new(State { catalog: loaded.catalog, graphs, coverage: loaded.coverage }),
            writer: Mutex::new(counter),
        })
    }

    pub fn open_dir(root: impl AsRef<Path>, layout: StoreLayout) -> Result<Self, StoreError> {
        Self::open(FileBackend::new(root.as_ref())?, layout)
    }

    pub fn in_memory(layout: StoreLayout) -> Self {
        Self::open(MemoryBackend::new(), layout).expect("fresh memory backend cannot fail")
    }

    pub fn layout(&self) -> StoreLayout {
        self.layout
    }

    fn read(&self) -> RwLockReadGuard<'_, State> {
        self.state.read().unwrap_or_else(|p| p.into_inner())
    }

    fn write(&self) -> RwLockWriteGuard<'_, State> {
        self.state.write().unwrap_or_else(|p| p.into_inner())
    }

    fn gate(&self) -> MutexGuard<'_, u64> {
        self.writer.lock().unwrap_or_else(|p| p.into_inner())
    }

    fn next_context(counter: &mut u64, property: CatalogProperty, min_time: Timestamp) -> Iri {
        let stamp = min_time.format("%Y%m%dT%H%M%SZ");
        let iri = Iri::new(format!("urn:graph:{property}:{stamp}:{counter}")).expect("well-formed context");
        *counter += 1;
        iri
    }

    /// Persists `batch` as one new graph in the repository of `property` and
    /// commits its catalog entry. On any failure the catalog is unchanged.
    pub fn store_graph(&self, batch: &[Observation], property: PropertyKind) -> Result<Iri, StoreError> {
        let found = single_property(batch)?;
        if found != property {
            return Err(StoreError::PropertyMismatch { expected: property, found });
        }
        let (min_time, _) = time_extent(batch.iter().map(|o| o.time)).expect("non-empty batch");
        let kind = CatalogProperty::Observation(property);
        let mut counter = self.gate();
        let context = Self::next_context(&mut counter, kind, min_time);
        let graph = observations_to_graph(batch, context.clone())?;
        self.commit(graph, kind, &vocab::sampling_time())?;
        Ok(context)
    }

    /// Stores FWI event triples as one graph in the FWI repository. Returns
    /// `None` when `triples` is empty.
    pub fn insert_fwi_graph(&self, triples: Vec<Triple>) -> Result<Option<CatalogEntry>, StoreError> {
        if triples.is_empty() {
            return Ok(None);
        }
        let at_time = vocab::at_time();
        let (min_time, _) = time_extent(triples.iter().filter(|t| t.predicate == at_time).filter_map(|t| t.object.as_datetime()))
            .ok_or_else(|| StoreError::Persist("FWI graph carries no event time".into()))?;
        let mut counter = self.gate();
        let context = Self::next_context(&mut counter, CatalogProperty::Fwi, min_time);
        let graph = NamedGraph::new(context, triples);
        self.commit(graph, CatalogProperty::Fwi, &at_time).map(Some)
    }

    /// Caller holds the writer gate.
    fn commit(&self, graph: NamedGraph, property: CatalogProperty, time_predicate: &Iri) -> Result<CatalogEntry, StoreError> {
        let repository_id = self.layout.route(property);
        let (min_time, max_time) = graph
            .time_extent(time_predicate)
            .ok_or_else(|| StoreError::Persist("graph carries no timestamps".into()))?;
        self.backend.append_graph(repository_id, &graph)?;
        let entry = CatalogEntry { repository_id, context: graph.context().clone(), min_time, max_time, property };
        let mut catalog = self.read().catalog.clone();
        catalog.push(entry.clone());
        self.backend.write_catalog(self.layout, &catalog)?;
        let mut st = self.write();
        st.catalog = catalog;
        st.graphs.insert(entry.context.clone(), Arc::new(graph));
        Ok(entry)
    }

    pub fn catalog(&self) -> Vec<CatalogEntry> {
        self.read().catalog.clone()
    }

    /// Catalog entries of `property`'s repository whose closed time extent
    /// intersects `range`.
    pub fn catalog_lookup(&self, property: CatalogProperty, range: &TimeRange) -> Vec<CatalogEntry> {
        let repo = self.layout.route(property);
        self.read()
            .catalog
            .iter()
            .filter(|e| e.repository_id == repo && e.property == property && e.intersects(range))
            .cloned()
            .collect()
    }

    pub fn graph(&self, context: &Iri) -> Option<Arc<NamedGraph>> {
        self.read().graphs.get(context).cloned()
    }

    /// All graphs of one repository, in catalog order.
    pub fn graphs_in(&self, repo: RepositoryId) -> Vec<Arc<NamedGraph>> {
        let st = self.read();
        st.catalog
            .iter()
            .filter(|e| e.repository_id == repo)
            .filter_map(|e| st.graphs.get(&e.context).cloned())
            .collect()
    }

    pub fn triple_count(&self, repo: RepositoryId) -> usize {
        self.graphs_in(repo).iter().map(|g| g.len()).sum()
    }

    pub fn weather_triple_count(&self) -> usize {
        self.layout.weather_repositories().iter().map(|&r| self.triple_count(r)).sum()
    }

    pub fn coverage(&self) -> Vec<TimeRange> {
        self.read().coverage.clone()
    }

    /// Replaces the persisted coverage set; unchanged on failure.
    pub fn set_coverage(&self, ranges: Vec<TimeRange>) -> Result<(), StoreError> {
        let _gate = self.gate();
        self.backend.write_coverage(&ranges)?;
        self.write().coverage = ranges;
        Ok(())
    }

    /// Drops every FWI graph and the coverage set.
    pub fn clear_fwi(&self) -> Result<(), StoreError> {
        let _gate = self.gate();
        let catalog: Vec<CatalogEntry> =
            self.read().catalog.iter().filter(|e| e.repository_id != RepositoryId::Fwi).cloned().collect();
        self.backend.write_catalog(self.layout, &catalog)?;
        self.backend.clear_repository(RepositoryId::Fwi)?;
        self.backend.write_coverage(&[])?;
        let mut st = self.write();
        st.graphs.retain(|_, g| catalog.iter().any(|e| &e.context == g.context()));
        st.catalog = catalog;
        st.coverage.clear();
        Ok(())
    }
}

fn time_extent(times: impl Iterator<Item = Timestamp>) -> Option<(Timestamp, Timestamp)> {
    times.fold(None, |acc, t| match acc {
        None => Some((t, t)),
        Some((lo, hi)) => Some((lo.min(t), hi.max(t))),
    })
}
