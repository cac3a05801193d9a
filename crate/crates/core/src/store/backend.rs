use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;

use chrono::SecondsFormat;
use rustc_hash::FxHashSet;

use super::catalog::{CatalogEntry, RepositoryId, StoreLayout};
use super::graph::{NamedGraph, Triple};
use super::term::{Iri, Term};
use super::StoreError;
use crate::domain::{TimeRange, Timestamp};

/// Everything a backend holds, as read back at open time.
#[derive(Debug, Default)]
pub struct LoadedState {
    pub layout: Option<StoreLayout>,
    pub catalog: Vec<CatalogEntry>,
    pub graphs: Vec<(RepositoryId, NamedGraph)>,
    pub coverage: Vec<TimeRange>,
    /// Contexts found in repository files without a catalog entry.
    pub orphans: Vec<Iri>,
}

/// Durable storage behind a [`RepositorySet`](super::RepositorySet).
///
/// The catalog write is the commit point: graph data appended without a
/// subsequent catalog entry is ignored on load.
pub trait Backend: Send + Sync {
    fn load(&self) -> Result<LoadedState, StoreError>;
    fn append_graph(&self, repo: RepositoryId, graph: &NamedGraph) -> Result<(), StoreError>;
    fn write_catalog(&self, layout: StoreLayout, entries: &[CatalogEntry]) -> Result<(), StoreError>;
    fn write_coverage(&self, ranges: &[TimeRange]) -> Result<(), StoreError>;
    fn clear_repository(&self, repo: RepositoryId) -> Result<(), StoreError>;
}

/// Directory of tab-separated files: `catalog.tsv`, `<repository>.nq`,
/// `coverage.tsv`.
#[derive(Debug, Clone)]
pub struct FileBackend {
    root: PathBuf,
}

const LAYOUT_KEY: &str = "#layout";

impl FileBackend {
    pub fn new(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(Self { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Layout recorded by an earlier open, read from the catalog header
    /// without loading any graphs.
    pub fn stored_layout(&self) -> Result<Option<StoreLayout>, StoreError> {
        let catalog_path = self.root.join("catalog.tsv");
        let file = match File::open(&catalog_path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        for (i, line) in BufReader::new(file).lines().enumerate() {
            if let Some(rest) = line?.strip_prefix(LAYOUT_KEY) {
                return rest.trim().parse().map(Some).map_err(|e: String| corrupt(&catalog_path, i + 1, e));
            }
        }
        Ok(None)
    }

    fn repo_path(&self, repo: RepositoryId) -> PathBuf {
        self.root.join(format!("{}.nq", repo.name()))
    }

    fn write_atomically(&self, name: &str, body: &str) -> Result<(), StoreError> {
        let tmp = self.root.join(format!("{name}.tmp"));
        {
            let mut f = File::create(&tmp)?;
            f.write_all(body.as_bytes())?;
            f.sync_data()?;
        }
        fs::rename(&tmp, self.root.join(name))?;
        Ok(())
    }

    fn read_lines(path: &Path) -> Result<Vec<String>, StoreError> {
        match File::open(path) {
            Ok(f) => Ok(BufReader::new(f).lines().collect::<Result<_, _>>()?),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
            Err(e) => Err(e.into()),
        }
    }
}

fn corrupt(path: &Path, line: usize, message: impl Into<String>) -> StoreError {
    StoreError::Corrupt { path: path.to_path_buf(), line, message: message.into() }
}

fn timestamp_text(t: Timestamp) -> String {
    t.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

impl Backend for FileBackend {
    fn load(&self) -> Result<LoadedState, StoreError> {
        let mut state = LoadedState::default();
        let catalog_path = self.root.join("catalog.tsv");
        for (i, line) in Self::read_lines(&catalog_path)?.iter().enumerate() {
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix(LAYOUT_KEY) {
                let layout = rest.trim().parse().map_err(|e: String| corrupt(&catalog_path, i + 1, e))?;
                state.layout = Some(layout);
                continue;
            }
            let entry = CatalogEntry::from_tsv(line).map_err(|e| corrupt(&catalog_path, i + 1, e))?;
            state.catalog.push(entry);
        }

        let committed: FxHashSet<(RepositoryId, &str)> =
            state.catalog.iter().map(|e| (e.repository_id, e.context.as_str())).collect();
        let mut repos: Vec<RepositoryId> = state.catalog.iter().map(|e| e.repository_id).collect();
        if let Some(layout) = state.layout {
            repos.extend_from_slice(layout.repositories());
        }
        repos.sort();
        repos.dedup();
        let mut orphans = BTreeMap::new();
        for repo in repos {
            let path = self.repo_path(repo);
            let mut graphs: BTreeMap<&str, Vec<Triple>> = BTreeMap::new();
            let lines = Self::read_lines(&path)?;
            for (i, line) in lines.iter().enumerate() {
                let Some((context, rest)) = line.split_once('\t') else {
                    continue;
                };
                if !committed.contains(&(repo, context)) {
                    orphans.entry(context.to_owned()).or_insert(());
                    continue;
                }
                let parts: Vec<&str> = rest.split('\t').collect();
                let [s, p, o] = parts.as_slice() else {
                    return Err(corrupt(&path, i + 1, "expected context, subject, predicate, object"));
                };
                let iri = |t: &str| match Term::decode(t) {
                    Ok(Term::Iri(iri)) => Ok(iri),
                    _ => Err(corrupt(&path, i + 1, format!("expected IRI, found {t:?}"))),
                };
                let object = Term::decode(o).map_err(|e| corrupt(&path, i + 1, e.to_string()))?;
                graphs.entry(context).or_default().push(Triple::new(iri(s)?, iri(p)?, object));
            }
            for e in state.catalog.iter().filter(|e| e.repository_id == repo) {
                let triples = graphs.remove(e.context.as_str()).unwrap_or_default();
                state.graphs.push((repo, NamedGraph::new(e.context.clone(), triples)));
            }
        }
        state.orphans = orphans.into_keys().filter_map(|c| Iri::new(c).ok()).collect();

        let coverage_path = self.root.join("coverage.tsv");
        for (i, line) in Self::read_lines(&coverage_path)?.iter().enumerate() {
            if line.is_empty() {
                continue;
            }
            let parsed = line.split_once('\t').and_then(|(a, b)| {
                let (a, b) = (a.parse().ok()?, b.parse().ok()?);
                TimeRange::new(a, b).ok()
            });
            state.coverage.push(parsed.ok_or_else(|| corrupt(&coverage_path, i + 1, "bad range"))?);
        }
        Ok(state)
    }

    fn append_graph(&self, repo: RepositoryId, graph: &NamedGraph) -> Result<(), StoreError> {
        let file = OpenOptions::new().create(true).append(true).open(self.repo_path(repo))?;
        let mut w = BufWriter::new(file);
        let ctx = graph.context().as_str();
        for t in graph.triples() {
            writeln!(w, "{ctx}\t{}\t{}\t{}", t.subject, t.predicate, t.object.encode())?;
        }
        w.flush()?;
        Ok(())
    }

    fn write_catalog(&self, layout: StoreLayout, entries: &[CatalogEntry]) -> Result<(), StoreError> {
        let mut body = format!("{LAYOUT_KEY}\t{layout}\n");
        for e in entries {
            body.push_str(&e.to_tsv());
            body.push('\n');
        }
        self.write_atomically("catalog.tsv", &body)
    }

    fn write_coverage(&self, ranges: &[TimeRange]) -> Result<(), StoreError> {
        let body: String = ranges
            .iter()
            .map(|r| format!("{}\t{}\n", timestamp_text(r.start()), timestamp_text(r.end())))
            .collect();
        self.write_atomically("coverage.tsv", &body)
    }

    fn clear_repository(&self, repo: RepositoryId) -> Result<(), StoreError> {
        File::create(self.repo_path(repo))?;
        Ok(())
    }
}

impl<B: Backend + ?Sized> Backend for std::sync::Arc<B> {
    fn load(&self) -> Result<LoadedState, StoreError> {
        (**self).load()
    }
    fn append_graph(&self, repo: RepositoryId, graph: &NamedGraph) -> Result<(), StoreError> {
        (**self).append_graph(repo, graph)
    }
    fn write_catalog(&self, layout: StoreLayout, entries: &[CatalogEntry]) -> Result<(), StoreError> {
        (**self).write_catalog(layout, entries)
    }
    fn write_coverage(&self, ranges: &[TimeRange]) -> Result<(), StoreError> {
        (**self).write_coverage(ranges)
    }
    fn clear_repository(&self, repo: RepositoryId) -> Result<(), StoreError> {
        (**self).clear_repository(repo)
    }
}

#[derive(Debug, Default)]
struct MemoryState {
    layout: Option<StoreLayout>,
    catalog: Vec<CatalogEntry>,
    graphs: Vec<(RepositoryId, NamedGraph)>,
    coverage: Vec<TimeRange>,
}

/// Volatile backend. Writes can be made to fail on demand, which exercises
/// the store's all-or-nothing contract.
#[derive(Debug, Default)]
pub struct MemoryBackend {
    state: Mutex<MemoryState>,
    fail_writes: AtomicBool,
}

impl MemoryBackend {
    pub fn new() -> Self {
        Self::default()
    }

    /// While set, every write returns [`StoreError::Persist`].
    pub fn set_fail_writes(&self, fail: bool) {
        self.fail_writes.store(fail, Ordering::SeqCst);
    }

    fn check(&self) -> Result<(), StoreError> {
        if self.fail_writes.load(Ordering::SeqCst) {
            Err(StoreError::Persist("simulated write failure".into()))
        } else {
            Ok(())
        }
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, MemoryState> {
        self.state.lock().unwrap_or_else(|p| p.into_inner())
    }
}

impl Backend for MemoryBackend {
    fn load(&self) -> Result<LoadedState, StoreError> {
        let s = self.lock();
        let committed: FxHashSet<&Iri> = s.catalog.iter().map(|e| &e.context).collect();
        Ok(LoadedState {
            layout: s.layout,
            catalog: s.catalog.clone(),
            graphs: s.graphs.iter().filter(|(_, g)| committed.contains(g.context())).cloned().collect(),
            coverage: s.coverage.clone(),
            orphans: s
                .graphs
                .iter()
                .filter(|(_, g)| !committed.contains(g.context()))
                .map(|(_, g)| g.context().clone())
                .collect(),
        })
    }

    fn append_graph(&self, repo: RepositoryId, graph: &NamedGraph) -> Result<(), StoreError> {
        self.check()?;
        self.lock().graphs.push((repo, graph.clone()));
        Ok(())
    }

    fn write_catalog(&self, layout: StoreLayout, entries: &[CatalogEntry]) -> Result<(), StoreError> {
        self.check()?;
        let mut s = self.lock();
        s.layout = Some(layout);
        s.catalog = entries.to_vec();
        Ok(())
    }

    fn write_coverage(&self, ranges: &[TimeRange]) -> Result<(), StoreError> {
        self.check()?;
        self.lock().coverage = ranges.to_vec();
        Ok(())
    }

    fn clear_repository(&self, repo: RepositoryId) -> Result<(), StoreError> {
        self.check()?;
        self.lock().graphs.retain(|(r, _)| *r != repo);
        Ok(())
    }
}
