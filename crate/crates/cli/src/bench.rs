//! New-query versus repeat-query timings over one- and multi-repository
//! stores.

use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, ensure, Context};
use chrono::Duration;
use firewx_core::infer::{Clock, InferenceEngine};
use firewx_core::ingest::{CleanConfig, NodeRegistry, Observation, SyntheticWeather};
use firewx_core::rules::RuleSet;
use firewx_core::store::{save_observations, RepositorySet, StoreLayout};
use firewx_core::{PropertyKind, TimeRange, Timestamp};
use serde::Serialize;

/// Parses `30m`, `1h`, `3d`, `2w` or `1mo` (30 days).
pub fn parse_period(s: &str) -> anyhow::Result<Duration> {
    let s = s.trim();
    let split = s.find(|c: char| !c.is_ascii_digit()).with_context(|| format!("period {s:?} has no unit"))?;
    let (n, unit) = s.split_at(split);
    let n: i64 = n.parse().with_context(|| format!("period {s:?} has no count"))?;
    ensure!(n > 0, "period {s:?} must be positive");
    Ok(match unit {
        "m" | "min" => Duration::minutes(n),
        "h" => Duration::hours(n),
        "d" => Duration::days(n),
        "w" => Duration::weeks(n),
        "mo" => Duration::days(30 * n),
        _ => bail!("unknown period unit {unit:?} in {s:?}"),
    })
}

pub fn default_periods() -> Vec<Duration> {
    ["1h", "6h", "12h", "1d", "3d", "1w", "2w", "1mo"].iter().map(|p| parse_period(p).expect("valid default")).collect()
}

/// Synthetic corpus description.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub seed: u64,
    pub nodes: usize,
    /// Days are added until the weather repositories hold at least this many
    /// triples.
    pub target_triples: usize,
    pub start: Timestamp,
    pub fault_rate: f64,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        Self { seed: 42, nodes: 1, target_triples: 145_000, start: "2012-01-01T00:00:00Z".parse().expect("valid"), fault_rate: 0.0 }
    }
}

/// Day-sized single-property batches in generation order.
pub type Batches = Vec<(PropertyKind, Vec<Observation>)>;

/// Generates day batches and stores them in `repos` until the target is
/// reached. Returns the batches so the same corpus can fill another store.
pub fn build_dataset(repos: &RepositorySet, spec: &DatasetSpec) -> anyhow::Result<(NodeRegistry, Batches)> {
    ensure!(spec.nodes > 0, "dataset needs at least one node");
    let nodes = NodeRegistry::study_region(spec.nodes);
    let synth = SyntheticWeather::new(spec.seed, spec.fault_rate)?;
    let cfg = CleanConfig::default();
    let mut batches = Vec::new();
    let mut day = 0;
    while repos.weather_triple_count() < spec.target_triples {
        let range = TimeRange::new(spec.start + Duration::days(day), spec.start + Duration::days(day + 1))?;
        let records = synth.observations(&nodes, &range)?;
        for kind in PropertyKind::ALL {
            let batch: Vec<_> = records.iter().map(|r| r.observation.clone()).filter(|o| o.property == kind).collect();
            save_observations(repos, &batch, kind, &nodes, &cfg)?;
            batches.push((kind, batch));
        }
        day += 1;
    }
    Ok((nodes, batches))
}

/// Stores previously generated batches into another repository set.
pub fn replay(repos: &RepositorySet, nodes: &NodeRegistry, batches: &Batches) -> anyhow::Result<()> {
    let cfg = CleanConfig::default();
    for (kind, batch) in batches {
        save_observations(repos, batch, *kind, nodes, &cfg)?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub dataset: DatasetSpec,
    /// Ascending query lengths, each starting at the dataset start.
    pub periods: Vec<Duration>,
    pub repetitions: usize,
}

impl Default for BenchSpec {
    fn default() -> Self {
        Self { dataset: DatasetSpec::default(), periods: default_periods(), repetitions: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub period_seconds: i64,
    pub label: String,
    pub median_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
    pub triples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub triples: usize,
    pub rules: usize,
    pub rows: Vec<BenchRow>,
    /// Every repeat query returned exactly the bytes of its new query.
    pub repeat_results_identical: bool,
    /// Both storage modes returned the same events for each period.
    pub modes_agree: bool,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("period_seconds,label,median_ms,min_ms,max_ms,triples\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:.3},{:.3},{:.3},{}\n",
                r.period_seconds, r.label, r.median_ms, r.min_ms, r.max_ms, r.triples
            ));
        }
        out
    }

    pub fn row(&self, period: Duration, label: &str) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.period_seconds == period.num_seconds() && r.label == label)
    }
}

fn summarize(period: Duration, label: &str, mut times: Vec<f64>, triples: usize) -> BenchRow {
    times.sort_by(f64::total_cmp);
    let n = times.len();
    let median = if n % 2 == 1 { times[n / 2] } else { (times[n / 2 - 1] + times[n / 2]) / 2.0 };
    BenchRow { period_seconds: period.num_seconds(), label: label.into(), median_ms: median, min_ms: times[0], max_ms: times[n - 1], triples }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t0 = Instant::now();
    let out = f();
    (out, t0.elapsed().as_secs_f64() * 1e3)
}

/// Builds the corpus in both layouts and times every (period, mode) cell.
/// Each new query runs against an emptied FWI repository; its repeat
/// follows immediately. Runs are strictly sequential.
pub fn run_bench(spec: &BenchSpec, rules: Arc<RuleSet>) -> anyhow::Result<BenchReport> {
    ensure!(spec.repetitions >= 3, "at least three repetitions are required");
    ensure!(!spec.periods.is_empty(), "no periods given");
    ensure!(spec.periods.windows(2).all(|w| w[0] < w[1]), "periods must be ascending");
    let multi = Arc::new(RepositorySet::in_memory(StoreLayout::Partitioned));
    let (nodes, batches) = build_dataset(&multi, &spec.dataset)?;
    let single = Arc::new(RepositorySet::in_memory(StoreLayout::Single));
    replay(&single, &nodes, &batches)?;
    let triples = multi.weather_triple_count();
    ensure!(single.weather_triple_count() == triples, "storage modes hold different corpora");

    // A fixed provenance stamp makes the two layouts' payloads comparable.
    let stamp = spec.dataset.start;
    let clock: Clock = Arc::new(move || stamp);
    let engines = [
        ("1R", InferenceEngine::new(single, rules.clone()).with_clock(clock.clone())),
        ("MR", InferenceEngine::new(multi, rules.clone()).with_clock(clock)),
    ];
    let mut rows = Vec::new();
    let mut identical = true;
    let mut agree = true;
    for &period in &spec.periods {
        let window = TimeRange::new(spec.dataset.start, spec.dataset.start + period)?;
        let mut per_mode = Vec::new();
        for (mode, engine) in &engines {
            let (mut nq, mut rq) = (Vec::new(), Vec::new());
            let mut payload = Vec::new();
            for _ in 0..spec.repetitions {
                engine.reset()?;
                let (first, t_new) = timed(|| engine.query_fwi(&window, None));
                let (again, t_repeat) = timed(|| engine.query_fwi(&window, None));
                let (first, again) = (serde_json::to_vec(&first?)?, serde_json::to_vec(&again?)?);
                identical &= first == again;
                nq.push(t_new);
                rq.push(t_repeat);
                payload = first;
            }
            rows.push(summarize(period, &format!("NQ-{mode}"), nq, triples));
            rows.push(summarize(period, &format!("RQ-{mode}"), rq, triples));
            per_mode.push(payload);
        }
        agree &= per_mode.windows(2).all(|w| w[0] == w[1]);
    }
    Ok(BenchReport { triples, rules: rules.len(), rows, repeat_results_identical: identical, modes_agree: agree })
}
