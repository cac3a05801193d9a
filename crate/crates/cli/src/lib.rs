//! `firewx` command-line front end.
//!
//! Commands that produce API payloads (`query`, `timeline`, `stats`) call the
//! same functions as the HTTP service, so their JSON is byte-identical to the
//! corresponding endpoint.

pub mod bench;

use std::collections::HashMap;
use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context};
use chrono::{FixedOffset, NaiveTime};
use clap::{Args, Parser, Subcommand};
use firewx_core::domain::{default_utc_offset, parse_utc_offset};
use firewx_core::ffdi::{generate_rule_table, steps, RuleGridSpec};
use firewx_core::infer::InferenceEngine;
use firewx_core::ingest::{NodeRegistry, SyntheticWeather};
use firewx_core::rules::RuleSet;
use firewx_core::store::{FileBackend, RepositoryId, RepositorySet, StoreLayout};
use firewx_core::{PropertyKind, TimeRange};
use firewx_service::params::{self, Params};
use firewx_service::{AppState, DayWindow, QueryRequest};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "firewx", version, about = "Fire-weather index inference over sensor observations")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Store directory.
    #[arg(long, global = true, env = "FIREWX_STORE", default_value = "firewx-store")]
    pub store: PathBuf,
    /// Rule file or directory. Without it the default weather-space grid is
    /// generated in memory.
    #[arg(long, global = true, env = "FIREWX_RULES")]
    pub rules: Option<PathBuf>,
    /// Node registry CSV (`id,lat,lon`). Defaults to `<store>/nodes.csv`,
    /// then to the built-in study region.
    #[arg(long, global = true)]
    pub nodes: Option<PathBuf>,
    /// Repository layout for a new store: `partitioned` or `single`.
    #[arg(long, global = true)]
    pub layout: Option<StoreLayout>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Offset of local wall-clock times, e.g. `+10:00`.
    #[arg(long, global = true, value_parser = parse_offset)]
    pub utc_offset: Option<FixedOffset>,
}

fn parse_offset(s: &str) -> Result<FixedOffset, String> {
    parse_utc_offset(s).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct Window {
    /// Start instant (ISO 8601, inclusive).
    #[arg(long)]
    pub from: String,
    /// End instant (ISO 8601, exclusive).
    #[arg(long)]
    pub to: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic observation corpus as per-property CSV files.
    Synth {
        #[command(flatten)]
        window: Window,
        /// Number of study-region nodes.
        #[arg(long = "node-count", default_value_t = 5)]
        node_count: usize,
        #[arg(long, default_value_t = 0.0)]
        fault_rate: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Clean observation CSV files and store each as one graph.
    Ingest {
        /// Property of every file; taken from each file name when omitted.
        #[arg(long)]
        property: Option<PropertyKind>,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Generate the weather-space rule table into a directory.
    Rulegen {
        #[arg(long)]
        out: PathBuf,
        /// Temperature step in degrees Celsius.
        #[arg(long, default_value_t = 3.0)]
        t_step: f64,
        /// Humidity step in percent.
        #[arg(long, default_value_t = 2.5)]
        h_step: f64,
        /// Wind step in m/s.
        #[arg(long, default_value_t = 1.0)]
        w_step: f64,
    },
    /// Materialize FWI events for a range.
    Infer {
        #[command(flatten)]
        window: Window,
    },
    /// Raster frames and events, as `GET /fwi`.
    Query {
        #[command(flatten)]
        window: Window,
        /// `south,west,north,east` in degrees.
        #[arg(long)]
        bbox: Option<String>,
        #[arg(long)]
        nx: Option<usize>,
        #[arg(long)]
        ny: Option<usize>,
        #[arg(long)]
        stride: Option<usize>,
        /// Comma-separated node filter.
        #[arg(long = "only")]
        only: Option<String>,
        /// Also write the frames as KML.
        #[arg(long)]
        kml: Option<PathBuf>,
    },
    /// Class sequence of one node, as `GET /fwi/timeline`.
    Timeline {
        #[command(flatten)]
        window: Window,
        #[arg(long)]
        node: String,
    },
    /// Class distributions, as `GET /fwi/stats`.
    Stats {
        #[command(flatten)]
        window: Window,
        #[arg(long, default_value = "06:00")]
        day_start: String,
        #[arg(long, default_value = "18:00")]
        day_end: String,
        #[arg(long = "only")]
        only: Option<String>,
    },
    /// Store counters.
    Status,
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Static front-end directory served under `/ui`.
        #[arg(long)]
        ui: Option<PathBuf>,
    },
    /// Time new and repeat queries in both repository layouts.
    Bench {
        /// Comma-separated periods such as `1h,1d,1mo`.
        #[arg(long, value_delimiter = ',')]
        periods: Option<Vec<String>>,
        #[arg(long, default_value_t = 3)]
        repetitions: usize,
        #[arg(long, default_value_t = 145_000)]
        target_triples: usize,
        #[arg(long = "node-count", default_value_t = 1)]
        node_count: usize,
        /// CSV output path; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl GlobalOpts {
    fn offset(&self) -> FixedOffset {
        self.utc_offset.unwrap_or_else(default_utc_offset)
    }

    pub fn load_rules(&self) -> anyhow::Result<RuleSet> {
        match &self.rules {
            Some(path) => RuleSet::read_path(path).with_context(|| format!("loading rules from {}", path.display())),
            None => Ok(generate_rule_table(&RuleGridSpec::default())?),
        }
    }

    pub fn load_nodes(&self) -> anyhow::Result<NodeRegistry> {
        let path = self.nodes.clone().or_else(|| Some(self.store.join("nodes.csv")).filter(|p| p.exists()));
        match path {
            Some(p) => {
                let text = fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
                Ok(NodeRegistry::from_csv(&text)?)
            }
            None => Ok(NodeRegistry::study_region(5)),
        }
    }

    /// Opens the store in the layout it was created with. `--layout` only
    /// chooses the layout of a new store and must agree with an existing one.
    pub fn open_store(&self) -> anyhow::Result<RepositorySet> {
        fs::create_dir_all(&self.store).with_context(|| format!("creating {}", self.store.display()))?;
        let backend = FileBackend::new(&self.store)?;
        let layout = match (backend.stored_layout()?, self.layout) {
            (Some(stored), Some(asked)) if stored != asked => {
                bail!("store {} uses the {stored} layout, not {asked}", self.store.display())
            }
            (Some(stored), _) => stored,
            (None, asked) => asked.unwrap_or(StoreLayout::Partitioned),
        };
        Ok(RepositorySet::open(backend, layout)?)
    }

    /// Service state over the store, as `serve` builds it.
    pub fn app_state(&self, rules: RuleSet) -> anyhow::Result<AppState> {
        let repos = Arc::new(self.open_store()?);
        let engine = Arc::new(InferenceEngine::new(repos, Arc::new(rules)));
        let mut state = AppState::new(engine, Arc::new(self.load_nodes()?));
        state.utc_offset = self.offset();
        Ok(state)
    }
}

fn window_params(w: &Window) -> Params {
    HashMap::from([("from".to_string(), w.from.clone()), ("to".to_string(), w.to.clone())])
}

fn window_range(w: &Window) -> anyhow::Result<TimeRange> {
    Ok(params::range(&window_params(w))?)
}

fn node_filter(only: &Option<String>) -> Option<std::collections::BTreeSet<String>> {
    let mut p = Params::new();
    if let Some(o) = only {
        p.insert("nodes".into(), o.clone());
    }
    params::nodes(&p)
}

fn json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string(value)? + "\n")
}

/// Runs one command and returns what it prints on stdout.
pub fn run(cli: &Cli) -> anyhow::Result<String> {
    let g = &cli.global;
    match &cli.command {
        Command::Synth { window, node_count, fault_rate, out } => synth(g, window, *node_count, *fault_rate, out),
        Command::Ingest { property, files } => ingest(g, *property, files),
        Command::Rulegen { out, t_step, h_step, w_step } => rulegen(g, out, [*t_step, *h_step, *w_step]),
        Command::Infer { window } => {
            let state = g.app_state(g.load_rules()?)?;
            let range = window_range(window)?;
            let before = state.engine.rule_evaluations();
            let events = state.engine.infer_range(&range)?;
            #[derive(Serialize)]
            struct InferOut {
                from: firewx_core::Timestamp,
                to: firewx_core::Timestamp,
                events: usize,
                rule_evaluations: u64,
            }
            let out = InferOut { from: range.start(), to: range.end(), events: events.len(), rule_evaluations: state.engine.rule_evaluations() - before };
            if g.json {
                json(&out)
            } else {
                Ok(format!("{} events in [{}, {}), {} rule evaluations\n", out.events, out.from, out.to, out.rule_evaluations))
            }
        }
        Command::Query { window, bbox, nx, ny, stride, only, kml } => {
            let state = g.app_state(g.load_rules()?)?;
            let mut p = window_params(window);
            let optional = [
                ("bbox", bbox.clone()),
                ("nx", nx.map(|v| v.to_string())),
                ("ny", ny.map(|v| v.to_string())),
                ("stride", stride.map(|v| v.to_string())),
                ("nodes", only.clone()),
            ];
            p.extend(optional.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_string(), v))));
            let req = QueryRequest::from_params(&p, &state)?;
            let resp = firewx_service::fwi_query(&state, &req)?;
            if let Some(path) = kml {
                fs::write(path, firewx_service::kml_document(&resp)).with_context(|| format!("writing {}", path.display()))?;
            }
            json(&resp)
        }
        Command::Timeline { window, node } => {
            let state = g.app_state(g.load_rules()?)?;
            json(&firewx_service::timeline(&state, &window_range(window)?, node)?)
        }
        Command::Stats { window, day_start, day_end, only } => {
            let state = g.app_state(g.load_rules()?)?;
            let p: Params = HashMap::from([("day_start".into(), day_start.clone()), ("day_end".into(), day_end.clone())]);
            let start = params::time_of_day(&p, "day_start", NaiveTime::MIN)?;
            let end = params::time_of_day(&p, "day_end", NaiveTime::MIN)?;
            let dw = DayWindow::new(start, end, state.utc_offset)?;
            let report = firewx_service::stats_report(&state, &window_range(window)?, dw, node_filter(only).as_ref())?;
            if g.json {
                return json(&report);
            }
            let mut out = format!("{} .. {}\n", report.from, report.to);
            for (name, d) in [("entire", &report.entire), ("day", &report.day), ("night", &report.night)] {
                out.push_str(&format!("{name}: {} events\n", d.events));
                for (class, pct) in &d.percentages {
                    out.push_str(&format!("  {:<14} {:>6} {:>8.2}%\n", class.label(), d.counts[class], pct));
                }
            }
            Ok(out)
        }
        Command::Status => status(g),
        Command::Serve { addr, ui } => serve(g, *addr, ui.clone()),
        Command::Bench { periods, repetitions, target_triples, node_count, out } => {
            let periods = match periods {
                Some(list) => list.iter().map(|p| bench::parse_period(p)).collect::<anyhow::Result<Vec<_>>>()?,
                None => bench::default_periods(),
            };
            let spec = bench::BenchSpec {
                dataset: bench::DatasetSpec { seed: g.seed, nodes: *node_count, target_triples: *target_triples, ..Default::default() },
                periods,
                repetitions: *repetitions,
            };
            let report = bench::run_bench(&spec, Arc::new(g.load_rules()?))?;
            if !report.repeat_results_identical || !report.modes_agree {
                bail!("benchmark results differ between runs or layouts");
            }
            let csv = report.to_csv();
            match out {
                Some(path) => {
                    fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?;
                    if g.json {
                        json(&report)
                    } else {
                        Ok(format!("{} rows over {} triples written to {}\n", report.rows.len(), report.triples, path.display()))
                    }
                }
                None if g.json => json(&report),
                None => Ok(csv),
            }
        }
    }
}

fn synth(g: &GlobalOpts, window: &Window, node_count: usize, fault_rate: f64, out: &Path) -> anyhow::Result<String> {
    if node_count == 0 {
        bail!("--node-count must be positive");
    }
    let range = window_range(window)?;
    let nodes = NodeRegistry::study_region(node_count);
    let synth = SyntheticWeather::new(g.seed, fault_rate)?.with_utc_offset(g.offset());
    let records = synth.observations(&nodes, &range)?;
    fs::create_dir_all(out)?;
    fs::write(out.join("nodes.csv"), nodes.to_csv())?;
    let mut lines = Vec::new();
    for kind in PropertyKind::ALL {
        let obs = records.iter().map(|r| &r.observation).filter(|o| o.property == kind);
        let text = firewx_core::ingest::write_observations(obs, synth.utc_offset());
        let path = out.join(format!("{}.csv", kind.name()));
        fs::write(&path, &text)?;
        lines.push(format!("{}: {} records", path.display(), text.lines().count()));
    }
    let injected = records.iter().filter(|r| r.injected).count();
    if g.json {
        return json(&serde_json::json!({ "records": records.len(), "injected_outliers": injected, "nodes": node_count }));
    }
    Ok(format!("{}\n{injected} injected outliers\n", lines.join("\n")))
}

fn ingest(g: &GlobalOpts, property: Option<PropertyKind>, files: &[PathBuf]) -> anyhow::Result<String> {
    // Ingestion never evaluates rules, but invalidation needs an engine.
    let state = g.app_state(RuleSet::new(Vec::new(), serde_json::Value::Null)?)?;
    let registry = g.store.join("nodes.csv");
    if !registry.exists() {
        fs::write(&registry, state.nodes.to_csv())?;
    }
    // Resolve every property first so a bad argument stores nothing.
    let mut jobs = Vec::with_capacity(files.len());
    for file in files {
        let kind = match property {
            Some(k) => k,
            None => file
                .file_stem()
                .and_then(|s| s.to_str())
                .and_then(|s| s.parse().ok())
                .with_context(|| format!("cannot tell the property of {}; pass --property", file.display()))?,
        };
        jobs.push((file, kind));
    }
    let mut out = String::new();
    for (file, kind) in jobs {
        let csv = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
        let resp = firewx_service::ingest_csv(&state, kind, &csv).with_context(|| file.display().to_string())?;
        if g.json {
            out.push_str(&json(&resp)?);
        } else {
            out.push_str(&format!(
                "{}: {} observations, {} triples, {} outliers removed -> {}\n",
                file.display(),
                resp.observations,
                resp.triples,
                resp.outliers_removed,
                resp.context.as_deref().unwrap_or("(nothing stored)")
            ));
        }
    }
    Ok(out)
}

fn rulegen(g: &GlobalOpts, out: &Path, [t, h, w]: [f64; 3]) -> anyhow::Result<String> {
    for (name, step) in [("t-step", t), ("h-step", h), ("w-step", w)] {
        if !(step.is_finite() && step > 0.0) {
            bail!("--{name} must be a positive number");
        }
    }
    let spec = RuleGridSpec { temperature: steps(0.0, 45.0, t), humidity: steps(0.0, 100.0, h), wind: steps(0.0, 25.0, w), ..Default::default() };
    let set = generate_rule_table(&spec)?;
    set.write_dir(out)?;
    if g.json {
        return json(&serde_json::json!({ "rules": set.len(), "out": out }));
    }
    Ok(format!("{} rules written to {}\n", set.len(), out.display()))
}

fn status(g: &GlobalOpts) -> anyhow::Result<String> {
    let repos = g.open_store()?;
    #[derive(Serialize)]
    struct StatusOut {
        layout: StoreLayout,
        graphs: usize,
        weather_triples: usize,
        fwi_triples: usize,
        coverage: Vec<TimeRange>,
    }
    let s = StatusOut {
        layout: repos.layout(),
        graphs: repos.catalog().len(),
        weather_triples: repos.weather_triple_count(),
        fwi_triples: repos.triple_count(RepositoryId::Fwi),
        coverage: repos.coverage(),
    };
    if g.json {
        return json(&s);
    }
    let mut out = format!(
        "layout: {}\ngraphs: {}\nweather triples: {}\nfwi triples: {}\n",
        s.layout, s.graphs, s.weather_triples, s.fwi_triples
    );
    for r in &s.coverage {
        out.push_str(&format!("covered: [{}, {})\n", r.start(), r.end()));
    }
    Ok(out)
}

fn serve(g: &GlobalOpts, addr: SocketAddr, ui: Option<PathBuf>) -> anyhow::Result<String> {
    let mut state = g.app_state(g.load_rules()?)?;
    state.ui_dir = ui;
    let app = firewx_service::router(state);
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await.with_context(|| format!("binding {addr}"))?;
        tracing::info!("listening on http://{}", listener.local_addr()?);
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        anyhow::Ok(())
    })?;
    Ok(String::new())
}
