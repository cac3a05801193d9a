use std::path::Path;
use std::process::Command as Process;

use axum::body::{to_bytes, Body};
use axum::http::Request;
use clap::Parser;
use firewx_cli::{bench, run, Cli};
use tower::ServiceExt;

fn cli(args: &[&str]) -> anyhow::Result<String> {
    let cli = Cli::try_parse_from(std::iter::once("firewx").chain(args.iter().copied()))?;
    run(&cli)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Two days of data for three nodes and a coarse 125-rule table.
fn fixture(root: &Path) -> (String, String) {
    let (data, store, rules) = (root.join("data"), root.join("store"), root.join("rules"));
    cli(&["synth", "--from", "2012-01-09", "--to", "2012-01-11", "--node-count", "3", "--fault-rate", "0.01", "--out", p(&data)]).unwrap();
    let out = cli(&["rulegen", "--out", p(&rules), "--t-step", "9", "--h-step", "20", "--w-step", "5"]).unwrap();
    assert!(out.starts_with("125 rules"), "{out}");
    let files: Vec<String> = ["air_temperature", "relative_humidity", "wind_speed"]
        .iter()
        .map(|k| p(&data.join(format!("{k}.csv"))).to_string())
        .collect();
    let nodes = data.join("nodes.csv");
    let mut args = vec!["--store", p(&store), "--nodes", p(&nodes), "ingest"];
    args.extend(files.iter().map(String::as_str));
    let out = cli(&args).unwrap();
    assert_eq!(out.lines().count(), 3, "{out}");
    (p(&store).to_string(), p(&rules).to_string())
}

#[test]
fn query_json_matches_the_http_endpoint_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let (store, rules) = fixture(dir.path());
    let window = ["--from", "2012-01-09T06:00Z", "--to", "2012-01-09T07:00Z"];
    let mut args = vec!["--store", &store, "--rules", &rules, "query", "--nx", "4", "--ny", "3", "--stride", "2"];
    args.extend(window);
    let from_cli = cli(&args).unwrap();
    let v: serde_json::Value = serde_json::from_str(&from_cli).unwrap();
    assert_eq!(v["frames"].as_array().unwrap().len(), 3);
    // Six slots for three nodes, less any slot that lost a reading to cleaning.
    let events = v["events"].as_array().unwrap().len();
    assert!((15..=18).contains(&events), "{events}");

    let g = Cli::try_parse_from(["firewx", "--store", &store, "--rules", &rules, "status"]).unwrap().global;
    let state = g.app_state(g.load_rules().unwrap()).unwrap();
    let app = firewx_service::router(state);
    let uri = "/fwi?from=2012-01-09T06:00Z&to=2012-01-09T07:00Z&nx=4&ny=3&stride=2";
    let rt = tokio::runtime::Runtime::new().unwrap();
    let body = rt.block_on(async {
        let resp = app.oneshot(Request::get(uri).body(Body::empty()).unwrap()).await.unwrap();
        assert!(resp.status().is_success());
        to_bytes(resp.into_body(), usize::MAX).await.unwrap()
    });
    assert_eq!(from_cli.trim_end().as_bytes(), &body[..]);
}

#[test]
fn inference_persists_across_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let (store, rules) = fixture(dir.path());
    let base = ["--store", store.as_str(), "--rules", rules.as_str(), "--json"];
    let infer = |from: &str, to: &str| -> serde_json::Value {
        let mut a = base.to_vec();
        a.extend(["infer", "--from", from, "--to", to]);
        serde_json::from_str(&cli(&a).unwrap()).unwrap()
    };
    let first = infer("2012-01-09", "2012-01-10");
    assert_eq!(first["rule_evaluations"], 125);
    assert!(first["events"].as_u64().unwrap() > 400);
    // Already covered: no rule runs in a later process.
    assert_eq!(infer("2012-01-09T03:00Z", "2012-01-09T09:00Z")["rule_evaluations"], 0);
    let mut a = base.to_vec();
    a.push("status");
    let status: serde_json::Value = serde_json::from_str(&cli(&a).unwrap()).unwrap();
    assert_eq!(status["layout"], "partitioned");
    assert_eq!(status["coverage"].as_array().unwrap().len(), 1);
    assert!(status["fwi_triples"].as_u64().unwrap() > 0);
}

#[test]
fn stats_and_timeline_are_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let (store, rules) = fixture(dir.path());
    let base = ["--store", store.as_str(), "--rules", rules.as_str(), "--json"];
    let mut a = base.to_vec();
    a.extend(["stats", "--from", "2012-01-09", "--to", "2012-01-10", "--day-start", "07:30", "--day-end", "19:00"]);
    let stats: serde_json::Value = serde_json::from_str(&cli(&a).unwrap()).unwrap();
    let n = |k: &str| stats[k]["events"].as_u64().unwrap();
    assert_eq!(n("entire"), n("day") + n("night"));
    let mut a = base.to_vec();
    a.extend(["timeline", "--from", "2012-01-09", "--to", "2012-01-10", "--node", "SN_2"]);
    let tl: Vec<serde_json::Value> = serde_json::from_str(&cli(&a).unwrap()).unwrap();
    assert!(!tl.is_empty() && tl.len() <= 144);
    let mut a = base.to_vec();
    a.extend(["timeline", "--from", "2012-01-09", "--to", "2012-01-10", "--node", "SN_9"]);
    assert!(cli(&a).unwrap_err().to_string().contains("node"));
}

#[test]
fn ingest_rejects_unknown_files_before_storing_anything() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    cli(&["synth", "--from", "2012-01-09", "--to", "2012-01-10", "--out", p(&data)]).unwrap();
    let store = dir.path().join("store");
    let err = cli(&["--store", p(&store), "ingest", p(&data.join("air_temperature.csv")), p(&data.join("nodes.csv"))]).unwrap_err();
    assert!(err.to_string().contains("--property"), "{err}");
    let status = cli(&["--store", p(&store), "--json", "status"]).unwrap();
    assert!(status.contains("\"graphs\":0"), "{status}");
    // A property that contradicts the rows is rejected by the shared ingest path.
    let err = cli(&["--store", p(&store), "ingest", "--property", "wind_speed", p(&data.join("air_temperature.csv"))]).unwrap_err();
    assert!(format!("{err:#}").contains("air_temperature"), "{err:#}");
}

#[test]
fn layouts_are_fixed_at_creation() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    cli(&["synth", "--from", "2012-01-09", "--to", "2012-01-10", "--node-count", "2", "--out", p(&data)]).unwrap();
    let store = dir.path().join("store");
    cli(&["--store", p(&store), "--layout", "single", "ingest", p(&data.join("wind_speed.csv"))]).unwrap();
    assert!(cli(&["--store", p(&store), "status"]).unwrap().contains("layout: single"));
    let err = cli(&["--store", p(&store), "--layout", "partitioned", "status"]).unwrap_err();
    assert!(err.to_string().contains("single"), "{err}");
}

#[test]
fn kml_export_writes_a_document() {
    let dir = tempfile::tempdir().unwrap();
    let (store, rules) = fixture(dir.path());
    let kml = dir.path().join("out.kml");
    cli(&["--store", &store, "--rules", &rules, "query", "--from", "2012-01-09T06:00Z", "--to", "2012-01-09T06:30Z", "--nx", "2", "--ny", "2", "--kml", p(&kml)])
        .unwrap();
    let doc = std::fs::read_to_string(&kml).unwrap();
    assert!(doc.starts_with("<?xml"));
    assert_eq!(doc.matches("<Placemark>").count(), 3 * 4);
}

#[test]
fn bench_rows_cover_every_period_and_mode() {
    let rules = firewx_core::ffdi::generate_rule_table(&firewx_core::ffdi::RuleGridSpec {
        temperature: firewx_core::ffdi::steps(0.0, 45.0, 9.0),
        humidity: firewx_core::ffdi::steps(0.0, 100.0, 20.0),
        wind: firewx_core::ffdi::steps(0.0, 25.0, 5.0),
        ..Default::default()
    })
    .unwrap();
    let spec = bench::BenchSpec {
        dataset: bench::DatasetSpec { target_triples: 10_000, ..Default::default() },
        periods: ["1h", "6h", "1d"].iter().map(|s| bench::parse_period(s).unwrap()).collect(),
        repetitions: 3,
    };
    let report = bench::run_bench(&spec, std::sync::Arc::new(rules)).unwrap();
    assert!(report.triples >= 10_000);
    assert!(report.repeat_results_identical && report.modes_agree);
    let csv = report.to_csv();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "period_seconds,label,median_ms,min_ms,max_ms,triples");
    assert_eq!(lines.len(), 1 + 4 * 3);
    for period in &spec.periods {
        for label in ["NQ-1R", "RQ-1R", "NQ-MR", "RQ-MR"] {
            let row = report.row(*period, label).unwrap();
            assert!(row.min_ms <= row.median_ms && row.median_ms <= row.max_ms);
            assert_eq!(row.triples, report.triples);
        }
    }
    let too_few = bench::BenchSpec { repetitions: 2, ..spec };
    assert!(bench::run_bench(&too_few, std::sync::Arc::new(firewx_core::rules::RuleSet::new(vec![], serde_json::Value::Null).unwrap())).is_err());
}

#[test]
fn usage_errors_exit_with_code_two() {
    let bin = env!("CARGO_BIN_EXE_firewx");
    let out = Process::new(bin).arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Process::new(bin).args(["query", "--from", "2012-01-09"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let out = Process::new(bin)
        .args(["--store", p(dir.path()), "--rules", p(&dir.path().join("missing")), "query", "--from", "x", "--to", "y"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}
