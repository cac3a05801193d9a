use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::Router;
use chrono::Duration;
use firewx_core::domain::default_utc_offset;
use firewx_core::ffdi::{generate_rule_table, RuleGridSpec};
use firewx_core::infer::InferenceEngine;
use firewx_core::ingest::{write_observations, NodeRegistry, SyntheticWeather};
use firewx_core::store::{RepositorySet, StoreLayout};
use firewx_core::{PropertyKind, TimeRange, Timestamp};
use firewx_service::{router, AppState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tower::ServiceExt;

fn ts(s: &str) -> Timestamp {
    s.parse().unwrap()
}

fn rules() -> RuleGridSpec {
    RuleGridSpec {
        temperature: (0..=9).map(|i| f64::from(i) * 5.0).collect(),
        humidity: (0..=10).map(|i| f64::from(i) * 10.0).collect(),
        wind: (0..=6).map(|i| f64::from(i) * 4.0).collect(),
        ..RuleGridSpec::default()
    }
}

fn state(ui_dir: Option<std::path::PathBuf>) -> AppState {
    let repos = Arc::new(RepositorySet::in_memory(StoreLayout::Partitioned));
    let now = ts("2020-01-01T00:00:00Z");
    let engine = InferenceEngine::new(repos, Arc::new(generate_rule_table(&rules()).unwrap())).with_clock(Arc::new(move || now));
    let mut st = AppState::new(Arc::new(engine), Arc::new(NodeRegistry::study_region(3)));
    st.ui_dir = ui_dir;
    st
}

fn csv_for(kind: PropertyKind, range: &TimeRange) -> String {
    let nodes = NodeRegistry::study_region(3);
    let records = SyntheticWeather::new(8, 0.0).unwrap().observations(&nodes, range).unwrap();
    write_observations(records.iter().map(|r| &r.observation).filter(|o| o.property == kind), default_utc_offset())
}

async fn call(app: &Router, method: &str, uri: &str, body: String) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri).body(Body::from(body)).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    (status, to_bytes(resp.into_body(), usize::MAX).await.unwrap().to_vec())
}

async fn get_json(app: &Router, uri: &str) -> (StatusCode, Value) {
    let (s, b) = call(app, "GET", uri, String::new()).await;
    (s, serde_json::from_slice(&b).unwrap_or(Value::Null))
}

fn day() -> TimeRange {
    TimeRange::new(ts("2012-01-01T00:00:00Z"), ts("2012-01-02T00:00:00Z")).unwrap()
}

async fn loaded(ui_dir: Option<std::path::PathBuf>) -> Router {
    let app = router(state(ui_dir));
    for kind in PropertyKind::ALL {
        let (s, body) = call(&app, "POST", &format!("/ingest?property={kind}"), csv_for(kind, &day())).await;
        assert_eq!(s, StatusCode::OK, "{}", String::from_utf8_lossy(&body));
        let v: Value = serde_json::from_slice(&body).unwrap();
        assert_eq!(v["observations"], 3 * 144);
        assert!(v["triples"].as_u64().unwrap() > 0);
        assert!(v["context"].as_str().unwrap().starts_with("urn:graph:"));
    }
    app
}

const HOUR: &str = "/fwi?from=2012-01-01T02:00:00Z&to=2012-01-01T03:00:00Z&nx=4&ny=3";

#[tokio::test]
async fn one_hour_gives_six_frames_and_repeats_are_identical() {
    let app = loaded(None).await;
    let (s, first) = call(&app, "GET", HOUR, String::new()).await;
    assert_eq!(s, StatusCode::OK);
    let v: Value = serde_json::from_slice(&first).unwrap();
    let frames = v["frames"].as_array().unwrap();
    assert_eq!(frames.len(), 6);
    for f in frames {
        assert_eq!(f["gap"], false);
        assert_eq!(f["values"].as_array().unwrap().len(), 12);
        for x in f["values"].as_array().unwrap() {
            let x = x.as_f64().unwrap();
            assert!((1.0..=15.0).contains(&x));
        }
    }
    assert_eq!(v["events"].as_array().unwrap().len(), 18);
    assert!(v["gaps"].as_array().unwrap().is_empty());
    let (_, status) = get_json(&app, "/status").await;
    let evals = status["rule_evaluations"].clone();
    let (_, again) = call(&app, "GET", HOUR, String::new()).await;
    assert_eq!(again, first);
    assert_eq!(get_json(&app, "/status").await.1["rule_evaluations"], evals);
}

#[tokio::test]
async fn stride_thins_frames_but_not_events() {
    let app = loaded(None).await;
    let (_, v) = get_json(&app, &format!("{HOUR}&stride=4")).await;
    let stamps: Vec<&str> = v["frames"].as_array().unwrap().iter().map(|f| f["timestamp"].as_str().unwrap()).collect();
    assert_eq!(stamps, ["2012-01-01T02:00:00Z", "2012-01-01T02:40:00Z"]);
    assert_eq!(v["events"].as_array().unwrap().len(), 18);
}

#[tokio::test]
async fn dataless_period_is_all_gaps() {
    let app = loaded(None).await;
    let (s, v) = get_json(&app, "/fwi?from=2013-05-01T00:00:00Z&to=2013-05-01T01:00:00Z&nx=2&ny=2").await;
    assert_eq!(s, StatusCode::OK);
    assert!(v["frames"].as_array().unwrap().iter().all(|f| f["gap"] == true));
    assert_eq!(v["gaps"], serde_json::json!([{"start": "2013-05-01T00:00:00Z", "end": "2013-05-01T01:00:00Z"}]));
    assert!(v["events"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn malformed_requests_name_the_field() {
    let app = router(state(None));
    let cases = [
        ("/fwi?to=2012-01-01", "from", "missing_parameter"),
        ("/fwi?from=2012-01-02&to=2012-01-01", "to", "invalid_parameter"),
        ("/fwi?from=2012-01-01&to=2012-01-02&bbox=1,2,3", "bbox", "invalid_parameter"),
        ("/fwi?from=2012-01-01&to=2012-01-02&nx=0", "nx", "invalid_parameter"),
        ("/fwi?from=2012-01-01&to=2012-01-02&ny=999", "ny", "invalid_parameter"),
        ("/fwi?from=nonsense&to=2012-01-02", "from", "invalid_parameter"),
        ("/fwi?from=2012-01-01&to=2013-01-01&nx=512&ny=512", "stride", "invalid_parameter"),
        ("/fwi/timeline?from=2012-01-01&to=2012-01-02", "node", "missing_parameter"),
        ("/fwi/timeline?from=2012-01-01&to=2012-01-02&node=SN_99", "node", "invalid_parameter"),
        ("/fwi/stats?from=2012-01-01&to=2012-01-02&day_start=25:00", "day_start", "invalid_parameter"),
        ("/fwi/stats?from=2012-01-01&to=2012-01-02&day_start=06:00&day_end=06:00", "day_end", "invalid_parameter"),
    ];
    for (uri, field, code) in cases {
        let (s, v) = get_json(&app, uri).await;
        assert_eq!(s, StatusCode::BAD_REQUEST, "{uri}");
        assert_eq!(v["field"], field, "{uri}: {v}");
        assert_eq!(v["code"], code, "{uri}");
        assert!(v["message"].as_str().is_some_and(|m| !m.is_empty()));
    }
    let (s, body) = call(&app, "POST", "/ingest?property=pressure", "x".into()).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(serde_json::from_slice::<Value>(&body).unwrap()["field"], "property");
    let wrong = csv_for(PropertyKind::WindSpeed, &day());
    let (s, body) = call(&app, "POST", "/ingest?property=air_temperature", wrong).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(serde_json::from_slice::<Value>(&body).unwrap()["field"], "property");
    let (s, body) = call(&app, "POST", "/ingest?property=air_temperature", "2012-01-01 00:00:00, air_temperature".into()).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(serde_json::from_slice::<Value>(&body).unwrap()["field"], "body");
    let (s, v) = get_json(&app, "/nope").await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(v["code"], "not_found");
}

#[tokio::test]
async fn timeline_lists_one_nodes_events() {
    let app = loaded(None).await;
    let (_, fwi) = get_json(&app, HOUR).await;
    let (s, tl) = get_json(&app, "/fwi/timeline?from=2012-01-01T02:00:00Z&to=2012-01-01T03:00:00Z&node=SN_2").await;
    assert_eq!(s, StatusCode::OK);
    let want: Vec<Value> = fwi["events"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["node"] == "SN_2")
        .map(|e| serde_json::json!([e["time"], e["ordinal"], e["label"]]))
        .collect();
    assert_eq!(tl.as_array().unwrap(), &want);
    assert_eq!(want.len(), 6);
}

#[tokio::test]
async fn stats_partitions_recombine_on_random_windows() {
    let app = loaded(None).await;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let start = ts("2012-01-01T00:00:00Z") + Duration::minutes(10 * rng.random_range(0..140));
        let end = start + Duration::minutes(10 * rng.random_range(1..100));
        let q = format!("from={}&to={}", start.to_rfc3339(), end.to_rfc3339()).replace('+', "%2B");
        let (s, st) = get_json(&app, &format!("/fwi/stats?{q}")).await;
        assert_eq!(s, StatusCode::OK, "{st}");
        let (_, fwi) = get_json(&app, &format!("/fwi?{q}&nx=1&ny=1")).await;
        let events = fwi["events"].as_array().unwrap();
        assert_eq!(st["entire"]["events"].as_u64().unwrap() as usize, events.len());
        let day = st["day"]["events"].as_u64().unwrap();
        let night = st["night"]["events"].as_u64().unwrap();
        assert_eq!(day + night, events.len() as u64);
        for (label, n) in st["entire"]["counts"].as_object().unwrap() {
            let recount = events.iter().filter(|e| e["label"] == label.as_str()).count() as u64;
            assert_eq!(n.as_u64().unwrap(), recount);
            let d = st["day"]["counts"][label].as_u64().unwrap_or(0);
            let ni = st["night"]["counts"][label].as_u64().unwrap_or(0);
            assert_eq!(d + ni, recount);
        }
        for part in ["entire", "day", "night"] {
            let p = st[part]["percentages"].as_object().unwrap();
            if !p.is_empty() {
                let total: f64 = p.values().map(|x| x.as_f64().unwrap()).sum();
                assert!((total - 100.0).abs() <= 0.1);
            }
        }
    }
}

#[tokio::test]
async fn kml_has_one_polygon_per_cell() {
    let app = loaded(None).await;
    let req = Request::builder().uri(HOUR.replace("/fwi", "/export/kml")).body(Body::empty()).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    assert_eq!(resp.headers()["content-type"], "application/vnd.google-earth.kml+xml");
    let doc = String::from_utf8(to_bytes(resp.into_body(), usize::MAX).await.unwrap().to_vec()).unwrap();
    assert!(doc.starts_with("<?xml"));
    assert!(doc.trim_end().ends_with("</kml>"));
    assert_eq!(doc.matches("<Folder>").count(), 6);
    assert_eq!(doc.matches("<Placemark>").count(), 6 * 12);
    assert_eq!(doc.matches("<Style id=").count(), 15);
}

#[tokio::test]
async fn late_ingest_invalidates_inferred_events() {
    let app = loaded(None).await;
    get_json(&app, HOUR).await;
    assert!(!get_json(&app, "/status").await.1["coverage"].as_array().unwrap().is_empty());
    let next = TimeRange::new(ts("2012-01-02T00:00:00Z"), ts("2012-01-02T01:00:00Z")).unwrap();
    let (_, body) = call(&app, "POST", "/ingest?property=wind_speed", csv_for(PropertyKind::WindSpeed, &next)).await;
    assert_eq!(serde_json::from_slice::<Value>(&body).unwrap()["invalidated"], false);
    let (_, body) = call(&app, "POST", "/ingest?property=wind_speed", csv_for(PropertyKind::WindSpeed, &day())).await;
    assert_eq!(serde_json::from_slice::<Value>(&body).unwrap()["invalidated"], true);
    assert!(get_json(&app, "/status").await.1["coverage"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn ui_is_served_from_a_directory_or_a_placeholder() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<html>bundle</html>").unwrap();
    let app = router(state(Some(dir.path().to_path_buf())));
    let (s, body) = call(&app, "GET", "/ui/", String::new()).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(body, b"<html>bundle</html>");
    let app = router(state(None));
    let (s, body) = call(&app, "GET", "/ui/", String::new()).await;
    assert_eq!(s, StatusCode::OK);
    assert!(String::from_utf8(body).unwrap().contains("not installed"));
}
