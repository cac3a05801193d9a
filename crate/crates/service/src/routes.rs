use std::collections::BTreeSet;
use std::sync::Arc;

use axum::extract::{DefaultBodyLimit, Query, State};
use axum::http::header;
use axum::response::{Html, IntoResponse, Redirect, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use firewx_core::store::RepositoryId;
use firewx_core::PropertyKind;
use serde::Serialize;
use tower_http::services::ServeDir;

use crate::params::{self, Params};
use crate::stats::DayWindow;
use crate::{fwi_query, ingest_csv, kml_document, stats_report, timeline, ApiError, AppState, QueryRequest};

type Shared = Arc<AppState>;

/// Largest accepted ingest body.
const MAX_INGEST_BYTES: usize = 512 * 1024 * 1024;

const UI_PLACEHOLDER: &str = "<!doctype html><html><head><meta charset=\"utf-8\"><title>Fire weather</title></head>\
<body><h1>Fire weather</h1><p>The front-end bundle is not installed. The JSON API is available at \
<code>/fwi</code>, <code>/fwi/timeline</code>, <code>/fwi/stats</code> and <code>/export/kml</code>.</p></body></html>";

/// Runs blocking engine work off the async executor.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError::internal(format!("worker failed: {e}")))?
}

async fn ingest(State(st): State<Shared>, Query(p): Query<Params>, body: String) -> Result<Response, ApiError> {
    let raw = p.get("property").ok_or_else(|| ApiError::missing("property"))?;
    let property: PropertyKind = raw.parse().map_err(|_| ApiError::invalid("property", format!("unknown property {raw:?}")))?;
    let out = blocking(move || ingest_csv(&st, property, &body)).await?;
    Ok(Json(out).into_response())
}

async fn fwi(State(st): State<Shared>, Query(p): Query<Params>) -> Result<Response, ApiError> {
    let req = QueryRequest::from_params(&p, &st)?;
    let out = blocking(move || fwi_query(&st, &req)).await?;
    Ok(Json(out).into_response())
}

async fn kml(State(st): State<Shared>, Query(p): Query<Params>) -> Result<Response, ApiError> {
    let req = QueryRequest::from_params(&p, &st)?;
    let doc = blocking(move || fwi_query(&st, &req).map(|r| kml_document(&r))).await?;
    Ok(([(header::CONTENT_TYPE, "application/vnd.google-earth.kml+xml")], doc).into_response())
}

async fn fwi_timeline(State(st): State<Shared>, Query(p): Query<Params>) -> Result<Response, ApiError> {
    let range = params::range(&p)?;
    let node = p.get("node").cloned().ok_or_else(|| ApiError::missing("node"))?;
    let out = blocking(move || timeline(&st, &range, &node)).await?;
    Ok(Json(out).into_response())
}

async fn fwi_stats(State(st): State<Shared>, Query(p): Query<Params>) -> Result<Response, ApiError> {
    let range = params::range(&p)?;
    let std = DayWindow::standard(st.utc_offset);
    let window = DayWindow::new(
        params::time_of_day(&p, "day_start", std.start)?,
        params::time_of_day(&p, "day_end", std.end)?,
        st.utc_offset,
    )?;
    let nodes: Option<BTreeSet<String>> = params::nodes(&p);
    let out = blocking(move || stats_report(&st, &range, window, nodes.as_ref())).await?;
    Ok(Json(out).into_response())
}

#[derive(Serialize)]
struct Status {
    layout: &'static str,
    rules: usize,
    rule_evaluations: u64,
    nodes: usize,
    weather_triples: usize,
    fwi_triples: usize,
    coverage: Vec<firewx_core::TimeRange>,
}

async fn status(State(st): State<Shared>) -> Json<Status> {
    let repos = st.engine.repos();
    Json(Status {
        layout: repos.layout().name(),
        rules: st.engine.rules().len(),
        rule_evaluations: st.engine.rule_evaluations(),
        nodes: st.nodes.len(),
        weather_triples: repos.weather_triple_count(),
        fwi_triples: repos.triple_count(RepositoryId::Fwi),
        coverage: repos.coverage(),
    })
}

async fn not_found() -> ApiError {
    ApiError::not_found("no such route")
}

/// The full application router.
pub fn router(state: AppState) -> Router {
    let ui_dir = state.ui_dir.clone().filter(|d| d.is_dir());
    let api = Router::new()
        .route("/ingest", post(ingest).layer(DefaultBodyLimit::max(MAX_INGEST_BYTES)))
        .route("/fwi", get(fwi))
        .route("/fwi/timeline", get(fwi_timeline))
        .route("/fwi/stats", get(fwi_stats))
        .route("/export/kml", get(kml))
        .route("/status", get(status))
        .route("/", get(|| async { Redirect::to("/ui/") }))
        .fallback(not_found)
        .with_state(Arc::new(state));
    match ui_dir {
        Some(dir) => api.nest_service("/ui", ServeDir::new(dir).append_index_html_on_directories(true)),
        None => api
            .route("/ui", get(|| async { Html(UI_PLACEHOLDER) }))
            .route("/ui/", get(|| async { Html(UI_PLACEHOLDER) })),
    }
}
