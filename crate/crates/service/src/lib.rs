//! HTTP facade over the fire-weather engine.
//!
//! | route | purpose |
//! |---|---|
//! | `POST /ingest?property=` | observation CSV in, one stored graph out |
//! | `GET /fwi` | raster frames per 10-minute slot, point events, gaps |
//! | `GET /fwi/timeline` | class sequence of one node |
//! | `GET /fwi/stats` | entire / day / night class distributions |
//! | `GET /export/kml` | the `/fwi` frames as a KML document |
//! | `GET /status` | counters for monitoring |
//! | `/ui` | static front-end bundle |
//!
//! Every handler is a thin wrapper over a plain function in this crate, so
//! other front ends (the CLI) produce byte-identical JSON.

mod error;
mod ingest;
mod kml;
pub mod params;
mod query;
mod routes;
mod stats;

use std::path::PathBuf;
use std::sync::Arc;

use chrono::FixedOffset;
use firewx_core::idw::BoundingBox;
use firewx_core::infer::InferenceEngine;
use firewx_core::ingest::{CleanConfig, NodeRegistry};
use firewx_core::{ClassBands, IdwConfig};

pub use error::ApiError;
pub use ingest::{ingest_csv, IngestResponse};
pub use kml::{class_color, kml_document};
pub use query::{fwi_query, timeline, EventOut, Frame, FwiResponse, QueryRequest, TimelineEntry};
pub use routes::router;
pub use stats::{stats_report, DayWindow, Distribution, StatsReport};

/// Everything a request handler needs.
pub struct AppState {
    pub engine: Arc<InferenceEngine>,
    pub nodes: Arc<NodeRegistry>,
    pub clean: CleanConfig,
    /// Offset for local wall-clock input and the day/night split.
    pub utc_offset: FixedOffset,
    pub bands: ClassBands,
    pub idw: IdwConfig,
    /// Directory served under `/ui`; a placeholder page is served without it.
    pub ui_dir: Option<PathBuf>,
}

impl AppState {
    pub fn new(engine: Arc<InferenceEngine>, nodes: Arc<NodeRegistry>) -> Self {
        Self {
            engine,
            nodes,
            clean: CleanConfig::default(),
            utc_offset: firewx_core::domain::default_utc_offset(),
            bands: ClassBands::default(),
            idw: IdwConfig::default(),
            ui_dir: None,
        }
    }

    /// Node extent padded by a tenth on each side, used when a query names
    /// no bounding box.
    pub fn default_bbox(&self) -> BoundingBox {
        let mut it = self.nodes.iter().map(|(_, p)| p);
        let Some(first) = it.next() else {
            return BoundingBox::new(-28.2375, 153.2667, -28.2205, 153.2786).expect("valid study box");
        };
        let (mut s, mut w, mut n, mut e) = (first.lat_deg, first.lon_deg, first.lat_deg, first.lon_deg);
        for p in it {
            s = s.min(p.lat_deg);
            n = n.max(p.lat_deg);
            w = w.min(p.lon_deg);
            e = e.max(p.lon_deg);
        }
        let pad_lat = ((n - s) * 0.1).max(0.001);
        let pad_lon = ((e - w) * 0.1).max(0.001);
        BoundingBox::new((s - pad_lat).max(-90.0), (w - pad_lon).max(-180.0), (n + pad_lat).min(90.0), (e + pad_lon).min(180.0))
            .expect("padded extent is non-degenerate")
    }
}

/// Rounds to four decimals, the fixed precision of every float the API emits.
pub(crate) fn round4(v: f64) -> f64 {
    let r = (v * 1e4).round() / 1e4;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}
