use std::collections::{BTreeMap, BTreeSet};

use firewx_core::domain::slot_duration;
use firewx_core::idw::{raster_frame, BoundingBox, RasterFrame};
use firewx_core::infer::FwiEvent;
use firewx_core::{FwiClass, TimeRange, Timestamp};
use serde::Serialize;

use crate::params::{self, Params, MAX_CELLS};
use crate::{round4, ApiError, AppState};

/// Validated `/fwi` parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryRequest {
    pub range: TimeRange,
    pub bbox: BoundingBox,
    pub nx: usize,
    pub ny: usize,
    /// Emit every `stride`-th slot as a frame.
    pub stride: usize,
    pub nodes: Option<BTreeSet<String>>,
}

impl QueryRequest {
    pub fn from_params(p: &Params, state: &AppState) -> Result<Self, ApiError> {
        Ok(Self {
            range: params::range(p)?,
            bbox: params::bbox(p, state.default_bbox())?,
            nx: params::grid_size(p, "nx")?,
            ny: params::grid_size(p, "ny")?,
            stride: params::stride(p)?,
            nodes: params::nodes(p),
        })
    }

    /// Slot starts inside the requested range.
    pub fn slots(&self) -> Vec<Timestamp> {
        self.range.align_to_slots().slots().filter(|t| self.range.contains(*t)).collect()
    }
}

/// One raster frame; gap frames carry no cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Frame {
    pub timestamp: Timestamp,
    pub gap: bool,
    pub bbox: BoundingBox,
    pub nx: usize,
    pub ny: usize,
    /// Row-major from the north-west corner.
    pub values: Vec<f64>,
    pub labels: Vec<FwiClass>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventOut {
    pub node: String,
    pub time: Timestamp,
    pub ordinal: u8,
    pub label: FwiClass,
    pub lat: f64,
    pub lon: f64,
    pub rule: String,
    pub contributing_rules: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FwiResponse {
    pub from: Timestamp,
    pub to: Timestamp,
    pub bbox: BoundingBox,
    pub nx: usize,
    pub ny: usize,
    pub stride: usize,
    pub frames: Vec<Frame>,
    pub events: Vec<EventOut>,
    /// Maximal runs of slots without any event.
    pub gaps: Vec<TimeRange>,
}

/// Caller has checked that the node is registered.
fn event_out(e: &FwiEvent, state: &AppState) -> EventOut {
    let loc = state.nodes.get(&e.node_id).expect("registered node");
    EventOut {
        node: e.node_id.clone(),
        time: e.time,
        ordinal: e.class.ordinal(),
        label: e.class,
        lat: loc.lat_deg,
        lon: loc.lon_deg,
        rule: e.rule_name.clone(),
        contributing_rules: e.contributing_rules.clone(),
    }
}

fn coalesce(slots: impl IntoIterator<Item = Timestamp>) -> Vec<TimeRange> {
    let step = slot_duration();
    let mut out: Vec<TimeRange> = Vec::new();
    for t in slots {
        match out.last_mut() {
            Some(last) if last.end() == t => *last = TimeRange::new(last.start(), t + step).expect("grows forward"),
            _ => out.push(TimeRange::new(t, t + step).expect("positive slot")),
        }
    }
    out
}

/// Runs (lazy) inference for the request and assembles frames, events and
/// gaps. The body is a pure function of the store contents and the request.
pub fn fwi_query(state: &AppState, req: &QueryRequest) -> Result<FwiResponse, ApiError> {
    let slots = req.slots();
    let frame_count = slots.len().div_ceil(req.stride);
    if frame_count.saturating_mul(req.nx * req.ny) > MAX_CELLS {
        return Err(ApiError::invalid(
            "stride",
            format!("{frame_count} frames of {}x{} cells exceed the {MAX_CELLS}-cell limit; raise stride or shrink the grid", req.nx, req.ny),
        ));
    }
    let events = state.engine.query_fwi(&req.range, req.nodes.as_ref())?;
    let mut by_slot: BTreeMap<Timestamp, Vec<FwiEvent>> = BTreeMap::new();
    for e in &events {
        // Events for unregistered nodes cannot be placed on the map.
        if state.nodes.contains(&e.node_id) {
            by_slot.entry(e.time).or_default().push(e.clone());
        }
    }
    let mut frames = Vec::with_capacity(frame_count);
    for &t in slots.iter().step_by(req.stride) {
        let slot_events = by_slot.get(&t).map(Vec::as_slice).unwrap_or_default();
        let frame = raster_frame(t, slot_events, &state.nodes, req.bbox, req.nx, req.ny, &state.bands, &state.idw)
            .map_err(|e| ApiError::internal(e.to_string()))?;
        frames.push(match frame {
            RasterFrame::Grid(g) => Frame {
                timestamp: t,
                gap: false,
                bbox: g.bbox,
                nx: g.nx,
                ny: g.ny,
                values: g.values.into_iter().map(round4).collect(),
                labels: g.labels,
            },
            RasterFrame::Gap { .. } => Frame { timestamp: t, gap: true, bbox: req.bbox, nx: req.nx, ny: req.ny, values: vec![], labels: vec![] },
        });
    }
    let gaps = coalesce(slots.iter().copied().filter(|t| !by_slot.contains_key(t)));
    Ok(FwiResponse {
        from: req.range.start(),
        to: req.range.end(),
        bbox: req.bbox,
        nx: req.nx,
        ny: req.ny,
        stride: req.stride,
        frames,
        events: events.iter().filter(|e| state.nodes.contains(&e.node_id)).map(|e| event_out(e, state)).collect(),
        gaps,
    })
}

/// `(time, ordinal, label)` of one node, serialized as a three-element array.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimelineEntry(pub Timestamp, pub u8, pub FwiClass);

pub fn timeline(state: &AppState, range: &TimeRange, node: &str) -> Result<Vec<TimelineEntry>, ApiError> {
    if !state.nodes.contains(node) {
        return Err(ApiError::invalid("node", format!("unknown node {node:?}")));
    }
    let only: BTreeSet<String> = [node.to_string()].into();
    let events = state.engine.query_fwi(range, Some(&only))?;
    Ok(events.into_iter().map(|e| TimelineEntry(e.time, e.class.ordinal(), e.class)).collect())
}
