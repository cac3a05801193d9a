use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::interp::{idw_estimate, IdwConfig, Sample};
use super::IdwError;
use crate::domain::{ClassBands, FwiClass, GeoPoint, Timestamp};
use crate::infer::FwiEvent;
use crate::ingest::NodeRegistry;

/// Geographic box in decimal degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub south: f64,
    pub west: f64,
    pub north: f64,
    pub east: f64,
}

impl BoundingBox {
    pub fn new(south: f64, west: f64, north: f64, east: f64) -> Result<Self, IdwError> {
        let corners_ok = GeoPoint::new(south, west).is_ok() && GeoPoint::new(north, east).is_ok();
        if !corners_ok {
            return Err(IdwError::InvalidBoundingBox("corner outside valid coordinates".into()));
        }
        if !(south < north) {
            return Err(IdwError::InvalidBoundingBox("south must be below north".into()));
        }
        if !(west < east) {
            return Err(IdwError::InvalidBoundingBox("west must be below east".into()));
        }
        Ok(Self { south, west, north, east })
    }

    /// Centre of cell `(row, col)` of an `nx` by `ny` grid; row 0 is the
    /// northernmost row.
    pub fn cell_center(&self, nx: usize, ny: usize, row: usize, col: usize) -> GeoPoint<f64> {
        let dlat = (self.north - self.south) / ny as f64;
        let dlon = (self.east - self.west) / nx as f64;
        GeoPoint {
            lat_deg: self.north - (row as f64 + 0.5) * dlat,
            lon_deg: self.west + (col as f64 + 0.5) * dlon,
        }
    }
}

impl fmt::Display for BoundingBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.south, self.west, self.north, self.east)
    }
}

/// Parses `S,W,N,E`.
impl FromStr for BoundingBox {
    type Err = IdwError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| IdwError::InvalidBoundingBox(e.to_string()))?;
        match parts.as_slice() {
            [s, w, n, e] => BoundingBox::new(*s, *w, *n, *e),
            _ => Err(IdwError::InvalidBoundingBox("expected four comma-separated numbers".into())),
        }
    }
}

/// What the sample values represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpolationMode {
    /// Class ordinals 1..=15; cells are labelled by rounding.
    #[default]
    Ordinal,
    /// Raw fire-danger scores; cells are labelled through the class bands.
    Score,
}

/// One timestep's interpolated field. Cells are row-major from the north-west
/// corner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RasterGrid {
    pub bbox: BoundingBox,
    pub nx: usize,
    pub ny: usize,
    pub timestamp: Timestamp,
    pub values: Vec<f64>,
    pub labels: Vec<FwiClass>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RasterFrame {
    Grid(RasterGrid),
    /// No events at this timestamp.
    Gap { timestamp: Timestamp },
}

impl RasterFrame {
    pub fn timestamp(&self) -> Timestamp {
        match self {
            RasterFrame::Grid(g) => g.timestamp,
            RasterFrame::Gap { timestamp } => *timestamp,
        }
    }
}

fn ordinal_class(value: f64) -> FwiClass {
    let o = value.round().clamp(1.0, 15.0) as u8;
    FwiClass::from_ordinal(o).expect("clamped to 1..=15")
}

#[allow(clippy::too_many_arguments)]
pub fn raster_from_samples(
    samples: &[Sample<f64>],
    timestamp: Timestamp,
    bbox: BoundingBox,
    nx: usize,
    ny: usize,
    mode: InterpolationMode,
    bands: &ClassBands<f64>,
    cfg: &IdwConfig<f64>,
) -> Result<RasterGrid, IdwError> {
    if nx == 0 || ny == 0 {
        return Err(IdwError::EmptyGrid);
    }
    let mut values = Vec::with_capacity(nx * ny);
    let mut labels = Vec::with_capacity(nx * ny);
    for row in 0..ny {
        for col in 0..nx {
            let v = idw_estimate(samples, bbox.cell_center(nx, ny, row, col), cfg)?;
            let label = match mode {
                InterpolationMode::Ordinal => ordinal_class(v),
                InterpolationMode::Score => bands.classify(v.max(bands.lowest()))?,
            };
            values.push(v);
            labels.push(label);
        }
    }
    Ok(RasterGrid { bbox, nx, ny, timestamp, values, labels })
}

/// Interpolates class ordinals of `events` (all at `timestamp`) over `bbox`.
#[allow(clippy::too_many_arguments)]
pub fn raster_frame(
    timestamp: Timestamp,
    events: &[FwiEvent],
    nodes: &NodeRegistry,
    bbox: BoundingBox,
    nx: usize,
    ny: usize,
    bands: &ClassBands<f64>,
    cfg: &IdwConfig<f64>,
) -> Result<RasterFrame, IdwError> {
    if events.is_empty() {
        return Ok(RasterFrame::Gap { timestamp });
    }
    let samples = events
        .iter()
        .map(|e| {
            if e.time != timestamp {
                return Err(IdwError::MixedTimestamps);
            }
            let location = nodes
                .get(&e.node_id)
                .ok_or_else(|| IdwError::UnknownNode(e.node_id.clone()))?;
            Ok(Sample { location, value: f64::from(e.class.ordinal()) })
        })
        .collect::<Result<Vec<_>, _>>()?;
    raster_from_samples(&samples, timestamp, bbox, nx, ny, InterpolationMode::Ordinal, bands, cfg)
        .map(RasterFrame::Grid)
}
