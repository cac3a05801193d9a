//! Great-circle distance, inverse-distance-weighted interpolation and raster
//! frames over a bounding box.

mod distance;
mod interp;
mod raster;

pub use distance::{great_circle_km, DEFAULT_EARTH_RADIUS_KM};
pub use interp::{idw_estimate, IdwConfig, Sample};
pub use raster::{
    raster_frame, raster_from_samples, BoundingBox, InterpolationMode, RasterFrame, RasterGrid,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IdwError {
    #[error("no samples to interpolate")]
    NoSamples,
    #[error("sample value must be finite")]
    NonFiniteSample,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid bounding box: {0}")]
    InvalidBoundingBox(String),
    #[error("grid must have at least one cell in each direction")]
    EmptyGrid,
    #[error("events span more than one timestamp")]
    MixedTimestamps,
    #[error("node {0:?} is not registered")]
    UnknownNode(String),
    #[error(transparent)]
    Domain(#[from] crate::DomainError),
}
