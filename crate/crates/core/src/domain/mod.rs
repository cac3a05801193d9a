//! Shared value types: points, time ranges, property kinds, the fifteen-level
//! class lattice and its numeric bands, and unit conversions.

mod bands;
mod class;
mod geo;
mod property;
mod time;
mod units;

pub use bands::{class_from_score, ClassBands};
pub use class::{FwiClass, MajorClass, SubLevel};
pub use geo::GeoPoint;
pub use property::{PropertyKind, PropertyMap};
pub use time::{
    ceil_to_slot, default_utc_offset, floor_to_slot, format_local, parse_utc_offset, slot_duration,
    TimeRange, Timestamp, SLOT_MINUTES,
};
pub use units::mps_to_kmh;
pub(crate) use time::local_to_utc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("{what} must be finite")]
    NonFinite { what: &'static str },
    #[error("score {score} is below the lowest band edge {lowest}")]
    ScoreBelowRange { score: f64, lowest: f64 },
    #[error("invalid class bands: {0}")]
    InvalidBands(String),
    #[error("speed must be non-negative, got {0}")]
    NegativeSpeed(f64),
    #[error("coordinate out of range: lat {lat}, lon {lon}")]
    InvalidCoordinate { lat: f64, lon: f64 },
    #[error("time range is empty: {start} >= {end}")]
    EmptyTimeRange { start: Timestamp, end: Timestamp },
    #[error("unknown class label {0:?}")]
    UnknownLabel(String),
    #[error("unknown property {0:?}")]
    UnknownProperty(String),
    #[error("invalid UTC offset {0:?}")]
    InvalidOffset(String),
}
