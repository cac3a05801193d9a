//! Fire-weather index engine.
//!
//! Weather observations (air temperature, relative humidity, wind speed) are
//! cleaned, converted to triples and stored in property-partitioned
//! repositories indexed by a time-range catalog. CONSTRUCT rules classify each
//! `(node, 10-minute slot)` into one of fifteen fire-weather classes, lazily and
//! with a persistent result cache, and point results are interpolated into
//! rasters by inverse distance weighting.
//!
//! The numeric kernels ([`domain`] bands and units, [`ffdi`], [`idw`]) are
//! generic over [`Scalar`]; the aliases at the crate root pin them to `f64`,
//! which is what the store and rule engine use.

// Validation writes `!(a < b)` on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod domain;
pub mod ffdi;
pub mod idw;
pub mod infer;
pub mod ingest;
pub mod rules;
mod scalar;
pub mod store;

pub use scalar::Scalar;

pub use domain::{
    DomainError, FwiClass, MajorClass, PropertyKind, PropertyMap, SubLevel, TimeRange, Timestamp,
};

/// Geographic point in decimal degrees.
pub type GeoPoint = domain::GeoPoint<f64>;
/// Score-to-class band layout.
pub type ClassBands = domain::ClassBands<f64>;
/// Inputs to the McArthur forest fire danger index.
pub type FfdiInput = ffdi::FfdiInput<f64>;
/// Inverse-distance-weighting parameters.
pub type IdwConfig = idw::IdwConfig<f64>;
/// One located value fed to the interpolator.
pub type Sample = idw::Sample<f64>;
