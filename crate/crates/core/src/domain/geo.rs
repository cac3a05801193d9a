use serde::{Deserialize, Serialize};

use super::DomainError;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint<T> {
    pub lat_deg: T,
    pub lon_deg: T,
}

impl<T: Scalar> GeoPoint<T> {
    pub fn new(lat_deg: T, lon_deg: T) -> Result<Self, DomainError> {
        let lat_ok = lat_deg.is_finite() && lat_deg.abs() <= T::lit(90.0);
        let lon_ok = lon_deg.is_finite() && lon_deg.abs() <= T::lit(180.0);
        if lat_ok && lon_ok {
            Ok(Self { lat_deg, lon_deg })
        } else {
            Err(DomainError::InvalidCoordinate {
                lat: lat_deg.to_f64_lossy(),
                lon: lon_deg.to_f64_lossy(),
            })
        }
    }
}
