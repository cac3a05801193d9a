use serde::{Deserialize, Serialize};

use super::distance::{great_circle_km, DEFAULT_EARTH_RADIUS_KM};
use super::IdwError;
use crate::domain::GeoPoint;
use crate::Scalar;

/// A located value, e.g. a node's class ordinal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct Sample<T> {
    pub location: GeoPoint<T>,
    pub value: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct IdwConfig<T> {
    pub power: T,
    pub earth_radius_km: T,
    /// Samples closer than this to the target are returned verbatim.
    pub snap_epsilon_km: T,
}

impl<T: Scalar> Default for IdwConfig<T> {
    fn default() -> Self {
        Self {
            power: T::lit(2.0),
            earth_radius_km: T::lit(DEFAULT_EARTH_RADIUS_KM),
            snap_epsilon_km: T::lit(1e-6),
        }
    }
}

impl<T: Scalar> IdwConfig<T> {
    pub fn validate(&self) -> Result<(), IdwError> {
        if !(self.power.is_finite() && self.power > T::zero()) {
            return Err(IdwError::InvalidConfig("power must be positive".into()));
        }
        if !(self.earth_radius_km.is_finite() && self.earth_radius_km > T::zero()) {
            return Err(IdwError::InvalidConfig("earth radius must be positive".into()));
        }
        if !(self.snap_epsilon_km >= T::zero()) {
            return Err(IdwError::InvalidConfig("snap epsilon must be non-negative".into()));
        }
        Ok(())
    }
}

/// Normalised `1 / d^p` weighted mean of `samples` at `target`.
///
/// A sample within `snap_epsilon_km` of the target short-circuits to that
/// sample's value; the first such sample in input order wins.
pub fn idw_estimate<T: Scalar>(
    samples: &[Sample<T>],
    target: GeoPoint<T>,
    cfg: &IdwConfig<T>,
) -> Result<T, IdwError> {
    cfg.validate()?;
    if samples.is_empty() {
        return Err(IdwError::NoSamples);
    }
    let mut weighted = T::zero();
    let mut total = T::zero();
    for s in samples {
        if !s.value.is_finite() {
            return Err(IdwError::NonFiniteSample);
        }
        let d = great_circle_km(s.location, target, cfg.earth_radius_km);
        if d <= cfg.snap_epsilon_km {
            return Ok(s.value);
        }
        let w = d.powf(cfg.power).recip();
        weighted = weighted + w * s.value;
        total = total + w;
    }
    let estimate = weighted / total;
    // Rounding can nudge a convex combination a hair outside its hull.
    let (lo, hi) = samples
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), s| (lo.min(s.value), hi.max(s.value)));
    Ok(estimate.max(lo).min(hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(lat: f64, lon: f64) -> GeoPoint<f64> {
        GeoPoint::new(lat, lon).unwrap()
    }

    #[test]
    fn single_sample_is_identity() {
        let s = [Sample { location: p(-28.23, 153.27), value: 7.0 }];
        for target in [p(0.0, 0.0), p(-28.0, 153.0), p(45.0, -120.0)] {
            assert_eq!(idw_estimate(&s, target, &IdwConfig::default()).unwrap(), 7.0);
        }
    }

    #[test]
    fn equidistant_samples_average() {
        let s = [
            Sample { location: p(0.0, -1.0), value: 3.0 },
            Sample { location: p(0.0, 1.0), value: 9.0 },
        ];
        let v = idw_estimate(&s, p(0.0, 0.0), &IdwConfig::default()).unwrap();
        assert!((v - 6.0).abs() < 1e-12);
    }

    #[test]
    fn empty_is_an_error() {
        assert_eq!(
            idw_estimate::<f64>(&[], p(0.0, 0.0), &IdwConfig::default()),
            Err(IdwError::NoSamples)
        );
    }

    #[test]
    fn snaps_onto_coincident_sample() {
        let s = [
            Sample { location: p(1.0, 1.0), value: 4.0 },
            Sample { location: p(2.0, 2.0), value: 12.0 },
        ];
        assert_eq!(idw_estimate(&s, p(2.0, 2.0), &IdwConfig::default()).unwrap(), 12.0);
    }

    #[test]
    fn rejects_bad_config() {
        let s = [Sample { location: p(1.0, 1.0), value: 4.0 }];
        let cfg = IdwConfig { power: 0.0, ..IdwConfig::default() };
        assert!(idw_estimate(&s, p(0.0, 0.0), &cfg).is_err());
        let cfg = IdwConfig { earth_radius_km: -1.0, ..IdwConfig::default() };
        assert!(idw_estimate(&s, p(0.0, 0.0), &cfg).is_err());
    }
}
