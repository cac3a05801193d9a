use std::f64::consts::PI;

use chrono::{Datelike, FixedOffset, Timelike};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use super::{write_observations, NodeRegistry, Observation};
use crate::domain::{default_utc_offset, PropertyKind, TimeRange, Timestamp};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("node registry is empty")]
    EmptyRegistry,
    #[error("fault rate must lie in [0, 1), got {0}")]
    InvalidFaultRate(f64),
}

/// A generated reading and whether it was replaced by a gross outlier.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticRecord {
    pub observation: Observation,
    pub injected: bool,
}

/// Seeded generator of 10-minute weather records for a set of nodes.
///
/// Each property is a diurnal cycle peaking mid-afternoon local time, plus a
/// smoothly varying day-to-day anomaly shared by all nodes (hot days are
/// drier), a small fixed per-node offset and Gaussian noise. A `fault_rate`
/// fraction of records is replaced by gross outliers displaced by 5-8 times
/// the default cleaning threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticWeather {
    seed: u64,
    fault_rate: f64,
    utc_offset: FixedOffset,
}

struct DayAnomaly {
    temperature: f64,
    humidity: f64,
    wind: f64,
}

struct NodeOffset {
    sensor_index: usize,
    temperature: f64,
    humidity: f64,
    wind: f64,
}

impl SyntheticWeather {
    pub fn new(seed: u64, fault_rate: f64) -> Result<Self, SynthError> {
        if !(0.0..1.0).contains(&fault_rate) {
            return Err(SynthError::InvalidFaultRate(fault_rate));
        }
        Ok(Self { seed, fault_rate, utc_offset: default_utc_offset() })
    }

    pub fn with_utc_offset(mut self, offset: FixedOffset) -> Self {
        self.utc_offset = offset;
        self
    }

    pub fn utc_offset(&self) -> FixedOffset {
        self.utc_offset
    }

    fn day_anomaly(&self, day: i64) -> DayAnomaly {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ (day as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let n = |sd: f64, rng: &mut ChaCha8Rng| Normal::new(0.0, sd).expect("positive sd").sample(rng);
        let temperature = n(3.0, &mut rng);
        let humidity = -2.0 * temperature + n(6.0, &mut rng);
        let wind = n(1.5, &mut rng);
        DayAnomaly { temperature, humidity, wind }
    }

    fn node_offset(&self, index: usize) -> NodeOffset {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.rotate_left(17) ^ (index as u64 + 1));
        NodeOffset {
            sensor_index: index + 1,
            temperature: rng.random_range(-0.8..0.8),
            humidity: rng.random_range(-3.0..3.0),
            wind: rng.random_range(-0.6..0.6),
        }
    }

    /// Anomaly at local time `t`, interpolated between consecutive days.
    fn anomaly_at(&self, t: Timestamp) -> (f64, f64, f64) {
        let local = t.with_timezone(&self.utc_offset);
        let day = local.date_naive().num_days_from_ce() as i64;
        let frac = f64::from(local.num_seconds_from_midnight()) / 86_400.0;
        let (a, b) = (self.day_anomaly(day), self.day_anomaly(day + 1));
        let lerp = |x: f64, y: f64| x * (1.0 - frac) + y * frac;
        (
            lerp(a.temperature, b.temperature),
            lerp(a.humidity, b.humidity),
            lerp(a.wind, b.wind),
        )
    }

    pub fn observations(
        &self,
        nodes: &NodeRegistry,
        range: &TimeRange,
    ) -> Result<Vec<SyntheticRecord>, SynthError> {
        if nodes.is_empty() {
            return Err(SynthError::EmptyRegistry);
        }
        let offsets: Vec<NodeOffset> = (0..nodes.len()).map(|i| self.node_offset(i)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let noise_t = Normal::new(0.0, 0.3).expect("positive sd");
        let noise_h = Normal::new(0.0, 1.5).expect("positive sd");
        let noise_w = Normal::new(0.0, 0.4).expect("positive sd");
        let round1 = |v: f64| (v * 10.0).round() / 10.0;

        let mut out = Vec::new();
        for t in range.slots() {
            let local = t.with_timezone(&self.utc_offset);
            let hour = f64::from(local.num_seconds_from_midnight()) / 3600.0;
            let cycle = (2.0 * PI * (hour - 15.0) / 24.0).cos();
            let (at, ah, aw) = self.anomaly_at(t);
            for ((node_id, _), off) in nodes.iter().zip(&offsets) {
                for property in PropertyKind::ALL {
                    let (clean, prefix) = match property {
                        PropertyKind::AirTemperature => (
                            (26.0 + 6.5 * cycle + at + off.temperature + noise_t.sample(&mut rng)).clamp(1.0, 44.0),
                            "AT",
                        ),
                        PropertyKind::RelativeHumidity => (
                            (62.0 - 20.0 * cycle + ah + off.humidity + noise_h.sample(&mut rng)).clamp(5.0, 100.0),
                            "RH",
                        ),
                        PropertyKind::WindSpeed => (
                            (4.5 + 2.5 * cycle + aw + off.wind + noise_w.sample(&mut rng)).clamp(0.2, 24.0),
                            "WS",
                        ),
                    };
                    let injected = rng.random::<f64>() < self.fault_rate;
                    let value = if injected {
                        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                        match property {
                            PropertyKind::AirTemperature => clean + sign * rng.random_range(25.0..40.0),
                            PropertyKind::RelativeHumidity => clean + sign * rng.random_range(100.0..160.0),
                            PropertyKind::WindSpeed => clean + rng.random_range(40.0..64.0),
                        }
                    } else {
                        clean
                    };
                    out.push(SyntheticRecord {
                        observation: Observation::new(
                            t,
                            property,
                            format!("{prefix}_{}", off.sensor_index),
                            node_id,
                            round1(value),
                        ),
                        injected,
                    });
                }
            }
        }
        Ok(out)
    }

    /// Records rendered as observation CSV in local time.
    pub fn csv(&self, nodes: &NodeRegistry, range: &TimeRange) -> Result<String, SynthError> {
        let records = self.observations(nodes, range)?;
        Ok(write_observations(records.iter().map(|r| &r.observation), self.utc_offset))
    }
}

/// CSV text for `nodes` over `range`, local time at the study-region offset.
pub fn generate_synthetic_stream(
    nodes: &NodeRegistry,
    range: &TimeRange,
    seed: u64,
    fault_rate: f64,
) -> Result<String, SynthError> {
    SyntheticWeather::new(seed, fault_rate)?.csv(nodes, range)
}
