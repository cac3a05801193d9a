use std::collections::BTreeMap;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{NodeRegistry, Observation};
use crate::domain::{floor_to_slot, PropertyMap};
use crate::idw::DEFAULT_EARTH_RADIUS_KM;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CleanError {
    #[error("observation references unregistered node {0:?}")]
    UnknownNode(String),
    #[error("invalid cleaning configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutlierPolicy {
    /// Remove outliers from the cleaned stream.
    #[default]
    Drop,
    /// Report outliers but keep them in the stream.
    Flag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleanConfig {
    /// Inclusive plausible `(min, max)` per property.
    pub physical_range: PropertyMap<(f64, f64)>,
    /// Number of nearest other nodes whose contemporaneous readings form the
    /// reference median.
    pub neighbor_count: usize,
    /// Maximum tolerated `|value - neighbour median|` per property.
    pub residual_threshold: PropertyMap<f64>,
    pub policy: OutlierPolicy,
}

impl Default for CleanConfig {
    fn default() -> Self {
        Self {
            physical_range: PropertyMap {
                air_temperature: (-10.0, 60.0),
                relative_humidity: (0.0, 100.0),
                wind_speed: (0.0, 75.0),
            },
            neighbor_count: 3,
            residual_threshold: PropertyMap {
                air_temperature: 5.0,
                relative_humidity: 20.0,
                wind_speed: 8.0,
            },
            policy: OutlierPolicy::Drop,
        }
    }
}

impl CleanConfig {
    pub fn validate(&self) -> Result<(), CleanError> {
        for p in crate::PropertyKind::ALL {
            let (lo, hi) = *self.physical_range.get(p);
            if !(lo < hi) {
                return Err(CleanError::InvalidConfig(format!("{p}: range min must be below max")));
            }
            let t = *self.residual_threshold.get(p);
            if !(t > 0.0 && t.is_finite()) {
                return Err(CleanError::InvalidConfig(format!("{p}: threshold must be positive")));
            }
        }
        if self.neighbor_count == 0 {
            return Err(CleanError::InvalidConfig("neighbor_count must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutlierReason {
    Range,
    NeighborResidual,
}

impl OutlierReason {
    pub fn as_str(self) -> &'static str {
        match self {
            OutlierReason::Range => "range",
            OutlierReason::NeighborResidual => "neighbor_residual",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierEntry {
    pub observation: Observation,
    pub reason: OutlierReason,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OutlierReport {
    pub entries: Vec<OutlierEntry>,
    pub counts: BTreeMap<OutlierReason, usize>,
}

impl OutlierReport {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, reason: OutlierReason) -> usize {
        self.counts.get(&reason).copied().unwrap_or(0)
    }

    /// `time, property, sensor, node, value, reason` rows with a header; times
    /// are UTC RFC 3339.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time,property,sensor,node,value,reason\n");
        for e in &self.entries {
            let o = &e.observation;
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                o.time.format("%Y-%m-%dT%H:%M:%SZ"),
                o.property,
                o.sensor_id,
                o.node_id,
                o.value,
                e.reason.as_str()
            ));
        }
        out
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Removes readings outside the physical range, then repeatedly removes
/// readings that deviate from the median of the `k` nearest other nodes'
/// readings in the same 10-minute slot, until no reading is flagged.
///
/// Readings whose node has fewer than `k` contemporaneous neighbours skip the
/// neighbour test. Iterating to a fixed point makes the result idempotent.
pub fn clean_stream(
    obs: &[Observation],
    nodes: &NodeRegistry,
    cfg: &CleanConfig,
) -> Result<(Vec<Observation>, OutlierReport), CleanError> {
    cfg.validate()?;
    let node_index: FxHashMap<&str, usize> = nodes.iter().enumerate().map(|(i, (id, _))| (id, i)).collect();
    let node_of: Vec<usize> = obs
        .iter()
        .map(|o| {
            node_index
                .get(o.node_id.as_str())
                .copied()
                .ok_or_else(|| CleanError::UnknownNode(o.node_id.clone()))
        })
        .collect::<Result<_, _>>()?;
    let neighbors: Vec<Vec<usize>> = nodes
        .iter()
        .map(|(id, _)| {
            nodes
                .neighbors_by_distance(id, DEFAULT_EARTH_RADIUS_KM)
                .into_iter()
                .map(|(other, _)| node_index[other])
                .collect()
        })
        .collect();
    let slot_of: Vec<i64> = obs.iter().map(|o| floor_to_slot(o.time).timestamp()).collect();

    let mut verdict: Vec<Option<OutlierReason>> = obs
        .iter()
        .map(|o| {
            let (lo, hi) = *cfg.physical_range.get(o.property);
            (!(lo..=hi).contains(&o.value)).then_some(OutlierReason::Range)
        })
        .collect();

    let k = cfg.neighbor_count;
    let mut reference = Vec::with_capacity(k);
    loop {
        let mut slot_values: FxHashMap<(i64, usize, usize), f64> = FxHashMap::default();
        for (i, o) in obs.iter().enumerate() {
            if verdict[i].is_none() {
                slot_values.entry((slot_of[i], o.property.index(), node_of[i])).or_insert(o.value);
            }
        }
        let mut flagged = Vec::new();
        for (i, o) in obs.iter().enumerate() {
            if verdict[i].is_some() {
                continue;
            }
            reference.clear();
            for &nb in &neighbors[node_of[i]] {
                if let Some(v) = slot_values.get(&(slot_of[i], o.property.index(), nb)) {
                    reference.push(*v);
                    if reference.len() == k {
                        break;
                    }
                }
            }
            if reference.len() < k {
                continue;
            }
            if (o.value - median(&mut reference)).abs() > *cfg.residual_threshold.get(o.property) {
                flagged.push(i);
            }
        }
        if flagged.is_empty() {
            break;
        }
        for i in flagged {
            verdict[i] = Some(OutlierReason::NeighborResidual);
        }
    }

    let mut report = OutlierReport::default();
    let mut clean = Vec::with_capacity(obs.len());
    for (o, v) in obs.iter().zip(verdict) {
        match v {
            Some(reason) => {
                *report.counts.entry(reason).or_default() += 1;
                report.entries.push(OutlierEntry { observation: o.clone(), reason });
                if cfg.policy == OutlierPolicy::Flag {
                    clean.push(o.clone());
                }
            }
            None => clean.push(o.clone()),
        }
    }
    Ok((clean, report))
}
