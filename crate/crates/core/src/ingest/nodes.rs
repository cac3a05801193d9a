use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::observation::valid_identifier;
use crate::domain::GeoPoint;
use crate::idw::great_circle_km;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NodeRegistryError {
    #[error("duplicate node {0:?}")]
    Duplicate(String),
    #[error("invalid node identifier {0:?}")]
    InvalidId(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Sensor node locations keyed by node id.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeRegistry {
    nodes: BTreeMap<String, GeoPoint<f64>>,
}

impl NodeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: impl Into<String>, location: GeoPoint<f64>) -> Result<(), NodeRegistryError> {
        let id = id.into();
        if !valid_identifier(&id) {
            return Err(NodeRegistryError::InvalidId(id));
        }
        if self.nodes.contains_key(&id) {
            return Err(NodeRegistryError::Duplicate(id));
        }
        self.nodes.insert(id, location);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<GeoPoint<f64>> {
        self.nodes.get(id).copied()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes in id order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, GeoPoint<f64>)> {
        self.nodes.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Other nodes ordered by distance from `id`, ties broken by id.
    pub fn neighbors_by_distance(&self, id: &str, radius_km: f64) -> Vec<(&str, f64)> {
        let Some(origin) = self.get(id) else {
            return Vec::new();
        };
        let mut out: Vec<(&str, f64)> = self
            .iter()
            .filter(|(other, _)| *other != id)
            .map(|(other, p)| (other, great_circle_km(origin, p, radius_km)))
            .collect();
        out.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(b.0)));
        out
    }

    /// `n` nodes laid out on a jittered grid inside the study region
    /// (28.2205-28.2375 S, 153.2667-153.2786 E). Node ids are `SN_1` .. `SN_n`.
    pub fn study_region(n: usize) -> Self {
        const SOUTH: f64 = -28.2375;
        const NORTH: f64 = -28.2205;
        const WEST: f64 = 153.2667;
        const EAST: f64 = 153.2786;
        let cols = (n as f64).sqrt().ceil().max(1.0) as usize;
        let rows = n.div_ceil(cols).max(1);
        let mut reg = Self::new();
        for i in 0..n {
            let (r, c) = (i / cols, i % cols);
            // Fixed stagger so nodes never sit on a perfect lattice.
            let jitter = ((i * 7) % 5) as f64 / 20.0 - 0.1;
            let lat = SOUTH + (NORTH - SOUTH) * ((r as f64 + 0.5 + jitter) / rows as f64);
            let lon = WEST + (EAST - WEST) * ((c as f64 + 0.5 - jitter) / cols as f64);
            reg.insert(format!("SN_{}", i + 1), GeoPoint::new(lat, lon).expect("inside region"))
                .expect("unique generated ids");
        }
        reg
    }

    /// Reads `node_id,lat,lon` lines. A header starting with `node` and `#`
    /// comments are skipped.
    pub fn from_csv(text: &str) -> Result<Self, NodeRegistryError> {
        let mut reg = Self::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || (i == 0 && line.starts_with("node")) {
                continue;
            }
            let err = |message: String| NodeRegistryError::Parse { line: i + 1, message };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let [id, lat, lon] = fields.as_slice() else {
                return Err(err(format!("expected 3 fields, found {}", fields.len())));
            };
            let lat: f64 = lat.parse().map_err(|_| err(format!("invalid latitude {lat:?}")))?;
            let lon: f64 = lon.parse().map_err(|_| err(format!("invalid longitude {lon:?}")))?;
            let point = GeoPoint::new(lat, lon).map_err(|e| err(e.to_string()))?;
            reg.insert(*id, point)?;
        }
        Ok(reg)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("node_id,lat,lon\n");
        for (id, p) in self.iter() {
            out.push_str(&format!("{id},{},{}\n", p.lat_deg, p.lon_deg));
        }
        out
    }
}
