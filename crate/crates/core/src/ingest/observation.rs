use chrono::{FixedOffset, NaiveDateTime};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{format_local, local_to_utc, PropertyKind, Timestamp};

/// One timestamped sensor reading in its property's canonical unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub time: Timestamp,
    pub property: PropertyKind,
    pub sensor_id: String,
    pub node_id: String,
    pub value: f64,
    pub unit: String,
}

impl Observation {
    pub fn new(
        time: Timestamp,
        property: PropertyKind,
        sensor_id: impl Into<String>,
        node_id: impl Into<String>,
        value: f64,
    ) -> Self {
        Self {
            time,
            property,
            sensor_id: sensor_id.into(),
            node_id: node_id.into(),
            value,
            unit: property.unit().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("expected 6 fields, found {0}")]
    FieldCount(usize),
    #[error("invalid timestamp {0:?}")]
    Timestamp(String),
    #[error("invalid value {0:?}")]
    Value(String),
    #[error("unknown property {0:?}")]
    UnknownProperty(String),
    #[error("unit {unit:?} does not match {property} (expected {expected:?})")]
    UnitMismatch { property: PropertyKind, unit: String, expected: &'static str },
    #[error("invalid {field} identifier {value:?}")]
    Identifier { field: &'static str, value: String },
}

pub(crate) fn valid_identifier(id: &str) -> bool {
    !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

/// Parses `time, property, sensor, node, value, unit`, where `time` is local
/// wall-clock time at `offset`.
pub fn parse_observation_line(
    line: &str,
    line_no: usize,
    offset: FixedOffset,
) -> Result<Observation, ParseError> {
    let err = |kind| ParseError { line: line_no, kind };
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    let [time, property, sensor, node, value, unit] = fields.as_slice() else {
        return Err(err(ParseErrorKind::FieldCount(fields.len())));
    };
    let naive = NaiveDateTime::parse_from_str(time, "%Y-%m-%d %H:%M:%S")
        .map_err(|_| err(ParseErrorKind::Timestamp(time.to_string())))?;
    let property: PropertyKind = property
        .parse()
        .map_err(|_| err(ParseErrorKind::UnknownProperty(property.to_string())))?;
    for (field, id) in [("sensor", sensor), ("node", node)] {
        if !valid_identifier(id) {
            return Err(err(ParseErrorKind::Identifier { field, value: id.to_string() }));
        }
    }
    let value: f64 = value
        .parse()
        .ok()
        .filter(|v: &f64| v.is_finite())
        .ok_or_else(|| err(ParseErrorKind::Value(value.to_string())))?;
    if *unit != property.unit() {
        return Err(err(ParseErrorKind::UnitMismatch {
            property,
            unit: unit.to_string(),
            expected: property.unit(),
        }));
    }
    Ok(Observation {
        time: local_to_utc(naive, offset),
        property,
        sensor_id: sensor.to_string(),
        node_id: node.to_string(),
        value,
        unit: unit.to_string(),
    })
}

/// Parses a header-less CSV document, skipping blank lines. Line numbers in
/// errors are 1-based.
pub fn parse_observations(text: &str, offset: FixedOffset) -> Result<Vec<Observation>, ParseError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_observation_line(l, i + 1, offset))
        .collect()
}

/// Canonical record form: fields joined by `", "`.
pub fn format_observation_line(obs: &Observation, offset: FixedOffset) -> String {
    format!(
        "{}, {}, {}, {}, {}, {}",
        format_local(obs.time, offset),
        obs.property.name(),
        obs.sensor_id,
        obs.node_id,
        obs.value,
        obs.unit
    )
}

pub fn write_observations<'a>(
    obs: impl IntoIterator<Item = &'a Observation>,
    offset: FixedOffset,
) -> String {
    let mut out = String::new();
    for o in obs {
        out.push_str(&format_observation_line(o, offset));
        out.push('\n');
    }
    out
}
