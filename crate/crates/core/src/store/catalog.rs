use std::fmt;
use std::str::FromStr;

use chrono::SecondsFormat;
use serde::{Deserialize, Serialize};

use super::term::Iri;
use crate::domain::{PropertyKind, TimeRange, Timestamp};

/// Sub-repository identifier.
///
/// `Weather` exists only in the single-repository layout, where all three
/// weather properties share one undivided repository.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepositoryId {
    AirTemperature,
    RelativeHumidity,
    WindSpeed,
    Fwi,
    Weather,
}

impl RepositoryId {
    pub fn name(self) -> &'static str {
        match self {
            RepositoryId::AirTemperature => "air_temperature",
            RepositoryId::RelativeHumidity => "relative_humidity",
            RepositoryId::WindSpeed => "wind_speed",
            RepositoryId::Fwi => "fwi",
            RepositoryId::Weather => "weather",
        }
    }

    pub fn for_property(kind: PropertyKind) -> Self {
        match kind {
            PropertyKind::AirTemperature => RepositoryId::AirTemperature,
            PropertyKind::RelativeHumidity => RepositoryId::RelativeHumidity,
            PropertyKind::WindSpeed => RepositoryId::WindSpeed,
        }
    }
}

impl fmt::Display for RepositoryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RepositoryId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            RepositoryId::AirTemperature,
            RepositoryId::RelativeHumidity,
            RepositoryId::WindSpeed,
            RepositoryId::Fwi,
            RepositoryId::Weather,
        ]
        .into_iter()
        .find(|r| r.name() == s)
        .ok_or_else(|| format!("unknown repository {s:?}"))
    }
}

/// How weather graphs are distributed over repositories.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StoreLayout {
    /// One repository per weather property plus the FWI repository.
    #[default]
    Partitioned,
    /// All weather graphs in one repository plus the FWI repository.
    Single,
}

impl StoreLayout {
    pub fn name(self) -> &'static str {
        match self {
            StoreLayout::Partitioned => "partitioned",
            StoreLayout::Single => "single",
        }
    }

    pub fn repositories(self) -> &'static [RepositoryId] {
        match self {
            StoreLayout::Partitioned => &[
                RepositoryId::AirTemperature,
                RepositoryId::RelativeHumidity,
                RepositoryId::WindSpeed,
                RepositoryId::Fwi,
            ],
            StoreLayout::Single => &[RepositoryId::Weather, RepositoryId::Fwi],
        }
    }

    pub fn weather_repositories(self) -> &'static [RepositoryId] {
        let all = self.repositories();
        &all[..all.len() - 1]
    }

    pub fn route(self, property: CatalogProperty) -> RepositoryId {
        match (self, property) {
            (_, CatalogProperty::Fwi) => RepositoryId::Fwi,
            (StoreLayout::Partitioned, CatalogProperty::Observation(k)) => RepositoryId::for_property(k),
            (StoreLayout::Single, CatalogProperty::Observation(_)) => RepositoryId::Weather,
        }
    }
}

impl fmt::Display for StoreLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StoreLayout {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "partitioned" | "multi" => Ok(StoreLayout::Partitioned),
            "single" => Ok(StoreLayout::Single),
            _ => Err(format!("unknown layout {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatalogProperty {
    Observation(PropertyKind),
    Fwi,
}

impl CatalogProperty {
    pub fn name(self) -> &'static str {
        match self {
            CatalogProperty::Observation(k) => k.name(),
            CatalogProperty::Fwi => "fwi",
        }
    }
}

impl fmt::Display for CatalogProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CatalogProperty {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "fwi" {
            return Ok(CatalogProperty::Fwi);
        }
        s.parse::<PropertyKind>().map(CatalogProperty::Observation).map_err(|e| e.to_string())
    }
}

/// Where a graph lives and which sampling times it spans (both ends inclusive).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CatalogEntry {
    pub repository_id: RepositoryId,
    pub context: Iri,
    pub min_time: Timestamp,
    pub max_time: Timestamp,
    pub property: CatalogProperty,
}

impl CatalogEntry {
    pub fn intersects(&self, range: &TimeRange) -> bool {
        range.intersects_closed(self.min_time, self.max_time)
    }

    pub(crate) fn to_tsv(&self) -> String {
        let ts = |t: Timestamp| t.to_rfc3339_opts(SecondsFormat::AutoSi, true);
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.repository_id,
            self.context.as_str(),
            ts(self.min_time),
            ts(self.max_time),
            self.property
        )
    }

    pub(crate) fn from_tsv(line: &str) -> Result<Self, String> {
        let fields: Vec<&str> = line.split('\t').collect();
        let [repo, context, min, max, property] = fields.as_slice() else {
            return Err(format!("expected 5 fields, found {}", fields.len()));
        };
        let time = |s: &str| s.parse::<Timestamp>().map_err(|e| format!("bad time {s:?}: {e}"));
        let entry = CatalogEntry {
            repository_id: repo.parse()?,
            context: Iri::new(*context).map_err(|e| e.to_string())?,
            min_time: time(min)?,
            max_time: time(max)?,
            property: property.parse()?,
        };
        if entry.min_time > entry.max_time {
            return Err("min_time after max_time".into());
        }
        Ok(entry)
    }
}
