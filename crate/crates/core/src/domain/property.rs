use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::DomainError;

/// Weather variable observed by the sensor network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyKind {
    AirTemperature,
    RelativeHumidity,
    WindSpeed,
}

impl PropertyKind {
    pub const ALL: [PropertyKind; 3] = [
        PropertyKind::AirTemperature,
        PropertyKind::RelativeHumidity,
        PropertyKind::WindSpeed,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Name used in CSV records and in the climate-variable vocabulary.
    pub fn name(self) -> &'static str {
        match self {
            PropertyKind::AirTemperature => "air_temperature",
            PropertyKind::RelativeHumidity => "relative_humidity",
            PropertyKind::WindSpeed => "wind_speed",
        }
    }

    /// Canonical unit symbol.
    pub fn unit(self) -> &'static str {
        match self {
            PropertyKind::AirTemperature => "°C",
            PropertyKind::RelativeHumidity => "%",
            PropertyKind::WindSpeed => "m/s",
        }
    }

    /// Local name of the canonical unit in the unit vocabulary.
    pub fn unit_local(self) -> &'static str {
        match self {
            PropertyKind::AirTemperature => "degreeCelsius",
            PropertyKind::RelativeHumidity => "percent",
            PropertyKind::WindSpeed => "meterPerSecond",
        }
    }
}

impl fmt::Display for PropertyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PropertyKind {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| DomainError::UnknownProperty(s.to_string()))
    }
}

/// One value per property kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropertyMap<T> {
    pub air_temperature: T,
    pub relative_humidity: T,
    pub wind_speed: T,
}

impl<T> PropertyMap<T> {
    pub fn get(&self, kind: PropertyKind) -> &T {
        match kind {
            PropertyKind::AirTemperature => &self.air_temperature,
            PropertyKind::RelativeHumidity => &self.relative_humidity,
            PropertyKind::WindSpeed => &self.wind_speed,
        }
    }

    pub fn get_mut(&mut self, kind: PropertyKind) -> &mut T {
        match kind {
            PropertyKind::AirTemperature => &mut self.air_temperature,
            PropertyKind::RelativeHumidity => &mut self.relative_humidity,
            PropertyKind::WindSpeed => &mut self.wind_speed,
        }
    }
}
