use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::DomainError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MajorClass {
    Low,
    Moderate,
    High,
    VeryHigh,
    Extreme,
}

impl MajorClass {
    pub const ALL: [MajorClass; 5] = [
        MajorClass::Low,
        MajorClass::Moderate,
        MajorClass::High,
        MajorClass::VeryHigh,
        MajorClass::Extreme,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            MajorClass::Low => "low",
            MajorClass::Moderate => "moderate",
            MajorClass::High => "high",
            MajorClass::VeryHigh => "very high",
            MajorClass::Extreme => "extreme",
        }
    }

    /// Local name in the class vocabulary, e.g. `VeryHigh`.
    pub fn iri_local(self) -> &'static str {
        match self {
            MajorClass::Low => "Low",
            MajorClass::Moderate => "Moderate",
            MajorClass::High => "High",
            MajorClass::VeryHigh => "VeryHigh",
            MajorClass::Extreme => "Extreme",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubLevel {
    Min,
    Mid,
    Max,
}

impl SubLevel {
    pub const ALL: [SubLevel; 3] = [SubLevel::Min, SubLevel::Mid, SubLevel::Max];

    pub fn index(self) -> usize {
        self as usize
    }

    fn iri_prefix(self) -> &'static str {
        match self {
            SubLevel::Min => "Min",
            SubLevel::Mid => "Mid",
            SubLevel::Max => "Max",
        }
    }
}

/// One of the fifteen ordered fire-weather classes.
///
/// Ordering follows the ordinal: `Min-Low` (1) < `Mid-Low` (2) < ... <
/// `Max-Extreme` (15).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FwiClass {
    major: MajorClass,
    sub: SubLevel,
}

const LABELS: [&str; 15] = [
    "low-",
    "low",
    "low+",
    "moderate-",
    "moderate",
    "moderate+",
    "high-",
    "high",
    "high+",
    "very high-",
    "very high",
    "very high+",
    "extreme-",
    "extreme",
    "extreme+",
];

impl FwiClass {
    pub const fn new(major: MajorClass, sub: SubLevel) -> Self {
        Self { major, sub }
    }

    /// All fifteen classes in ordinal order.
    pub fn all() -> impl Iterator<Item = FwiClass> {
        (1..=15).map(|o| FwiClass::from_ordinal(o).expect("ordinal in 1..=15"))
    }

    pub fn major(self) -> MajorClass {
        self.major
    }

    pub fn sub(self) -> SubLevel {
        self.sub
    }

    pub fn ordinal(self) -> u8 {
        (3 * self.major.index() + self.sub.index() + 1) as u8
    }

    pub fn from_ordinal(ordinal: u8) -> Option<Self> {
        if !(1..=15).contains(&ordinal) {
            return None;
        }
        let i = (ordinal - 1) as usize;
        Some(Self::new(MajorClass::ALL[i / 3], SubLevel::ALL[i % 3]))
    }

    pub fn label(self) -> &'static str {
        LABELS[(self.ordinal() - 1) as usize]
    }

    pub fn parse_label(label: &str) -> Result<Self, DomainError> {
        LABELS
            .iter()
            .position(|l| *l == label)
            .and_then(|i| Self::from_ordinal(i as u8 + 1))
            .ok_or_else(|| DomainError::UnknownLabel(label.to_string()))
    }

    /// Local name in the class vocabulary, e.g. `Min-VeryHigh`.
    pub fn iri_local(self) -> String {
        format!("{}-{}", self.sub.iri_prefix(), self.major.iri_local())
    }

    /// Inverse of [`FwiClass::iri_local`]. A bare major name (`High`) is the
    /// major's middle sub-level.
    pub fn from_iri_local(local: &str) -> Option<Self> {
        let (sub, major) = match local.split_once('-') {
            Some((s, m)) => {
                let sub = SubLevel::ALL.into_iter().find(|l| l.iri_prefix() == s)?;
                (sub, m)
            }
            None => (SubLevel::Mid, local),
        };
        let major = MajorClass::ALL.into_iter().find(|c| c.iri_local() == major)?;
        Some(Self::new(major, sub))
    }
}

impl fmt::Display for FwiClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for FwiClass {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_label(s)
    }
}

impl Serialize for FwiClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for FwiClass {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Self::parse_label(&s).map_err(serde::de::Error::custom)
    }
}
