use chrono::{DateTime, Duration, FixedOffset, NaiveDateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};

use super::DomainError;

pub type Timestamp = DateTime<Utc>;

/// Sampling interval of the sensor network.
pub const SLOT_MINUTES: i64 = 10;

pub fn slot_duration() -> Duration {
    Duration::minutes(SLOT_MINUTES)
}

/// Fixed offset of the study region (AEST, +10:00).
pub fn default_utc_offset() -> FixedOffset {
    FixedOffset::east_opt(10 * 3600).expect("valid offset")
}

/// Parses `+10:00`, `-03:30`, `+10` or `Z`.
pub fn parse_utc_offset(s: &str) -> Result<FixedOffset, DomainError> {
    let bad = || DomainError::InvalidOffset(s.to_string());
    let s = s.trim();
    if s == "Z" || s == "z" {
        return Ok(FixedOffset::east_opt(0).expect("zero offset"));
    }
    let (sign, rest) = match s.as_bytes().first() {
        Some(b'+') => (1, &s[1..]),
        Some(b'-') => (-1, &s[1..]),
        _ => return Err(bad()),
    };
    let (h, m) = match rest.split_once(':') {
        Some((h, m)) => (h, m),
        None => (rest, "0"),
    };
    let h: i32 = h.parse().map_err(|_| bad())?;
    let m: i32 = m.parse().map_err(|_| bad())?;
    if !(0..=23).contains(&h) || !(0..=59).contains(&m) {
        return Err(bad());
    }
    FixedOffset::east_opt(sign * (h * 3600 + m * 60)).ok_or_else(bad)
}

pub fn floor_to_slot(t: Timestamp) -> Timestamp {
    let step = SLOT_MINUTES * 60;
    let secs = t.timestamp().div_euclid(step) * step;
    Utc.timestamp_opt(secs, 0).single().expect("in range")
}

pub fn ceil_to_slot(t: Timestamp) -> Timestamp {
    let floor = floor_to_slot(t);
    if floor == t {
        t
    } else {
        floor + slot_duration()
    }
}

/// Formats a UTC instant as local wall-clock `YYYY-MM-DD HH:MM:SS`.
pub fn format_local(t: Timestamp, offset: FixedOffset) -> String {
    t.with_timezone(&offset).format("%Y-%m-%d %H:%M:%S").to_string()
}

pub(crate) fn local_to_utc(naive: NaiveDateTime, offset: FixedOffset) -> Timestamp {
    // A fixed offset maps every local time to exactly one instant.
    offset
        .from_local_datetime(&naive)
        .single()
        .expect("fixed offsets are unambiguous")
        .with_timezone(&Utc)
}

/// Half-open interval `[start, end)` of UTC instants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawRange")]
pub struct TimeRange {
    start: Timestamp,
    end: Timestamp,
}

#[derive(Deserialize)]
struct RawRange {
    start: Timestamp,
    end: Timestamp,
}

impl TryFrom<RawRange> for TimeRange {
    type Error = DomainError;

    fn try_from(raw: RawRange) -> Result<Self, Self::Error> {
        TimeRange::new(raw.start, raw.end)
    }
}

impl TimeRange {
    pub fn new(start: Timestamp, end: Timestamp) -> Result<Self, DomainError> {
        if start < end {
            Ok(Self { start, end })
        } else {
            Err(DomainError::EmptyTimeRange { start, end })
        }
    }

    pub fn start(&self) -> Timestamp {
        self.start
    }

    pub fn end(&self) -> Timestamp {
        self.end
    }

    pub fn duration(&self) -> Duration {
        self.end - self.start
    }

    pub fn contains(&self, t: Timestamp) -> bool {
        self.start <= t && t < self.end
    }

    /// True when the closed interval `[lo, hi]` shares an instant with `self`.
    pub fn intersects_closed(&self, lo: Timestamp, hi: Timestamp) -> bool {
        lo < self.end && hi >= self.start
    }

    pub fn overlaps(&self, other: &TimeRange) -> bool {
        self.start < other.end && other.start < self.end
    }

    /// Smallest slot-aligned range containing `self`.
    pub fn align_to_slots(&self) -> TimeRange {
        TimeRange {
            start: floor_to_slot(self.start),
            end: ceil_to_slot(self.end),
        }
    }

    /// Slot starts `t` with `start <= t < end` on the 10-minute grid.
    pub fn slots(&self) -> impl Iterator<Item = Timestamp> {
        let end = self.end;
        let mut next = ceil_to_slot(self.start);
        std::iter::from_fn(move || {
            if next < end {
                let t = next;
                next += slot_duration();
                Some(t)
            } else {
                None
            }
        })
    }
}
