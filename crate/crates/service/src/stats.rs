use chrono::{FixedOffset, NaiveTime, Timelike};
use firewx_core::infer::FwiEvent;
use firewx_core::{FwiClass, TimeRange, Timestamp};
use indexmap::IndexMap;
use serde::{Serialize, Serializer};

use crate::{round4, ApiError, AppState};

/// Local time-of-day interval counted as day; `start > end` wraps midnight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DayWindow {
    pub start: NaiveTime,
    pub end: NaiveTime,
    pub utc_offset: FixedOffset,
}

impl DayWindow {
    pub fn new(start: NaiveTime, end: NaiveTime, utc_offset: FixedOffset) -> Result<Self, ApiError> {
        if start == end {
            return Err(ApiError::invalid("day_end", "day window must not be empty"));
        }
        Ok(Self { start, end, utc_offset })
    }

    /// 06:00 to 18:00 local.
    pub fn standard(utc_offset: FixedOffset) -> Self {
        let h = |h| NaiveTime::from_hms_opt(h, 0, 0).expect("valid hour");
        Self { start: h(6), end: h(18), utc_offset }
    }

    pub fn is_day(&self, t: Timestamp) -> bool {
        let local = t.with_timezone(&self.utc_offset).time();
        let local = NaiveTime::from_hms_opt(local.hour(), local.minute(), local.second()).expect("valid time");
        if self.start < self.end {
            self.start <= local && local < self.end
        } else {
            local >= self.start || local < self.end
        }
    }
}

impl Serialize for DayWindow {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            start: String,
            end: String,
            utc_offset: String,
        }
        Out {
            start: self.start.format("%H:%M").to_string(),
            end: self.end.format("%H:%M").to_string(),
            utc_offset: self.utc_offset.to_string(),
        }
        .serialize(s)
    }
}

/// Class shares within one partition. Labels appear in ordinal order and
/// only when counted at least once.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    pub events: usize,
    pub counts: IndexMap<FwiClass, usize>,
    /// Percent of `events`, four decimals.
    pub percentages: IndexMap<FwiClass, f64>,
}

impl Distribution {
    fn from_counts(tally: &[usize; 15]) -> Self {
        let events: usize = tally.iter().sum();
        let mut counts = IndexMap::new();
        let mut percentages = IndexMap::new();
        for (class, &n) in FwiClass::all().zip(tally) {
            if n > 0 {
                counts.insert(class, n);
                percentages.insert(class, round4(100.0 * n as f64 / events as f64));
            }
        }
        Self { events, counts, percentages }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsReport {
    pub from: Timestamp,
    pub to: Timestamp,
    pub day_window: DayWindow,
    pub entire: Distribution,
    pub day: Distribution,
    pub night: Distribution,
}

/// Splits events into day and night by local time of day and tallies each
/// partition and their union.
pub fn summarize(range: &TimeRange, events: &[FwiEvent], window: DayWindow) -> StatsReport {
    let mut day = [0usize; 15];
    let mut night = [0usize; 15];
    for e in events {
        let i = usize::from(e.class.ordinal() - 1);
        if window.is_day(e.time) {
            day[i] += 1;
        } else {
            night[i] += 1;
        }
    }
    let entire: [usize; 15] = std::array::from_fn(|i| day[i] + night[i]);
    StatsReport {
        from: range.start(),
        to: range.end(),
        day_window: window,
        entire: Distribution::from_counts(&entire),
        day: Distribution::from_counts(&day),
        night: Distribution::from_counts(&night),
    }
}

/// Infers the range if needed, then summarizes it.
pub fn stats_report(
    state: &AppState,
    range: &TimeRange,
    window: DayWindow,
    nodes: Option<&std::collections::BTreeSet<String>>,
) -> Result<StatsReport, ApiError> {
    let events = state.engine.query_fwi(range, nodes)?;
    Ok(summarize(range, &events, window))
}
