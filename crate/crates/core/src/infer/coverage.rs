use crate::domain::TimeRange;

/// Sorted, coalesced set of time ranges already inferred.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoverageIndex {
    ranges: Vec<TimeRange>,
}

impl CoverageIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_ranges(ranges: impl IntoIterator<Item = TimeRange>) -> Self {
        let mut idx = Self::new();
        for r in ranges {
            idx.insert(r);
        }
        idx
    }

    pub fn ranges(&self) -> &[TimeRange] {
        &self.ranges
    }

    pub fn into_ranges(self) -> Vec<TimeRange> {
        self.ranges
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    /// Adds `r`, merging it with every range it overlaps or touches.
    pub fn insert(&mut self, r: TimeRange) {
        let mut start = r.start();
        let mut end = r.end();
        let mut kept = Vec::with_capacity(self.ranges.len() + 1);
        for &c in &self.ranges {
            if c.end() < start || c.start() > end {
                kept.push(c);
            } else {
                start = start.min(c.start());
                end = end.max(c.end());
            }
        }
        kept.push(TimeRange::new(start, end).expect("union of non-empty ranges"));
        kept.sort();
        self.ranges = kept;
    }

    /// Sub-ranges of `req` not covered, in order.
    pub fn missing(&self, req: &TimeRange) -> Vec<TimeRange> {
        let mut out = Vec::new();
        let mut cursor = req.start();
        for c in &self.ranges {
            if c.end() <= cursor {
                continue;
            }
            if c.start() >= req.end() {
                break;
            }
            if c.start() > cursor {
                out.push(TimeRange::new(cursor, c.start()).expect("cursor precedes range start"));
            }
            cursor = cursor.max(c.end());
            if cursor >= req.end() {
                return out;
            }
        }
        if cursor < req.end() {
            out.push(TimeRange::new(cursor, req.end()).expect("cursor precedes request end"));
        }
        out
    }

    pub fn covers(&self, req: &TimeRange) -> bool {
        self.missing(req).is_empty()
    }
}

pub fn missing_ranges(cov: &CoverageIndex, req: &TimeRange) -> Vec<TimeRange> {
    cov.missing(req)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{Duration, TimeZone, Utc};
    use proptest::prelude::*;

    fn h(a: i64, b: i64) -> TimeRange {
        let base = Utc.with_ymd_and_hms(2012, 1, 1, 0, 0, 0).unwrap();
        TimeRange::new(base + Duration::hours(a), base + Duration::hours(b)).unwrap()
    }

    #[test]
    fn documented_cases() {
        assert_eq!(missing_ranges(&CoverageIndex::new(), &h(0, 24)), vec![h(0, 24)]);
        assert!(missing_ranges(&CoverageIndex::from_ranges([h(0, 24)]), &h(6, 12)).is_empty());
        let cov = CoverageIndex::from_ranges([h(0, 6), h(12, 18)]);
        assert_eq!(missing_ranges(&cov, &h(0, 18)), vec![h(6, 12)]);
        assert_eq!(missing_ranges(&cov, &h(3, 24)), vec![h(6, 12), h(18, 24)]);
    }

    #[test]
    fn adjacent_ranges_coalesce() {
        let cov = CoverageIndex::from_ranges([h(12, 18), h(0, 6), h(6, 12)]);
        assert_eq!(cov.ranges(), &[h(0, 18)]);
    }

    proptest! {
        #[test]
        fn matches_per_slot_oracle(
            cov in prop::collection::vec((0i64..48, 1i64..12), 0..6),
            req in (0i64..48, 1i64..24),
        ) {
            // Hour resolution is enough: every bound here is a whole hour.
            let idx = CoverageIndex::from_ranges(cov.iter().map(|&(s, l)| h(s, s + l)));
            let req = h(req.0, req.0 + req.1);
            let miss = idx.missing(&req);
            for w in idx.ranges().windows(2) {
                prop_assert!(w[0].end() < w[1].start());
            }
            for w in miss.windows(2) {
                prop_assert!(w[0].end() < w[1].start());
            }
            for hour in 0..80 {
                let slot = h(hour, hour + 1);
                let inside_req = req.contains(slot.start());
                let covered = cov.iter().any(|&(s, l)| (s..s + l).contains(&hour));
                let missing = miss.iter().any(|m| m.contains(slot.start()));
                prop_assert_eq!(missing, inside_req && !covered);
            }
            let mut after = idx.clone();
            after.insert(req);
            prop_assert!(after.covers(&req));
        }
    }
}
