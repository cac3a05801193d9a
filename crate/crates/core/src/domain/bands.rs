use serde::{Deserialize, Serialize};

use super::{DomainError, FwiClass, MajorClass, SubLevel};
use crate::Scalar;

/// Numeric score bands for the fifteen classes.
///
/// `major_edges[i]` is the inclusive lower edge of major class `i`; each band
/// is half-open `[lo, hi)` and Extreme is unbounded above. Bounded majors are
/// split into three equal-width sub-bands. Extreme is split at
/// `extreme_sub_edges`, whose first entry must equal the Extreme lower edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct ClassBands<T> {
    major_edges: [T; 5],
    extreme_sub_edges: [T; 3],
}

impl<T: Scalar> Default for ClassBands<T> {
    /// Conventional FFDI bands: 0 / 6 / 12 / 25 / 50, Extreme split at 75 and 100.
    fn default() -> Self {
        Self {
            major_edges: [0.0, 6.0, 12.0, 25.0, 50.0].map(T::lit),
            extreme_sub_edges: [50.0, 75.0, 100.0].map(T::lit),
        }
    }
}

fn strictly_increasing<T: Scalar>(xs: &[T]) -> bool {
    xs.iter().all(|x| x.is_finite()) && xs.windows(2).all(|w| w[0] < w[1])
}

impl<T: Scalar> ClassBands<T> {
    pub fn new(major_edges: [T; 5], extreme_sub_edges: [T; 3]) -> Result<Self, DomainError> {
        if !strictly_increasing(&major_edges) {
            return Err(DomainError::InvalidBands(
                "major edges must be finite and strictly increasing".into(),
            ));
        }
        if !strictly_increasing(&extreme_sub_edges) {
            return Err(DomainError::InvalidBands(
                "extreme sub-edges must be finite and strictly increasing".into(),
            ));
        }
        if extreme_sub_edges[0] != major_edges[4] {
            return Err(DomainError::InvalidBands(
                "first extreme sub-edge must equal the extreme lower edge".into(),
            ));
        }
        Ok(Self { major_edges, extreme_sub_edges })
    }

    pub fn major_edges(&self) -> &[T; 5] {
        &self.major_edges
    }

    pub fn extreme_sub_edges(&self) -> &[T; 3] {
        &self.extreme_sub_edges
    }

    pub fn lowest(&self) -> T {
        self.major_edges[0]
    }

    /// Lower edges of the three sub-bands of `major`, followed by the upper
    /// edge of the major band (infinite for Extreme).
    pub fn sub_edges(&self, major: MajorClass) -> [T; 4] {
        let i = major.index();
        if major == MajorClass::Extreme {
            let [a, b, c] = self.extreme_sub_edges;
            return [a, b, c, T::infinity()];
        }
        let lo = self.major_edges[i];
        let hi = self.major_edges[i + 1];
        let width = hi - lo;
        let three = T::lit(3.0);
        [lo, lo + width / three, lo + T::lit(2.0) * width / three, hi]
    }

    /// Half-open `[lo, hi)` interval of one class.
    pub fn interval(&self, class: FwiClass) -> (T, T) {
        let edges = self.sub_edges(class.major());
        let s = class.sub().index();
        (edges[s], edges[s + 1])
    }

    /// Class whose band contains `score`.
    pub fn classify(&self, score: T) -> Result<FwiClass, DomainError> {
        if !score.is_finite() {
            return Err(DomainError::NonFinite { what: "score" });
        }
        if score < self.lowest() {
            return Err(DomainError::ScoreBelowRange {
                score: score.to_f64_lossy(),
                lowest: self.lowest().to_f64_lossy(),
            });
        }
        let major = MajorClass::ALL
            .into_iter()
            .rev()
            .find(|m| score >= self.major_edges[m.index()])
            .expect("score is at or above the lowest edge");
        let edges = self.sub_edges(major);
        let sub = if score >= edges[2] {
            SubLevel::Max
        } else if score >= edges[1] {
            SubLevel::Mid
        } else {
            SubLevel::Min
        };
        Ok(FwiClass::new(major, sub))
    }
}

/// Maps a fire-danger score onto its class under `bands`.
pub fn class_from_score<T: Scalar>(score: T, bands: &ClassBands<T>) -> Result<FwiClass, DomainError> {
    bands.classify(score)
}
