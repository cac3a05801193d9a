use serde::{Deserialize, Serialize};

use super::score::{weather_class, DEFAULT_DROUGHT_FACTOR};
use super::FfdiError;
use crate::domain::{ClassBands, FwiClass, PropertyMap};
use crate::rules::{observation_rule, RuleSet};
use crate::store::Interval;

/// Edge lists of the weather-space grid. Wind edges are in m/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleGridSpec {
    pub temperature: Vec<f64>,
    pub humidity: Vec<f64>,
    pub wind: Vec<f64>,
    pub bands: ClassBands<f64>,
    pub drought_factor: f64,
}

/// `lo, lo + step, ...` ending exactly at `hi` (the last step may be short).
pub fn steps(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut out: Vec<f64> = (0..).map(|i| lo + step * f64::from(i)).take_while(|&e| e < hi - step * 1e-9).collect();
    out.push(hi);
    out
}

impl Default for RuleGridSpec {
    /// 3 °C by 2.5 % by 1 m/s over [0, 45] x [0, 100] x [0, 25]: 15 000
    /// boxes, each narrow enough that the index rarely crosses more than one
    /// sub-band inside it.
    fn default() -> Self {
        Self {
            temperature: steps(0.0, 45.0, 3.0),
            humidity: steps(0.0, 100.0, 2.5),
            wind: steps(0.0, 25.0, 1.0),
            bands: ClassBands::default(),
            drought_factor: DEFAULT_DROUGHT_FACTOR,
        }
    }
}

/// One cell of the grid with the class of its midpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct GridBox {
    pub name: String,
    pub bounds: PropertyMap<Interval>,
    pub class: FwiClass,
}

/// Intervals between consecutive edges: closed below, open above except for
/// the last, so the boxes tile `[first, last]` without overlap.
fn intervals(edges: &[f64]) -> Vec<Interval> {
    let last = edges.len() - 2;
    edges
        .windows(2)
        .enumerate()
        .map(|(i, w)| Interval { lo: w[0], lo_closed: true, hi: w[1], hi_closed: i == last })
        .collect()
}

impl RuleGridSpec {
    pub fn validate(&self) -> Result<(), FfdiError> {
        for (name, edges) in [("temperature", &self.temperature), ("humidity", &self.humidity), ("wind", &self.wind)] {
            if edges.len() < 2 {
                return Err(FfdiError::InvalidGrid(format!("{name} needs at least two edges")));
            }
            if !edges.iter().all(|e| e.is_finite()) || !edges.windows(2).all(|w| w[0] < w[1]) {
                return Err(FfdiError::InvalidGrid(format!("{name} edges must be finite and strictly increasing")));
            }
        }
        if self.humidity[0] < 0.0 || self.humidity[self.humidity.len() - 1] > 100.0 {
            return Err(FfdiError::InvalidGrid("humidity edges must lie in [0, 100]".into()));
        }
        if self.wind[0] < 0.0 {
            return Err(FfdiError::InvalidGrid("wind edges must be non-negative".into()));
        }
        Ok(())
    }

    pub fn box_count(&self) -> usize {
        (self.temperature.len() - 1) * (self.humidity.len() - 1) * (self.wind.len() - 1)
    }

    /// All boxes in temperature, humidity, wind order.
    pub fn boxes(&self) -> Result<Vec<GridBox>, FfdiError> {
        self.validate()?;
        let (ts, hs, ws) = (intervals(&self.temperature), intervals(&self.humidity), intervals(&self.wind));
        let mut out = Vec::with_capacity(self.box_count());
        for (i, t) in ts.iter().enumerate() {
            for (j, h) in hs.iter().enumerate() {
                for (k, w) in ws.iter().enumerate() {
                    let mid = |iv: &Interval| (iv.lo + iv.hi) / 2.0;
                    let class = weather_class(mid(t), mid(h), mid(w), self.drought_factor, &self.bands)?;
                    out.push(GridBox {
                        name: format!("ffdi_t{i:02}_h{j:02}_w{k:02}"),
                        bounds: PropertyMap { air_temperature: *t, relative_humidity: *h, wind_speed: *w },
                        class,
                    });
                }
            }
        }
        Ok(out)
    }

    /// Class the generated rules assign to a reading, or `None` outside the
    /// grid.
    pub fn class_of(&self, temperature: f64, humidity: f64, wind_mps: f64) -> Result<Option<FwiClass>, FfdiError> {
        let locate = |edges: &[f64], v: f64| -> Option<usize> {
            let iv = intervals(edges);
            iv.iter().position(|i| i.contains(v))
        };
        let (Some(i), Some(j), Some(k)) =
            (locate(&self.temperature, temperature), locate(&self.humidity, humidity), locate(&self.wind, wind_mps))
        else {
            return Ok(None);
        };
        let mid = |e: &[f64], n: usize| (e[n] + e[n + 1]) / 2.0;
        weather_class(mid(&self.temperature, i), mid(&self.humidity, j), mid(&self.wind, k), self.drought_factor, &self.bands)
            .map(Some)
    }
}

/// One rule per grid box, asserting the class of the box midpoint.
pub fn generate_rule_table(spec: &RuleGridSpec) -> Result<RuleSet, FfdiError> {
    let rules = spec
        .boxes()?
        .into_iter()
        .map(|b| observation_rule(&b.name, b.class, &b.bounds))
        .collect::<Result<Vec<_>, _>>()?;
    let metadata = serde_json::json!({
        "generator": "ffdi-mk5-grid",
        "grid": spec,
        "rule_count": rules.len(),
    });
    Ok(RuleSet::new(rules, metadata)?)
}
