//! Request parameter parsing with per-field diagnostics.

use std::collections::{BTreeSet, HashMap};

use chrono::{DateTime, NaiveDate, NaiveTime, Utc};
use firewx_core::idw::BoundingBox;
use firewx_core::{TimeRange, Timestamp};

use crate::ApiError;

/// Largest raster edge accepted, in cells.
pub const MAX_GRID: usize = 512;
/// Default raster edge when `nx`/`ny` are omitted.
pub const DEFAULT_GRID: usize = 32;
/// Upper bound on `frames * nx * ny` for one response.
pub const MAX_CELLS: usize = 20_000_000;

pub type Params = HashMap<String, String>;

/// Parses an ISO-8601 instant. Accepts full RFC 3339, minute precision
/// (`2012-01-09T00:00Z`) and bare dates (midnight UTC).
pub fn parse_instant(s: &str) -> Option<Timestamp> {
    let s = s.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.with_timezone(&Utc));
    }
    let normalized = s.strip_suffix('Z').map(|p| format!("{p}+00:00")).unwrap_or_else(|| s.to_string());
    if let Ok(t) = DateTime::parse_from_str(&normalized, "%Y-%m-%dT%H:%M%:z") {
        return Some(t.with_timezone(&Utc));
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d").ok().map(|d| d.and_time(NaiveTime::MIN).and_utc())
}

fn required<'a>(p: &'a Params, field: &str) -> Result<&'a str, ApiError> {
    p.get(field).map(String::as_str).filter(|v| !v.trim().is_empty()).ok_or_else(|| ApiError::missing(field))
}

pub fn instant(p: &Params, field: &str) -> Result<Timestamp, ApiError> {
    let raw = required(p, field)?;
    parse_instant(raw).ok_or_else(|| ApiError::invalid(field, format!("{raw:?} is not an ISO-8601 timestamp")))
}

/// `from` and `to` as a non-empty range.
pub fn range(p: &Params) -> Result<TimeRange, ApiError> {
    let (from, to) = (instant(p, "from")?, instant(p, "to")?);
    TimeRange::new(from, to).map_err(|_| ApiError::invalid("to", "to must be after from"))
}

pub fn grid_size(p: &Params, field: &str) -> Result<usize, ApiError> {
    let Some(raw) = p.get(field) else {
        return Ok(DEFAULT_GRID);
    };
    match raw.trim().parse::<usize>() {
        Ok(n) if (1..=MAX_GRID).contains(&n) => Ok(n),
        _ => Err(ApiError::invalid(field, format!("must be an integer in 1..={MAX_GRID}"))),
    }
}

pub fn stride(p: &Params) -> Result<usize, ApiError> {
    let Some(raw) = p.get("stride") else {
        return Ok(1);
    };
    match raw.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(ApiError::invalid("stride", "must be a positive integer")),
    }
}

pub fn bbox(p: &Params, default: BoundingBox) -> Result<BoundingBox, ApiError> {
    match p.get("bbox") {
        None => Ok(default),
        Some(raw) => raw.parse().map_err(|e: firewx_core::idw::IdwError| ApiError::invalid("bbox", e.to_string())),
    }
}

/// Optional comma-separated `nodes` filter.
pub fn nodes(p: &Params) -> Option<BTreeSet<String>> {
    p.get("nodes").map(|raw| raw.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect())
}

/// `HH:MM` time of day, default when absent.
pub fn time_of_day(p: &Params, field: &str, default: NaiveTime) -> Result<NaiveTime, ApiError> {
    match p.get(field) {
        None => Ok(default),
        Some(raw) => NaiveTime::parse_from_str(raw.trim(), "%H:%M")
            .map_err(|_| ApiError::invalid(field, format!("{raw:?} is not an HH:MM time"))),
    }
}
