//! Trip-duration trace ingestion and shifted-exponential fitting.
//!
//! Input is a CSV stream `route_id,trip_id,duration_minutes` (header
//! required, LF or CRLF). Durations are one-way trip times in minutes. Per
//! route the fit takes the observed minimum as the delay-free travel time
//! (or a configured override) and the mean excess over it as the mean
//! exponential delay.

use std::collections::BTreeMap;
use std::io::BufRead;

use serde::Serialize;

use crate::{CliError, Result};

/// Routes with fewer trips than this are reported as warnings, not fitted.
pub const MIN_TRIPS: u64 = 5;

const HEADER: &str = "route_id,trip_id,duration_minutes";

/// Fitted travel-time statistics of one route.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteTraceSummary {
    pub route_id: String,
    pub trip_count: u64,
    pub mean_one_way_min: f64,
    pub min_one_way_min: f64,
    pub fitted_t_min_min: f64,
    pub fitted_mean_delay_min: f64,
}

/// A route that could not be fitted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IngestWarning {
    pub route_id: String,
    pub trip_count: u64,
    pub reason: String,
}

/// Parse and fit a trace stream. Completely empty input yields an empty
/// result; a malformed row is a validation error naming its line.
pub fn ingest_traces(
    reader: impl BufRead,
    t_min_override: Option<f64>,
) -> Result<(Vec<RouteTraceSummary>, Vec<IngestWarning>)> {
    let mut lines = reader.lines().enumerate();

    // locate the header, tolerating leading blank lines
    let mut header_found = false;
    for (idx, line) in lines.by_ref() {
        let line = read_line(line)?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed != HEADER {
            return Err(CliError::Validation(format!(
                "line {}: expected header `{HEADER}`, got `{trimmed}`",
                idx + 1
            )));
        }
        header_found = true;
        break;
    }
    if !header_found {
        return Ok((Vec::new(), Vec::new()));
    }

    let mut durations: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = read_line(line)?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut fields = trimmed.split(',');
        let route_id = fields.next().map(str::trim).unwrap_or_default();
        let trip_id = fields.next().map(str::trim);
        let duration = fields.next().map(str::trim);
        if route_id.is_empty() {
            return Err(CliError::Validation(format!("line {line_no}: empty route_id")));
        }
        let (Some(trip_id), Some(duration), None) = (trip_id, duration, fields.next()) else {
            return Err(CliError::Validation(format!(
                "line {line_no}: expected 3 comma-separated fields"
            )));
        };
        if trip_id.is_empty() {
            return Err(CliError::Validation(format!("line {line_no}: empty trip_id")));
        }
        let minutes: f64 = duration.parse().map_err(|_| {
            CliError::Validation(format!(
                "line {line_no}: `{duration}` is not a duration in minutes"
            ))
        })?;
        if !minutes.is_finite() || minutes <= 0.0 {
            return Err(CliError::Validation(format!(
                "line {line_no}: duration must be positive, got {minutes}"
            )));
        }
        durations.entry(route_id.to_string()).or_default().push(minutes);
    }

    let mut summaries = Vec::new();
    let mut warnings = Vec::new();
    for (route_id, trips) in durations {
        let trip_count = trips.len() as u64;
        if trip_count < MIN_TRIPS {
            warnings.push(IngestWarning {
                route_id,
                trip_count,
                reason: format!("needs at least {MIN_TRIPS} trips to fit travel statistics"),
            });
            continue;
        }
        let min = trips.iter().cloned().fold(f64::INFINITY, f64::min);
        let mean = trips.iter().sum::<f64>() / trips.len() as f64;
        let fitted_t_min = t_min_override.unwrap_or(min);
        let fitted_mean_delay = mean - fitted_t_min;
        if fitted_mean_delay < 0.0 {
            return Err(CliError::Validation(format!(
                "route {route_id}: optimal-path override {fitted_t_min} exceeds the observed mean {mean}"
            )));
        }
        summaries.push(RouteTraceSummary {
            route_id,
            trip_count,
            mean_one_way_min: mean,
            min_one_way_min: min,
            fitted_t_min_min: fitted_t_min,
            fitted_mean_delay_min: fitted_mean_delay,
        });
    }
    Ok((summaries, warnings))
}

fn read_line(line: std::io::Result<String>) -> Result<String> {
    line.map_err(|e| CliError::Io(format!("reading trace input: {e}")))
}
