//! Machine-readable output documents.
//!
//! JSON mirrors the report structs below; CSV schemas are fixed and
//! documented in the README. Floats print with however many digits are
//! needed to reparse exactly.

use serde::Serialize;

use crate::ingest::{IngestWarning, RouteTraceSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Closed-form summary of a route, shared by `analyze` reports.
#[derive(Debug, Clone, Serialize)]
pub struct RouteSummary {
    pub mu_min: f64,
    pub one_way_floor_min: f64,
    pub link_rate_mbit_s: f64,
    pub mean_data_mbit: f64,
    /// `closed_form`, or `monte_carlo` when the contact windows differ
    /// between the two stops.
    pub mean_data_estimator: &'static str,
}

/// One metrics row of the `n`-sweep table. Simulation columns stay empty
/// when the sweep is analytic.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsRow {
    pub n: u32,
    pub mu_min: f64,
    pub mean_data_mbit: f64,
    /// Closed-form mean transmission rate.
    pub rate_mbit_s: f64,
    pub mpaoi_approx_min: f64,
    pub mpaoi_sim_min: Option<f64>,
    pub maoi_sim_min: Option<f64>,
    pub approx_err_min: Option<f64>,
}

pub const METRICS_CSV_HEADER: &str =
    "n,mu_min,mean_data_mbit,rate_mbit_s,mpaoi_approx_min,mpaoi_sim_min,maoi_sim_min,approx_err_min";

#[derive(Debug, Clone, Serialize)]
pub struct DemandOut {
    pub users: u64,
    pub per_user_mbit_day: f64,
    pub total_mbit_day: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeReport {
    pub route: RouteSummary,
    pub metrics: Vec<MetricsRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub demand: Option<DemandOut>,
}

/// Full record of one simulation command, mirroring the core report.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub n: u32,
    pub mu_min: f64,
    pub one_way_floor_min: f64,
    pub horizon_min: f64,
    pub warm_up_min: f64,
    pub replications: usize,
    pub seeds: Vec<u64>,
    pub maoi_sim_min: f64,
    pub mpaoi_sim_min: f64,
    pub mpaoi_approx_min: f64,
    pub approx_err_min: f64,
    pub rate_sim_mbit_s: f64,
    pub rate_analytic_mbit_s: f64,
    pub mean_data_mbit: f64,
    pub mean_data_estimator: &'static str,
    pub mean_gap_sim_min: f64,
    pub mean_deliveries: f64,
    pub mean_effective_deliveries: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RttRow {
    pub mu_min: f64,
    pub n: u32,
    pub mean_data_mbit: f64,
    pub rate_mbit_s: f64,
    pub mpaoi_approx_min: f64,
}

pub const RTT_CSV_HEADER: &str = "mu_min,n,mean_data_mbit,rate_mbit_s,mpaoi_approx_min";

#[derive(Debug, Clone, Serialize)]
pub struct OptimizeReport {
    pub feasible: bool,
    pub n_opt: Option<u32>,
    /// Fleet size forced by the freshness target; absent when the target
    /// lies at or below the one-way floor.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub binding_constraint: Option<&'static str>,
    pub total_cost: Option<f64>,
    pub fleet_cap_exceeded: bool,
    pub aoi_floor_min: f64,
    pub aoi_gap_min: f64,
    pub mu_min: f64,
}

pub const OPTIMIZE_CSV_HEADER: &str =
    "feasible,n_opt,alpha,beta,binding_constraint,total_cost,fleet_cap_exceeded,aoi_floor_min,aoi_gap_min,mu_min";

#[derive(Debug, Clone, Serialize)]
pub struct IngestReport {
    pub routes: Vec<RouteTraceSummary>,
    pub warnings: Vec<IngestWarning>,
}

pub const INGEST_CSV_HEADER: &str =
    "route_id,trip_count,mean_one_way_min,min_one_way_min,fitted_t_min_min,fitted_mean_delay_min";

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

fn opt(value: Option<impl ToString>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::from(METRICS_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.n,
            r.mu_min,
            r.mean_data_mbit,
            r.rate_mbit_s,
            r.mpaoi_approx_min,
            opt(r.mpaoi_sim_min),
            opt(r.maoi_sim_min),
            opt(r.approx_err_min),
        ));
    }
    out
}

pub fn rtt_csv(rows: &[RttRow]) -> String {
    let mut out = String::from(RTT_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.mu_min, r.n, r.mean_data_mbit, r.rate_mbit_s, r.mpaoi_approx_min
        ));
    }
    out
}

pub fn optimize_csv(report: &OptimizeReport) -> String {
    let mut out = String::from(OPTIMIZE_CSV_HEADER);
    out.push('\n');
    out.push_str(&format!(
        "{},{},{},{},{},{},{},{},{},{}\n",
        report.feasible,
        opt(report.n_opt),
        opt(report.alpha),
        report.beta,
        opt(report.binding_constraint),
        opt(report.total_cost),
        report.fleet_cap_exceeded,
        report.aoi_floor_min,
        report.aoi_gap_min,
        report.mu_min,
    ));
    out
}

pub fn ingest_csv(routes: &[RouteTraceSummary]) -> String {
    let mut out = String::from(INGEST_CSV_HEADER);
    out.push('\n');
    for r in routes {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.route_id,
            r.trip_count,
            r.mean_one_way_min,
            r.min_one_way_min,
            r.fitted_t_min_min,
            r.fitted_mean_delay_min,
        ));
    }
    out
}
