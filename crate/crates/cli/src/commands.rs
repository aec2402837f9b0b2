//! Subcommand implementations. Each takes the parsed config and returns the
//! rendered output text; I/O stays in `main`.

use std::io::BufRead;

use muledtn::optimizer::{BindingConstraint, CostModel, QosTargets};
use muledtn::{analytics, des, optimizer, ContactTimeDist, RouteModelF64, TravelTimeDist};

use crate::config::ExperimentConfig;
use crate::ingest::ingest_traces;
use crate::output::{self, OutputFormat};
use crate::{CliError, Result};

fn require_route(cfg: &ExperimentConfig, command: &str) -> Result<RouteModelF64> {
    cfg.route
        .as_ref()
        .ok_or_else(|| CliError::Validation(format!("`{command}` needs a [route] section")))?
        .build()
}

fn metrics_row(
    route: &RouteModelF64,
    mean_data: f64,
    n: u32,
) -> Result<output::MetricsRow> {
    if n == 0 {
        return Err(CliError::Validation("fleet sizes must be at least 1".into()));
    }
    let mu = route.mean_round_trip();
    let approx = analytics::mpaoi_approx(route, n)?;
    Ok(output::MetricsRow {
        n,
        mu_min: mu,
        mean_data_mbit: mean_data,
        rate_mbit_s: mean_data * n as f64 / (mu * analytics::MINUTES_TO_SECONDS),
        mpaoi_approx_min: approx.mpaoi,
        mpaoi_sim_min: None,
        maoi_sim_min: None,
        approx_err_min: None,
    })
}

fn route_summary(route: &RouteModelF64) -> Result<(output::RouteSummary, f64)> {
    let (mean_data, estimated) = analytics::mean_data_size_or_estimate(route)?;
    Ok((
        output::RouteSummary {
            mu_min: route.mean_round_trip(),
            one_way_floor_min: analytics::one_way_floor(route),
            link_rate_mbit_s: route.link_rate(),
            mean_data_mbit: mean_data,
            mean_data_estimator: if estimated { "monte_carlo" } else { "closed_form" },
        },
        mean_data,
    ))
}

/// Closed-form metrics for the configured route, per fleet size in
/// `n_list` (default: just 1).
pub fn analyze(cfg: &ExperimentConfig, format: OutputFormat) -> Result<String> {
    let route = require_route(cfg, "analyze")?;
    let (summary, mean_data) = route_summary(&route)?;
    let n_list = cfg.sweep.n_list.clone().unwrap_or_else(|| vec![1]);
    if n_list.is_empty() {
        return Err(CliError::Validation("n_list must not be empty".into()));
    }
    let metrics = n_list
        .iter()
        .map(|&n| metrics_row(&route, mean_data, n))
        .collect::<Result<Vec<_>>>()?;
    let demand = cfg
        .demand
        .map(|d| analytics::daily_traffic(d.users, d.per_user_mbit_day))
        .transpose()?
        .map(|t| output::DemandOut {
            users: t.users,
            per_user_mbit_day: t.per_user_demand,
            total_mbit_day: t.total,
        });
    let report = output::AnalyzeReport { route: summary, metrics, demand };
    Ok(match format {
        OutputFormat::Json => output::to_json(&report),
        OutputFormat::Csv => output::metrics_csv(&report.metrics),
    })
}

fn simulation_report(
    cfg: &ExperimentConfig,
    route: &RouteModelF64,
    n: u32,
    seed_override: Option<u64>,
) -> Result<output::SimulationReport> {
    let horizon = cfg.simulation.horizon();
    let warm_up = route.mean_round_trip() * cfg.simulation.warm_up_multiplier();
    let seeds = cfg.simulation.seeds(seed_override);
    let report = des::run_replications_with_warm_up(route, n, horizon, warm_up, &seeds)?;
    Ok(output::SimulationReport {
        n: report.n,
        mu_min: report.mu,
        one_way_floor_min: report.one_way_floor,
        horizon_min: report.horizon,
        warm_up_min: report.warm_up,
        replications: report.seeds.len(),
        seeds: report.seeds.clone(),
        maoi_sim_min: report.simulated_maoi,
        mpaoi_sim_min: report.simulated_mpaoi,
        mpaoi_approx_min: report.approx_mpaoi,
        approx_err_min: report.approx_error,
        rate_sim_mbit_s: report.simulated_mean_rate,
        rate_analytic_mbit_s: report.analytic_mean_rate,
        mean_data_mbit: report.mean_data_size,
        mean_data_estimator: if report.data_size_estimated { "monte_carlo" } else { "closed_form" },
        mean_gap_sim_min: report.simulated_mean_gap,
        mean_deliveries: report.mean_deliveries,
        mean_effective_deliveries: report.mean_effective_deliveries,
    })
}

fn simulated_metrics_row(sim: &output::SimulationReport, mean_data: f64) -> output::MetricsRow {
    output::MetricsRow {
        n: sim.n,
        mu_min: sim.mu_min,
        mean_data_mbit: mean_data,
        rate_mbit_s: sim.rate_analytic_mbit_s,
        mpaoi_approx_min: sim.mpaoi_approx_min,
        mpaoi_sim_min: Some(sim.mpaoi_sim_min),
        maoi_sim_min: Some(sim.maoi_sim_min),
        approx_err_min: Some(sim.approx_err_min),
    }
}

/// Event-driven replications for one fleet size (`[simulation] n`).
pub fn simulate(
    cfg: &ExperimentConfig,
    seed_override: Option<u64>,
    format: OutputFormat,
) -> Result<String> {
    let route = require_route(cfg, "simulate")?;
    let report = simulation_report(cfg, &route, cfg.simulation.n(), seed_override)?;
    Ok(match format {
        OutputFormat::Json => output::to_json(&report),
        OutputFormat::Csv => {
            output::metrics_csv(&[simulated_metrics_row(&report, report.mean_data_mbit)])
        }
    })
}

/// Metrics table over `[sweep] n_list`; simulated columns filled when
/// `[sweep] simulate = true`.
pub fn sweep_n(
    cfg: &ExperimentConfig,
    seed_override: Option<u64>,
    format: OutputFormat,
) -> Result<String> {
    let route = require_route(cfg, "sweep-n")?;
    let n_list = cfg
        .sweep
        .n_list
        .clone()
        .ok_or_else(|| CliError::Validation("`sweep-n` needs [sweep] n_list".into()))?;
    if n_list.is_empty() {
        return Err(CliError::Validation("n_list must not be empty".into()));
    }
    let (_, mean_data) = route_summary(&route)?;
    let simulate = cfg.sweep.simulate.unwrap_or(false);
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in &n_list {
        if simulate {
            let sim = simulation_report(cfg, &route, n, seed_override)?;
            rows.push(simulated_metrics_row(&sim, mean_data));
        } else {
            rows.push(metrics_row(&route, mean_data, n)?);
        }
    }
    Ok(match format {
        OutputFormat::Json => output::to_json(&rows),
        OutputFormat::Csv => output::metrics_csv(&rows),
    })
}

/// Analytic metrics over target mean round-trip times. Contacts stay as
/// configured; each target splits the remainder evenly into two
/// deterministic legs.
pub fn sweep_rtt(cfg: &ExperimentConfig, format: OutputFormat) -> Result<String> {
    let route_cfg = cfg
        .route
        .ok_or_else(|| CliError::Validation("`sweep-rtt` needs a [route] section".into()))?;
    let targets = cfg
        .sweep
        .round_trip_list
        .clone()
        .ok_or_else(|| CliError::Validation("`sweep-rtt` needs [sweep] round_trip_list".into()))?;
    if targets.is_empty() {
        return Err(CliError::Validation("round_trip_list must not be empty".into()));
    }
    let n_list = cfg.sweep.n_list.clone().unwrap_or_else(|| vec![1]);
    let contact_a = ContactTimeDist::new(route_cfg.c1_a, route_cfg.c2_a)?;
    let contact_b = ContactTimeDist::new(route_cfg.c1_b, route_cfg.c2_b)?;
    let contact_means = contact_a.mean() + contact_b.mean();

    let mut rows = Vec::with_capacity(targets.len() * n_list.len());
    for &mu in &targets {
        let leg = (mu - contact_means) / 2.0;
        if leg < 0.0 {
            return Err(CliError::Validation(format!(
                "target round trip {mu} min is shorter than the combined mean contact time {contact_means} min"
            )));
        }
        let travel = TravelTimeDist::new(leg, 0.0)?;
        let route = muledtn::RouteModel::new(
            contact_a,
            contact_b,
            travel,
            travel,
            route_cfg.link_rate,
        )?;
        let (mean_data, _) = analytics::mean_data_size_or_estimate(&route)?;
        for &n in &n_list {
            if n == 0 {
                return Err(CliError::Validation("fleet sizes must be at least 1".into()));
            }
            let approx = analytics::mpaoi_approx(&route, n)?;
            rows.push(output::RttRow {
                mu_min: route.mean_round_trip(),
                n,
                mean_data_mbit: mean_data,
                rate_mbit_s: mean_data * n as f64
                    / (route.mean_round_trip() * analytics::MINUTES_TO_SECONDS),
                mpaoi_approx_min: approx.mpaoi,
            });
        }
    }
    Ok(match format {
        OutputFormat::Json => output::to_json(&rows),
        OutputFormat::Csv => output::rtt_csv(&rows),
    })
}

/// Minimum fleet size meeting the configured QoS targets.
pub fn optimize(cfg: &ExperimentConfig, format: OutputFormat) -> Result<String> {
    let route = require_route(cfg, "optimize")?;
    let opt = cfg
        .optimizer
        .ok_or_else(|| CliError::Validation("`optimize` needs an [optimizer] section".into()))?;
    let targets = QosTargets::new(opt.mpaoi_threshold, opt.rate_threshold)?;
    let costs = CostModel::new(opt.mule_cost, opt.gateway_cost, opt.gateway_count.unwrap_or(2))?;
    let plan = optimizer::optimize(&route, &targets, &costs, opt.fleet_cap)?;
    let report = output::OptimizeReport {
        feasible: plan.feasible,
        n_opt: plan.n_opt,
        alpha: plan.alpha.is_finite().then_some(plan.alpha),
        beta: plan.beta,
        binding_constraint: plan.binding_constraint.map(|b| match b {
            BindingConstraint::Aoi => "aoi",
            BindingConstraint::Rate => "rate",
            BindingConstraint::Both => "both",
        }),
        total_cost: plan.total_cost,
        fleet_cap_exceeded: plan.fleet_cap_exceeded,
        aoi_floor_min: plan.aoi_floor,
        aoi_gap_min: plan.aoi_gap,
        mu_min: route.mean_round_trip(),
    };
    Ok(match format {
        OutputFormat::Json => output::to_json(&report),
        OutputFormat::Csv => output::optimize_csv(&report),
    })
}

/// Fit travel-time statistics from a trip-duration CSV stream. Warnings are
/// returned separately so `main` can route them to stderr in CSV mode.
pub fn ingest(
    cfg: &ExperimentConfig,
    reader: impl BufRead,
    format: OutputFormat,
) -> Result<(String, Vec<String>)> {
    let (routes, warnings) = ingest_traces(reader, cfg.ingest.t_min_override)?;
    match format {
        OutputFormat::Json => {
            let report = output::IngestReport { routes, warnings };
            Ok((output::to_json(&report), Vec::new()))
        }
        OutputFormat::Csv => {
            let lines = warnings
                .iter()
                .map(|w| format!("warning: route {} ({} trips): {}", w.route_id, w.trip_count, w.reason))
                .collect();
            Ok((output::ingest_csv(&routes), lines))
        }
    }
}
