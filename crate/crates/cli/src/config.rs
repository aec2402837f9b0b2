//! Flat, sectioned key-value experiment configuration.
//!
//! The format is line oriented: `[section]` headers, `key = value` pairs,
//! `#` comments, blank lines ignored. Number lists are comma separated;
//! integer lists also accept an inclusive `a..b` range. All keys are
//! documented in the README. Parsing and serialization round-trip exactly
//! (floats are printed with enough digits to reparse bit-identically).

use muledtn::{ContactTimeDist, RouteModel, RouteModelF64, TravelTimeDist};

use crate::{CliError, Result};

/// Everything a run can configure, grouped by section. Sections that were
/// absent from the file stay `None`/default.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentConfig {
    pub route: Option<RouteConfig>,
    pub simulation: SimulationConfig,
    pub sweep: SweepConfig,
    pub optimizer: Option<OptimizerConfig>,
    pub demand: Option<DemandConfig>,
    pub ingest: IngestConfig,
}

/// `[route]`: all nine stochastic parameters of one corridor. Durations in
/// minutes, link rate in Mbit/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouteConfig {
    pub c1_a: f64,
    pub c2_a: f64,
    pub c1_b: f64,
    pub c2_b: f64,
    pub t_min_ab: f64,
    pub mean_delay_ab: f64,
    pub t_min_ba: f64,
    pub mean_delay_ba: f64,
    pub link_rate: f64,
}

impl RouteConfig {
    pub fn build(&self) -> Result<RouteModelF64> {
        let contact_a = ContactTimeDist::new(self.c1_a, self.c2_a)?;
        let contact_b = ContactTimeDist::new(self.c1_b, self.c2_b)?;
        let travel_ab = TravelTimeDist::new(self.t_min_ab, self.mean_delay_ab)?;
        let travel_ba = TravelTimeDist::new(self.t_min_ba, self.mean_delay_ba)?;
        Ok(RouteModel::new(contact_a, contact_b, travel_ab, travel_ba, self.link_rate)?)
    }
}

/// `[simulation]`: horizon and replication controls, all optional.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimulationConfig {
    pub horizon: Option<f64>,
    pub n: Option<u32>,
    pub replications: Option<u32>,
    pub seed: Option<u64>,
    pub warm_up_multiplier: Option<f64>,
}

impl SimulationConfig {
    pub fn horizon(&self) -> f64 {
        self.horizon.unwrap_or(100_000.0)
    }

    pub fn n(&self) -> u32 {
        self.n.unwrap_or(1)
    }

    pub fn replications(&self) -> u32 {
        self.replications.unwrap_or(20)
    }

    pub fn warm_up_multiplier(&self) -> f64 {
        self.warm_up_multiplier.unwrap_or(5.0)
    }

    /// Replication seeds: `base, base+1, ...`. A `--seed` flag overrides the
    /// configured base.
    pub fn seeds(&self, override_base: Option<u64>) -> Vec<u64> {
        let base = override_base.or(self.seed).unwrap_or(1);
        (0..self.replications() as u64).map(|i| base.wrapping_add(i)).collect()
    }
}

/// `[sweep]`: fleet sizes and round-trip targets the sweep commands iterate.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepConfig {
    pub n_list: Option<Vec<u32>>,
    pub round_trip_list: Option<Vec<f64>>,
    pub simulate: Option<bool>,
}

/// `[optimizer]`: QoS thresholds and hardware costs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub mpaoi_threshold: f64,
    pub rate_threshold: f64,
    pub mule_cost: f64,
    pub gateway_cost: f64,
    pub gateway_count: Option<u32>,
    pub fleet_cap: Option<u32>,
}

/// `[demand]`: village traffic demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemandConfig {
    pub users: u64,
    pub per_user_mbit_day: f64,
}

/// `[ingest]`: trace-fitting options.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IngestConfig {
    /// Known optimal-path travel time; replaces the observed minimum as the
    /// fitted shift.
    pub t_min_override: Option<f64>,
}

pub fn parse(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    let mut route = RouteBuilder::default();
    let mut optimizer = OptimizerBuilder::default();
    let mut demand = DemandBuilder::default();
    let mut section: Option<String> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| fail(line_no, "unterminated section header"))?
                .trim();
            match name {
                "route" | "simulation" | "sweep" | "optimizer" | "demand" | "ingest" => {
                    section = Some(name.to_string());
                }
                other => return Err(fail(line_no, &format!("unknown section [{other}]"))),
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| fail(line_no, "expected `key = value`"))?;
        let key = key.trim();
        let value = value.trim();
        let section = section
            .as_deref()
            .ok_or_else(|| fail(line_no, "key outside any [section]"))?;
        match section {
            "route" => route.set(key, value, line_no)?,
            "simulation" => match key {
                "horizon" => cfg.simulation.horizon = Some(parse_f64(value, line_no)?),
                "n" => cfg.simulation.n = Some(parse_u32(value, line_no)?),
                "replications" => cfg.simulation.replications = Some(parse_u32(value, line_no)?),
                "seed" => cfg.simulation.seed = Some(parse_u64(value, line_no)?),
                "warm_up_multiplier" => {
                    cfg.simulation.warm_up_multiplier = Some(parse_f64(value, line_no)?)
                }
                other => return Err(unknown_key(line_no, "simulation", other)),
            },
            "sweep" => match key {
                "n_list" => cfg.sweep.n_list = Some(parse_u32_list(value, line_no)?),
                "round_trip_list" => {
                    cfg.sweep.round_trip_list = Some(parse_f64_list(value, line_no)?)
                }
                "simulate" => cfg.sweep.simulate = Some(parse_bool(value, line_no)?),
                other => return Err(unknown_key(line_no, "sweep", other)),
            },
            "optimizer" => optimizer.set(key, value, line_no)?,
            "demand" => demand.set(key, value, line_no)?,
            "ingest" => match key {
                "t_min_override" => cfg.ingest.t_min_override = Some(parse_f64(value, line_no)?),
                other => return Err(unknown_key(line_no, "ingest", other)),
            },
            _ => unreachable!("section names validated above"),
        }
    }

    cfg.route = route.finish()?;
    cfg.optimizer = optimizer.finish()?;
    cfg.demand = demand.finish()?;
    Ok(cfg)
}

/// Canonical text form; `parse(serialize(cfg)) == cfg` for every config.
pub fn serialize(cfg: &ExperimentConfig) -> String {
    let mut out = String::new();
    if let Some(r) = &cfg.route {
        out.push_str("[route]\n");
        push_kv(&mut out, "c1_a", r.c1_a);
        push_kv(&mut out, "c2_a", r.c2_a);
        push_kv(&mut out, "c1_b", r.c1_b);
        push_kv(&mut out, "c2_b", r.c2_b);
        push_kv(&mut out, "t_min_ab", r.t_min_ab);
        push_kv(&mut out, "mean_delay_ab", r.mean_delay_ab);
        push_kv(&mut out, "t_min_ba", r.t_min_ba);
        push_kv(&mut out, "mean_delay_ba", r.mean_delay_ba);
        push_kv(&mut out, "link_rate", r.link_rate);
        out.push('\n');
    }
    let s = &cfg.simulation;
    if *s != SimulationConfig::default() {
        out.push_str("[simulation]\n");
        if let Some(v) = s.horizon {
            push_kv(&mut out, "horizon", v);
        }
        if let Some(v) = s.n {
            push_kv(&mut out, "n", v);
        }
        if let Some(v) = s.replications {
            push_kv(&mut out, "replications", v);
        }
        if let Some(v) = s.seed {
            push_kv(&mut out, "seed", v);
        }
        if let Some(v) = s.warm_up_multiplier {
            push_kv(&mut out, "warm_up_multiplier", v);
        }
        out.push('\n');
    }
    let w = &cfg.sweep;
    if *w != SweepConfig::default() {
        out.push_str("[sweep]\n");
        if let Some(v) = &w.n_list {
            push_kv(&mut out, "n_list", join(v));
        }
        if let Some(v) = &w.round_trip_list {
            push_kv(&mut out, "round_trip_list", join(v));
        }
        if let Some(v) = w.simulate {
            push_kv(&mut out, "simulate", v);
        }
        out.push('\n');
    }
    if let Some(o) = &cfg.optimizer {
        out.push_str("[optimizer]\n");
        push_kv(&mut out, "mpaoi_threshold", o.mpaoi_threshold);
        push_kv(&mut out, "rate_threshold", o.rate_threshold);
        push_kv(&mut out, "mule_cost", o.mule_cost);
        push_kv(&mut out, "gateway_cost", o.gateway_cost);
        if let Some(v) = o.gateway_count {
            push_kv(&mut out, "gateway_count", v);
        }
        if let Some(v) = o.fleet_cap {
            push_kv(&mut out, "fleet_cap", v);
        }
        out.push('\n');
    }
    if let Some(d) = &cfg.demand {
        out.push_str("[demand]\n");
        push_kv(&mut out, "users", d.users);
        push_kv(&mut out, "per_user_mbit_day", d.per_user_mbit_day);
        out.push('\n');
    }
    if cfg.ingest != IngestConfig::default() {
        out.push_str("[ingest]\n");
        if let Some(v) = cfg.ingest.t_min_override {
            push_kv(&mut out, "t_min_override", v);
        }
        out.push('\n');
    }
    out
}

fn push_kv(out: &mut String, key: &str, value: impl std::fmt::Display) {
    out.push_str(key);
    out.push_str(" = ");
    out.push_str(&value.to_string());
    out.push('\n');
}

fn join<T: std::fmt::Display>(values: &[T]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn fail(line: usize, msg: &str) -> CliError {
    CliError::Validation(format!("config line {line}: {msg}"))
}

fn unknown_key(line: usize, section: &str, key: &str) -> CliError {
    fail(line, &format!("unknown key `{key}` in [{section}]"))
}

fn parse_f64(value: &str, line: usize) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| fail(line, &format!("`{value}` is not a number")))
}

fn parse_u32(value: &str, line: usize) -> Result<u32> {
    value
        .parse::<u32>()
        .map_err(|_| fail(line, &format!("`{value}` is not a non-negative integer")))
}

fn parse_u64(value: &str, line: usize) -> Result<u64> {
    value
        .parse::<u64>()
        .map_err(|_| fail(line, &format!("`{value}` is not a non-negative integer")))
}

fn parse_bool(value: &str, line: usize) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(fail(line, &format!("`{value}` is not true/false"))),
    }
}

fn parse_u32_list(value: &str, line: usize) -> Result<Vec<u32>> {
    if let Some((lo, hi)) = value.split_once("..") {
        let lo = parse_u32(lo.trim(), line)?;
        let hi = parse_u32(hi.trim(), line)?;
        if hi < lo {
            return Err(fail(line, &format!("empty range {lo}..{hi}")));
        }
        return Ok((lo..=hi).collect());
    }
    value.split(',').map(|item| parse_u32(item.trim(), line)).collect()
}

fn parse_f64_list(value: &str, line: usize) -> Result<Vec<f64>> {
    value.split(',').map(|item| parse_f64(item.trim(), line)).collect()
}

#[derive(Default)]
struct RouteBuilder {
    seen: bool,
    c1_a: Option<f64>,
    c2_a: Option<f64>,
    c1_b: Option<f64>,
    c2_b: Option<f64>,
    t_min_ab: Option<f64>,
    mean_delay_ab: Option<f64>,
    t_min_ba: Option<f64>,
    mean_delay_ba: Option<f64>,
    link_rate: Option<f64>,
}

impl RouteBuilder {
    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        self.seen = true;
        let parsed = parse_f64(value, line)?;
        let slot = match key {
            "c1_a" => &mut self.c1_a,
            "c2_a" => &mut self.c2_a,
            "c1_b" => &mut self.c1_b,
            "c2_b" => &mut self.c2_b,
            "t_min_ab" => &mut self.t_min_ab,
            "mean_delay_ab" => &mut self.mean_delay_ab,
            "t_min_ba" => &mut self.t_min_ba,
            "mean_delay_ba" => &mut self.mean_delay_ba,
            "link_rate" => &mut self.link_rate,
            other => return Err(unknown_key(line, "route", other)),
        };
        *slot = Some(parsed);
        Ok(())
    }

    fn finish(self) -> Result<Option<RouteConfig>> {
        if !self.seen {
            return Ok(None);
        }
        let need = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| CliError::Validation(format!("[route] is missing `{key}`")))
        };
        Ok(Some(RouteConfig {
            c1_a: need(self.c1_a, "c1_a")?,
            c2_a: need(self.c2_a, "c2_a")?,
            c1_b: need(self.c1_b, "c1_b")?,
            c2_b: need(self.c2_b, "c2_b")?,
            t_min_ab: need(self.t_min_ab, "t_min_ab")?,
            mean_delay_ab: need(self.mean_delay_ab, "mean_delay_ab")?,
            t_min_ba: need(self.t_min_ba, "t_min_ba")?,
            mean_delay_ba: need(self.mean_delay_ba, "mean_delay_ba")?,
            link_rate: need(self.link_rate, "link_rate")?,
        }))
    }
}

#[derive(Default)]
struct OptimizerBuilder {
    seen: bool,
    mpaoi_threshold: Option<f64>,
    rate_threshold: Option<f64>,
    mule_cost: Option<f64>,
    gateway_cost: Option<f64>,
    gateway_count: Option<u32>,
    fleet_cap: Option<u32>,
}

impl OptimizerBuilder {
    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        self.seen = true;
        match key {
            "mpaoi_threshold" => self.mpaoi_threshold = Some(parse_f64(value, line)?),
            "rate_threshold" => self.rate_threshold = Some(parse_f64(value, line)?),
            "mule_cost" => self.mule_cost = Some(parse_f64(value, line)?),
            "gateway_cost" => self.gateway_cost = Some(parse_f64(value, line)?),
            "gateway_count" => self.gateway_count = Some(parse_u32(value, line)?),
            "fleet_cap" => self.fleet_cap = Some(parse_u32(value, line)?),
            other => return Err(unknown_key(line, "optimizer", other)),
        }
        Ok(())
    }

    fn finish(self) -> Result<Option<OptimizerConfig>> {
        if !self.seen {
            return Ok(None);
        }
        let need = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| CliError::Validation(format!("[optimizer] is missing `{key}`")))
        };
        Ok(Some(OptimizerConfig {
            mpaoi_threshold: need(self.mpaoi_threshold, "mpaoi_threshold")?,
            rate_threshold: need(self.rate_threshold, "rate_threshold")?,
            mule_cost: need(self.mule_cost, "mule_cost")?,
            gateway_cost: need(self.gateway_cost, "gateway_cost")?,
            gateway_count: self.gateway_count,
            fleet_cap: self.fleet_cap,
        }))
    }
}

#[derive(Default)]
struct DemandBuilder {
    seen: bool,
    users: Option<u64>,
    per_user_mbit_day: Option<f64>,
}

impl DemandBuilder {
    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        self.seen = true;
        match key {
            "users" => self.users = Some(parse_u64(value, line)?),
            "per_user_mbit_day" => self.per_user_mbit_day = Some(parse_f64(value, line)?),
            other => return Err(unknown_key(line, "demand", other)),
        }
        Ok(())
    }

    fn finish(self) -> Result<Option<DemandConfig>> {
        if !self.seen {
            return Ok(None);
        }
        Ok(Some(DemandConfig {
            users: self
                .users
                .ok_or_else(|| CliError::Validation("[demand] is missing `users`".into()))?,
            per_user_mbit_day: self.per_user_mbit_day.ok_or_else(|| {
                CliError::Validation("[demand] is missing `per_user_mbit_day`".into())
            })?,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const TABLE_CONFIG: &str = "\
# canonical two-region corridor
[route]
c1_a = 3
c2_a = 5
c1_b = 3
c2_b = 5
t_min_ab = 100
mean_delay_ab = 20
t_min_ba = 100
mean_delay_ba = 20
link_rate = 10

[simulation]
horizon = 100000
replications = 20
seed = 1

[sweep]
n_list = 1..20
";

    #[test]
    fn parses_the_reference_corridor() {
        let cfg = parse(TABLE_CONFIG).unwrap();
        let route = cfg.route.unwrap();
        assert_eq!(route.c1_a, 3.0);
        assert_eq!(route.link_rate, 10.0);
        assert_eq!(cfg.simulation.horizon(), 100_000.0);
        assert_eq!(cfg.simulation.replications(), 20);
        assert_eq!(cfg.sweep.n_list.as_deref(), Some((1..=20).collect::<Vec<u32>>().as_slice()));
        let model = route.build().unwrap();
        assert_eq!(model.mean_round_trip(), 248.0);
    }

    #[test]
    fn range_and_comma_lists_agree() {
        let a = parse("[sweep]\nn_list = 1..4\n").unwrap();
        let b = parse("[sweep]\nn_list = 1, 2, 3, 4\n").unwrap();
        assert_eq!(a.sweep.n_list, b.sweep.n_list);
    }

    #[test]
    fn round_trips_through_serialization() {
        let cfg = parse(TABLE_CONFIG).unwrap();
        let text = serialize(&cfg);
        let reparsed = parse(&text).unwrap();
        assert_eq!(cfg, reparsed);
        // serialization is canonical: a second pass is byte-identical
        assert_eq!(text, serialize(&reparsed));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse("[route]\nc1_a = fast\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = parse("[rote]\n").unwrap_err();
        assert!(err.to_string().contains("unknown section"), "{err}");
        let err = parse("c1_a = 3\n").unwrap_err();
        assert!(err.to_string().contains("outside any"), "{err}");
        let err = parse("[route]\nc1_a = 3\n").unwrap_err();
        assert!(err.to_string().contains("missing"), "{err}");
        let err = parse("[sweep]\nn_list = 9..3\n").unwrap_err();
        assert!(err.to_string().contains("empty range"), "{err}");
    }

    #[test]
    fn seeds_derive_from_base_and_override() {
        let cfg = parse("[simulation]\nreplications = 3\nseed = 10\n").unwrap();
        assert_eq!(cfg.simulation.seeds(None), vec![10, 11, 12]);
        assert_eq!(cfg.simulation.seeds(Some(77)), vec![77, 78, 79]);
    }

    #[test]
    fn invalid_route_parameters_fail_at_build() {
        let cfg = parse(
            "[route]\nc1_a = 5\nc2_a = 3\nc1_b = 3\nc2_b = 5\nt_min_ab = 100\n\
             mean_delay_ab = 20\nt_min_ba = 100\nmean_delay_ba = 20\nlink_rate = 10\n",
        )
        .unwrap();
        assert!(matches!(cfg.route.unwrap().build(), Err(CliError::Validation(_))));
    }

    mod properties {
        use proptest::prelude::*;

        use super::*;

        fn arb_config() -> impl Strategy<Value = ExperimentConfig> {
            let route = proptest::option::of(
                (
                    (0.0..50.0f64, 0.0..50.0f64, 0.0..50.0f64, 0.0..50.0f64),
                    (0.0..500.0f64, 0.0..100.0f64, 0.0..500.0f64, 0.0..100.0f64),
                    0.001..1000.0f64,
                )
                    .prop_map(|((c1a, c2a, c1b, c2b), (ta, da, tb, db), r)| RouteConfig {
                        c1_a: c1a,
                        c2_a: c2a,
                        c1_b: c1b,
                        c2_b: c2b,
                        t_min_ab: ta,
                        mean_delay_ab: da,
                        t_min_ba: tb,
                        mean_delay_ba: db,
                        link_rate: r,
                    }),
            );
            let simulation = (
                proptest::option::of(1.0..1e7f64),
                proptest::option::of(1u32..100),
                proptest::option::of(1u32..64),
                proptest::option::of(any::<u64>()),
                proptest::option::of(0.0..20.0f64),
            )
                .prop_map(|(horizon, n, replications, seed, warm)| SimulationConfig {
                    horizon,
                    n,
                    replications,
                    seed,
                    warm_up_multiplier: warm,
                });
            let sweep = (
                proptest::option::of(proptest::collection::vec(1u32..200, 1..12)),
                proptest::option::of(proptest::collection::vec(1.0..2000.0f64, 1..8)),
                proptest::option::of(any::<bool>()),
            )
                .prop_map(|(n_list, round_trip_list, simulate)| SweepConfig {
                    n_list,
                    round_trip_list,
                    simulate,
                });
            let optimizer = proptest::option::of(
                (
                    0.1..1e4f64,
                    0.001..100.0f64,
                    0.0..1e5f64,
                    0.0..1e5f64,
                    proptest::option::of(1u32..10),
                    proptest::option::of(1u32..1000),
                )
                    .prop_map(|(m, r, mc, gc, gn, cap)| OptimizerConfig {
                        mpaoi_threshold: m,
                        rate_threshold: r,
                        mule_cost: mc,
                        gateway_cost: gc,
                        gateway_count: gn,
                        fleet_cap: cap,
                    }),
            );
            let demand = proptest::option::of(
                (0u64..1_000_000, 0.0..1e4f64)
                    .prop_map(|(users, d)| DemandConfig { users, per_user_mbit_day: d }),
            );
            let ingest = proptest::option::of(0.0..500.0f64)
                .prop_map(|t| IngestConfig { t_min_override: t });
            (route, simulation, sweep, optimizer, demand, ingest).prop_map(
                |(route, simulation, sweep, optimizer, demand, ingest)| ExperimentConfig {
                    route,
                    simulation,
                    sweep,
                    optimizer,
                    demand,
                    ingest,
                },
            )
        }

        proptest! {
            #[test]
            fn serialize_parse_is_identity(cfg in arb_config()) {
                let text = serialize(&cfg);
                let reparsed = parse(&text).unwrap();
                prop_assert_eq!(&cfg, &reparsed);
            }
        }
    }
}
