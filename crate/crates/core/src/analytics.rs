//! Closed-form performance metrics of one corridor.
//!
//! Everything here is pure arithmetic on [`RouteModel`] parameters. Durations
//! stay in minutes; the single minutes-to-seconds conversion required to mix
//! Mbit/s link rates with minute-valued contact times happens in this module
//! (see [`MINUTES_TO_SECONDS`]) and nowhere else.

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;

use crate::error::{Error, Result};
use crate::model::RouteModel;
use crate::scalar::Scalar;

/// The one unit-conversion constant of the crate.
pub const MINUTES_TO_SECONDS: f64 = 60.0;

/// Sample count and fixed seed for [`mean_data_size_or_estimate`]'s fallback.
const FALLBACK_MC_SAMPLES: u32 = 1_000_000;
const FALLBACK_MC_SEED: u64 = 0x6d63_5f64_6174_6100;

/// Mean transferred data size and effective transmission rate for `n`
/// vehicles on a route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputMetrics<T> {
    /// Mean data size moved per vehicle arrival, Mbit.
    pub mean_data_size: T,
    /// Mean effective transmission rate of the whole fleet, Mbit/s.
    pub mean_rate: T,
    /// Arrival rate of the merged vehicle stream, per minute.
    pub per_arrival_rate: T,
}

/// Closed-form approximation of the mean peak age of information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AoIMetricsApprox<T> {
    /// Approximate mean peak age, minutes: `one_way_floor + mu / n`.
    pub mpaoi: T,
    /// Mean one-way delivery time from the rural stop to the monitor,
    /// `E[contact_B] + E[travel_BA]`; the large-fleet limit of the peak age.
    pub one_way_floor: T,
}

/// Aggregate daily traffic demand of a served community.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrafficDemand<T> {
    pub users: u64,
    /// Mbit per user per day.
    pub per_user_demand: T,
    /// Total Mbit per day.
    pub total: T,
}

/// One point of the transferred-data-size CCDF. `clamped` is set when the
/// queried size fell outside the distribution's support and the value was
/// pinned to 1 or 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CcdfPoint<T> {
    pub value: T,
    pub clamped: bool,
}

fn require_symmetric_contacts<T: Scalar>(route: &RouteModel<T>) -> Result<()> {
    if route.symmetric_contacts() {
        Ok(())
    } else {
        Err(Error::UnsupportedConfiguration(
            "closed-form data-size expressions need identical contact windows at both stops; \
             estimate via mean_data_size_monte_carlo instead"
                .into(),
        ))
    }
}

/// Probability that the data size moved in one arrival exceeds `m` Mbit.
///
/// The size is `link_rate * min(contact_A, contact_B)`; with identical
/// uniform contact windows the CCDF is `((c2 - m/R)/(c2 - c1))^2` on the
/// support `[c1 * R, c2 * R]` (contact times converted to seconds).
pub fn data_size_ccdf<T: Scalar>(route: &RouteModel<T>, m: T) -> Result<CcdfPoint<T>> {
    require_symmetric_contacts(route)?;
    let rate_per_minute = route.link_rate() * T::lit(MINUTES_TO_SECONDS);
    let c1 = route.contact_a().min_wait();
    let c2 = route.contact_a().max_wait();
    let lower = c1 * rate_per_minute;
    let upper = c2 * rate_per_minute;
    if m < lower {
        return Ok(CcdfPoint { value: T::one(), clamped: true });
    }
    if m > upper {
        return Ok(CcdfPoint { value: T::zero(), clamped: true });
    }
    if c1 == c2 {
        // degenerate window: all mass at c1 * R
        let value = if m < upper { T::one() } else { T::zero() };
        return Ok(CcdfPoint { value, clamped: false });
    }
    let ratio = (c2 - m / rate_per_minute) / (c2 - c1);
    // rounding in m / rate can push the edge values a hair outside [0, 1]
    let value = (ratio * ratio).min(T::one()).max(T::zero());
    Ok(CcdfPoint { value, clamped: false })
}

/// Mean data size moved per vehicle arrival, `R * (2*c1 + c2)/3` Mbit
/// (uplink or downlink; the transfer window is the shorter of the two
/// contacts of the trip).
pub fn mean_data_size<T: Scalar>(route: &RouteModel<T>) -> Result<T> {
    require_symmetric_contacts(route)?;
    let c1 = route.contact_a().min_wait();
    let c2 = route.contact_a().max_wait();
    let mean_min_contact = (T::lit(2.0) * c1 + c2) / T::lit(3.0);
    Ok(route.link_rate() * mean_min_contact * T::lit(MINUTES_TO_SECONDS))
}

/// Monte-Carlo estimate of the mean data size, usable on routes with
/// different contact windows at the two stops.
pub fn mean_data_size_monte_carlo<T: Scalar, R: Rng + ?Sized>(
    route: &RouteModel<T>,
    samples: u32,
    rng: &mut R,
) -> T {
    let mut sum = T::zero();
    for _ in 0..samples {
        let a = route.contact_a().sample(rng);
        let b = route.contact_b().sample(rng);
        sum = sum + a.min(b);
    }
    let mean_min_contact = sum / T::from_count(samples);
    route.link_rate() * mean_min_contact * T::lit(MINUTES_TO_SECONDS)
}

/// Closed-form mean data size when the route supports it, otherwise the
/// Monte-Carlo fallback with a fixed internal seed. The flag reports whether
/// the value is an estimate.
pub fn mean_data_size_or_estimate<T: Scalar>(route: &RouteModel<T>) -> Result<(T, bool)> {
    match mean_data_size(route) {
        Ok(size) => Ok((size, false)),
        Err(Error::UnsupportedConfiguration(_)) => {
            let mut rng = Pcg64::seed_from_u64(FALLBACK_MC_SEED);
            Ok((mean_data_size_monte_carlo(route, FALLBACK_MC_SAMPLES, &mut rng), true))
        }
        Err(e) => Err(e),
    }
}

/// Mean effective transmission rate of `n` vehicles, Mbit/s: the mean data
/// size per arrival times the merged arrival rate.
pub fn mean_transmission_rate<T: Scalar>(route: &RouteModel<T>, n: u32) -> Result<T> {
    Ok(throughput_metrics(route, n)?.mean_rate)
}

/// Mean data size, arrival rate, and effective rate in one struct.
pub fn throughput_metrics<T: Scalar>(route: &RouteModel<T>, n: u32) -> Result<ThroughputMetrics<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("vehicle count must be at least 1".into()));
    }
    let mean_data_size = mean_data_size(route)?;
    let mu = route.mean_round_trip();
    if mu <= T::zero() {
        return Err(Error::InvalidParameter("route has zero mean round trip".into()));
    }
    let per_arrival_rate = T::from_count(n) / mu;
    let mean_rate = mean_data_size * per_arrival_rate / T::lit(MINUTES_TO_SECONDS);
    Ok(ThroughputMetrics { mean_data_size, mean_rate, per_arrival_rate })
}

/// Mean one-way delivery time from the rural stop B to the monitor at A:
/// `E[contact_B] + E[travel_BA]`.
pub fn one_way_floor<T: Scalar>(route: &RouteModel<T>) -> T {
    route.contact_b().mean() + route.travel_ba().mean()
}

/// Approximate mean peak age of information for `n` vehicles:
/// `one_way_floor + mu / n`. Strictly decreasing in `n`, approaching the
/// floor as the fleet grows.
pub fn mpaoi_approx<T: Scalar>(route: &RouteModel<T>, n: u32) -> Result<AoIMetricsApprox<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("vehicle count must be at least 1".into()));
    }
    let floor = one_way_floor(route);
    let mpaoi = floor + route.mean_round_trip() / T::from_count(n);
    Ok(AoIMetricsApprox { mpaoi, one_way_floor: floor })
}

/// Total daily traffic of `users` subscribers, each demanding
/// `per_user_demand` Mbit/day.
pub fn daily_traffic<T: Scalar>(users: u64, per_user_demand: T) -> Result<TrafficDemand<T>> {
    if !per_user_demand.is_finite() || per_user_demand < T::zero() {
        return Err(Error::InvalidParameter(format!(
            "per-user demand must be non-negative, got {per_user_demand}"
        )));
    }
    let total = T::from_u64(users)
        .ok_or_else(|| Error::InvalidParameter(format!("user count {users} not representable")))?
        * per_user_demand;
    Ok(TrafficDemand { users, per_user_demand, total })
}
