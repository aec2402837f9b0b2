//! Minimum-cost fleet sizing under freshness and rate targets.
//!
//! Both QoS constraints are monotone in the fleet size `n`: the peak-age
//! approximation `floor + mu/n` falls with `n` while the transmission rate
//! `E[m] * n / mu` grows with it. The smallest feasible fleet is therefore
//! the ceiling of the larger of two ratios, one per constraint; a linear
//! scan over `n` serves as an independent check of that closed form.

use crate::analytics::{self, MINUTES_TO_SECONDS};
use crate::error::{Error, Result};
use crate::model::RouteModel;
use crate::scalar::Scalar;

/// Quality-of-service targets a deployment must meet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QosTargets<T> {
    /// Highest acceptable mean peak age, minutes.
    pub mpaoi_threshold: T,
    /// Lowest acceptable mean transmission rate, Mbit/s.
    pub rate_threshold: T,
}

impl<T: Scalar> QosTargets<T> {
    pub fn new(mpaoi_threshold: T, rate_threshold: T) -> Result<Self> {
        if !mpaoi_threshold.is_finite() || mpaoi_threshold <= T::zero() {
            return Err(Error::InvalidParameter(format!(
                "peak-age threshold must be positive, got {mpaoi_threshold}"
            )));
        }
        if !rate_threshold.is_finite() || rate_threshold <= T::zero() {
            return Err(Error::InvalidParameter(format!(
                "rate threshold must be positive, got {rate_threshold}"
            )));
        }
        Ok(Self { mpaoi_threshold, rate_threshold })
    }
}

/// Hardware cost parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel<T> {
    /// Cost of one vehicle-mounted DTN node.
    pub mule_cost: T,
    /// Cost of one fixed gateway.
    pub gateway_cost: T,
    /// Gateways in the deployment; two for a single corridor, `1 + k` for a
    /// star of `k` rural stops sharing an urban hub.
    pub gateway_count: u32,
}

impl<T: Scalar> CostModel<T> {
    pub fn new(mule_cost: T, gateway_cost: T, gateway_count: u32) -> Result<Self> {
        if !mule_cost.is_finite() || mule_cost < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "mule cost must be non-negative, got {mule_cost}"
            )));
        }
        if !gateway_cost.is_finite() || gateway_cost < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "gateway cost must be non-negative, got {gateway_cost}"
            )));
        }
        Ok(Self { mule_cost, gateway_cost, gateway_count })
    }

    /// The usual two-gateway corridor.
    pub fn two_region(mule_cost: T, gateway_cost: T) -> Result<Self> {
        Self::new(mule_cost, gateway_cost, 2)
    }
}

/// Which QoS constraint fixes the fleet size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BindingConstraint {
    Aoi,
    Rate,
    Both,
}

/// Optimizer output. `feasible == false` means the peak-age target lies at
/// or below the one-way floor, which no fleet size can reach; the floor and
/// gap fields carry the diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FleetPlan<T> {
    pub feasible: bool,
    /// Smallest fleet meeting both targets; `None` when infeasible.
    pub n_opt: Option<u32>,
    /// Fleet size forced by the peak-age target (infinite when infeasible).
    pub alpha: T,
    /// Fleet size forced by the rate target.
    pub beta: T,
    pub binding_constraint: Option<BindingConstraint>,
    pub total_cost: Option<T>,
    /// Set when a total fleet size was supplied and `n_opt` exceeds it.
    pub fleet_cap_exceeded: bool,
    /// Mean one-way delivery time, the unreachable lower bound of the peak
    /// age.
    pub aoi_floor: T,
    /// `mpaoi_threshold - aoi_floor`; non-positive when infeasible.
    pub aoi_gap: T,
}

/// Smallest fleet meeting both targets, in closed form.
///
/// Needs the closed-form mean data size, so the route must have identical
/// contact windows at both stops.
pub fn optimize<T: Scalar>(
    route: &RouteModel<T>,
    targets: &QosTargets<T>,
    costs: &CostModel<T>,
    fleet_cap: Option<u32>,
) -> Result<FleetPlan<T>> {
    let mu = route.mean_round_trip();
    if mu <= T::zero() {
        return Err(Error::InvalidParameter("route has zero mean round trip".into()));
    }
    let floor = analytics::one_way_floor(route);
    let mean_data_size = analytics::mean_data_size(route)?;
    let beta = targets.rate_threshold * mu * T::lit(MINUTES_TO_SECONDS) / mean_data_size;
    let gap = targets.mpaoi_threshold - floor;

    if gap <= T::zero() {
        return Ok(FleetPlan {
            feasible: false,
            n_opt: None,
            alpha: T::infinity(),
            beta,
            binding_constraint: None,
            total_cost: None,
            fleet_cap_exceeded: false,
            aoi_floor: floor,
            aoi_gap: gap,
        });
    }

    let alpha = mu / gap;
    let required = alpha.max(beta).ceil().max(T::one());
    let n_opt = required
        .to_u32()
        .ok_or_else(|| Error::NumericalFailure(format!("fleet size {required} overflows")))?;
    let binding = if alpha > beta {
        BindingConstraint::Aoi
    } else if beta > alpha {
        BindingConstraint::Rate
    } else {
        BindingConstraint::Both
    };
    let total_cost =
        T::from_count(n_opt) * costs.mule_cost + T::from_count(costs.gateway_count) * costs.gateway_cost;
    Ok(FleetPlan {
        feasible: true,
        n_opt: Some(n_opt),
        alpha,
        beta,
        binding_constraint: Some(binding),
        total_cost: Some(total_cost),
        fleet_cap_exceeded: fleet_cap.is_some_and(|cap| n_opt > cap),
        aoi_floor: floor,
        aoi_gap: gap,
    })
}

/// Whether `n` vehicles meet both targets, evaluated through the analytics
/// expressions directly.
pub fn satisfies<T: Scalar>(route: &RouteModel<T>, targets: &QosTargets<T>, n: u32) -> Result<bool> {
    let aoi = analytics::mpaoi_approx(route, n)?;
    let rate = analytics::mean_transmission_rate(route, n)?;
    Ok(aoi.mpaoi <= targets.mpaoi_threshold && rate >= targets.rate_threshold)
}

/// Brute-force check of [`optimize`]: scan `n = 1..=max_n` and return the
/// first fleet size meeting both targets.
pub fn verify_by_scan<T: Scalar>(
    route: &RouteModel<T>,
    targets: &QosTargets<T>,
    max_n: u32,
) -> Result<Option<u32>> {
    if max_n == 0 {
        return Err(Error::InvalidParameter("scan bound must be at least 1".into()));
    }
    for n in 1..=max_n {
        if satisfies(route, targets, n)? {
            return Ok(Some(n));
        }
    }
    Ok(None)
}
