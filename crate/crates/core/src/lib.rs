//! Performance model for vehicle-based delay-tolerant networks.
//!
//! Informal public-transport vehicles (minibuses, shared taxis) carry DTN
//! storage nodes between an Internet-connected urban gateway and a rural
//! gateway, shuttling data in both directions. This crate models one such
//! corridor as a set of renewal processes and provides:
//!
//! - [`model`]: contact-time and travel-time distributions, round-trip
//!   sampling, and closed-form round-trip means;
//! - [`superposition`]: equilibrium properties of the merged arrival stream
//!   of `n` vehicles, including the numeric inter-arrival density;
//! - [`analytics`]: closed-form throughput, data-size, and peak-age
//!   (freshness) approximations, plus daily traffic demand;
//! - [`des`]: an event-driven Monte-Carlo simulator producing exact sawtooth
//!   age-of-information statistics to validate the approximations;
//! - [`optimizer`]: minimum fleet size meeting freshness and rate targets
//!   under a cost model.
//!
//! Units: durations in minutes, data sizes in Mbit, rates in Mbit/s. The
//! minutes-to-seconds conversion happens only inside [`analytics`].
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*F64`
//! aliases at the crate root pick the double-precision instantiation used by
//! the CLI and the test suite.
//!
//! ```
//! use muledtn::{analytics, optimizer, ContactTimeDist, RouteModel, TravelTimeDist};
//!
//! let route = RouteModel::symmetric(
//!     ContactTimeDist::new(3.0, 5.0)?,
//!     TravelTimeDist::new(100.0, 20.0)?,
//!     10.0,
//! )?;
//! assert_eq!(route.mean_round_trip(), 248.0);
//! assert_eq!(analytics::mean_data_size(&route)?, 2200.0);
//!
//! let plan = optimizer::optimize(
//!     &route,
//!     &optimizer::QosTargets::new(200.0, 1.0)?,
//!     &optimizer::CostModel::two_region(300.0, 800.0)?,
//!     None,
//! )?;
//! assert_eq!(plan.n_opt, Some(7));
//! # Ok::<(), muledtn::Error>(())
//! ```

pub mod analytics;
pub mod des;
mod error;
pub mod model;
pub mod optimizer;
mod scalar;
pub mod superposition;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use model::{ContactTimeDist, RouteModel, RoundTripSample, TravelTimeDist};

pub type ContactTimeDistF64 = model::ContactTimeDist<f64>;
pub type TravelTimeDistF64 = model::TravelTimeDist<f64>;
pub type RouteModelF64 = model::RouteModel<f64>;
pub type RoundTripSampleF64 = model::RoundTripSample<f64>;
pub type SuperposedProcessF64 = superposition::SuperposedProcess<f64>;
pub type IntervalDensityGridF64 = superposition::IntervalDensityGrid<f64>;
pub type ThroughputMetricsF64 = analytics::ThroughputMetrics<f64>;
pub type AoIMetricsApproxF64 = analytics::AoIMetricsApprox<f64>;
pub type TrafficDemandF64 = analytics::TrafficDemand<f64>;
pub type AoITimelineF64 = des::AoITimeline<f64>;
pub type MetricsReportF64 = des::MetricsReport<f64>;
pub type QosTargetsF64 = optimizer::QosTargets<f64>;
pub type CostModelF64 = optimizer::CostModel<f64>;
pub type FleetPlanF64 = optimizer::FleetPlan<f64>;
