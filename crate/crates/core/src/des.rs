//! Event-driven Monte-Carlo simulation of the mule fleet.
//!
//! Each vehicle cycles through four phases — contact at A, travel to B,
//! contact at B, travel back to A — with durations drawn from the route's
//! distributions. A status update is stamped with the moment a vehicle
//! begins its contact at the rural stop B and is delivered when the vehicle
//! arrives back at A. The monitor at A keeps the freshest generation
//! timestamp it has seen; deliveries carrying older data than the monitor
//! already holds are stale and neither reset the age nor produce a peak.
//!
//! The engine is continuous-time: events carry exact fractional-minute
//! timestamps, so peak values have no discretisation error. Ties in the
//! event queue break by vehicle id, which together with the seeded RNG makes
//! every run bit-reproducible.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::SeedableRng;
use rand_pcg::Pcg64;

use crate::analytics::{self, MINUTES_TO_SECONDS};
use crate::error::{Error, Result};
use crate::model::RouteModel;
use crate::scalar::Scalar;
use crate::superposition::DEFAULT_WARM_UP_MULTIPLIER;

/// Where a vehicle currently is in its cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    ContactA,
    TravelAB,
    ContactB,
    TravelBA,
}

impl Phase {
    fn next(self) -> Self {
        match self {
            Phase::ContactA => Phase::TravelAB,
            Phase::TravelAB => Phase::ContactB,
            Phase::ContactB => Phase::TravelBA,
            Phase::TravelBA => Phase::ContactA,
        }
    }
}

/// One update handed to the monitor: when it arrived and when its payload
/// was generated at the rural stop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delivery<T> {
    pub delivery_time: T,
    pub generation_time: T,
}

/// What the monitor did with a delivery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeliveryOutcome<T> {
    /// First delivery observed; it defines the start of the observation
    /// window and carries no peak (a peak needs a predecessor).
    SeededMonitor,
    /// Fresher than anything seen: the age immediately before this arrival
    /// is recorded as a peak, then the age drops.
    Effective { peak: T },
    /// Older than the monitor's current data; ignored by the sawtooth.
    Stale,
}

/// Monitor-side accounting of the age-of-information sawtooth.
///
/// Feed it deliveries in arrival order via [`record_delivery`]; close it with
/// [`finish`] to obtain the timeline statistics. The age between effective
/// deliveries grows with slope one, so the time average is exact trapezoid
/// area, no sampling involved.
///
/// [`record_delivery`]: MonitorState::record_delivery
/// [`finish`]: MonitorState::finish
#[derive(Debug, Clone)]
pub struct MonitorState<T> {
    deliveries: Vec<Delivery<T>>,
    peaks: Vec<T>,
    freshest: Option<T>,
    last_delivery_time: Option<T>,
    window_start: Option<T>,
    last_effective_time: T,
    age_after_last_effective: T,
    integral: T,
}

impl<T: Scalar> MonitorState<T> {
    pub fn new() -> Self {
        Self {
            deliveries: Vec::new(),
            peaks: Vec::new(),
            freshest: None,
            last_delivery_time: None,
            window_start: None,
            last_effective_time: T::zero(),
            age_after_last_effective: T::zero(),
            integral: T::zero(),
        }
    }

    /// Record one delivery. Delivery times must be non-decreasing and a
    /// payload cannot be generated after it arrives.
    pub fn record_delivery(
        &mut self,
        delivery_time: T,
        generation_time: T,
    ) -> Result<DeliveryOutcome<T>> {
        if let Some(last) = self.last_delivery_time {
            if delivery_time < last {
                return Err(Error::ContractViolation(format!(
                    "delivery at {delivery_time} arrived before the previous one at {last}"
                )));
            }
        }
        if generation_time > delivery_time {
            return Err(Error::ContractViolation(format!(
                "generation time {generation_time} lies after delivery time {delivery_time}"
            )));
        }
        self.last_delivery_time = Some(delivery_time);
        self.deliveries.push(Delivery { delivery_time, generation_time });

        match self.freshest {
            None => {
                self.freshest = Some(generation_time);
                self.window_start = Some(delivery_time);
                self.last_effective_time = delivery_time;
                self.age_after_last_effective = delivery_time - generation_time;
                Ok(DeliveryOutcome::SeededMonitor)
            }
            Some(current) if generation_time > current => {
                let peak = delivery_time - current;
                let age_before = self.age_after_last_effective
                    + (delivery_time - self.last_effective_time);
                debug_assert!((peak - age_before).abs() <= T::lit(1e-9) * peak.abs().max(T::one()));
                self.integral = self.integral
                    + (self.age_after_last_effective + age_before) / T::lit(2.0)
                        * (delivery_time - self.last_effective_time);
                self.peaks.push(peak);
                self.freshest = Some(generation_time);
                self.last_effective_time = delivery_time;
                self.age_after_last_effective = delivery_time - generation_time;
                Ok(DeliveryOutcome::Effective { peak })
            }
            Some(_) => Ok(DeliveryOutcome::Stale),
        }
    }

    /// Close the window and compute the sawtooth statistics. Needs at least
    /// two effective deliveries, otherwise no peak exists.
    pub fn finish(self) -> Result<AoITimeline<T>> {
        let window_start = self.window_start.ok_or_else(|| {
            Error::InvalidParameter("no deliveries were recorded".into())
        })?;
        if self.peaks.is_empty() {
            return Err(Error::InvalidParameter(
                "timeline needs at least two effective deliveries to define a peak".into(),
            ));
        }
        let window = self.last_effective_time - window_start;
        if window <= T::zero() {
            return Err(Error::NumericalFailure(
                "observation window has zero length".into(),
            ));
        }
        let count = T::from_usize(self.peaks.len()).unwrap();
        let mpaoi = self.peaks.iter().fold(T::zero(), |a, &p| a + p) / count;
        Ok(AoITimeline {
            deliveries: self.deliveries,
            effective_peaks: self.peaks,
            maoi: self.integral / window,
            mpaoi,
            observation_window: (window_start, self.last_effective_time),
        })
    }
}

impl<T: Scalar> Default for MonitorState<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Delivery log and sawtooth statistics of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct AoITimeline<T> {
    /// Every delivery inside the observation span, arrival order, stale ones
    /// included.
    pub deliveries: Vec<Delivery<T>>,
    /// Age immediately before each effective delivery after the first.
    pub effective_peaks: Vec<T>,
    /// Time average of the sawtooth over the observation window.
    pub maoi: T,
    /// Arithmetic mean of the effective peaks.
    pub mpaoi: T,
    /// First and last effective delivery times.
    pub observation_window: (T, T),
}

impl<T: Scalar> AoITimeline<T> {
    /// Number of effective deliveries (the seeding one plus one per peak).
    pub fn effective_deliveries(&self) -> usize {
        self.effective_peaks.len() + 1
    }

    /// Deliveries that fall inside the half-open window `(start, end]`.
    pub fn deliveries_in_window(&self) -> usize {
        let (start, end) = self.observation_window;
        self.deliveries
            .iter()
            .filter(|d| d.delivery_time > start && d.delivery_time <= end)
            .count()
    }
}

/// Run one replication: `n` vehicles for `horizon` minutes under `seed`,
/// discarding five mean round trips of warm-up.
pub fn run_simulation<T: Scalar>(
    route: &RouteModel<T>,
    n: u32,
    horizon: T,
    seed: u64,
) -> Result<AoITimeline<T>> {
    let warm_up = route.mean_round_trip() * T::lit(DEFAULT_WARM_UP_MULTIPLIER);
    run_simulation_with_warm_up(route, n, horizon, warm_up, seed)
}

/// Same as [`run_simulation`] with an explicit warm-up cutoff.
pub fn run_simulation_with_warm_up<T: Scalar>(
    route: &RouteModel<T>,
    n: u32,
    horizon: T,
    warm_up: T,
    seed: u64,
) -> Result<AoITimeline<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("vehicle count must be at least 1".into()));
    }
    let mu = route.mean_round_trip();
    if mu <= T::zero() {
        return Err(Error::InvalidParameter("route has zero mean round trip".into()));
    }
    if horizon < mu * T::lit(50.0) {
        return Err(Error::InvalidParameter(format!(
            "horizon {horizon} too short: need at least 50 mean round trips ({})",
            mu * T::lit(50.0)
        )));
    }
    if warm_up < T::zero() || warm_up >= horizon {
        return Err(Error::InvalidParameter(format!(
            "warm-up {warm_up} must lie in [0, horizon)"
        )));
    }

    let mut rng = Pcg64::seed_from_u64(seed);
    let mut monitor = MonitorState::new();
    let mut phases = vec![Phase::ContactA; n as usize];
    let mut carried: Vec<Option<T>> = vec![None; n as usize];

    // all vehicles begin their contact at A at t = 0; the warm-up discard
    // erases the synchronised start
    let mut queue: BinaryHeap<PhaseEnd<T>> = BinaryHeap::with_capacity(n as usize);
    for vehicle in 0..n {
        let end = route.contact_a().sample(&mut rng);
        queue.push(PhaseEnd { time: end, vehicle });
    }

    while let Some(event) = queue.pop() {
        let now = event.time;
        if now > horizon {
            break;
        }
        let idx = event.vehicle as usize;
        let phase = phases[idx];
        match phase {
            Phase::TravelAB => {
                // contact at B starts now: stamp the payload
                carried[idx] = Some(now);
            }
            Phase::TravelBA => {
                // arrival at A: hand the payload to the monitor
                let generation = carried[idx].take().expect("vehicle returned without payload");
                if now > warm_up {
                    monitor.record_delivery(now, generation)?;
                }
            }
            _ => {}
        }
        let next = phase.next();
        phases[idx] = next;
        let duration = match next {
            Phase::ContactA => route.contact_a().sample(&mut rng),
            Phase::TravelAB => route.travel_ab().sample(&mut rng),
            Phase::ContactB => route.contact_b().sample(&mut rng),
            Phase::TravelBA => route.travel_ba().sample(&mut rng),
        };
        queue.push(PhaseEnd { time: now + duration, vehicle: event.vehicle });
    }

    monitor.finish()
}

/// Averaged closed-form and simulated metrics for one `(route, n)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport<T> {
    pub n: u32,
    /// Mean round-trip time of the route, minutes.
    pub mu: T,
    /// Mean one-way delivery time B -> A, minutes.
    pub one_way_floor: T,
    pub simulated_maoi: T,
    pub simulated_mpaoi: T,
    pub approx_mpaoi: T,
    /// `|simulated_mpaoi - approx_mpaoi|`.
    pub approx_error: T,
    /// Delivered data per observation time, Mbit/s, averaged over seeds.
    pub simulated_mean_rate: T,
    /// Closed-form rate for the same fleet, Mbit/s.
    pub analytic_mean_rate: T,
    /// Mean data size per arrival used by both rates, Mbit.
    pub mean_data_size: T,
    /// Set when `mean_data_size` came from the Monte-Carlo fallback rather
    /// than the closed form (asymmetric contact windows).
    pub data_size_estimated: bool,
    /// Mean gap between consecutive arrivals at A, minutes.
    pub simulated_mean_gap: T,
    pub mean_deliveries: T,
    pub mean_effective_deliveries: T,
    pub seeds: Vec<u64>,
    pub horizon: T,
    pub warm_up: T,
}

/// Run one replication per seed and average the timeline statistics.
pub fn run_replications<T: Scalar>(
    route: &RouteModel<T>,
    n: u32,
    horizon: T,
    seeds: &[u64],
) -> Result<MetricsReport<T>> {
    let warm_up = route.mean_round_trip() * T::lit(DEFAULT_WARM_UP_MULTIPLIER);
    run_replications_with_warm_up(route, n, horizon, warm_up, seeds)
}

/// Same as [`run_replications`] with an explicit warm-up cutoff.
pub fn run_replications_with_warm_up<T: Scalar>(
    route: &RouteModel<T>,
    n: u32,
    horizon: T,
    warm_up: T,
    seeds: &[u64],
) -> Result<MetricsReport<T>> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("at least one seed is required".into()));
    }
    let (mean_data_size, data_size_estimated) = analytics::mean_data_size_or_estimate(route)?;

    let mut sum_maoi = T::zero();
    let mut sum_mpaoi = T::zero();
    let mut sum_rate = T::zero();
    let mut sum_gap = T::zero();
    let mut sum_deliveries = T::zero();
    let mut sum_effective = T::zero();
    for &seed in seeds {
        let timeline = run_simulation_with_warm_up(route, n, horizon, warm_up, seed)?;
        let (start, end) = timeline.observation_window;
        let span = end - start;
        let count = timeline.deliveries_in_window();
        if count == 0 {
            return Err(Error::NumericalFailure("no deliveries inside the window".into()));
        }
        let count_t = T::from_usize(count).unwrap();
        sum_maoi = sum_maoi + timeline.maoi;
        sum_mpaoi = sum_mpaoi + timeline.mpaoi;
        sum_rate = sum_rate + count_t * mean_data_size / (span * T::lit(MINUTES_TO_SECONDS));
        sum_gap = sum_gap + span / count_t;
        sum_deliveries = sum_deliveries + T::from_usize(timeline.deliveries.len()).unwrap();
        sum_effective = sum_effective + T::from_usize(timeline.effective_deliveries()).unwrap();
    }
    let reps = T::from_usize(seeds.len()).unwrap();
    let approx = analytics::mpaoi_approx(route, n)?;
    let simulated_mpaoi = sum_mpaoi / reps;
    let mu = route.mean_round_trip();
    Ok(MetricsReport {
        n,
        mu,
        one_way_floor: approx.one_way_floor,
        simulated_maoi: sum_maoi / reps,
        simulated_mpaoi,
        approx_mpaoi: approx.mpaoi,
        approx_error: (simulated_mpaoi - approx.mpaoi).abs(),
        simulated_mean_rate: sum_rate / reps,
        analytic_mean_rate: mean_data_size * T::from_count(n) / (mu * T::lit(MINUTES_TO_SECONDS)),
        mean_data_size,
        data_size_estimated,
        simulated_mean_gap: sum_gap / reps,
        mean_deliveries: sum_deliveries / reps,
        mean_effective_deliveries: sum_effective / reps,
        seeds: seeds.to_vec(),
        horizon,
        warm_up,
    })
}

/// Heap entry: the moment a vehicle's current phase ends. Ordered so the
/// binary heap pops the earliest time first, ties broken by vehicle id.
struct PhaseEnd<T> {
    time: T,
    vehicle: u32,
}

impl<T: Scalar> PartialEq for PhaseEnd<T> {
    fn eq(&self, other: &Self) -> bool {
        self.time == other.time && self.vehicle == other.vehicle
    }
}

impl<T: Scalar> Eq for PhaseEnd<T> {}

impl<T: Scalar> PartialOrd for PhaseEnd<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for PhaseEnd<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed so BinaryHeap (a max-heap) yields the earliest event
        other
            .time
            .partial_cmp(&self.time)
            .expect("non-finite event time")
            .then_with(|| other.vehicle.cmp(&self.vehicle))
    }
}

#[cfg(test)]
mod tests {
    use crate::model::{ContactTimeDist, TravelTimeDist};

    use super::*;

    fn table_route() -> RouteModel<f64> {
        RouteModel::symmetric(
            ContactTimeDist::new(3.0, 5.0).unwrap(),
            TravelTimeDist::new(100.0, 20.0).unwrap(),
            10.0,
        )
        .unwrap()
    }

    fn deterministic_route(contact: f64, leg: f64) -> RouteModel<f64> {
        RouteModel::symmetric(
            ContactTimeDist::new(contact, contact).unwrap(),
            TravelTimeDist::new(leg, 0.0).unwrap(),
            10.0,
        )
        .unwrap()
    }

    #[test]
    fn monitor_handles_scripted_deliveries() {
        let mut monitor = MonitorState::<f64>::new();
        assert_eq!(
            monitor.record_delivery(10.0, 6.0).unwrap(),
            DeliveryOutcome::SeededMonitor
        );
        assert_eq!(
            monitor.record_delivery(25.0, 20.0).unwrap(),
            DeliveryOutcome::Effective { peak: 19.0 }
        );
        assert_eq!(monitor.record_delivery(30.0, 18.0).unwrap(), DeliveryOutcome::Stale);
        assert_eq!(
            monitor.record_delivery(40.0, 35.0).unwrap(),
            DeliveryOutcome::Effective { peak: 20.0 }
        );
        let timeline = monitor.finish().unwrap();
        assert_eq!(timeline.effective_peaks, vec![19.0, 20.0]);
        assert_eq!(timeline.mpaoi, 19.5);
        assert_eq!(timeline.maoi, 12.0);
        assert_eq!(timeline.observation_window, (10.0, 40.0));
        assert_eq!(timeline.deliveries.len(), 4);
    }

    #[test]
    fn peak_spans_back_to_previous_generation() {
        let mut monitor = MonitorState::<f64>::new();
        monitor.record_delivery(10.0, 4.0).unwrap();
        let outcome = monitor.record_delivery(30.0, 25.0).unwrap();
        assert_eq!(outcome, DeliveryOutcome::Effective { peak: 26.0 });
    }

    #[test]
    fn single_delivery_defines_no_peak() {
        let mut monitor = MonitorState::<f64>::new();
        assert_eq!(
            monitor.record_delivery(5.0, 5.0).unwrap(),
            DeliveryOutcome::SeededMonitor
        );
        assert!(matches!(monitor.finish(), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn monitor_rejects_contract_violations() {
        let mut monitor = MonitorState::<f64>::new();
        monitor.record_delivery(10.0, 6.0).unwrap();
        assert!(matches!(
            monitor.record_delivery(9.0, 7.0),
            Err(Error::ContractViolation(_))
        ));
        assert!(matches!(
            monitor.record_delivery(12.0, 13.0),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn deterministic_route_cycles_exactly() {
        // 2-minute stops, 10-minute legs: 24-minute cycle, 12-minute one-way;
        // every peak is 24 + 12 = 36 and the age swings between 12 and 36
        let route = deterministic_route(2.0, 10.0);
        assert_eq!(route.mean_round_trip(), 24.0);
        let timeline = run_simulation(&route, 1, 100_000.0, 7).unwrap();
        assert!(timeline.effective_peaks.iter().all(|&p| p == 36.0));
        assert_eq!(timeline.mpaoi, 36.0);
        assert_eq!(timeline.maoi, 24.0);
    }

    #[test]
    fn zero_contact_at_a_shortens_the_cycle() {
        let route = RouteModel::new(
            ContactTimeDist::new(0.0, 0.0).unwrap(),
            ContactTimeDist::new(2.0, 2.0).unwrap(),
            TravelTimeDist::new(10.0, 0.0).unwrap(),
            TravelTimeDist::new(10.0, 0.0).unwrap(),
            10.0,
        )
        .unwrap();
        assert_eq!(route.mean_round_trip(), 22.0);
        let timeline = run_simulation(&route, 1, 100_000.0, 7).unwrap();
        assert_eq!(timeline.mpaoi, 34.0);
    }

    #[test]
    fn single_vehicle_peaks_average_to_cycle_plus_one_way() {
        let route = table_route();
        let report = run_replications(&route, 1, 1e5, &(0..20).collect::<Vec<u64>>()).unwrap();
        // every delivery is effective with one vehicle
        assert_eq!(report.mean_deliveries, report.mean_effective_deliveries);
        assert!(
            (report.simulated_mpaoi - 372.0).abs() < 372.0 * 0.05,
            "mpaoi {}",
            report.simulated_mpaoi
        );
    }

    #[test]
    fn replication_reports_are_bit_reproducible() {
        let route = table_route();
        let seeds = [3u64, 5, 8];
        let a = run_replications(&route, 4, 20_000.0, &seeds).unwrap();
        let b = run_replications(&route, 4, 20_000.0, &seeds).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn merged_arrival_gap_matches_superposition_mean() {
        let route = table_route();
        let report = run_replications(&route, 20, 1e5, &(0..10).collect::<Vec<u64>>()).unwrap();
        let rel = (report.simulated_mean_gap - 12.4).abs() / 12.4;
        assert!(rel < 0.02, "gap {} off by {rel}", report.simulated_mean_gap);
    }

    #[test]
    fn sawtooth_reconstruction_is_consistent() {
        let route = table_route();
        let timeline = run_simulation(&route, 5, 50_000.0, 99).unwrap();
        // replay the deliveries: freshest timestamp never decreases, each
        // peak equals the age immediately before its effective delivery
        let mut freshest: Option<f64> = None;
        let mut peaks = Vec::new();
        for d in &timeline.deliveries {
            assert!(d.generation_time <= d.delivery_time);
            match freshest {
                None => freshest = Some(d.generation_time),
                Some(u) if d.generation_time > u => {
                    peaks.push(d.delivery_time - u);
                    freshest = Some(d.generation_time);
                }
                _ => {}
            }
        }
        assert_eq!(peaks, timeline.effective_peaks);
        assert!(timeline.effective_peaks.iter().all(|&p| p >= 0.0));
        assert!(timeline.maoi > 0.0);
        // peaks sit above the one-way floor on average
        assert!(timeline.mpaoi >= analytics::one_way_floor(&route));
    }

    #[test]
    fn asymmetric_route_reports_estimated_data_size() {
        let route = RouteModel::new(
            ContactTimeDist::new(2.0, 6.0).unwrap(),
            ContactTimeDist::new(3.0, 5.0).unwrap(),
            TravelTimeDist::new(100.0, 20.0).unwrap(),
            TravelTimeDist::new(90.0, 15.0).unwrap(),
            10.0,
        )
        .unwrap();
        let report = run_replications(&route, 2, 15_000.0, &[1, 2]).unwrap();
        assert!(report.data_size_estimated);
        assert!(report.analytic_mean_rate > 0.0);
        assert!(report.simulated_mean_rate > 0.0);
    }

    #[test]
    fn estimate_stable_when_horizon_doubles() {
        let route = table_route();
        let seeds: Vec<u64> = (0..10).collect();
        let short = run_replications(&route, 5, 1e5, &seeds).unwrap();
        let long = run_replications(&route, 5, 2e5, &seeds).unwrap();
        let rel = (short.simulated_mpaoi - long.simulated_mpaoi).abs() / long.simulated_mpaoi;
        assert!(rel < 0.02, "horizon sensitivity {rel}");
    }

    #[test]
    fn invalid_runs_are_rejected() {
        let route = table_route();
        assert!(matches!(
            run_simulation(&route, 0, 1e5, 1),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            run_simulation(&route, 1, 100.0, 1),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            run_replications(&route, 1, 1e5, &[]),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    #[ignore = "diagnostic: prints the approximation-error profile over n"]
    fn mpaoi_error_profile() {
        let route = table_route();
        let seeds: Vec<u64> = (0..20).collect();
        println!("n | simulated | approx | error | eff. fraction");
        for n in 1..=20u32 {
            let r = run_replications(&route, n, 1e5, &seeds).unwrap();
            println!(
                "{n:2} | {:9.3} | {:7.3} | {:+6.3} | {:.3}",
                r.simulated_mpaoi,
                r.approx_mpaoi,
                r.simulated_mpaoi - r.approx_mpaoi,
                r.mean_effective_deliveries / r.mean_deliveries,
            );
        }
    }
}
