//! Stochastic building blocks of a single data-mule round trip.
//!
//! A vehicle alternates between waiting at a bus stop (contact time, uniform
//! on `[c1, c2]`) and driving to the other region (travel time, a fixed
//! minimum plus an exponentially distributed delay). One full cycle — contact
//! at the urban stop A, drive to the rural stop B, contact at B, drive back —
//! is the vehicle's inter-arrival time at A.
//!
//! All durations are minutes. Distributions validate their parameters at
//! construction so sampling never fails.

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Uniform contact-time window `[c1, c2]` at a bus stop, in minutes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactTimeDist<T> {
    c1: T,
    c2: T,
}

impl<T: Scalar> ContactTimeDist<T> {
    /// Requires `0 <= c1 <= c2`, both finite.
    pub fn new(c1: T, c2: T) -> Result<Self> {
        if !c1.is_finite() || !c2.is_finite() || c1 < T::zero() || c2 < c1 {
            return Err(Error::InvalidParameter(format!(
                "contact-time bounds must satisfy 0 <= c1 <= c2, got [{c1}, {c2}]"
            )));
        }
        Ok(Self { c1, c2 })
    }

    /// Minimum waiting time `c1`.
    pub fn min_wait(&self) -> T {
        self.c1
    }

    /// Maximum waiting time `c2`.
    pub fn max_wait(&self) -> T {
        self.c2
    }

    /// Mean waiting time `(c1 + c2) / 2`.
    pub fn mean(&self) -> T {
        (self.c1 + self.c2) / T::lit(2.0)
    }

    /// Draw one contact time, uniform on `[c1, c2]`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        if self.c1 == self.c2 {
            self.c1
        } else {
            rng.random_range(self.c1..self.c2)
        }
    }
}

/// One-way travel time: a delay-free minimum plus an exponential delay.
///
/// Samples are `t_min + E` where `E ~ Exp(1 / mean_delay)`, so the sample
/// mean converges to `t_min + mean_delay`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TravelTimeDist<T> {
    t_min: T,
    mean_delay: T,
}

impl<T: Scalar> TravelTimeDist<T> {
    /// Requires `t_min >= 0` and `mean_delay >= 0`, both finite.
    pub fn new(t_min: T, mean_delay: T) -> Result<Self> {
        if !t_min.is_finite() || !mean_delay.is_finite() || t_min < T::zero() || mean_delay < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "travel-time parameters must be non-negative, got t_min={t_min}, mean_delay={mean_delay}"
            )));
        }
        Ok(Self { t_min, mean_delay })
    }

    /// Delay-free optimal-path travel time.
    pub fn t_min(&self) -> T {
        self.t_min
    }

    /// Mean of the exponential delay component.
    pub fn mean_delay(&self) -> T {
        self.mean_delay
    }

    /// Mean travel time `t_min + mean_delay`.
    pub fn mean(&self) -> T {
        self.t_min + self.mean_delay
    }

    /// Draw one travel time via inverse-CDF sampling of the delay.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        if self.mean_delay == T::zero() {
            return self.t_min;
        }
        let u = rng.random_range(T::zero()..T::one());
        self.t_min - self.mean_delay * (T::one() - u).ln()
    }
}

/// All stochastic parameters of one urban(A) <-> rural(B) corridor, plus the
/// wireless link rate available while a vehicle sits at a gateway.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouteModel<T> {
    contact_a: ContactTimeDist<T>,
    contact_b: ContactTimeDist<T>,
    travel_ab: TravelTimeDist<T>,
    travel_ba: TravelTimeDist<T>,
    link_rate: T,
}

impl<T: Scalar> RouteModel<T> {
    /// Requires `link_rate > 0` Mbit/s; the component distributions carry
    /// their own invariants.
    pub fn new(
        contact_a: ContactTimeDist<T>,
        contact_b: ContactTimeDist<T>,
        travel_ab: TravelTimeDist<T>,
        travel_ba: TravelTimeDist<T>,
        link_rate: T,
    ) -> Result<Self> {
        if !link_rate.is_finite() || link_rate <= T::zero() {
            return Err(Error::InvalidParameter(format!(
                "link rate must be positive, got {link_rate}"
            )));
        }
        Ok(Self {
            contact_a,
            contact_b,
            travel_ab,
            travel_ba,
            link_rate,
        })
    }

    /// Symmetric route: identical contact windows at both stops and identical
    /// travel-time parameters in both directions.
    pub fn symmetric(
        contact: ContactTimeDist<T>,
        travel: TravelTimeDist<T>,
        link_rate: T,
    ) -> Result<Self> {
        Self::new(contact, contact, travel, travel, link_rate)
    }

    pub fn contact_a(&self) -> &ContactTimeDist<T> {
        &self.contact_a
    }

    pub fn contact_b(&self) -> &ContactTimeDist<T> {
        &self.contact_b
    }

    pub fn travel_ab(&self) -> &TravelTimeDist<T> {
        &self.travel_ab
    }

    pub fn travel_ba(&self) -> &TravelTimeDist<T> {
        &self.travel_ba
    }

    /// Wireless link rate in Mbit/s.
    pub fn link_rate(&self) -> T {
        self.link_rate
    }

    /// Whether the contact windows at A and B share the same `[c1, c2]`.
    pub fn symmetric_contacts(&self) -> bool {
        self.contact_a == self.contact_b
    }

    /// Mean round-trip time in minutes, computed in closed form:
    /// the sum of the four component means.
    pub fn mean_round_trip(&self) -> T {
        self.contact_a.mean() + self.travel_ab.mean() + self.contact_b.mean() + self.travel_ba.mean()
    }

    /// Smallest possible round-trip duration.
    pub fn min_round_trip(&self) -> T {
        self.contact_a.min_wait()
            + self.travel_ab.t_min()
            + self.contact_b.min_wait()
            + self.travel_ba.t_min()
    }

    /// Draw one full round trip. The four components are drawn independently,
    /// in cycle order: contact at A, travel A->B, contact at B, travel B->A.
    pub fn sample_round_trip<R: Rng + ?Sized>(&self, rng: &mut R) -> RoundTripSample<T> {
        let contact_a = self.contact_a.sample(rng);
        let travel_ab = self.travel_ab.sample(rng);
        let contact_b = self.contact_b.sample(rng);
        let travel_ba = self.travel_ba.sample(rng);
        RoundTripSample {
            contact_a,
            travel_ab,
            contact_b,
            travel_ba,
            total: contact_a + travel_ab + contact_b + travel_ba,
        }
    }
}

/// One sampled round trip; `total` is the sum of the four components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundTripSample<T> {
    pub contact_a: T,
    pub travel_ab: T,
    pub contact_b: T,
    pub travel_ba: T,
    pub total: T,
}
