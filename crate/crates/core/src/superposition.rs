//! Equilibrium behaviour of the merged arrival stream of `n` vehicles.
//!
//! Each vehicle is a renewal process whose renewal interval is the full
//! round trip. At a gateway the streams superimpose; at equilibrium the mean
//! gap between consecutive arrivals (from any vehicle) is `mu / n`, and the
//! gap distribution follows from the single-vehicle survival function
//! `F(x) = P(T_v > x)`:
//!
//! ```text
//! g(x) = -d/dx [ F(x) * ( (1/mu) * integral_x^inf F(u) du )^(n-1) ]
//! ```
//!
//! The single-vehicle inter-arrival law (two uniform contacts convolved with
//! two shifted exponential legs) has no tidy closed form, so `g` is evaluated
//! numerically: cumulative trapezoid for the inner integral and second-order
//! finite differences for the outer derivative, on a grid running from 0 to
//! the far tail of the single-vehicle distribution.

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;

use crate::error::{Error, Result};
use crate::model::RouteModel;
use crate::scalar::Scalar;

/// Number of points in the default evaluation grid.
pub const GRID_POINTS: usize = 4096;

/// Sample count for the empirical survival fallback on asymmetric routes.
pub const SURVIVAL_MC_SAMPLES: usize = 1_000_000;

/// Warm-up discarded from merged-arrival simulations, in mean round trips.
pub const DEFAULT_WARM_UP_MULTIPLIER: f64 = 5.0;

/// Fixed seed for the empirical survival fallback, so survival grids are
/// reproducible without threading an RNG through callers.
const SURVIVAL_MC_SEED: u64 = 0x6d75_6c65_5f73_6600;

/// Derived equilibrium quantities of `n` superimposed vehicle processes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperposedProcess<T> {
    /// Number of DTN-equipped vehicles.
    pub n: u32,
    /// Single-vehicle mean round-trip time (minutes).
    pub mu: T,
    /// Mean gap between consecutive arrivals at a gateway, `mu / n`.
    pub mean_interarrival: T,
    /// Arrival rate of the merged stream, `n / mu` (per minute).
    pub arrival_rate: T,
}

/// Merge `n` identical renewal processes with mean interval `mu`.
pub fn superpose<T: Scalar>(mu: T, n: u32) -> Result<SuperposedProcess<T>> {
    if !mu.is_finite() || mu <= T::zero() {
        return Err(Error::InvalidParameter(format!(
            "mean round-trip time must be positive, got {mu}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("vehicle count must be at least 1".into()));
    }
    let count = T::from_count(n);
    Ok(SuperposedProcess {
        n,
        mu,
        mean_interarrival: mu / count,
        arrival_rate: count / mu,
    })
}

/// Inter-arrival density of the merged stream, tabulated on a grid, together
/// with the single-vehicle survival values it was derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalDensityGrid<T> {
    /// Strictly increasing gap durations (minutes).
    pub abscissae: Vec<T>,
    /// Density of the merged-stream gap at each abscissa (per minute).
    pub density: Vec<T>,
    /// Single-vehicle survival `P(T_v > x)` at each abscissa.
    pub survival_single: Vec<T>,
}

impl<T: Scalar> IntervalDensityGrid<T> {
    /// Trapezoid integral of the density over the grid; close to 1 by
    /// construction.
    pub fn integral(&self) -> T {
        trapezoid(&self.abscissae, &self.density)
    }

    /// Trapezoid first moment of the density; close to `mu / n`.
    pub fn first_moment(&self) -> T {
        let weighted: Vec<T> = self
            .abscissae
            .iter()
            .zip(&self.density)
            .map(|(&x, &g)| x * g)
            .collect();
        trapezoid(&self.abscissae, &weighted)
    }

    /// Cumulative distribution obtained by trapezoid integration, clamped to
    /// `[0, 1]`.
    pub fn cdf(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.abscissae.len());
        let mut acc = T::zero();
        out.push(T::zero());
        for i in 1..self.abscissae.len() {
            let h = self.abscissae[i] - self.abscissae[i - 1];
            acc = acc + (self.density[i] + self.density[i - 1]) / T::lit(2.0) * h;
            out.push(acc.min(T::one()));
        }
        out
    }

    /// Kolmogorov-Smirnov distance between this density's CDF and the
    /// empirical CDF of `samples`.
    pub fn ks_distance(&self, samples: &[T]) -> T {
        let mut sorted = samples.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-finite sample"));
        let cdf = self.cdf();
        let count = T::from_usize(sorted.len()).expect("sample count fits scalar");
        let mut dist = T::zero();
        for (i, &x) in sorted.iter().enumerate() {
            let model = interpolate(&self.abscissae, &cdf, x);
            let lo = T::from_usize(i).unwrap() / count;
            let hi = T::from_usize(i + 1).unwrap() / count;
            dist = dist.max((model - lo).abs()).max((model - hi).abs());
        }
        dist
    }
}

/// Single-vehicle inter-arrival survival `P(T_v > x)` evaluated on `grid`.
///
/// When the route has identical contact windows at both stops and identical
/// delay means in both directions, the survival is computed by numeric
/// convolution (sum of two uniforms against the two-stage exponential delay,
/// shifted by the fixed legs). Otherwise it falls back to the empirical
/// survival of [`SURVIVAL_MC_SAMPLES`] round-trip draws with a fixed seed.
///
/// The grid must be strictly increasing, start at or below the smallest
/// possible round trip, and reach far enough into the tail that the last
/// survival value is at most `1e-5`.
pub fn single_interarrival_survival<T: Scalar>(route: &RouteModel<T>, grid: &[T]) -> Result<Vec<T>> {
    let source = SurvivalSource::for_route(route);
    survival_on_grid(route, &source, grid)
}

/// Default evaluation grid: [`GRID_POINTS`] equally spaced points from 0 to
/// the `1 - 1e-6` quantile of the single-vehicle round trip.
///
/// Gaps of the merged stream can be arbitrarily short for `n >= 2` (two
/// vehicles may arrive back to back), so the grid starts at 0 rather than at
/// the single-vehicle support minimum.
pub fn density_grid<T: Scalar>(route: &RouteModel<T>) -> Vec<T> {
    let source = SurvivalSource::for_route(route);
    grid_from_source(&source)
}

/// Merged-stream inter-arrival density on `grid` for `n` vehicles.
pub fn interval_density<T: Scalar>(
    route: &RouteModel<T>,
    n: u32,
    grid: &[T],
) -> Result<IntervalDensityGrid<T>> {
    let source = SurvivalSource::for_route(route);
    let survival = survival_on_grid(route, &source, grid)?;
    interval_density_from_survival(grid, &survival, route.mean_round_trip(), n)
}

/// Convenience: build the default grid and evaluate the density in one pass.
pub fn interval_density_on_default_grid<T: Scalar>(
    route: &RouteModel<T>,
    n: u32,
) -> Result<IntervalDensityGrid<T>> {
    let source = SurvivalSource::for_route(route);
    let grid = grid_from_source(&source);
    let survival = survival_on_grid(route, &source, &grid)?;
    interval_density_from_survival(&grid, &survival, route.mean_round_trip(), n)
}

/// Evaluate the merged-stream density from a precomputed survival grid.
///
/// `survival` must hold `P(T > x)` of the component interval on `grid`, with
/// `P(T > x) = 1` everywhere at or below `grid[0]`, and `mu` its mean. This
/// entry point exists so the evaluator can be exercised against component
/// laws with known superpositions (e.g. exponential intervals, whose merged
/// stream is again exponential).
pub fn interval_density_from_survival<T: Scalar>(
    grid: &[T],
    survival: &[T],
    mu: T,
    n: u32,
) -> Result<IntervalDensityGrid<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("vehicle count must be at least 1".into()));
    }
    if !mu.is_finite() || mu <= T::zero() {
        return Err(Error::InvalidParameter(format!("mean interval must be positive, got {mu}")));
    }
    if grid.len() != survival.len() || grid.len() < 5 {
        return Err(Error::Domain(format!(
            "grid and survival must have equal length >= 5, got {} and {}",
            grid.len(),
            survival.len()
        )));
    }
    ensure_strictly_increasing(grid)?;
    if grid[0] < T::zero() {
        return Err(Error::Domain("grid must not start below zero".into()));
    }

    // Inner integral I(x) = integral_x^inf F(u) du. Since F == 1 below
    // grid[0] and integral_0^inf F = mu, I(grid[0]) = mu - grid[0].
    let len = grid.len();
    let mut inner = Vec::with_capacity(len);
    let mut acc = mu - grid[0];
    inner.push(acc.max(T::zero()));
    for i in 1..len {
        let h = grid[i] - grid[i - 1];
        acc = acc - (survival[i] + survival[i - 1]) / T::lit(2.0) * h;
        inner.push(acc.max(T::zero()));
    }

    // Bracketed product whose negated derivative is the density.
    let exponent = (n - 1) as i32;
    let bracket: Vec<T> = survival
        .iter()
        .zip(&inner)
        .map(|(&f, &i)| f * (i / mu).powi(exponent))
        .collect();

    let mut density = Vec::with_capacity(len);
    density.push(-lagrange_derivative(
        grid[0], grid[1], grid[2], bracket[0], bracket[1], bracket[2], grid[0],
    ));
    for i in 1..len - 1 {
        density.push(-(bracket[i + 1] - bracket[i - 1]) / (grid[i + 1] - grid[i - 1]));
    }
    density.push(-lagrange_derivative(
        grid[len - 3],
        grid[len - 2],
        grid[len - 1],
        bracket[len - 3],
        bracket[len - 2],
        bracket[len - 1],
        grid[len - 1],
    ));

    let clamp_floor = -T::lit(1e-6);
    for g in &mut density {
        if *g < T::zero() {
            if *g < clamp_floor {
                return Err(Error::NumericalFailure(format!(
                    "density value {g} below clamp tolerance; grid likely too coarse or inconsistent"
                )));
            }
            *g = T::zero();
        }
    }

    let result = IntervalDensityGrid {
        abscissae: grid.to_vec(),
        density,
        survival_single: survival.to_vec(),
    };

    let mass = result.integral();
    if (mass - T::one()).abs() > T::lit(1e-3) {
        return Err(Error::NumericalFailure(format!(
            "density mass {mass} deviates from 1; grid must cover [0, far tail]"
        )));
    }
    let moment = result.first_moment();
    let expected = mu / T::from_count(n);
    if (moment - expected).abs() > expected * T::lit(0.01) {
        return Err(Error::NumericalFailure(format!(
            "density first moment {moment} deviates from {expected}"
        )));
    }
    Ok(result)
}

/// Gaps between consecutive merged arrivals at one gateway, simulated by
/// running `n` independent vehicles over `horizon` minutes and discarding a
/// warm-up of five mean round trips.
pub fn simulate_superposition<T: Scalar, R: Rng + ?Sized>(
    route: &RouteModel<T>,
    n: u32,
    horizon: T,
    rng: &mut R,
) -> Result<Vec<T>> {
    let warm_up = route.mean_round_trip() * T::lit(DEFAULT_WARM_UP_MULTIPLIER);
    simulate_superposition_with_warm_up(route, n, horizon, warm_up, rng)
}

/// Same as [`simulate_superposition`] with an explicit warm-up cutoff.
pub fn simulate_superposition_with_warm_up<T: Scalar, R: Rng + ?Sized>(
    route: &RouteModel<T>,
    n: u32,
    horizon: T,
    warm_up: T,
    rng: &mut R,
) -> Result<Vec<T>> {
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

    let mut arrivals: Vec<T> = Vec::new();
    for _ in 0..n {
        let mut t = T::zero();
        loop {
            t = t + route.sample_round_trip(rng).total;
            if t > horizon {
                break;
            }
            if t > warm_up {
                arrivals.push(t);
            }
        }
    }
    arrivals.sort_by(|a, b| a.partial_cmp(b).expect("non-finite arrival time"));
    if arrivals.len() < 2 {
        return Err(Error::NumericalFailure(
            "fewer than two arrivals survived the warm-up".into(),
        ));
    }
    Ok(arrivals.windows(2).map(|w| w[1] - w[0]).collect())
}

/// How the single-vehicle survival is evaluated.
enum SurvivalSource<T> {
    /// Contact windows identical at both stops and equal delay means: numeric
    /// convolution of the contact sum (triangular) with the two-stage
    /// exponential delay, shifted by the fixed legs.
    Convolution { c1: T, c2: T, shift: T, theta: T },
    /// Sorted empirical round-trip samples.
    Empirical(Vec<T>),
}

impl<T: Scalar> SurvivalSource<T> {
    fn for_route(route: &RouteModel<T>) -> Self {
        let symmetric_delay = route.travel_ab().mean_delay() == route.travel_ba().mean_delay();
        if route.symmetric_contacts() && symmetric_delay {
            SurvivalSource::Convolution {
                c1: route.contact_a().min_wait(),
                c2: route.contact_a().max_wait(),
                shift: route.travel_ab().t_min() + route.travel_ba().t_min(),
                theta: route.travel_ab().mean_delay(),
            }
        } else {
            let mut rng = Pcg64::seed_from_u64(SURVIVAL_MC_SEED);
            let mut samples: Vec<T> = (0..SURVIVAL_MC_SAMPLES)
                .map(|_| route.sample_round_trip(&mut rng).total)
                .collect();
            samples.sort_by(|a, b| a.partial_cmp(b).expect("non-finite sample"));
            SurvivalSource::Empirical(samples)
        }
    }

    fn eval(&self, x: T) -> T {
        match self {
            SurvivalSource::Convolution { c1, c2, shift, theta } => {
                let y = x - *shift;
                if c1 == c2 {
                    return two_stage_exp_survival(y - *c1 - *c1, *theta);
                }
                // density of the contact sum: triangular on [2c1, 2c2]
                let width = *c2 - *c1;
                let peak = *c1 + *c2;
                let tri_up = |s: T| (s - *c1 - *c1) / (width * width);
                let tri_down = |s: T| (*c2 + *c2 - s) / (width * width);
                let up = simpson(*c1 + *c1, peak, 256, |s| {
                    tri_up(s) * two_stage_exp_survival(y - s, *theta)
                });
                let down = simpson(peak, *c2 + *c2, 256, |s| {
                    tri_down(s) * two_stage_exp_survival(y - s, *theta)
                });
                (up + down).min(T::one()).max(T::zero())
            }
            SurvivalSource::Empirical(samples) => {
                let below = samples.partition_point(|&s| s <= x);
                T::from_usize(samples.len() - below).unwrap()
                    / T::from_usize(samples.len()).unwrap()
            }
        }
    }

    /// Smallest x with survival at most 1e-6.
    fn upper_quantile(&self) -> T {
        match self {
            SurvivalSource::Convolution { c1: _, c2, shift, theta } => {
                let top = *shift + *c2 + *c2;
                if *theta == T::zero() {
                    return top;
                }
                let target = T::lit(1e-6);
                let mut hi = top + *theta * T::lit(20.0);
                while self.eval(hi) > target {
                    hi = hi + *theta * T::lit(20.0);
                }
                let mut lo = *shift;
                for _ in 0..128 {
                    let mid = (lo + hi) / T::lit(2.0);
                    if self.eval(mid) > target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hi
            }
            SurvivalSource::Empirical(samples) => *samples.last().expect("non-empty samples"),
        }
    }
}

fn grid_from_source<T: Scalar>(source: &SurvivalSource<T>) -> Vec<T> {
    let hi = source.upper_quantile();
    let steps = T::from_usize(GRID_POINTS - 1).unwrap();
    (0..GRID_POINTS)
        .map(|i| hi * T::from_usize(i).unwrap() / steps)
        .collect()
}

fn survival_on_grid<T: Scalar>(
    route: &RouteModel<T>,
    source: &SurvivalSource<T>,
    grid: &[T],
) -> Result<Vec<T>> {
    if grid.len() < 2 {
        return Err(Error::Domain("survival grid needs at least two points".into()));
    }
    ensure_strictly_increasing(grid)?;
    if grid[0] > route.min_round_trip() {
        return Err(Error::Domain(format!(
            "grid starts at {} but must cover the support minimum {}",
            grid[0],
            route.min_round_trip()
        )));
    }
    let survival: Vec<T> = grid.iter().map(|&x| source.eval(x)).collect();
    let tail = *survival.last().unwrap();
    if tail > T::lit(1e-5) {
        return Err(Error::Domain(format!(
            "grid ends at {} where survival is still {tail}; extend it into the tail",
            grid[grid.len() - 1]
        )));
    }
    Ok(survival)
}

/// Survival of the sum of two i.i.d. exponential delays with mean `theta`,
/// i.e. `exp(-y/theta) * (1 + y/theta)`. Degenerates to a point mass at 0
/// when `theta == 0`.
fn two_stage_exp_survival<T: Scalar>(y: T, theta: T) -> T {
    if theta == T::zero() {
        return if y < T::zero() { T::one() } else { T::zero() };
    }
    if y <= T::zero() {
        return T::one();
    }
    let r = y / theta;
    (-r).exp() * (T::one() + r)
}

fn simpson<T: Scalar>(a: T, b: T, intervals: usize, f: impl Fn(T) -> T) -> T {
    debug_assert!(intervals.is_multiple_of(2));
    if b <= a {
        return T::zero();
    }
    let count = T::from_usize(intervals).unwrap();
    let h = (b - a) / count;
    let mut sum = f(a) + f(b);
    for i in 1..intervals {
        let x = a + h * T::from_usize(i).unwrap();
        let w = if i % 2 == 1 { T::lit(4.0) } else { T::lit(2.0) };
        sum = sum + w * f(x);
    }
    sum * h / T::lit(3.0)
}

fn trapezoid<T: Scalar>(x: &[T], y: &[T]) -> T {
    let mut acc = T::zero();
    for i in 1..x.len() {
        acc = acc + (y[i] + y[i - 1]) / T::lit(2.0) * (x[i] - x[i - 1]);
    }
    acc
}

/// Derivative at `at` of the quadratic through (x0,f0), (x1,f1), (x2,f2).
#[allow(clippy::too_many_arguments)]
fn lagrange_derivative<T: Scalar>(x0: T, x1: T, x2: T, f0: T, f1: T, f2: T, at: T) -> T {
    let two = T::lit(2.0);
    f0 * (two * at - x1 - x2) / ((x0 - x1) * (x0 - x2))
        + f1 * (two * at - x0 - x2) / ((x1 - x0) * (x1 - x2))
        + f2 * (two * at - x0 - x1) / ((x2 - x0) * (x2 - x1))
}

fn ensure_strictly_increasing<T: Scalar>(grid: &[T]) -> Result<()> {
    for w in grid.windows(2) {
        // partial_cmp also rejects NaN grid points
        if w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less) {
            return Err(Error::Domain("grid must be strictly increasing".into()));
        }
    }
    Ok(())
}

fn interpolate<T: Scalar>(xs: &[T], ys: &[T], x: T) -> T {
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    let idx = xs.partition_point(|&v| v <= x);
    let (x0, x1) = (xs[idx - 1], xs[idx]);
    let (y0, y1) = (ys[idx - 1], ys[idx]);
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}
