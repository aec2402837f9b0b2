//! Acceptance suite: one test per release criterion, each printing a PASS/FAIL
//! line. Run with `cargo test --test acceptance -- --nocapture` to see the
//! lines for passing criteria too.

use std::panic::{catch_unwind, resume_unwind, UnwindSafe};
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_pcg::Pcg64;

use muledtn::analytics;
use muledtn::des;
use muledtn::model::{ContactTimeDist, RouteModel, TravelTimeDist};
use muledtn::optimizer::{self, CostModel, QosTargets};
use muledtn::superposition::{self, GRID_POINTS};

fn criterion(name: &str, body: impl FnOnce() + UnwindSafe) {
    let outcome = catch_unwind(body);
    match &outcome {
        Ok(()) => println!("[PASS] {name}"),
        Err(_) => println!("[FAIL] {name}"),
    }
    if let Err(cause) = outcome {
        resume_unwind(cause);
    }
}

fn table_route() -> RouteModel<f64> {
    RouteModel::symmetric(
        ContactTimeDist::new(3.0, 5.0).unwrap(),
        TravelTimeDist::new(100.0, 20.0).unwrap(),
        10.0,
    )
    .unwrap()
}

/// Case-study route: standard contact windows, measured one-way travel mean
/// split into an optimal-path floor plus exponential delay.
fn survey_route(t_min: f64, mean_delay: f64, link_rate: f64) -> RouteModel<f64> {
    RouteModel::symmetric(
        ContactTimeDist::new(3.0, 5.0).unwrap(),
        TravelTimeDist::new(t_min, mean_delay).unwrap(),
        link_rate,
    )
    .unwrap()
}

#[test]
fn criterion_1_superposition_mean() {
    criterion("1 superposition mean gap = mu/n within 2%", || {
        let route = table_route();
        for n in [1u32, 5, 20] {
            let started = Instant::now();
            let mut rng = Pcg64::seed_from_u64(100 + n as u64);
            let gaps = superposition::simulate_superposition(&route, n, 1e5, &mut rng).unwrap();
            let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
            let expected = 248.0 / n as f64;
            let rel = (mean - expected).abs() / expected;
            assert!(rel < 0.02, "n={n}: mean gap {mean} vs {expected} ({rel:.4} rel)");
            assert!(started.elapsed().as_secs() < 10, "n={n} exceeded runtime budget");
        }
    });
}

#[test]
fn criterion_2_mean_data_size_oracle() {
    criterion("2 mean data size = 2200 Mbit, Monte-Carlo and CCDF agree", || {
        let route = table_route();
        assert_eq!(analytics::mean_data_size(&route).unwrap(), 2200.0);

        // independent oracle: raw minimum-of-two-uniforms draws
        let mut rng = Pcg64::seed_from_u64(0xACCE55);
        let draws = 1_000_000usize;
        let mut sizes: Vec<f64> = (0..draws)
            .map(|_| {
                let a = 3.0 + 2.0 * rng.random_range(0.0..1.0f64);
                let b = 3.0 + 2.0 * rng.random_range(0.0..1.0f64);
                600.0 * a.min(b)
            })
            .collect();
        let mc_mean = sizes.iter().sum::<f64>() / draws as f64;
        assert!(
            (mc_mean - 2200.0).abs() / 2200.0 < 0.005,
            "Monte-Carlo mean {mc_mean}"
        );

        sizes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut worst = 0.0f64;
        for i in 0..=300 {
            let m = 1800.0 + 4.0 * i as f64;
            let analytic = analytics::data_size_ccdf(&route, m).unwrap().value;
            let below = sizes.partition_point(|&s| s <= m);
            let empirical = (draws - below) as f64 / draws as f64;
            worst = worst.max((analytic - empirical).abs());
        }
        assert!(worst < 0.01, "CCDF sup-norm {worst}");
    });
}

#[test]
fn criterion_3_mpaoi_approximation_sweep() {
    criterion("3 simulated peak age matches the closed form over n = 1..20", || {
        let started = Instant::now();
        let route = table_route();
        let seeds: Vec<u64> = (0..20).collect();
        let mut worst_error = 0.0f64;
        let mut at_one = 0.0;
        let mut at_twenty = 0.0;
        for n in 1..=20u32 {
            let report = des::run_replications(&route, n, 1e5, &seeds).unwrap();
            worst_error = worst_error.max(report.approx_error);
            if n == 1 {
                at_one = report.simulated_mpaoi;
            }
            if n == 20 {
                at_twenty = report.simulated_mpaoi;
            }
        }
        assert!(
            (at_one - 375.0).abs() <= 0.05 * 375.0,
            "simulated peak age at n=1: {at_one}"
        );
        assert!(
            (130.0..=165.0).contains(&at_twenty),
            "simulated peak age at n=20: {at_twenty}"
        );
        assert!(worst_error <= 10.0, "worst approximation error {worst_error}");
        assert!(started.elapsed().as_secs() < 300, "sweep exceeded runtime budget");
    });
}

#[test]
fn criterion_4_rate_linearity() {
    criterion("4 transmission rate scales linearly in the fleet size", || {
        let route = table_route();
        let analytic_ratio = analytics::mean_transmission_rate(&route, 20).unwrap()
            / analytics::mean_transmission_rate(&route, 1).unwrap();
        assert!((analytic_ratio - 20.0).abs() < 1e-12, "analytic ratio {analytic_ratio}");

        let seeds: Vec<u64> = (0..20).collect();
        let one = des::run_replications(&route, 1, 1e5, &seeds).unwrap();
        let twenty = des::run_replications(&route, 20, 1e5, &seeds).unwrap();
        let simulated_ratio = twenty.simulated_mean_rate / one.simulated_mean_rate;
        assert!(
            (simulated_ratio - 20.0).abs() <= 0.03 * 20.0,
            "simulated ratio {simulated_ratio}"
        );
    });
}

#[test]
fn criterion_5_nouakchott_case() {
    criterion("5 Nouakchott corridor metrics sit near the published readings", || {
        // 25 km corridor: 30-minute optimal trip, 59-minute observed mean
        let route = survey_route(30.0, 29.0, 20.0);
        assert_eq!(route.mean_round_trip(), 126.0);

        let single = analytics::mpaoi_approx(&route, 1).unwrap().mpaoi;
        assert!((single - 180.0).abs() <= 0.15 * 180.0, "peak age n=1: {single}");

        let twenty = analytics::mpaoi_approx(&route, 20).unwrap().mpaoi;
        assert!((twenty - 65.0).abs() <= 0.15 * 65.0, "peak age n=20: {twenty}");

        let rate = analytics::mean_transmission_rate(&route, 20).unwrap();
        assert!((rate - 12.5).abs() <= 0.15 * 12.5, "rate n=20: {rate}");
    });
}

#[test]
fn criterion_6_accra_case() {
    criterion("6 Accra corridor metrics sit near the published readings", || {
        // 56 km corridor: 55-minute optimal trip, 104-minute observed mean
        let route = survey_route(55.0, 49.0, 20.0);
        assert_eq!(route.mean_round_trip(), 216.0);

        let single = analytics::mpaoi_approx(&route, 1).unwrap().mpaoi;
        assert!((single - 350.0).abs() <= 0.15 * 350.0, "peak age n=1: {single}");

        let twenty = analytics::mpaoi_approx(&route, 20).unwrap().mpaoi;
        assert!((twenty - 120.0).abs() <= 0.15 * 120.0, "peak age n=20: {twenty}");

        let rate = analytics::mean_transmission_rate(&route, 20).unwrap();
        assert!((rate - 7.0).abs() <= 0.15 * 7.0, "rate n=20: {rate}");
    });
}

#[test]
fn criterion_7_optimizer_against_scan() {
    criterion("7 closed-form fleet size agrees with the brute-force scan", || {
        let started = Instant::now();
        let route = table_route();
        let costs = CostModel::two_region(300.0, 800.0).unwrap();

        let worked = optimizer::optimize(
            &route,
            &QosTargets::new(200.0, 1.0).unwrap(),
            &costs,
            None,
        )
        .unwrap();
        assert_eq!(worked.n_opt, Some(7));
        assert_eq!(worked.total_cost, Some(3700.0));

        let infeasible = optimizer::optimize(
            &route,
            &QosTargets::new(100.0, 1.0).unwrap(),
            &costs,
            None,
        )
        .unwrap();
        assert!(!infeasible.feasible);
        let at_floor = optimizer::optimize(
            &route,
            &QosTargets::new(124.0, 1.0).unwrap(),
            &costs,
            None,
        )
        .unwrap();
        assert!(!at_floor.feasible);

        let mut rng = Pcg64::seed_from_u64(0x0B7A1);
        for _ in 0..1000 {
            let c1 = rng.random_range(0.0..10.0);
            let contact = ContactTimeDist::new(c1, c1 + rng.random_range(0.01..10.0)).unwrap();
            let instance = RouteModel::new(
                contact,
                contact,
                TravelTimeDist::new(rng.random_range(5.0..200.0), rng.random_range(0.0..100.0))
                    .unwrap(),
                TravelTimeDist::new(rng.random_range(5.0..200.0), rng.random_range(0.0..100.0))
                    .unwrap(),
                rng.random_range(1.0..50.0),
            )
            .unwrap();
            let floor = analytics::one_way_floor(&instance);
            let targets = QosTargets::new(
                floor + rng.random_range(0.5..400.0),
                rng.random_range(0.05..20.0),
            )
            .unwrap();
            let plan = optimizer::optimize(&instance, &targets, &costs, None).unwrap();
            let scanned = optimizer::verify_by_scan(&instance, &targets, 500_000).unwrap();
            assert_eq!(plan.n_opt, scanned);
        }
        assert!(started.elapsed().as_secs() < 5, "optimizer exceeded runtime budget");
    });
}

#[test]
fn criterion_8_aoi_accounting_oracle() {
    criterion("8 hand-computed sawtooth scenario reproduces exactly", || {
        let mut monitor = des::MonitorState::<f64>::new();
        monitor.record_delivery(10.0, 6.0).unwrap();
        monitor.record_delivery(25.0, 20.0).unwrap();
        monitor.record_delivery(30.0, 18.0).unwrap();
        monitor.record_delivery(40.0, 35.0).unwrap();
        let timeline = monitor.finish().unwrap();
        assert_eq!(timeline.effective_peaks, vec![19.0, 20.0]);
        assert_eq!(timeline.mpaoi, 19.5);
        assert_eq!(timeline.maoi, 12.0);
    });
}

#[test]
fn criterion_9_interval_density_sanity() {
    criterion("9 merged-gap density: mass, moment, exponential law, KS", || {
        let route = table_route();
        for n in [1u32, 2, 5] {
            let density = superposition::interval_density_on_default_grid(&route, n).unwrap();
            let mass = density.integral();
            assert!((mass - 1.0).abs() <= 1e-3, "mass {mass} at n={n}");
            let moment = density.first_moment();
            let expected = 248.0 / n as f64;
            assert!(
                (moment - expected).abs() <= 0.01 * expected,
                "moment {moment} vs {expected} at n={n}"
            );
        }

        // exponential components: the merged stream is exponential again
        let mu = 248.0f64;
        for n in [1u32, 2, 5, 20] {
            let hi = mu * (1e6f64).ln() / n as f64;
            let grid: Vec<f64> = (0..GRID_POINTS)
                .map(|i| hi * i as f64 / (GRID_POINTS - 1) as f64)
                .collect();
            let survival: Vec<f64> = grid.iter().map(|&x| (-x / mu).exp()).collect();
            let density =
                superposition::interval_density_from_survival(&grid, &survival, mu, n).unwrap();
            let rate = n as f64 / mu;
            let mut worst = 0.0f64;
            for (i, &x) in grid.iter().enumerate() {
                worst = worst.max((density.density[i] - rate * (-rate * x).exp()).abs());
            }
            assert!(worst <= 0.01 * rate, "sup-norm {worst} at n={n}");
        }

        // simulated gaps against the tabulated density
        let density = superposition::interval_density_on_default_grid(&route, 5).unwrap();
        let mut gaps = Vec::new();
        for seed in 0..5u64 {
            let mut rng = Pcg64::seed_from_u64(9_000 + seed);
            gaps.extend(superposition::simulate_superposition(&route, 5, 1e5, &mut rng).unwrap());
        }
        let ks = density.ks_distance(&gaps);
        assert!(ks < 0.02, "KS distance {ks}");
    });
}
