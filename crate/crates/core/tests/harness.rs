mod common;

use common::{random_vec, rng};
use statrs::function::gamma::ln_gamma;
use stbc_ccm::harness::{
    phase_invariant_mse, run_trial, sweep, sweep_with_seeds, trial_seeds, Algorithm, Axis, ChannelEstimatorMode, Metric,
    Scenario,
};

fn short() -> Scenario {
    Scenario {
        packet_symbols: 200,
        users: 4,
        processing_gain: 16,
        normalized_step: true,
        ..Scenario::default()
    }
}

#[test]
fn trials_are_deterministic() {
    let scn = short();
    let a = run_trial(&scn, 99).unwrap();
    let b = run_trial(&scn, 99).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.channel_mse, run_trial(&scn, 100).unwrap().channel_mse);
}

#[test]
fn single_run_sweep_reproduces_the_trial() {
    let scn = short();
    let seeds = trial_seeds(7, 1);
    let series = sweep_with_seeds(&scn, Axis::Snr, &[scn.snr_db], &seeds, 10).unwrap();
    let trial = run_trial(&scn, seeds[0]).unwrap();
    for (a, alg) in scn.algorithms.iter().enumerate() {
        let p = series.point(scn.snr_db, alg.id(), Metric::Ber).unwrap();
        assert_eq!(p.mean, trial.ber(a, 0..scn.packet_symbols));
        assert_eq!(p.runs, 1);
    }
}

#[test]
fn disjoint_seed_lists_pool_to_the_joint_mean() {
    let scn = short();
    let seeds = trial_seeds(3, 6);
    let grid = [5.0, 10.0];
    let all = sweep_with_seeds(&scn, Axis::Snr, &grid, &seeds, 10).unwrap();
    let first = sweep_with_seeds(&scn, Axis::Snr, &grid, &seeds[..2], 10).unwrap();
    let rest = sweep_with_seeds(&scn, Axis::Snr, &grid, &seeds[2..], 10).unwrap();
    for (p, (a, b)) in all.points.iter().zip(first.points.iter().zip(&rest.points)) {
        let pooled = (2.0 * a.mean + 4.0 * b.mean) / 6.0;
        assert!((p.mean - pooled).abs() < 1e-12, "{} at {}", p.series, p.axis_value);
    }
}

#[test]
fn adding_runs_keeps_existing_seeds() {
    assert_eq!(trial_seeds(5, 3), trial_seeds(5, 8)[..3]);
}

/// For independent uniform unit vectors in C^n, |<u, v>|^2 ~ Beta(1, n - 1), so
/// E|<u, v>| = Gamma(n) Gamma(3/2) / Gamma(n + 1/2).
#[test]
fn random_unit_pairs_match_expected_error() {
    let n = 12;
    let pairs = 100_000;
    let mut r = rng(17);
    let mut total = 0.0;
    for _ in 0..pairs {
        let u = random_vec(n, &mut r);
        let v = random_vec(n, &mut r);
        total += phase_invariant_mse(&u.unscale(u.norm()), &v);
    }
    let mean = total / pairs as f64;
    let nf = n as f64;
    let expected_inner = (ln_gamma(nf) + ln_gamma(1.5) - ln_gamma(nf + 0.5)).exp();
    let expected = 2.0 - 2.0 * expected_inner;
    assert!((mean - expected).abs() < 5e-3, "{mean} vs {expected}");
}

#[test]
fn noise_free_single_user_exact_ccm_makes_no_errors() {
    let scn = Scenario {
        users: 1,
        snr_db: 250.0,
        packet_symbols: 400,
        algorithms: vec![Algorithm::CcmExact],
        channel_estimator: ChannelEstimatorMode::Genie,
        ..Scenario::default()
    };
    for seed in trial_seeds(1, 3) {
        let o = run_trial(&scn, seed).unwrap();
        assert_eq!(o.errors(0, 0..scn.packet_symbols), 0, "seed {seed:x}");
    }
}

#[test]
fn ber_grows_with_the_number_of_users() {
    let scn = Scenario {
        normalized_step: true,
        mu_lms: 0.2,
        ..Scenario::default()
    };
    let grid: Vec<f64> = (1..=7).map(|k| 2.0 * k as f64).collect();
    let series = sweep(&scn, Axis::Users, &grid, 50, 100).unwrap();
    for alg in &scn.algorithms {
        let curve = series.curve(alg.id(), Metric::Ber);
        assert_eq!(curve.len(), grid.len());
        for w in curve.windows(2) {
            assert!(w[1].1 >= w[0].1, "{}: {:?}", alg.id(), curve);
        }
    }
}
