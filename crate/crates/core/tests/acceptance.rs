//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test -p stbc-ccm --test acceptance`.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{gaussian, random_hpd, random_vec, rng, Link};
use rand::Rng;
use statrs::function::erf::erfc;
use stbc_ccm::estimator::{estimate_channel_exact, lemma_inverse_power_check, power_method_step};
use stbc_ccm::harness::{
    phase_invariant_mse, pooled_half_width, run_trials, sweep, trial_seeds, Algorithm, Axis, ChannelEstimatorMode,
    CovarianceSource, Metric, Scenario,
};
use stbc_ccm::linalg::{best_rotation, min_eigenvector, spectral_norm};
use stbc_ccm::oracle::{directional_derivative, kkt_solve, planted_covariance, ChipLevelSimulator};
use stbc_ccm::receiver::{ccm_exact_filter, ccm_sg_step, cm_gradient, cmv_exact_filter, constraint_residual};
use stbc_ccm::signal::{BlockAssembler, FadingKind};
use stbc_ccm::{
    CVec, CcmStatistics, CovarianceEstimate, FilterPair, ProjectionPair, SpaceTimeChannel, SpreadingScheme, SpreadingSet,
    SymbolStream,
};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn oracle_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..100 {
        let mut r = rng(seed);
        let set = SpreadingSet::random(2, 3, SpreadingScheme::Independent, &mut r).unwrap();
        let cm = set.constraint_matrices(0, 2).unwrap();
        let h = random_vec(4, &mut r);
        let (rm, rbar) = (random_hpd(8, &mut r), random_hpd(8, &mut r));
        let (d, dbar) = (random_vec(8, &mut r), random_vec(8, &mut r));
        let mut stats = CcmStatistics::from_moments(rm.clone(), d.clone(), rbar.clone(), dbar.clone());
        stats.loading = 0.0;
        let ccm = ccm_exact_filter(&stats, &cm, &h, 1.0).unwrap();
        let cmv = cmv_exact_filter(&rm, &cm, &h, 1.0).unwrap();
        let zero = CVec::zeros(8);
        let hc = h.conjugate();
        for (got, want) in [
            (&ccm.w, kkt_solve(&rm, &d, &cm.c, &h)),
            (&ccm.wbar, kkt_solve(&rbar, &dbar, &cm.cbar, &hc)),
            (&cmv.w, kkt_solve(&rm, &zero, &cm.c, &h)),
            (&cmv.wbar, kkt_solve(&rm, &zero, &cm.cbar, &hc)),
        ] {
            worst = worst.max((got - want.unwrap()).norm());
        }
    }
    outcome(worst < 1e-8, format!("max |dw| {worst:.2e} over 100 instances (tol 1e-8)"))
}

fn constraint_suite() -> Outcome {
    let mut r = rng(5);
    let link = Link::new(4, 16, 3, 10_000, &mut r);
    let cm = link.assembler.constraints(0).clone();
    let pp = ProjectionPair::new(&cm).unwrap();
    let h = link.channel.stacked();
    let mut fp = FilterPair::feasible(&pp, &h, 1.0);
    for i in 0..10_000 {
        let y = link.block(i, 0.1, true, &mut r);
        fp = ccm_sg_step(&fp, &pp, &y, &h, 1.0, 1e-3);
    }
    let (a, b) = constraint_residual(&fp, &cm, &h, 1.0);
    let residual = a.max(b);
    let idem = (&pp.pi * &pp.pi - &pp.pi).norm().max((&pp.pibar * &pp.pibar - &pp.pibar).norm());
    let annihilate = (&pp.pi * &cm.c).norm().max((&pp.pibar * &cm.cbar).norm());
    outcome(
        residual < 1e-8 && idem < 1e-10 && annihilate < 1e-10,
        format!("constraint residual {residual:.2e} (tol 1e-8), idempotence {idem:.2e}, annihilation {annihilate:.2e} (tol 1e-10)"),
    )
}

fn gradient_check() -> Outcome {
    let mut r = rng(11);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let y = random_vec(8, &mut r);
        let w = random_vec(8, &mut r).unscale(3.0);
        let (_, _, g) = cm_gradient(&w, &y);
        let cost = |w: &CVec| (w.dotc(&y).norm_sqr() - 1.0).powi(2);
        for _ in 0..20 {
            let v = random_vec(8, &mut r);
            let analytic = (v.dotc(&g) * 4.0).re;
            let numeric = directional_derivative(cost, &w, &v, 1e-6);
            worst = worst.max((numeric - analytic).abs() / analytic.abs());
        }
    }
    outcome(worst < 1e-5, format!("max relative error {worst:.2e} over 2000 directions (tol 1e-5)"))
}

fn lemma_verification() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut monotone = true;
    for seed in 0..20 {
        let mut r = rng(seed);
        let s = r.random_range(1..6);
        let excess: Vec<f64> = (0..s).map(|_| r.random_range(0.5..20.0)).collect();
        let sigma2 = r.random_range(0.1..2.0);
        let (cov, vn) = planted_covariance(12, &excess, sigma2, &mut r);
        let proj = &vn * vn.adjoint();
        let mut last = f64::INFINITY;
        for p in 1..=6 {
            let dist = spectral_norm(&(lemma_inverse_power_check(&cov, sigma2, p).unwrap() - &proj));
            let closed = excess.iter().map(|l| (1.0 + l).powi(-(p as i32))).fold(0.0, f64::max);
            worst = worst.max((dist - closed).abs());
            monotone &= dist < last;
            last = dist;
        }
    }
    outcome(
        worst < 1e-10 && monotone,
        format!("max deviation from closed form {worst:.2e} (tol 1e-10), decreasing in p: {monotone}"),
    )
}

fn blind_channel_recovery() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..5 {
        let mut r = rng(seed);
        let link = Link::new(4, 16, 3, 2000, &mut r);
        let mut cov = CovarianceEstimate::new(2 * link.assembler.window(), 1.0);
        for i in 0..2000 {
            cov.update(&link.block(i, 0.0, false, &mut r));
        }
        let est = estimate_channel_exact(&cov, link.assembler.constraints(0), 2).unwrap();
        worst = worst.max(phase_invariant_mse(&est.h, &link.channel.stacked()));
    }
    let (mut p1, mut p2) = (0.0, 0.0);
    let sigma2 = 2.0 / 10f64.powf(1.5);
    for seed in 0..20 {
        let mut r = rng(500 + seed);
        let link = Link::new(4, 16, 3, 750, &mut r);
        let mut cov = CovarianceEstimate::new(2 * link.assembler.window(), 1.0);
        for i in 0..750 {
            cov.update(&link.block(i, sigma2, true, &mut r));
        }
        let h = link.channel.stacked();
        let cm = link.assembler.constraints(0);
        p1 += phase_invariant_mse(&estimate_channel_exact(&cov, cm, 1).unwrap().h, &h) / 20.0;
        p2 += phase_invariant_mse(&estimate_channel_exact(&cov, cm, 2).unwrap().h, &h) / 20.0;
    }
    outcome(
        worst < 1e-6 && p2 <= p1,
        format!("noise-free MSE {worst:.2e} (tol 1e-6); 15 dB mean MSE p=1 {p1:.3e}, p=2 {p2:.3e}"),
    )
}

fn sg_channel_tracker() -> Outcome {
    let scn = Scenario {
        packet_symbols: 3000,
        doppler: 0.0,
        algorithms: vec![Algorithm::CmvSg],
        channel_estimator: ChannelEstimatorMode::Sg,
        ..Scenario::default()
    };
    let trials = run_trials(&scn, &trial_seeds(scn.seed, 20)).unwrap();
    let window = 200;
    let means: Vec<f64> = (0..scn.packet_symbols / window)
        .map(|w| {
            let range = w * window..(w + 1) * window;
            trials.iter().map(|o| o.channel_mse[range.clone()].iter().sum::<f64>()).sum::<f64>()
                / (window * trials.len()) as f64
        })
        .collect();
    let non_increasing = means.windows(2).all(|p| p[1] <= p[0]);
    let last = *means.last().unwrap();

    let mut r = rng(3);
    let excess: Vec<f64> = (0..11).map(|i| 1.0 + 0.1 * i as f64).collect();
    let (omega, _) = planted_covariance(12, &excess, 1.0, &mut r);
    let mut h = random_vec(12, &mut r);
    h.unscale_mut(h.norm());
    for _ in 0..500 {
        h = power_method_step(&h, &omega).unwrap();
    }
    let (_, v) = min_eigenvector(&omega);
    let fixed = (&h * best_rotation(&h, &v) - &v).norm();
    outcome(
        non_increasing && last < 0.05 && fixed < 1e-4,
        format!(
            "window means non-increasing: {non_increasing}, final MSE {last:.4} (tol 0.05); power-method distance {fixed:.2e} (tol 1e-4)"
        ),
    )
}

fn fig2_ordering() -> Outcome {
    let scn = Scenario {
        packet_symbols: 3000,
        added_users: 6,
        add_users_at: Some(1500),
        interferer_sigma_db: 3.0,
        interferer_sigma_db_after: 6.0,
        snr_db: 15.0,
        doppler: 0.0,
        ber_skip_symbols: 2700,
        normalized_step: true,
        mu_ccm: 5e-3,
        mu_cmv: 5e-3,
        mu_lms: 0.2,
        algorithms: vec![Algorithm::CcmSg, Algorithm::CmvSg, Algorithm::TrainedLms],
        channel_estimator: ChannelEstimatorMode::Sg,
        ..Scenario::default()
    };
    let series = sweep(&scn, Axis::Snr, &[15.0], 20, 100).unwrap();
    let at = |a: Algorithm| series.point(15.0, a.id(), Metric::Ber).unwrap();
    let (lms, ccm, cmv) = (at(Algorithm::TrainedLms), at(Algorithm::CcmSg), at(Algorithm::CmvSg));
    let hw_low = pooled_half_width(lms.half_width, ccm.half_width);
    let hw_high = pooled_half_width(ccm.half_width, cmv.half_width);
    let (gap_low, gap_high) = (ccm.mean - lms.mean, cmv.mean - ccm.mean);
    outcome(
        gap_low > hw_low && gap_high > hw_high,
        format!(
            "BER lms {:.4} ccm-sg {:.4} cmv-sg {:.4}; gaps {gap_low:.4} > {hw_low:.4} and {gap_high:.4} > {hw_high:.4}; {} diverged trials",
            lms.mean, ccm.mean, cmv.mean, series.diverged_trials
        ),
    )
}

fn analytic_ber_anchor() -> Outcome {
    let scn = Scenario {
        users: 1,
        paths: 1,
        path_powers_db: vec![0.0],
        fading: FadingKind::None,
        doppler: 0.0,
        include_isi: false,
        algorithms: vec![Algorithm::CmvExact],
        cmv_covariance: CovarianceSource::Model,
        channel_estimator: ChannelEstimatorMode::Genie,
        ..Scenario::default()
    };
    let runs = 40;
    let bits = runs * 2 * scn.packet_symbols;
    let grid = [0.0, 4.0, 8.0];
    let series = sweep(&scn, Axis::Snr, &grid, runs, 100).unwrap();
    let mut ok = bits >= 100_000;
    let mut cells = Vec::new();
    for snr in grid {
        let p = series.point(snr, Algorithm::CmvExact.id(), Metric::Ber).unwrap();
        let ebn0 = 10f64.powf(snr / 10.0);
        let bound = 0.5 * erfc(ebn0.sqrt());
        ok &= (p.mean - bound).abs() <= 3.0 * p.half_width;
        cells.push(format!("{snr} dB {:.5} vs {bound:.5} (3hw {:.5})", p.mean, 3.0 * p.half_width));
    }
    outcome(ok, format!("{bits} bits per point; {}", cells.join(", ")))
}

fn diversity_ordering() -> Outcome {
    let base = Scenario {
        normalized_step: true,
        algorithms: vec![Algorithm::CcmSg],
        ..Scenario::default()
    };
    let ber = |tx: usize| {
        let scn = Scenario {
            transmit_antennas: tx,
            ..base.clone()
        };
        let s = sweep(&scn, Axis::Snr, &[15.0], 50, 100).unwrap();
        s.point(15.0, Algorithm::CcmSg.id(), Metric::Ber).unwrap().clone()
    };
    let (one, two) = (ber(1), ber(2));
    let hw = pooled_half_width(one.half_width, two.half_width);
    let gap = one.mean - two.mean;
    outcome(
        gap > hw,
        format!("ccm-sg BER 1-Tx {:.4}, 2-Tx {:.4}; gap {gap:.4} > {hw:.4} over 50 seeds", one.mean, two.mean),
    )
}

fn model_cross_check() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..50 {
        let mut r = rng(seed);
        let (users, gain, lp) = (3, 8, 2);
        let set = SpreadingSet::random(users, gain, SpreadingScheme::ZeroPadded, &mut r).unwrap();
        let taps: (Vec<_>, Vec<_>) = ((0..lp).map(|_| gaussian(&mut r)).collect(), (0..lp).map(|_| gaussian(&mut r)).collect());
        let channel = SpaceTimeChannel::from_taps(taps.0.clone(), taps.1.clone()).unwrap();
        let streams: Vec<SymbolStream> = (0..users)
            .map(|_| {
                let amp = r.random_range(0.5..2.0);
                SymbolStream::random(4, amp, &mut r)
            })
            .collect();
        let assembler = BlockAssembler::new(&set, lp).unwrap();
        let chans = vec![&channel; users];
        let sim = ChipLevelSimulator { spreading: &set, taps };
        for block in 0..4 {
            for isi in [false, true] {
                let model = assembler.noiseless(&streams, &chans, block, isi).unwrap();
                let direct = sim.block(&streams, block, isi);
                worst = (model - direct).iter().map(|z| z.norm()).fold(worst, f64::max);
            }
        }
    }
    outcome(worst < 1e-12, format!("max element-wise difference {worst:.2e} over 50 instances (tol 1e-12)"))
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", Duration::from_secs(10), oracle_equivalence),
        ("constraint suite", Duration::from_secs(30), constraint_suite),
        ("gradient check", Duration::from_secs(5), gradient_check),
        ("lemma verification", Duration::from_secs(5), lemma_verification),
        ("blind channel recovery", Duration::from_secs(120), blind_channel_recovery),
        ("SG channel tracker", Duration::from_secs(180), sg_channel_tracker),
        ("BER ordering with users entering", Duration::from_secs(600), fig2_ordering),
        ("analytic BER anchor", Duration::from_secs(120), analytic_ber_anchor),
        ("diversity ordering", Duration::from_secs(600), diversity_ordering),
        ("model cross-check", Duration::from_secs(5), model_cross_check),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let passed = out.passed && elapsed < *limit;
        failed += usize::from(!passed);
        println!(
            "{} {:>2} {name}: {}; {:.1} s (limit {} s)",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            out.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
