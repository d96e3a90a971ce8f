mod common;

use common::{rng, Link};
use stbc_ccm::estimator::{estimate_channel_exact, lemma_inverse_power_check, power_method_step};
use stbc_ccm::harness::phase_invariant_mse;
use stbc_ccm::linalg::{best_rotation, hermitian_part, hpd_inverse, min_eigenvector, spectral_norm};
use stbc_ccm::oracle::planted_covariance;
use stbc_ccm::{CovarianceEstimate, PsiEstimate};

#[test]
fn noise_free_single_user_channel_is_recovered() {
    let mut r = rng(2);
    let link = Link::new(1, 8, 2, 10_000, &mut r);
    let mut cov = CovarianceEstimate::new(2 * link.assembler.window(), 1.0);
    for i in 0..10_000 {
        cov.update(&link.block(i, 0.0, false, &mut r));
    }
    let est = estimate_channel_exact(&cov, link.assembler.constraints(0), 2).unwrap();
    let mse = phase_invariant_mse(&est.h, &link.channel.stacked());
    assert!(mse < 1e-6, "mse {mse:e}");
}

#[test]
fn second_inverse_power_does_not_hurt() {
    let (mut p1, mut p2) = (0.0, 0.0);
    let runs = 10;
    for seed in 0..runs {
        let mut r = rng(100 + seed);
        let link = Link::new(8, 32, 6, 1500, &mut r);
        let sigma2 = 2.0 / 10f64.powf(1.5);
        let mut cov = CovarianceEstimate::new(2 * link.assembler.window(), 1.0);
        for i in 0..1500 {
            cov.update(&link.block(i, sigma2, true, &mut r));
        }
        let h = link.channel.stacked();
        let cm = link.assembler.constraints(0);
        p1 += phase_invariant_mse(&estimate_channel_exact(&cov, cm, 1).unwrap().h, &h) / runs as f64;
        p2 += phase_invariant_mse(&estimate_channel_exact(&cov, cm, 2).unwrap().h, &h) / runs as f64;
    }
    assert!(p2 <= p1, "p=2 {p2:e} vs p=1 {p1:e}");
}

#[test]
fn inverse_power_distance_follows_signal_eigenvalues() {
    let mut r = rng(9);
    let (r6, vn) = planted_covariance(6, &[9.0, 4.0], 1.0, &mut r);
    let proj = &vn * vn.adjoint();
    let d2 = spectral_norm(&(lemma_inverse_power_check(&r6, 1.0, 2).unwrap() - &proj));
    // Largest damped signal term is (1 + 4)^-2.
    assert!((d2 - 0.04).abs() < 1e-10, "{d2}");
    let d1 = spectral_norm(&(lemma_inverse_power_check(&r6, 1.0, 1).unwrap() - &proj));
    assert!((d1 - 0.2).abs() < 1e-10, "{d1}");
}

#[test]
fn power_method_variant_finds_minimum_eigenvector() {
    for seed in 0..10 {
        let mut r = rng(seed);
        // Isolated smallest eigenvalue, as for C^H R^-1 C near the channel.
        let excess: Vec<f64> = (0..11).map(|i| 1.0 + 0.1 * i as f64).collect();
        let (omega, _) = planted_covariance(12, &excess, 1.0, &mut r);
        let mut h = common::random_vec(12, &mut r);
        h.unscale_mut(h.norm());
        for _ in 0..500 {
            h = power_method_step(&h, &omega).unwrap();
        }
        let (_, v) = min_eigenvector(&omega);
        let dist = (&h * best_rotation(&h, &v) - &v).norm();
        assert!(dist < 1e-4, "seed {seed}: {dist:e}");
    }
}

/// The recursion damps every column of Psi fastest along the desired
/// signature C H, so its full column space is not that of R^-1 C. What the
/// channel step consumes is the minimum eigenvector of C^H Psi, which must
/// agree with that of C^H R^-1 C.
#[test]
fn psi_recursion_matches_inverse_covariance_channel_direction() {
    let mut r = rng(21);
    let steps = 20_000;
    let link = Link::new(4, 16, 2, steps, &mut r);
    let cm = link.assembler.constraints(0);
    let mut psi = PsiEstimate::new(cm, 0.998, 1e-3);
    let mut cov = CovarianceEstimate::new(2 * link.assembler.window(), 1.0);
    for i in 0..steps {
        let y = link.block(i, 0.1, false, &mut r);
        psi.step(&y).unwrap();
        cov.update(&y);
    }
    let oracle = cm.c.adjoint() * hpd_inverse(&cov.matrix()).unwrap() * &cm.c;
    let (_, v_oracle) = min_eigenvector(&oracle);
    let (_, v_psi) = min_eigenvector(&hermitian_part(&(cm.c.adjoint() * &psi.psi)));
    let angle = v_psi.dotc(&v_oracle).norm().min(1.0).acos().to_degrees();
    assert!(angle < 5.0, "angle {angle:.2} degrees");
    assert!(phase_invariant_mse(&v_psi, &link.channel.stacked()) < 1e-3);
}
