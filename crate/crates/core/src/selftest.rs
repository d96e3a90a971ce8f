//! Quick consistency checks of the production routines against the
//! independent references in [`crate::oracle`].

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::estimator::lemma_inverse_power_check;
use crate::linalg::{self, frobenius};
use crate::oracle::{self, ChipLevelSimulator};
use crate::receiver::{ccm_sg_step, cmv_exact_filter, constraint_residual, FilterPair, ProjectionPair};
use crate::signal::{random_qpsk, BlockAssembler, SpaceTimeChannel, SpreadingScheme, SpreadingSet, SymbolStream};
use crate::{CMat, CVec};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, value: f64, tol: f64) -> Check {
    Check {
        name,
        passed: value.is_finite() && value <= tol,
        detail: format!("{value:.3e} (tolerance {tol:.0e})"),
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

fn random_hpd(dim: usize, rng: &mut ChaCha8Rng) -> CMat {
    let a = CMat::from_fn(dim, dim, |_, _| gaussian(rng));
    &a * a.adjoint() + CMat::identity(dim, dim)
}

/// Runs every check with a fixed seed.
pub fn run(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, lp, users) = (8, 3, 3);
    let set = SpreadingSet::random(users, n, SpreadingScheme::ZeroPadded, &mut rng).expect("valid spreading");
    let cm = set.constraint_matrices(0, lp).expect("valid constraints");
    let dim = cm.dim();
    let h = CVec::from_fn(2 * lp, |_, _| gaussian(&mut rng));
    let mut out = Vec::new();

    let pp = ProjectionPair::new(&cm).expect("full rank constraints");
    out.push(check(
        "projector matches Gram-Schmidt",
        frobenius(&(&pp.pi - oracle::gram_schmidt_projector(&cm.c))),
        1e-10,
    ));

    let r = random_hpd(dim, &mut rng);
    let target = &h * Complex64::new(1.0, 0.0);
    let kkt = oracle::kkt_solve(&r, &CVec::zeros(dim), &cm.c, &target).expect("KKT system solvable");
    let fp = cmv_exact_filter(&r, &cm, &h, 1.0).expect("CMV filter");
    out.push(check("CMV closed form matches KKT solve", (&fp.w - kkt).norm() / fp.w.norm(), 1e-8));

    let mut fp = FilterPair::new(CVec::from_fn(dim, |_, _| gaussian(&mut rng)), CVec::zeros(dim));
    let y = CVec::from_fn(dim, |_, _| gaussian(&mut rng));
    fp = ccm_sg_step(&fp, &pp, &y, &h, 1.0, 1e-3);
    let (a, b) = constraint_residual(&fp, &cm, &h, 1.0);
    out.push(check("CCM SG step keeps constraints", a.max(b), 1e-9));

    let taps = (
        (0..lp).map(|_| gaussian(&mut rng)).collect::<Vec<_>>(),
        (0..lp).map(|_| gaussian(&mut rng)).collect::<Vec<_>>(),
    );
    let channel = SpaceTimeChannel::from_taps(taps.0.clone(), taps.1.clone()).expect("static channel");
    let streams: Vec<SymbolStream> = (0..users)
        .map(|_| {
            let amp = rng.random_range(0.5..2.0);
            SymbolStream::new((0..8).map(|_| random_qpsk(&mut rng)).collect(), amp).expect("even length")
        })
        .collect();
    let assembler = BlockAssembler::new(&set, lp).expect("assembler");
    let chans = vec![&channel; users];
    let sim = ChipLevelSimulator { spreading: &set, taps };
    let mut worst: f64 = 0.0;
    for block in 0..4 {
        for isi in [false, true] {
            let model = assembler.noiseless(&streams, &chans, block, isi).expect("block in range");
            let direct = sim.block(&streams, block, isi);
            worst = worst.max((model - &direct).norm() / direct.norm());
        }
    }
    out.push(check("stacked model matches chip-level simulation", worst, 1e-10));

    let sigma2 = 0.5;
    let (r, vn) = oracle::planted_covariance(dim, &[3.0, 8.0], sigma2, &mut rng);
    let direct = lemma_inverse_power_check(&r, sigma2, 2).expect("inverse power");
    let eig = linalg::hpd_inverse_power(&r, 2, 1e12).expect("eigen route") * Complex64::new(sigma2 * sigma2, 0.0);
    out.push(check("inverse covariance power by two routes", frobenius(&(direct - eig)), 1e-9));
    let proj = &vn * vn.adjoint();
    let r_inf = lemma_inverse_power_check(&r, sigma2, 40).expect("inverse power");
    out.push(check("scaled inverse power approaches noise projector", frobenius(&(r_inf - proj)), 1e-6));

    out
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_checks_pass() {
        for c in super::run(7) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
