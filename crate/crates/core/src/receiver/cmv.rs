use num_complex::Complex64;

use super::ccm::constrained_quadratic;
use super::projection::ProjectionPair;
use super::FilterPair;
use crate::error::Result;
use crate::signal::ConstraintMatrices;
use crate::{CMat, CVec};

/// Constrained minimum-variance filters:
/// `w = R^{-1} C (C^H R^{-1} C)^{-1} ν H`, and likewise with `C̄`, `ν H*`.
pub fn cmv_exact_filter(r: &CMat, cm: &ConstraintMatrices, h: &CVec, nu: f64) -> Result<FilterPair> {
    let nu = Complex64::new(nu, 0.0);
    let zero = CVec::zeros(r.nrows());
    let w = constrained_quadratic(r, &zero, &cm.c, &(h * nu))?;
    let wbar = constrained_quadratic(r, &zero, &cm.cbar, &(h.conjugate() * nu))?;
    Ok(FilterPair::new(w, wbar))
}

/// Constrained LMS on the output power: `w ← Π (w − μ z* y) + C (C^H C)^{-1} ν H`.
pub fn cmv_sg_step(fp: &FilterPair, pp: &ProjectionPair, y: &CVec, h: &CVec, nu: f64, mu: f64) -> FilterPair {
    let mu = Complex64::new(mu, 0.0);
    let z = fp.w.dotc(y);
    let zbar = fp.wbar.dotc(y);
    let w = &pp.pi * (&fp.w - y * (z.conj() * mu)) + pp.feasible_w(h, nu);
    let wbar = &pp.pibar * (&fp.wbar - y * (zbar.conj() * mu)) + pp.feasible_wbar(h, nu);
    FilterPair { w, wbar, ..*fp }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::receiver::constraint_residual;
    use crate::signal::{SpreadingScheme, SpreadingSet};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn white_covariance_gives_min_norm_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let set = SpreadingSet::random(1, 8, SpreadingScheme::SignFlipped, &mut rng).unwrap();
        let cm = set.constraint_matrices(0, 2).unwrap();
        let pp = ProjectionPair::new(&cm).unwrap();
        let h = CVec::from_fn(4, |_, _| Complex64::new(rng.random(), rng.random()));
        let fp = cmv_exact_filter(&CMat::identity(cm.dim(), cm.dim()), &cm, &h, 1.0).unwrap();
        assert!((&fp.w - pp.feasible_w(&h, 1.0)).norm() < 1e-12);
        let (r1, r2) = constraint_residual(&fp, &cm, &h, 1.0);
        assert!(r1 < 1e-9 && r2 < 1e-9);
    }

    #[test]
    fn sg_step_keeps_constraints() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let set = SpreadingSet::random(1, 8, SpreadingScheme::ZeroPadded, &mut rng).unwrap();
        let cm = set.constraint_matrices(0, 2).unwrap();
        let pp = ProjectionPair::new(&cm).unwrap();
        let h = CVec::from_fn(4, |_, _| Complex64::new(rng.random(), rng.random()));
        let mut fp = FilterPair::feasible(&pp, &h, 1.0);
        for _ in 0..200 {
            let y = CVec::from_fn(cm.dim(), |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
            fp = cmv_sg_step(&fp, &pp, &y, &h, 1.0, 0.01);
        }
        let (r1, r2) = constraint_residual(&fp, &cm, &h, 1.0);
        assert!(r1 < 1e-10 && r2 < 1e-10);
    }
}
