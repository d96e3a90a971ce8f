use crate::error::{Error, Result};
use crate::linalg;
use crate::signal::ConstraintMatrices;
use crate::{CMat, CVec};
use num_complex::Complex64;

/// Orthogonal projectors onto the complements of the constraint subspaces,
/// plus the pseudo-inverse factors `C (C^H C)^{-1}` used to re-impose the
/// constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionPair {
    pub pi: CMat,
    pub pibar: CMat,
    c_pinv: CMat,
    cbar_pinv: CMat,
}

fn projector(c: &CMat) -> Result<(CMat, CMat)> {
    let gram = c.adjoint() * c;
    let (vals, _) = linalg::hermitian_eigen(&gram);
    let (lo, hi) = (vals[0], vals[vals.len() - 1]);
    if !(lo > hi * 1e-12 && lo > 0.0) {
        return Err(Error::SingularConstraint);
    }
    let inv = linalg::hpd_inverse(&gram).map_err(|_| Error::SingularConstraint)?;
    let pinv = c * inv;
    let n = c.nrows();
    let pi = CMat::identity(n, n) - &pinv * c.adjoint();
    Ok((pi, pinv))
}

impl ProjectionPair {
    pub fn new(cm: &ConstraintMatrices) -> Result<Self> {
        let (pi, c_pinv) = projector(&cm.c)?;
        let (pibar, cbar_pinv) = projector(&cm.cbar)?;
        Ok(Self {
            pi,
            pibar,
            c_pinv,
            cbar_pinv,
        })
    }

    /// Minimum-norm `w` with `C^H w = ν H`.
    pub fn feasible_w(&self, h: &CVec, nu: f64) -> CVec {
        &self.c_pinv * h * Complex64::new(nu, 0.0)
    }

    /// Minimum-norm `w̄` with `C̄^H w̄ = ν H*`.
    pub fn feasible_wbar(&self, h: &CVec, nu: f64) -> CVec {
        &self.cbar_pinv * h.conjugate() * Complex64::new(nu, 0.0)
    }
}

pub fn projection_pair(cm: &ConstraintMatrices) -> Result<ProjectionPair> {
    ProjectionPair::new(cm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius;
    use crate::signal::{SpreadingScheme, SpreadingSet};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_columns_give_canonical_projector() {
        // C = first two identity columns of a 4x4 space (as c), cbar = last two
        let mut c = CMat::zeros(4, 2);
        c[(0, 0)] = Complex64::new(1.0, 0.0);
        c[(1, 1)] = Complex64::new(1.0, 0.0);
        let mut cbar = CMat::zeros(4, 2);
        cbar[(2, 0)] = Complex64::new(1.0, 0.0);
        cbar[(3, 1)] = Complex64::new(1.0, 0.0);
        let pp = ProjectionPair::new(&ConstraintMatrices { c, cbar }).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| pp.pi[(i, i)].re).collect();
        assert_eq!(diag, vec![0.0, 0.0, 1.0, 1.0]);
        assert!(frobenius(&(pp.pi.clone() - CMat::from_diagonal(&pp.pi.diagonal()))) == 0.0);
    }

    #[test]
    fn projector_algebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let set = SpreadingSet::random(1, 32, SpreadingScheme::ZeroPadded, &mut rng).unwrap();
        let cm = set.constraint_matrices(0, 6).unwrap();
        let pp = ProjectionPair::new(&cm).unwrap();
        for (p, c) in [(&pp.pi, &cm.c), (&pp.pibar, &cm.cbar)] {
            assert!(frobenius(&(p * p - p)) < 1e-10);
            assert!(frobenius(&(p - p.adjoint())) < 1e-10);
            assert!(frobenius(&(p * c)) < 1e-10);
        }
    }

    #[test]
    fn rank_deficient_constraint_is_rejected() {
        let c = CMat::from_element(4, 2, Complex64::new(1.0, 0.0));
        let cm = ConstraintMatrices { c: c.clone(), cbar: c };
        assert_eq!(ProjectionPair::new(&cm), Err(Error::SingularConstraint));
    }
}
