//! Space-time linearly constrained receivers.

pub mod ccm;
pub mod cmv;
pub mod detect;
pub mod lms;
pub mod projection;

pub use ccm::{ccm_exact_filter, ccm_sg_step, cm_gradient, constrained_quadratic, CcmStatistics};
pub use cmv::{cmv_exact_filter, cmv_sg_step};
pub use detect::{combine, detect, CombinerGains, CombinerMode};
pub use lms::trained_lms_step;
pub use projection::{projection_pair, ProjectionPair};

use num_complex::Complex64;

use crate::signal::ConstraintMatrices;
use crate::CVec;

/// The two `2M` receive filters of one user at one receive antenna: `w`
/// detects the first symbol of a block, `wbar` the second.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterPair {
    pub w: CVec,
    pub wbar: CVec,
    pub user: usize,
    pub antenna: usize,
}

impl FilterPair {
    pub fn new(w: CVec, wbar: CVec) -> Self {
        Self {
            w,
            wbar,
            user: 0,
            antenna: 0,
        }
    }

    /// Minimum-norm point of the constraint set.
    pub fn feasible(pp: &ProjectionPair, h: &CVec, nu: f64) -> Self {
        Self::new(pp.feasible_w(h, nu), pp.feasible_wbar(h, nu))
    }

    /// Soft outputs `(w^H y, w̄^H y)`.
    pub fn outputs(&self, y: &CVec) -> (Complex64, Complex64) {
        (self.w.dotc(y), self.wbar.dotc(y))
    }

    pub fn norm(&self) -> f64 {
        (self.w.norm_squared() + self.wbar.norm_squared()).sqrt()
    }
}

/// `(‖C^H w − ν H‖, ‖C̄^H w̄ − ν H*‖)`.
pub fn constraint_residual(fp: &FilterPair, cm: &ConstraintMatrices, h: &CVec, nu: f64) -> (f64, f64) {
    let nu = Complex64::new(nu, 0.0);
    (
        (cm.c.adjoint() * &fp.w - h * nu).norm(),
        (cm.cbar.adjoint() * &fp.wbar - h.conjugate() * nu).norm(),
    )
}
