//! Blind space-time channel estimation.
//!
//! The channel of the desired user is the direction `H` that keeps
//! `C H` inside the signal subspace of the received covariance. The
//! subspace estimator finds it as the minimum eigenvector of
//! `C^H R^{-p} C`; the SG tracker replaces `R^{-1} C` with a recursive
//! estimate and the eigen-solve with a power-method variant.

pub mod covariance;
pub mod sg;
pub mod subspace;

pub use covariance::CovarianceEstimate;
pub use sg::{power_method_step, sg_channel_step, sg_psi_step, PsiEstimate, PSI_NORM_LIMIT};
pub use subspace::{estimate_channel_exact, lemma_inverse_power_check, MAX_CONDITION};

use crate::linalg;
use crate::CVec;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMethod {
    /// Minimum eigenvector of `C^H R^{-p} C`.
    Subspace { power: u32 },
    /// Recursive `R^{-1} C` estimate plus power-method iteration.
    StochasticGradient,
    /// Initial guess, no data seen.
    Initial,
}

/// Unit-norm estimate of the stacked channel `[h1; conj(h2)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    pub h: CVec,
    pub method: EstimateMethod,
}

impl ChannelEstimate {
    /// Normalises `h` to unit norm.
    pub fn new(h: CVec, method: EstimateMethod) -> Self {
        let n = h.norm();
        Self { h: h.unscale(n), method }
    }

    /// Flat starting point `1/√(2Lp)` in every entry.
    pub fn initial(lp: usize) -> Self {
        let v = (1.0 / (2 * lp) as f64).sqrt();
        Self {
            h: CVec::from_element(2 * lp, Complex64::new(v, 0.0)),
            method: EstimateMethod::Initial,
        }
    }

    /// Copy rotated by the unit-modulus scalar that best matches `reference`.
    pub fn aligned_to(&self, reference: &CVec) -> CVec {
        &self.h * linalg::best_rotation(&self.h, reference)
    }
}
