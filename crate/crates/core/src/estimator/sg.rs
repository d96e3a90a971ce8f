use num_complex::Complex64;

use super::{ChannelEstimate, EstimateMethod};
use crate::error::{Error, Result};
use crate::linalg;
use crate::signal::ConstraintMatrices;
use crate::{CMat, CVec};

/// Divergence guard on `‖Ψ‖_F`.
pub const PSI_NORM_LIMIT: f64 = 1e6;

/// Recursive estimate of `R^{-1} C`, started at `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiEstimate {
    pub psi: CMat,
    /// Forgetting factor, in (0, 1).
    pub alpha: f64,
    /// Step size.
    pub mu: f64,
}

impl PsiEstimate {
    pub fn new(cm: &ConstraintMatrices, alpha: f64, mu: f64) -> Self {
        Self {
            psi: cm.c.clone(),
            alpha,
            mu,
        }
    }

    /// `Ψ ← α Ψ + μ (Ψ − y y^H Ψ)`.
    pub fn step(&mut self, y: &CVec) -> Result<()> {
        let proj = y.adjoint() * &self.psi; // 1 × 2Lp
        self.psi *= Complex64::new(self.alpha + self.mu, 0.0);
        self.psi.gemm(Complex64::new(-self.mu, 0.0), y, &proj, Complex64::new(1.0, 0.0));
        let norm = linalg::frobenius(&self.psi);
        if !(norm <= PSI_NORM_LIMIT) {
            return Err(Error::StepSize {
                norm,
                limit: PSI_NORM_LIMIT,
            });
        }
        Ok(())
    }
}

pub fn sg_psi_step(psi: &PsiEstimate, y: &CVec) -> Result<PsiEstimate> {
    let mut next = psi.clone();
    next.step(y)?;
    Ok(next)
}

/// One power-method-variant iteration `h ← (I − Ω / tr Ω) h`, renormalised.
pub fn power_method_step(h: &CVec, omega: &CMat) -> Result<CVec> {
    let tr = omega.trace();
    if !(tr.norm() > f64::MIN_POSITIVE) || !tr.re.is_finite() || !tr.im.is_finite() {
        return Err(Error::DegenerateStep(format!("trace of Ω is {tr}")));
    }
    let next = h - omega * h / tr;
    let n = next.norm();
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::DegenerateStep("iterate vanished".into()));
    }
    Ok(next.unscale(n))
}

/// SG channel update: `Ω = C^H Ψ`, then one power-method-variant step.
///
/// On [`Error::DegenerateStep`] the caller should keep the previous estimate.
pub fn sg_channel_step(h: &ChannelEstimate, psi: &PsiEstimate, cm: &ConstraintMatrices) -> Result<ChannelEstimate> {
    let omega = cm.c.adjoint() * &psi.psi;
    let next = power_method_step(&h.h, &omega)?;
    Ok(ChannelEstimate {
        h: next,
        method: EstimateMethod::StochasticGradient,
    })
}
