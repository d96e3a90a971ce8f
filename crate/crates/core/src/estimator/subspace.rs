use num_complex::Complex64;

use super::{ChannelEstimate, CovarianceEstimate, EstimateMethod};
use crate::error::{Error, Result};
use crate::linalg;
use crate::signal::ConstraintMatrices;
use crate::CMat;

/// Largest condition number allowed for `R^{-p}`; smaller eigenvalues of `R`
/// are floored to respect it.
pub const MAX_CONDITION: f64 = 1e12;

/// Subspace channel estimate: the unit-norm minimiser of `H^H C^H R^{-p} C H`.
///
/// The returned vector is the minimum eigenvector of the `2Lp × 2Lp` matrix
/// `C^H R^{-p} C`, rotated so its largest-magnitude entry is real positive.
pub fn estimate_channel_exact(r: &CovarianceEstimate, cm: &ConstraintMatrices, p: u32) -> Result<ChannelEstimate> {
    if p == 0 {
        return Err(Error::invalid("inverse power must be at least 1"));
    }
    if r.dim() != cm.dim() {
        return Err(Error::invalid(format!(
            "covariance is {0}x{0} but constraints have {1} rows",
            r.dim(),
            cm.dim()
        )));
    }
    let rinv_p = linalg::hpd_inverse_power(&r.matrix(), p, MAX_CONDITION)?;
    let q = cm.c.adjoint() * rinv_p * &cm.c;
    let (_, v) = linalg::min_eigenvector(&q);
    if !linalg::is_finite(&v) {
        return Err(Error::Conditioning("eigenvector is not finite".into()));
    }
    Ok(ChannelEstimate::new(linalg::fix_phase(&v), EstimateMethod::Subspace { power: p }))
}

/// `(R/σ²)^{-p}` by explicit inversion and repeated multiplication.
///
/// As `p` grows this approaches the noise-subspace projector `V_n V_n^H`;
/// signal directions are damped by `(1 + λ_s/σ²)^{-p}`.
pub fn lemma_inverse_power_check(r: &CMat, sigma2: f64, p: u32) -> Result<CMat> {
    if !(sigma2 > 0.0) {
        return Err(Error::invalid("noise variance must be positive"));
    }
    let inv = linalg::hpd_inverse(&r.unscale(sigma2))?;
    let n = r.nrows();
    let mut out = CMat::identity(n, n);
    for _ in 0..p {
        out = &out * &inv;
    }
    Ok(linalg::hermitian_part(&out))
}

/// Noise-subspace quadratic forms `(H^H C^H V_n V_n^H C H, H^T C̄^H V_n V_n^H C̄ H*)`.
pub fn noise_subspace_forms(vn: &CMat, cm: &ConstraintMatrices, h: &crate::CVec) -> (f64, f64) {
    let proj = vn * vn.adjoint();
    let a: Complex64 = (h.adjoint() * cm.c.adjoint() * &proj * &cm.c * h)[(0, 0)];
    let hc = h.conjugate();
    let b: Complex64 = (hc.adjoint() * cm.cbar.adjoint() * &proj * &cm.cbar * &hc)[(0, 0)];
    (a.re, b.re)
}
