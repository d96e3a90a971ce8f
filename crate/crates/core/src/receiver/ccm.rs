//! Code-constrained constant-modulus receiver.
//!
//! Each filter of the pair minimises `E[(|w^H y|² − 1)²]` subject to
//! `C^H w = ν H` (and `C̄^H w̄ = ν H*` for the second symbol of the block).

use num_complex::Complex64;

use super::projection::ProjectionPair;
use super::FilterPair;
use crate::error::{Error, Result};
use crate::linalg;
use crate::signal::ConstraintMatrices;
use crate::{CMat, CVec};

/// Diagonal loading added before inverting moment matrices.
pub const DEFAULT_LOADING: f64 = 1e-6;

/// Exponentially weighted CCM moments.
///
/// `r ≈ E[|z|² y y^H]` and `d ≈ E[z* y]`, with `z` produced by the filter in
/// use when the sample arrived. The barred pair tracks the second filter.
#[derive(Debug, Clone, PartialEq)]
pub struct CcmStatistics {
    pub r: CMat,
    pub d: CVec,
    pub rbar: CMat,
    pub dbar: CVec,
    pub forgetting: f64,
    pub loading: f64,
    weight: f64,
}

impl CcmStatistics {
    pub fn new(dim: usize, forgetting: f64) -> Self {
        Self {
            r: CMat::zeros(dim, dim),
            d: CVec::zeros(dim),
            rbar: CMat::zeros(dim, dim),
            dbar: CVec::zeros(dim),
            forgetting,
            loading: DEFAULT_LOADING,
            weight: 0.0,
        }
    }

    /// Statistics given directly as (already normalised) moments.
    pub fn from_moments(r: CMat, d: CVec, rbar: CMat, dbar: CVec) -> Self {
        Self {
            r,
            d,
            rbar,
            dbar,
            forgetting: 1.0,
            loading: DEFAULT_LOADING,
            weight: 1.0,
        }
    }

    pub fn update(&mut self, y: &CVec, z: Complex64, zbar: Complex64) {
        let lam = Complex64::new(self.forgetting, 0.0);
        let outer = y * y.adjoint();
        self.r = &self.r * lam + &outer * Complex64::new(z.norm_sqr(), 0.0);
        self.rbar = &self.rbar * lam + &outer * Complex64::new(zbar.norm_sqr(), 0.0);
        self.d = &self.d * lam + y * z.conj();
        self.dbar = &self.dbar * lam + y * zbar.conj();
        self.weight = self.forgetting * self.weight + 1.0;
    }

    pub fn samples_weight(&self) -> f64 {
        self.weight
    }

    fn normalised(&self, m: &CMat) -> CMat {
        let w = if self.weight > 0.0 { self.weight } else { 1.0 };
        let n = m.nrows();
        m.unscale(w) + CMat::identity(n, n) * Complex64::new(self.loading, 0.0)
    }
}

/// `argmin_w w^H R w − 2 Re(d^H w)` subject to `C^H w = target`:
///
/// `w = R^{-1} [d − C (C^H R^{-1} C)^{-1} (C^H R^{-1} d − target)]`.
pub fn constrained_quadratic(r: &CMat, d: &CVec, c: &CMat, target: &CVec) -> Result<CVec> {
    let chol = linalg::cholesky(r)?;
    let rinv_c = chol.solve(c);
    let rinv_d = chol.solve(d);
    let inner = c.adjoint() * &rinv_c;
    let inner = linalg::cholesky(&inner)
        .map_err(|_| Error::Conditioning("C^H R^-1 C is not positive definite".into()))?;
    let lambda = inner.solve(&(c.adjoint() * &rinv_d - target));
    let w = rinv_d - rinv_c * lambda;
    if linalg::is_finite(&w) {
        Ok(w)
    } else {
        Err(Error::Conditioning("constrained solution is not finite".into()))
    }
}

/// Closed-form CCM filter pair for the current moment estimates.
pub fn ccm_exact_filter(stats: &CcmStatistics, cm: &ConstraintMatrices, h: &CVec, nu: f64) -> Result<FilterPair> {
    let nu = Complex64::new(nu, 0.0);
    let w = constrained_quadratic(&stats.normalised(&stats.r), &stats.d.unscale(stats.weight.max(1e-300)), &cm.c, &(h * nu))?;
    let wbar = constrained_quadratic(
        &stats.normalised(&stats.rbar),
        &stats.dbar.unscale(stats.weight.max(1e-300)),
        &cm.cbar,
        &(h.conjugate() * nu),
    )?;
    Ok(FilterPair::new(w, wbar))
}

/// Output `z = w^H y`, modulus error `e = |z|² − 1` and the stochastic
/// gradient factor `e z* y`.
///
/// The exact gradient of `(|z|² − 1)²` with respect to `w*` is twice this
/// factor; its directional derivative along `v` is `Re(v^H · 4 e z* y)`.
pub fn cm_gradient(w: &CVec, y: &CVec) -> (Complex64, f64, CVec) {
    let z = w.dotc(y);
    let e = z.norm_sqr() - 1.0;
    (z, e, y * (z.conj() * e))
}

/// One constrained stochastic-gradient step on both filters.
///
/// `w ← Π (w − μ e z* y) + C (C^H C)^{-1} ν H`, mirrored for `w̄` with `C̄`
/// and `ν H*`. The constraints hold on exit whatever the input.
pub fn ccm_sg_step(fp: &FilterPair, pp: &ProjectionPair, y: &CVec, h: &CVec, nu: f64, mu: f64) -> FilterPair {
    let mu = Complex64::new(mu, 0.0);
    let (_, _, g) = cm_gradient(&fp.w, y);
    let (_, _, gbar) = cm_gradient(&fp.wbar, y);
    let w = &pp.pi * (&fp.w - g * mu) + pp.feasible_w(h, nu);
    let wbar = &pp.pibar * (&fp.wbar - gbar * mu) + pp.feasible_wbar(h, nu);
    FilterPair { w, wbar, ..*fp }
}
