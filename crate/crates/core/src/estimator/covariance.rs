use num_complex::Complex64;

use crate::receiver::ccm::DEFAULT_LOADING;
use crate::{CMat, CVec};

/// Exponentially weighted sample covariance `R ≈ E[y y^H]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceEstimate {
    acc: CMat,
    weight: f64,
    pub forgetting: f64,
    pub loading: f64,
    updates: usize,
}

impl CovarianceEstimate {
    pub fn new(dim: usize, forgetting: f64) -> Self {
        Self {
            acc: CMat::zeros(dim, dim),
            weight: 0.0,
            forgetting,
            loading: DEFAULT_LOADING,
            updates: 0,
        }
    }

    /// Wraps a known covariance (no loading is added).
    pub fn from_matrix(r: CMat) -> Self {
        Self {
            acc: r,
            weight: 1.0,
            forgetting: 1.0,
            loading: 0.0,
            updates: 1,
        }
    }

    pub fn update(&mut self, y: &CVec) {
        self.update_weighted(y, 1.0);
    }

    /// Adds `s · y y^H`; used for the CCM-weighted covariance `E[|z|² y y^H]`.
    pub fn update_weighted(&mut self, y: &CVec, s: f64) {
        self.acc *= Complex64::new(self.forgetting, 0.0);
        self.acc.gerc(Complex64::new(s, 0.0), y, y, Complex64::new(1.0, 0.0));
        self.weight = self.forgetting * self.weight + 1.0;
        self.updates += 1;
    }

    pub fn updates(&self) -> usize {
        self.updates
    }

    pub fn dim(&self) -> usize {
        self.acc.nrows()
    }

    /// Normalised estimate with diagonal loading.
    pub fn matrix(&self) -> CMat {
        let n = self.dim();
        let w = if self.weight > 0.0 { self.weight } else { 1.0 };
        self.acc.unscale(w) + CMat::identity(n, n) * Complex64::new(self.loading, 0.0)
    }
}
