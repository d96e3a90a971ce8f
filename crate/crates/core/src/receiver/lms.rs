use num_complex::Complex64;

use crate::CVec;

/// Trained LMS update toward a known symbol: `w ← w + μ y (b − w^H y)*`.
pub fn trained_lms_step(w: &CVec, y: &CVec, symbol: Complex64, mu: f64) -> CVec {
    let err = symbol - w.dotc(y);
    w + y * (err.conj() * mu)
}
