//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{Cholesky, Dyn, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::{CMat, CVec};

/// Eigenvalues below this fraction of the largest are treated as tied when
/// picking a minimum eigenvector.
pub const EIGEN_TIE_TOL: f64 = 1e-12;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted in
/// ascending order. Ties keep the solver's original column order.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Unit eigenvector for the smallest eigenvalue of a Hermitian matrix.
///
/// Among numerically tied minima the one with the smallest index in the
/// decomposition order wins.
pub fn min_eigenvector(m: &CMat) -> (f64, CVec) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(hermitian_part(m));
    let vals = &eig.eigenvalues;
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let tol = EIGEN_TIE_TOL * scale.max(f64::MIN_POSITIVE);
    let idx = (0..n).find(|&i| vals[i] - min <= tol).unwrap_or(0);
    (vals[idx], eig.eigenvectors.column(idx).into_owned())
}

pub fn cholesky(m: &CMat) -> Result<Cholesky<Complex64, Dyn>> {
    hermitian_part(m)
        .cholesky()
        .ok_or_else(|| Error::Conditioning("Cholesky factorisation failed".into()))
}

/// Inverse of a Hermitian positive definite matrix.
pub fn hpd_inverse(m: &CMat) -> Result<CMat> {
    let inv = cholesky(m)?.inverse();
    if inv.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(inv)
    } else {
        Err(Error::Conditioning("inverse has non-finite entries".into()))
    }
}

/// `m^{-p}` for Hermitian positive definite `m`, through the eigendecomposition.
///
/// Eigenvalues are floored so that the condition number of the result stays
/// below `max_cond`.
pub fn hpd_inverse_power(m: &CMat, p: u32, max_cond: f64) -> Result<CMat> {
    let (vals, vecs) = hermitian_eigen(m);
    let top = vals.last().copied().unwrap_or(0.0);
    if !top.is_finite() || top <= 0.0 {
        return Err(Error::Conditioning(format!(
            "largest eigenvalue {top:e} is not positive"
        )));
    }
    let floor = top * max_cond.powf(-1.0 / p as f64);
    let diag: Vec<f64> = vals.iter().map(|&v| v.max(floor).powi(-(p as i32))).collect();
    Ok(scale_columns(&vecs, &diag) * vecs.adjoint())
}

fn scale_columns(m: &CMat, s: &[f64]) -> CMat {
    let mut out = m.clone();
    for (j, &sj) in s.iter().enumerate() {
        out.column_mut(j).scale_mut(sj);
    }
    out
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value.
pub fn spectral_norm(m: &CMat) -> f64 {
    let g = m.adjoint() * m;
    let (vals, _) = hermitian_eigen(&g);
    vals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

pub fn is_finite(v: &CVec) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Rotate `v` so that its largest-magnitude entry is real and positive.
pub fn fix_phase(v: &CVec) -> CVec {
    let mut best = 0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > v[best].norm() {
            best = i;
        }
    }
    let pivot = v[best];
    if pivot.norm() == 0.0 {
        return v.clone();
    }
    v * (pivot.conj() / pivot.norm())
}

/// Unit-modulus scalar `e^{jφ}` minimising `‖e^{jφ}·est − reference‖`.
pub fn best_rotation(est: &CVec, reference: &CVec) -> Complex64 {
    let inner = est.dotc(reference);
    if inner.norm() == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        inner / inner.norm()
    }
}

/// Orthonormal basis for the column space of a full-column-rank matrix.
pub fn orthonormal_basis(m: &CMat) -> CMat {
    m.clone().qr().q()
}

/// Largest principal angle (radians) between the column spaces of `a` and `b`.
pub fn max_principal_angle(a: &CMat, b: &CMat) -> f64 {
    let qa = orthonormal_basis(a);
    let qb = orthonormal_basis(b);
    let cross = qa.adjoint() * qb;
    let sv = cross.singular_values();
    let smallest = sv.iter().copied().fold(f64::INFINITY, f64::min);
    smallest.clamp(-1.0, 1.0).acos()
}

/// Promote a real matrix to complex.
pub fn complexify(m: &nalgebra::DMatrix<f64>) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn herm(n: usize, seed: u64) -> CMat {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = CMat::from_fn(n, n, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        &a * a.adjoint() + CMat::identity(n, n)
    }

    #[test]
    fn eigen_is_sorted_and_reconstructs() {
        let m = herm(5, 1);
        let (vals, vecs) = hermitian_eigen(&m);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let diag = CMat::from_diagonal(&CVec::from_iterator(5, vals.iter().map(|&v| c(v, 0.0))));
        let rebuilt = &vecs * diag * vecs.adjoint();
        assert!(frobenius(&(rebuilt - &m)) < 1e-10);
    }

    #[test]
    fn inverse_power_matches_repeated_inverse() {
        let m = herm(4, 2);
        let inv = hpd_inverse(&m).unwrap();
        let p2 = hpd_inverse_power(&m, 2, 1e12).unwrap();
        assert!(frobenius(&(&inv * &inv - p2)) < 1e-10);
    }

    #[test]
    fn min_eigenvector_prefers_first_tied_index() {
        let m = CMat::identity(3, 3);
        let (val, v) = min_eigenvector(&m);
        assert!((val - 1.0).abs() < 1e-14);
        assert!((v.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn phase_fix_makes_pivot_real_positive() {
        let v = CVec::from_vec(vec![c(0.1, 0.2), c(-0.5, 0.5), c(0.0, 0.3)]);
        let f = fix_phase(&v);
        assert!(f[1].im.abs() < 1e-15 && f[1].re > 0.0);
        assert!((f.norm() - v.norm()).abs() < 1e-15);
    }

    #[test]
    fn principal_angle_of_identical_spaces_is_zero() {
        let m = herm(4, 3).columns(0, 2).into_owned();
        let rotated = &m * c(0.0, 2.0);
        assert!(max_principal_angle(&m, &rotated) < 1e-7);
    }
}
