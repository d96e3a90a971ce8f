//! Independent reference computations.
//!
//! Nothing here shares a code path with the production routines it is used
//! to check: constrained filters are compared against a direct solve of the
//! bordered KKT system, projectors against Gram–Schmidt, the stacked block
//! model against a chip-by-chip transmit/convolve/window simulation.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::signal::{alamouti_encode, SpreadingSet, SymbolStream};
use crate::{CMat, CVec};

/// Solves `min w^H R w − 2 Re(d^H w)` s.t. `C^H w = target` through the KKT
/// system `[[R, C], [C^H, 0]] [w; λ] = [d; target]` with full-pivot LU.
pub fn kkt_solve(r: &CMat, d: &CVec, c: &CMat, target: &CVec) -> Option<CVec> {
    let n = r.nrows();
    let q = c.ncols();
    let mut kkt = CMat::zeros(n + q, n + q);
    kkt.view_mut((0, 0), (n, n)).copy_from(r);
    kkt.view_mut((0, n), (n, q)).copy_from(c);
    kkt.view_mut((n, 0), (q, n)).copy_from(&c.adjoint());
    let mut rhs = CVec::zeros(n + q);
    rhs.rows_mut(0, n).copy_from(d);
    rhs.rows_mut(n, q).copy_from(target);
    let sol = kkt.full_piv_lu().solve(&rhs)?;
    Some(sol.rows(0, n).into_owned())
}

/// Orthonormal basis of the column space by modified Gram–Schmidt (with one
/// re-orthogonalisation pass).
pub fn gram_schmidt(c: &CMat) -> CMat {
    let mut q = c.clone();
    for j in 0..q.ncols() {
        for _ in 0..2 {
            for i in 0..j {
                let qi = q.column(i).into_owned();
                let proj = qi.dotc(&q.column(j));
                let mut col = q.column_mut(j);
                col -= qi * proj;
            }
        }
        let n = q.column(j).norm();
        q.column_mut(j).unscale_mut(n);
    }
    q
}

/// `I − Q Q^H` with `Q` from [`gram_schmidt`].
pub fn gram_schmidt_projector(c: &CMat) -> CMat {
    let q = gram_schmidt(c);
    CMat::identity(c.nrows(), c.nrows()) - &q * q.adjoint()
}

/// Central difference of a real function of a complex vector along `v`.
pub fn directional_derivative(f: impl Fn(&CVec) -> f64, w: &CVec, v: &CVec, step: f64) -> f64 {
    let plus = w + v * Complex64::new(step, 0.0);
    let minus = w - v * Complex64::new(step, 0.0);
    (f(&plus) - f(&minus)) / (2.0 * step)
}

/// Hermitian covariance `σ² I + V_s diag(λ_s σ²) V_s^H` on a random subspace.
///
/// `signal` holds the eigenvalue excesses as multiples of `σ²`. Returns the
/// matrix together with an orthonormal basis of the noise subspace.
pub fn planted_covariance<R: Rng + ?Sized>(dim: usize, signal: &[f64], sigma2: f64, rng: &mut R) -> (CMat, CMat) {
    let raw = CMat::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    });
    let basis = gram_schmidt(&raw);
    let s = signal.len();
    let mut r = CMat::identity(dim, dim) * Complex64::new(sigma2, 0.0);
    for (i, &l) in signal.iter().enumerate() {
        let v = basis.column(i);
        r += v * v.adjoint() * Complex64::new(l * sigma2, 0.0);
    }
    (r, basis.columns(s, dim - s).into_owned())
}

/// Chip-rate transmitter/channel simulator.
///
/// Builds the two antennas' chip streams slot by slot (Alamouti encoded,
/// spread, scaled), convolves each with its physical taps, and cuts the
/// `N + Lp − 1` window that starts at each slot boundary. The second slot of a
/// block is conjugated when stacking.
pub struct ChipLevelSimulator<'a> {
    pub spreading: &'a SpreadingSet,
    /// Physical downlink taps `(h1, h2)` shared by all users.
    pub taps: (Vec<Complex64>, Vec<Complex64>),
}

impl ChipLevelSimulator<'_> {
    fn transmit(&self, users: &[SymbolStream], slots: &[usize], total_slots: usize) -> [Vec<Complex64>; 2] {
        let n = self.spreading.gain();
        let lp = self.taps.0.len();
        let len = total_slots * n + lp;
        let mut streams = [vec![Complex64::default(); len], vec![Complex64::default(); len]];
        for (k, user) in users.iter().enumerate() {
            for &slot in slots {
                let block = slot / 2;
                let Some((b1, b2)) = user.pair(block as isize) else { continue };
                let amp = user.amplitude_at(block);
                let sent = alamouti_encode(b1, b2)[slot % 2];
                for (tx, x) in [sent.tx1, sent.tx2].into_iter().enumerate() {
                    for (chip, &a) in self.spreading.code(k, tx).iter().enumerate() {
                        streams[tx][slot * n + chip] += x * a * amp;
                    }
                }
            }
        }
        streams
    }

    fn receive(&self, streams: &[Vec<Complex64>; 2]) -> Vec<Complex64> {
        let (h1, h2) = &self.taps;
        let len = streams[0].len();
        (0..len)
            .map(|c| {
                let mut acc = Complex64::default();
                for l in 0..h1.len() {
                    if c >= l {
                        acc += h1[l] * streams[0][c - l] + h2[l] * streams[1][c - l];
                    }
                }
                acc
            })
            .collect()
    }

    fn window(&self, rx: &[Complex64], slot: usize) -> Vec<Complex64> {
        let n = self.spreading.gain();
        let m = n + self.taps.0.len() - 1;
        (0..m).map(|r| rx.get(slot * n + r).copied().unwrap_or_default()).collect()
    }

    /// Stacked observation of `block`. With `include_isi` every slot of the
    /// packet is on air; otherwise each slot is simulated alone.
    pub fn block(&self, users: &[SymbolStream], block: usize, include_isi: bool) -> CVec {
        let total = 2 * users.iter().map(|u| u.blocks()).max().unwrap_or(0) + 2;
        let slots = [2 * block, 2 * block + 1];
        let window_for = |slot: usize| -> Vec<Complex64> {
            let on_air: Vec<usize> = if include_isi { (0..total).collect() } else { vec![slot] };
            let tx = self.transmit(users, &on_air, total);
            let rx = self.receive(&tx);
            self.window(&rx, slot)
        };
        let top = window_for(slots[0]);
        let bottom = window_for(slots[1]);
        CVec::from_iterator(
            top.len() + bottom.len(),
            top.into_iter().chain(bottom.into_iter().map(|z| z.conj())),
        )
    }
}

/// Real convolution matrix written out element by element.
pub fn convolution_by_definition(code: &[f64], lp: usize) -> DMatrix<f64> {
    let n = code.len();
    let mut m = DMatrix::zeros(n + lp - 1, lp);
    for l in 0..lp {
        for (i, &a) in code.iter().enumerate() {
            m[(i + l, l)] = a;
        }
    }
    m
}
