use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::CMat;

/// How the two per-antenna codes of a user are derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpreadingScheme {
    /// UMTS-style: a half-length code `s` becomes `[s, 0]` and `[0, s]`.
    #[default]
    ZeroPadded,
    /// IS-2000-style: `[s, s]` and `[s, -s]`.
    SignFlipped,
    /// Two independent full-length codes per user.
    Independent,
}

/// Per-user, per-transmit-antenna real chip sequences, each of unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadingSet {
    gain: usize,
    scheme: SpreadingScheme,
    codes: Vec<[Vec<f64>; 2]>,
}

impl SpreadingSet {
    /// Draws random codes for `users` users with processing gain `gain`.
    ///
    /// Zero-padded and sign-flipped schemes need an even gain. Zero-padded
    /// codes have nonzero chips `±√(2/N)` so that every code keeps unit norm;
    /// the other schemes use `±1/√N` throughout.
    pub fn random<R: Rng + ?Sized>(
        users: usize,
        gain: usize,
        scheme: SpreadingScheme,
        rng: &mut R,
    ) -> Result<Self> {
        if users == 0 || gain == 0 {
            return Err(Error::invalid("spreading set needs at least one user and one chip"));
        }
        if scheme != SpreadingScheme::Independent && !gain.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "{scheme:?} spreading needs an even processing gain, got {gain}"
            )));
        }
        let mut sign = |n: usize, amp: f64| -> Vec<f64> {
            (0..n).map(|_| if rng.random::<bool>() { amp } else { -amp }).collect()
        };
        let half = gain / 2;
        let codes = (0..users)
            .map(|_| match scheme {
                SpreadingScheme::ZeroPadded => {
                    let s = sign(half, (1.0 / half as f64).sqrt());
                    let mut c1 = s.clone();
                    c1.resize(gain, 0.0);
                    let mut c2 = vec![0.0; half];
                    c2.extend_from_slice(&s);
                    [c1, c2]
                }
                SpreadingScheme::SignFlipped => {
                    let s = sign(half, (1.0 / gain as f64).sqrt());
                    let mut c1 = s.clone();
                    c1.extend_from_slice(&s);
                    let mut c2 = s.clone();
                    c2.extend(s.iter().map(|x| -x));
                    [c1, c2]
                }
                SpreadingScheme::Independent => {
                    let amp = (1.0 / gain as f64).sqrt();
                    [sign(gain, amp), sign(gain, amp)]
                }
            })
            .collect();
        Ok(Self { gain, scheme, codes })
    }

    /// Wraps explicit codes; every code must have length `gain`.
    pub fn from_codes(gain: usize, scheme: SpreadingScheme, codes: Vec<[Vec<f64>; 2]>) -> Result<Self> {
        if codes.is_empty() {
            return Err(Error::invalid("spreading set needs at least one user"));
        }
        if codes.iter().flatten().any(|c| c.len() != gain) {
            return Err(Error::invalid(format!("every code must have {gain} chips")));
        }
        Ok(Self { gain, scheme, codes })
    }

    pub fn user_count(&self) -> usize {
        self.codes.len()
    }

    pub fn gain(&self) -> usize {
        self.gain
    }

    pub fn scheme(&self) -> SpreadingScheme {
        self.scheme
    }

    /// Chip sequence of user `k` on transmit antenna `tx` (0 or 1).
    pub fn code(&self, k: usize, tx: usize) -> &[f64] {
        &self.codes[k][tx]
    }

    pub fn constraint_matrices(&self, k: usize, lp: usize) -> Result<ConstraintMatrices> {
        build_constraint_matrices(
            &build_convolution_matrix(self.code(k, 0), lp),
            &build_convolution_matrix(self.code(k, 1), lp),
        )
    }
}

/// `M × Lp` matrix whose column `l` is the code delayed by `l` chips.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionMatrix(DMatrix<f64>);

impl ConvolutionMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// Observation window length `M = N + Lp - 1`.
    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn paths(&self) -> usize {
        self.0.ncols()
    }
}

/// Builds the one-chip-shifted convolution matrix of `code` for `lp` paths.
///
/// # Panics
/// If `code` is empty or `lp == 0`.
pub fn build_convolution_matrix(code: &[f64], lp: usize) -> ConvolutionMatrix {
    assert!(!code.is_empty() && lp >= 1, "convolution matrix needs N >= 1 and Lp >= 1");
    let n = code.len();
    let m = n + lp - 1;
    ConvolutionMatrix(DMatrix::from_fn(m, lp, |r, l| {
        if r >= l && r - l < n {
            code[r - l]
        } else {
            0.0
        }
    }))
}

/// Space-time constraint matrices of one user.
///
/// `c = [[C1, 0], [0, C2]]` and `cbar = [[0, C2], [-C1, 0]]`, both `2M × 2Lp`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintMatrices {
    pub c: CMat,
    pub cbar: CMat,
}

impl ConstraintMatrices {
    /// Half of the stacked length, `M`.
    pub fn window(&self) -> usize {
        self.c.nrows() / 2
    }

    pub fn paths(&self) -> usize {
        self.c.ncols() / 2
    }

    pub fn dim(&self) -> usize {
        self.c.nrows()
    }
}

pub fn build_constraint_matrices(
    c1: &ConvolutionMatrix,
    c2: &ConvolutionMatrix,
) -> Result<ConstraintMatrices> {
    if c1.0.shape() != c2.0.shape() {
        return Err(Error::invalid(format!(
            "convolution matrices differ in shape: {:?} vs {:?}",
            c1.0.shape(),
            c2.0.shape()
        )));
    }
    let (m, lp) = c1.0.shape();
    let to_c = |x: f64| Complex64::new(x, 0.0);
    let mut c = CMat::zeros(2 * m, 2 * lp);
    let mut cbar = CMat::zeros(2 * m, 2 * lp);
    c.view_mut((0, 0), (m, lp)).copy_from(&c1.0.map(to_c));
    c.view_mut((m, lp), (m, lp)).copy_from(&c2.0.map(to_c));
    cbar.view_mut((0, lp), (m, lp)).copy_from(&c2.0.map(to_c));
    cbar.view_mut((m, 0), (m, lp)).copy_from(&c1.0.map(|x| to_c(-x)));
    Ok(ConstraintMatrices { c, cbar })
}
