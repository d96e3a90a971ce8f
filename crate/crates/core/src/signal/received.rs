use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::channel::SpaceTimeChannel;
use super::spreading::{build_convolution_matrix, ConstraintMatrices, SpreadingSet};
use super::stbc::{alamouti_encode, SymbolStream};
use crate::error::{Error, Result};
use crate::CVec;

/// Stacked `2M` observation of STBC block `index`.
///
/// The top half is the chip-rate window of the first slot, the bottom half
/// the conjugate of the second slot's window.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedBlock {
    pub y: CVec,
    pub index: usize,
}

/// Precomputed per-user convolution and constraint matrices for one
/// spreading set and path count.
#[derive(Debug, Clone)]
pub struct BlockAssembler {
    gain: usize,
    lp: usize,
    convs: Vec<[DMatrix<f64>; 2]>,
    constraints: Vec<ConstraintMatrices>,
}

impl BlockAssembler {
    pub fn new(spreading: &SpreadingSet, lp: usize) -> Result<Self> {
        if lp == 0 {
            return Err(Error::invalid("need at least one path"));
        }
        let convs = (0..spreading.user_count())
            .map(|k| {
                [0, 1].map(|tx| build_convolution_matrix(spreading.code(k, tx), lp).matrix().clone())
            })
            .collect();
        let constraints = (0..spreading.user_count())
            .map(|k| spreading.constraint_matrices(k, lp))
            .collect::<Result<_>>()?;
        Ok(Self {
            gain: spreading.gain(),
            lp,
            convs,
            constraints,
        })
    }

    pub fn constraints(&self, user: usize) -> &ConstraintMatrices {
        &self.constraints[user]
    }

    /// `M = N + Lp - 1`.
    pub fn window(&self) -> usize {
        self.gain + self.lp - 1
    }

    pub fn user_count(&self) -> usize {
        self.convs.len()
    }

    fn check(&self, users: &[SymbolStream], channels: &[&SpaceTimeChannel]) -> Result<()> {
        if users.len() != channels.len() {
            return Err(Error::invalid(format!(
                "{} users but {} channels",
                users.len(),
                channels.len()
            )));
        }
        if users.len() > self.user_count() {
            return Err(Error::invalid(format!(
                "{} users but only {} spreading codes",
                users.len(),
                self.user_count()
            )));
        }
        if let Some(ch) = channels.iter().find(|ch| ch.paths() != self.lp) {
            return Err(Error::invalid(format!(
                "channel has {} taps, assembler expects {}",
                ch.paths(),
                self.lp
            )));
        }
        Ok(())
    }

    /// Noise-free received vector of block `block`.
    ///
    /// The signal part is built from the constraint matrices and the stacked
    /// channel. With `include_isi`, the spill-over of neighbouring slots
    /// (inside the block and from the adjacent blocks) is added by shifting
    /// their chip-level responses into the observation window. Neighbours use
    /// the current channel snapshot.
    pub fn noiseless(
        &self,
        users: &[SymbolStream],
        channels: &[&SpaceTimeChannel],
        block: usize,
        include_isi: bool,
    ) -> Result<CVec> {
        self.check(users, channels)?;
        let m = self.window();
        let mut y = CVec::zeros(2 * m);
        for (k, (user, ch)) in users.iter().zip(channels).enumerate() {
            let amp = user.amplitude_at(block);
            let Some((b1, b2)) = user.pair(block as isize) else {
                return Err(Error::invalid(format!("block {block} is past the end of user {k}'s stream")));
            };
            if amp == 0.0 {
                continue;
            }
            let h = ch.stacked();
            let cm = &self.constraints[k];
            y += (&cm.c * &h) * (b1 * amp) + (&cm.cbar * h.conjugate()) * (b2 * amp);
        }
        if include_isi {
            let slot0 = 2 * block as isize;
            let mut top = CVec::zeros(m);
            let mut bottom = CVec::zeros(m);
            self.add_spillover(users, channels, slot0, &mut top);
            self.add_spillover(users, channels, slot0 + 1, &mut bottom);
            let mut rows = y.rows_mut(0, m);
            rows += top;
            let mut rows = y.rows_mut(m, m);
            rows += bottom.conjugate();
        }
        Ok(y)
    }

    /// Physical (unconjugated) response of the given slot: `Σ_k A x1 C1 h1 + A x2 C2 h2`.
    fn slot_response(&self, users: &[SymbolStream], channels: &[&SpaceTimeChannel], slot: isize) -> Option<CVec> {
        if slot < 0 {
            return None;
        }
        let block = slot.div_euclid(2);
        let mut v = CVec::zeros(self.window());
        let mut any = false;
        for (k, (user, ch)) in users.iter().zip(channels).enumerate() {
            let Some((b1, b2)) = user.pair(block) else { continue };
            let amp = user.amplitude_at(block as usize);
            if amp == 0.0 {
                continue;
            }
            let sent = alamouti_encode(b1, b2)[slot.rem_euclid(2) as usize];
            for (tx, x) in [sent.tx1, sent.tx2].into_iter().enumerate() {
                let h = DVector::from_column_slice(ch.taps(tx));
                let conv = self.convs[k][tx].map(|c| Complex64::new(c, 0.0));
                v += (conv * h) * (x * amp);
            }
            any = true;
        }
        any.then_some(v)
    }

    fn add_spillover(&self, users: &[SymbolStream], channels: &[&SpaceTimeChannel], slot: isize, out: &mut CVec) {
        let m = self.window() as isize;
        let n = self.gain as isize;
        let reach = (m - 1) / n;
        for d in (-reach..=reach).filter(|&d| d != 0) {
            let Some(v) = self.slot_response(users, channels, slot + d) else { continue };
            for r in 0..m {
                let src = r - d * n;
                if (0..m).contains(&src) {
                    out[r as usize] += v[src as usize];
                }
            }
        }
    }

    pub fn assemble<R: Rng + ?Sized>(
        &self,
        users: &[SymbolStream],
        channels: &[&SpaceTimeChannel],
        block: usize,
        sigma2: f64,
        include_isi: bool,
        rng: &mut R,
    ) -> Result<ReceivedBlock> {
        if !(sigma2.is_finite() && sigma2 >= 0.0) {
            return Err(Error::invalid("noise variance must be non-negative"));
        }
        let mut y = self.noiseless(users, channels, block, include_isi)?;
        add_noise(&mut y, sigma2, rng);
        Ok(ReceivedBlock { y, index: block })
    }
}

/// Adds circular complex Gaussian noise with `E[n n^H] = σ² I`.
pub fn add_noise<R: Rng + ?Sized>(y: &mut CVec, sigma2: f64, rng: &mut R) {
    if sigma2 == 0.0 {
        return;
    }
    let s = (sigma2 / 2.0).sqrt();
    for z in y.iter_mut() {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        *z += Complex64::new(re * s, im * s);
    }
}

/// One-shot form of [`BlockAssembler::assemble`].
pub fn assemble_received_block<R: Rng + ?Sized>(
    users: &[SymbolStream],
    spreading: &SpreadingSet,
    channels: &[&SpaceTimeChannel],
    block: usize,
    sigma2: f64,
    include_isi: bool,
    rng: &mut R,
) -> Result<ReceivedBlock> {
    let lp = channels.first().map(|c| c.paths()).ok_or_else(|| Error::invalid("no channels"))?;
    BlockAssembler::new(spreading, lp)?.assemble(users, channels, block, sigma2, include_isi, rng)
}
