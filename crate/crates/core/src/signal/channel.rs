use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::fading::ClarkeTap;
use crate::error::{Error, Result};
use crate::CVec;

/// Time variation of the path gains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FadingKind {
    /// Clarke-model Rayleigh fading at the configured Doppler rate.
    #[default]
    Rayleigh,
    /// Static unit-modulus gains with random phase (no amplitude fading).
    None,
}

#[derive(Debug, Clone, PartialEq)]
enum PathGain {
    Fading(ClarkeTap),
    Fixed(Complex64),
}

#[derive(Debug, Clone, PartialEq)]
struct Path {
    delay: usize,
    amplitude: f64,
    gain: PathGain,
}

/// Multipath channel from the two transmit antennas to one receive antenna.
///
/// Paths sit on chip-spaced taps; `taps(tx)` gives the physical tap vector of
/// antenna `tx`. Because the second slot of every received block is
/// conjugated, the stacked space-time vector seen by the receivers is
/// `H = [h1; conj(h2)]` (see [`SpaceTimeChannel::stacked`]).
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeChannel {
    lp: usize,
    fd_t: f64,
    paths: [Vec<Path>; 2],
    taps: [Vec<Complex64>; 2],
}

impl SpaceTimeChannel {
    /// Draws a random channel.
    ///
    /// Path 0 sits on tap 0, each later path is 1 or 2 chips after the
    /// previous one, and paths falling beyond `lp` taps are dropped. Path
    /// powers (dB) are normalised to unit total per antenna. When
    /// `tx2_active` is false the second antenna is silent.
    pub fn random<R: Rng + ?Sized>(
        lp: usize,
        powers_db: &[f64],
        fd_t: f64,
        fading: FadingKind,
        tx2_active: bool,
        rng: &mut R,
    ) -> Result<Self> {
        if lp == 0 {
            return Err(Error::invalid("channel needs at least one tap"));
        }
        if powers_db.is_empty() || powers_db.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("path power profile must be non-empty and finite"));
        }
        if !(fd_t.is_finite() && fd_t >= 0.0) {
            return Err(Error::invalid("normalised Doppler must be non-negative"));
        }
        let linear: Vec<f64> = powers_db.iter().map(|db| 10f64.powf(db / 10.0)).collect();
        let total: f64 = linear.iter().sum();
        let draw = |rng: &mut R| -> Vec<Path> {
            let mut delay = 0;
            let mut out = Vec::new();
            for (l, p) in linear.iter().enumerate() {
                if l > 0 {
                    delay += rng.random_range(1..=2);
                }
                let gain = match fading {
                    FadingKind::Rayleigh => PathGain::Fading(ClarkeTap::new(fd_t, rng)),
                    FadingKind::None => PathGain::Fixed(Complex64::from_polar(1.0, rng.random_range(-PI..PI))),
                };
                if delay < lp {
                    out.push(Path {
                        delay,
                        amplitude: (p / total).sqrt(),
                        gain,
                    });
                }
            }
            out
        };
        let p1 = draw(rng);
        let p2 = if tx2_active { draw(rng) } else { Vec::new() };
        let mut ch = Self {
            lp,
            fd_t,
            paths: [p1, p2],
            taps: [vec![Complex64::default(); lp], vec![Complex64::default(); lp]],
        };
        ch.advance_to(0.0);
        Ok(ch)
    }

    /// Static channel with explicit physical taps.
    pub fn from_taps(h1: Vec<Complex64>, h2: Vec<Complex64>) -> Result<Self> {
        if h1.is_empty() || h1.len() != h2.len() {
            return Err(Error::invalid("tap vectors must be non-empty and of equal length"));
        }
        let fixed = |h: &[Complex64]| {
            h.iter()
                .enumerate()
                .filter(|(_, g)| g.norm() > 0.0)
                .map(|(delay, &g)| Path {
                    delay,
                    amplitude: 1.0,
                    gain: PathGain::Fixed(g),
                })
                .collect()
        };
        Ok(Self {
            lp: h1.len(),
            fd_t: 0.0,
            paths: [fixed(&h1), fixed(&h2)],
            taps: [h1, h2],
        })
    }

    /// Static channel whose stacked vector equals `h` (`2Lp` entries).
    pub fn from_stacked(h: &CVec) -> Result<Self> {
        if !h.len().is_multiple_of(2) || h.is_empty() {
            return Err(Error::invalid("stacked channel must have even, non-zero length"));
        }
        let lp = h.len() / 2;
        let h1 = h.rows(0, lp).iter().copied().collect();
        let h2 = h.rows(lp, lp).iter().map(|g| g.conj()).collect();
        Self::from_taps(h1, h2)
    }

    /// Re-evaluates the fading taps at time `t` (in symbol periods).
    pub fn advance_to(&mut self, t: f64) {
        for tx in 0..2 {
            let taps = &mut self.taps[tx];
            taps.iter_mut().for_each(|g| *g = Complex64::default());
            for path in &self.paths[tx] {
                let g = match &path.gain {
                    PathGain::Fading(tap) => tap.gain_at(t),
                    PathGain::Fixed(g) => *g,
                };
                taps[path.delay] += g * path.amplitude;
            }
        }
    }

    pub fn paths(&self) -> usize {
        self.lp
    }

    pub fn doppler(&self) -> f64 {
        self.fd_t
    }

    /// Physical taps of transmit antenna `tx` (0 or 1).
    pub fn taps(&self, tx: usize) -> &[Complex64] {
        &self.taps[tx]
    }

    /// Number of taps carrying a path on antenna `tx`.
    pub fn active_taps(&self, tx: usize) -> Vec<usize> {
        let mut d: Vec<usize> = self.paths[tx].iter().map(|p| p.delay).collect();
        d.dedup();
        d
    }

    /// The `2Lp` space-time vector `[h1; conj(h2)]`.
    pub fn stacked(&self) -> CVec {
        let lp = self.lp;
        CVec::from_fn(2 * lp, |i, _| {
            if i < lp {
                self.taps[0][i]
            } else {
                self.taps[1][i - lp].conj()
            }
        })
    }

    /// Sum of the squared tap magnitudes over both antennas.
    pub fn energy(&self) -> f64 {
        self.taps.iter().flatten().map(|g| g.norm_sqr()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn taps_beyond_paths_are_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let ch = SpaceTimeChannel::random(6, &[0.0, -3.0, -6.0], 1e-3, FadingKind::Rayleigh, true, &mut rng).unwrap();
            assert_eq!(ch.stacked().len(), 12);
            for tx in 0..2 {
                let active = ch.active_taps(tx);
                assert_eq!(active[0], 0);
                assert!(active.windows(2).all(|w| (1..=2).contains(&(w[1] - w[0]))));
                for (d, g) in ch.taps(tx).iter().enumerate() {
                    if !active.contains(&d) {
                        assert_eq!(*g, Complex64::default());
                    }
                }
            }
        }
    }

    #[test]
    fn unfaded_profile_has_unit_energy_per_antenna() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ch = SpaceTimeChannel::random(6, &[0.0, -3.0, -6.0], 0.0, FadingKind::None, true, &mut rng).unwrap();
        assert!((ch.energy() - 2.0).abs() < 1e-12);
        let single = SpaceTimeChannel::random(6, &[0.0, -3.0, -6.0], 0.0, FadingKind::None, false, &mut rng).unwrap();
        assert!((single.energy() - 1.0).abs() < 1e-12);
        assert!(single.taps(1).iter().all(|g| g.norm() == 0.0));
    }

    #[test]
    fn stacked_conjugates_second_antenna() {
        let h1 = vec![Complex64::new(1.0, 2.0)];
        let h2 = vec![Complex64::new(3.0, 4.0)];
        let ch = SpaceTimeChannel::from_taps(h1, h2).unwrap();
        assert_eq!(ch.stacked().as_slice(), &[Complex64::new(1.0, 2.0), Complex64::new(3.0, -4.0)]);
        let back = SpaceTimeChannel::from_stacked(&ch.stacked()).unwrap();
        assert_eq!(back.taps(1), ch.taps(1));
    }

    #[test]
    fn fading_channel_changes_over_time() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut ch = SpaceTimeChannel::random(3, &[0.0], 0.05, FadingKind::Rayleigh, true, &mut rng).unwrap();
        let before = ch.stacked();
        ch.advance_to(10.0);
        assert!((ch.stacked() - before).norm() > 1e-6);
    }
}
