//! Clarke-model Rayleigh fading.
//!
//! Each tap is a sum of sinusoids with deterministic arrival angles and random
//! phases (the Zheng–Xiao construction):
//!
//! ```text
//! g(t) = sqrt(2/S) Σ_n exp(jψ_n) cos(2π fdT t cos α_n + φ),   α_n = (2πn − π + θ) / (4S)
//! ```
//!
//! with `θ, φ, ψ_n` uniform on `[-π, π)`. Time is measured in symbol periods,
//! so `fdT` is the Doppler frequency normalised by the symbol rate. The
//! autocorrelation is `J0(2π fdT τ)` and the time-averaged power of every
//! realisation converges to one.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Sinusoids per tap.
pub const OSCILLATORS: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct ClarkeTap {
    /// `2π fdT cos α_n`
    freqs: Vec<f64>,
    weights: Vec<Complex64>,
    phase: f64,
}

impl ClarkeTap {
    pub fn new<R: Rng + ?Sized>(fd_t: f64, rng: &mut R) -> Self {
        let s = OSCILLATORS as f64;
        let theta = rng.random_range(-PI..PI);
        let phase = rng.random_range(-PI..PI);
        let scale = (2.0 / s).sqrt();
        let freqs = (1..=OSCILLATORS)
            .map(|n| {
                let alpha = (2.0 * PI * n as f64 - PI + theta) / (4.0 * s);
                2.0 * PI * fd_t * alpha.cos()
            })
            .collect();
        let weights = (0..OSCILLATORS)
            .map(|_| Complex64::from_polar(scale, rng.random_range(-PI..PI)))
            .collect();
        Self { freqs, weights, phase }
    }

    /// Complex gain at time `t` (in symbol periods).
    pub fn gain_at(&self, t: f64) -> Complex64 {
        self.freqs
            .iter()
            .zip(&self.weights)
            .map(|(&w, &a)| a * (w * t + self.phase).cos())
            .sum()
    }
}

/// Per-tap complex gain sequences sampled once per symbol period.
///
/// With `fd_t == 0` every sequence is constant.
pub fn clarke_fading_sequence(fd_t: f64, num_taps: usize, length: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..num_taps)
        .map(|_| {
            let tap = ClarkeTap::new(fd_t, &mut rng);
            (0..length).map(|t| tap.gain_at(t as f64)).collect()
        })
        .collect()
}
