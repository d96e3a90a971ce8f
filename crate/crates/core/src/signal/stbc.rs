use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// Average power of a `±1 ± j` symbol.
pub const QPSK_POWER: f64 = 2.0;

/// Draws a QPSK symbol from `{±1 ± j}`.
pub fn random_qpsk<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re = if rng.random::<bool>() { 1.0 } else { -1.0 };
    let im = if rng.random::<bool>() { 1.0 } else { -1.0 };
    Complex64::new(re, im)
}

pub fn is_qpsk(b: Complex64) -> bool {
    b.re.abs() == 1.0 && b.im.abs() == 1.0
}

/// Number of bit errors between two QPSK symbols (0, 1 or 2).
pub fn bit_errors(sent: Complex64, decided: Complex64) -> u8 {
    u8::from(sent.re.is_sign_negative() != decided.re.is_sign_negative())
        + u8::from(sent.im.is_sign_negative() != decided.im.is_sign_negative())
}

/// Values sent by the two transmit antennas during one symbol slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotPair {
    pub tx1: Complex64,
    pub tx2: Complex64,
}

/// Alamouti encoding of the symbol pair `(b_odd, b_even)`.
///
/// First slot sends `(b_odd, b_even)`, second slot `(-b_even*, b_odd*)`.
pub fn alamouti_encode(b_odd: Complex64, b_even: Complex64) -> [SlotPair; 2] {
    [
        SlotPair { tx1: b_odd, tx2: b_even },
        SlotPair {
            tx1: -b_even.conj(),
            tx2: b_odd.conj(),
        },
    ]
}

/// QPSK symbols of one user together with a piecewise-constant amplitude.
///
/// Symbols `2i` and `2i + 1` (zero-based) form STBC block `i`. Amplitude
/// segments are `(first_block, amplitude)` pairs; an amplitude of zero means
/// the user is silent, which is how users joining mid-packet are modelled.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolStream {
    symbols: Vec<Complex64>,
    segments: Vec<(usize, f64)>,
}

impl SymbolStream {
    pub fn new(symbols: Vec<Complex64>, amplitude: f64) -> Result<Self> {
        Self::with_segments(symbols, vec![(0, amplitude)])
    }

    pub fn with_segments(symbols: Vec<Complex64>, mut segments: Vec<(usize, f64)>) -> Result<Self> {
        if !symbols.len().is_multiple_of(2) {
            return Err(Error::invalid("symbol stream length must be even (two per STBC block)"));
        }
        if let Some(b) = symbols.iter().find(|b| !is_qpsk(**b)) {
            return Err(Error::invalid(format!("{b} is not a QPSK symbol")));
        }
        if segments.iter().any(|&(_, a)| !(a.is_finite() && a >= 0.0)) {
            return Err(Error::invalid("amplitudes must be finite and non-negative"));
        }
        segments.sort_by_key(|&(start, _)| start);
        if segments.first().map(|s| s.0) != Some(0) {
            segments.insert(0, (0, 0.0));
        }
        Ok(Self { symbols, segments })
    }

    pub fn random<R: Rng + ?Sized>(blocks: usize, amplitude: f64, rng: &mut R) -> Self {
        let symbols = (0..2 * blocks).map(|_| random_qpsk(rng)).collect();
        Self::new(symbols, amplitude).expect("generated stream is valid")
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }

    pub fn blocks(&self) -> usize {
        self.symbols.len() / 2
    }

    /// `(b(2i-1), b(2i))` of block `i`, or `None` past the packet edges.
    pub fn pair(&self, block: isize) -> Option<(Complex64, Complex64)> {
        if block < 0 || block as usize >= self.blocks() {
            return None;
        }
        let b = block as usize;
        Some((self.symbols[2 * b], self.symbols[2 * b + 1]))
    }

    pub fn amplitude_at(&self, block: usize) -> f64 {
        let idx = self.segments.partition_point(|&(start, _)| start <= block);
        self.segments[idx - 1].1
    }
}
