use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard QPSK decision `sgn(Re z) + j sgn(Im z)`; zero maps to `+1`.
pub fn detect(z: Complex64) -> Complex64 {
    let sgn = |x: f64| if x < 0.0 { -1.0 } else { 1.0 };
    Complex64::new(sgn(z.re), sgn(z.im))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CombinerMode {
    /// Equal gain combining.
    Egc,
    /// Maximal ratio combining.
    #[default]
    Mrc,
}

/// Per-receive-antenna combiner weights for the two soft outputs of a block.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinerGains {
    pub gains: Vec<(f64, f64)>,
    pub mode: CombinerMode,
}

impl CombinerGains {
    /// EGC uses `1/N_r`; MRC weights antenna `m` by its share of the total
    /// channel energy.
    pub fn new(mode: CombinerMode, energies: &[f64]) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::invalid("combiner needs at least one antenna"));
        }
        let n = energies.len() as f64;
        let total: f64 = energies.iter().sum();
        let gains = energies
            .iter()
            .map(|&e| {
                let g = match mode {
                    CombinerMode::Egc => 1.0 / n,
                    CombinerMode::Mrc if total > 0.0 => e / total,
                    CombinerMode::Mrc => 1.0 / n,
                };
                (g, g)
            })
            .collect();
        Ok(Self { gains, mode })
    }
}

/// Weighted sum of per-antenna soft-output pairs.
pub fn combine(z: &[(Complex64, Complex64)], gains: &CombinerGains) -> Result<(Complex64, Complex64)> {
    if z.len() != gains.gains.len() || z.is_empty() {
        return Err(Error::invalid(format!(
            "{} soft outputs but {} combiner gains",
            z.len(),
            gains.gains.len()
        )));
    }
    if z.len() == 1 {
        return Ok(z[0]);
    }
    Ok(z.iter().zip(&gains.gains).fold(
        (Complex64::default(), Complex64::default()),
        |(a, b), (&(z1, z2), &(g1, g2))| (a + z1 * g1, b + z2 * g2),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn decisions() {
        assert_eq!(detect(c(0.3, -0.2)), c(1.0, -1.0));
        assert_eq!(detect(c(-2.0, 5.0)), c(-1.0, 1.0));
        assert_eq!(detect(c(0.0, 0.0)), c(1.0, 1.0));
        assert_eq!(detect(c(-0.0, -0.0)), c(1.0, 1.0));
    }

    #[test]
    fn single_antenna_is_identity() {
        for mode in [CombinerMode::Egc, CombinerMode::Mrc] {
            let g = CombinerGains::new(mode, &[0.3]).unwrap();
            let z = (c(0.1, 0.2), c(-3.0, 1.0));
            assert_eq!(combine(&[z], &g).unwrap(), z);
        }
    }

    #[test]
    fn egc_cancels_opposite_outputs() {
        let g = CombinerGains::new(CombinerMode::Egc, &[1.0, 5.0]).unwrap();
        let z = (c(1.0, -2.0), c(0.5, 0.5));
        let (a, b) = combine(&[z, (-z.0, -z.1)], &g).unwrap();
        assert_eq!((a, b), (c(0.0, 0.0), c(0.0, 0.0)));
    }

    #[test]
    fn mrc_gains_follow_energy() {
        let g = CombinerGains::new(CombinerMode::Mrc, &[1.0, 3.0]).unwrap();
        assert_eq!(g.gains, vec![(0.25, 0.25), (0.75, 0.75)]);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let g = CombinerGains::new(CombinerMode::Egc, &[1.0, 1.0]).unwrap();
        assert!(combine(&[(c(1.0, 0.0), c(1.0, 0.0))], &g).is_err());
    }
}
