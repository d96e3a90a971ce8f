use crate::error::{Error, Result};
use crate::CVec;

/// `min_φ ‖ĥ − e^{jφ} h/‖h‖‖²`, i.e. `‖ĥ‖² + 1 − 2|⟨h/‖h‖, ĥ⟩|`.
pub fn phase_invariant_mse(estimate: &CVec, truth: &CVec) -> f64 {
    let n = truth.norm();
    if n == 0.0 {
        return estimate.norm_squared();
    }
    let inner = truth.dotc(estimate).norm() / n;
    (estimate.norm_squared() + 1.0 - 2.0 * inner).max(0.0)
}

/// Per-time-index phase-invariant error of a sequence of estimates.
pub fn channel_mse(estimates: &[CVec], truth: &[CVec]) -> Result<Vec<f64>> {
    if estimates.len() != truth.len() {
        return Err(Error::invalid(format!(
            "{} estimates but {} true channels",
            estimates.len(),
            truth.len()
        )));
    }
    estimates
        .iter()
        .zip(truth)
        .map(|(e, t)| {
            if e.len() != t.len() {
                Err(Error::invalid("estimate and channel lengths differ"))
            } else {
                Ok(phase_invariant_mse(e, t))
            }
        })
        .collect()
}

/// Trailing moving average; the first `window − 1` entries average what is
/// available.
pub fn smooth(series: &[f64], window: usize) -> Vec<f64> {
    let window = window.max(1);
    let mut out = Vec::with_capacity(series.len());
    let mut acc = 0.0;
    for (i, &v) in series.iter().enumerate() {
        acc += v;
        if i >= window {
            acc -= series[i - window];
        }
        out.push(acc / (i + 1).min(window) as f64);
    }
    out
}

/// Mean and 95% normal-approximation half-width `1.96 s / √n` (zero for n < 2).
pub fn mean_half_width(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, 1.96 * (var / n as f64).sqrt())
}

/// 95% half-width of a binomial proportion over `trials` bits.
pub fn binomial_half_width(p: f64, trials: usize) -> f64 {
    if trials == 0 {
        return f64::NAN;
    }
    1.96 * (p * (1.0 - p) / trials as f64).sqrt()
}

/// Half-width of the difference of two independent means.
pub fn pooled_half_width(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}
