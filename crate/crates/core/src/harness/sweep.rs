use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{binomial_half_width, mean_half_width, smooth};
use super::scenario::Scenario;
use super::trial::{run_trial, TrialOutcome};
use crate::error::{Error, Result};

/// Independent variable of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    /// Symbol index within the packet (learning curves).
    Symbols,
    /// Eb/N0 in dB.
    Snr,
    /// Number of users active from the start.
    Users,
}

impl Axis {
    pub fn id(self) -> &'static str {
        match self {
            Axis::Symbols => "symbol",
            Axis::Snr => "snr_db",
            Axis::Users => "users",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Ber,
    ChannelMse,
}

/// Series label used for the channel estimation error.
pub const CHANNEL_SERIES: &str = "channel";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub axis_value: f64,
    /// Algorithm id, or [`CHANNEL_SERIES`].
    pub series: String,
    pub metric: Metric,
    pub mean: f64,
    pub half_width: f64,
    pub runs: usize,
}

/// Aggregated sweep result; points are ordered by axis value, then series id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSeries {
    pub axis: Axis,
    pub seeds: Vec<u64>,
    pub points: Vec<SeriesPoint>,
    /// Trials in which at least one algorithm tripped the divergence guard.
    pub diverged_trials: usize,
    pub warnings: Vec<String>,
}

impl MetricsSeries {
    pub fn point(&self, axis_value: f64, series: &str, metric: Metric) -> Option<&SeriesPoint> {
        self.points
            .iter()
            .find(|p| p.axis_value == axis_value && p.series == series && p.metric == metric)
    }

    /// `(axis value, mean)` pairs of one series.
    pub fn curve(&self, series: &str, metric: Metric) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter(|p| p.series == series && p.metric == metric)
            .map(|p| (p.axis_value, p.mean))
            .collect()
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Per-run seeds derived from a master seed; run `i` depends only on
/// `(master, i)`.
pub fn trial_seeds(master: u64, runs: usize) -> Vec<u64> {
    (0..runs as u64).map(|i| splitmix64(splitmix64(master) ^ i)).collect()
}

/// FNV-1a over the little-endian seed bytes.
pub fn seed_list_hash(seeds: &[u64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in seeds.iter().flat_map(|s| s.to_le_bytes()) {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Runs one trial per seed in parallel; results keep the seed order.
pub fn run_trials(scn: &Scenario, seeds: &[u64]) -> Result<Vec<TrialOutcome>> {
    scn.validate()?;
    seeds.par_iter().map(|&s| run_trial(scn, s)).collect()
}

/// The template with the axis variable set to `value`.
pub fn scenario_at(template: &Scenario, axis: Axis, value: f64) -> Result<Scenario> {
    let mut scn = template.clone();
    match axis {
        Axis::Symbols => {}
        Axis::Snr => scn.snr_db = value,
        Axis::Users => {
            if !(value >= 1.0 && value.fract() == 0.0) {
                return Err(Error::scenario("users", format!("grid value {value} is not a positive integer")));
            }
            scn.users = value as usize;
        }
    }
    scn.validate()?;
    Ok(scn)
}

fn check_grid(template: &Scenario, axis: Axis, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("sweep grid is empty"));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("sweep grid has non-finite values"));
    }
    if axis == Axis::Symbols {
        if let Some(v) = grid
            .iter()
            .find(|&&v| !(v >= 0.0 && v.fract() == 0.0 && (v as usize) < template.packet_symbols))
        {
            return Err(Error::invalid(format!("symbol index {v} outside the packet")));
        }
    }
    Ok(())
}

/// Sweeps `axis` over `grid` with `runs` trials per point seeded from
/// `template.seed`. The same seeds are used at every grid point.
///
/// On the symbol axis, `grid` lists the symbol indices to report and each
/// run's per-symbol error rate is first smoothed with a trailing window of
/// `window` symbols. On the other axes each run contributes its packet BER
/// (skipping `ber_skip_symbols`).
pub fn sweep(template: &Scenario, axis: Axis, grid: &[f64], runs: usize, window: usize) -> Result<MetricsSeries> {
    if runs == 0 {
        return Err(Error::invalid("runs must be at least 1"));
    }
    sweep_with_seeds(template, axis, grid, &trial_seeds(template.seed, runs), window)
}

pub fn sweep_with_seeds(
    template: &Scenario,
    axis: Axis,
    grid: &[f64],
    seeds: &[u64],
    window: usize,
) -> Result<MetricsSeries> {
    sweep_with_trials(template, axis, grid, seeds, window).map(|(series, _)| series)
}

/// Like [`sweep_with_seeds`], also returning the raw trials grouped per
/// scenario (one group on the symbol axis, one per grid value otherwise).
pub fn sweep_with_trials(
    template: &Scenario,
    axis: Axis,
    grid: &[f64],
    seeds: &[u64],
    window: usize,
) -> Result<(MetricsSeries, Vec<Vec<TrialOutcome>>)> {
    check_grid(template, axis, grid)?;
    if seeds.is_empty() {
        return Err(Error::invalid("need at least one seed"));
    }
    let (scenarios, values): (Vec<Scenario>, Vec<Vec<f64>>) = match axis {
        Axis::Symbols => (vec![template.clone()], vec![grid.to_vec()]),
        _ => {
            let s = grid
                .iter()
                .map(|&v| scenario_at(template, axis, v))
                .collect::<Result<Vec<_>>>()?;
            (s, grid.iter().map(|&v| vec![v]).collect())
        }
    };
    let mut warnings = Vec::new();
    for scn in &scenarios {
        warnings.extend(scn.validate()?);
    }
    let jobs: Vec<(usize, u64)> = (0..scenarios.len())
        .flat_map(|i| seeds.iter().map(move |&s| (i, s)))
        .collect();
    let mut outcomes: Vec<TrialOutcome> = jobs
        .par_iter()
        .map(|&(i, s)| run_trial(&scenarios[i], s))
        .collect::<Result<_>>()?;

    let mut points = Vec::new();
    let mut diverged_trials = 0;
    for (i, scn) in scenarios.iter().enumerate() {
        let group = &outcomes[i * seeds.len()..(i + 1) * seeds.len()];
        diverged_trials += group.iter().filter(|o| o.any_diverged()).count();
        match axis {
            Axis::Symbols => points.extend(symbol_points(scn, group, &values[i], window)),
            _ => points.extend(packet_points(scn, group, values[i][0])),
        }
    }
    points.sort_by(|a, b| {
        a.axis_value
            .total_cmp(&b.axis_value)
            .then_with(|| a.series.cmp(&b.series))
            .then_with(|| a.metric.cmp(&b.metric))
    });
    let mut groups = Vec::with_capacity(scenarios.len());
    for _ in 0..scenarios.len() {
        let rest = outcomes.split_off(seeds.len());
        groups.push(std::mem::replace(&mut outcomes, rest));
    }
    let series = MetricsSeries {
        axis,
        seeds: seeds.to_vec(),
        points,
        diverged_trials,
        warnings,
    };
    Ok((series, groups))
}

/// Packet-level BER per algorithm and mean channel error, aggregated over runs.
pub fn packet_points(scn: &Scenario, outcomes: &[TrialOutcome], axis_value: f64) -> Vec<SeriesPoint> {
    let range = scn.ber_skip_symbols..scn.packet_symbols;
    let runs = outcomes.len();
    let mut points = Vec::new();
    for (a, alg) in scn.algorithms.iter().enumerate() {
        let bers: Vec<f64> = outcomes.iter().map(|o| o.ber(a, range.clone())).collect();
        let (mean, mut hw) = mean_half_width(&bers);
        if runs == 1 {
            hw = binomial_half_width(mean, 2 * range.len());
        }
        points.push(SeriesPoint {
            axis_value,
            series: alg.id().to_string(),
            metric: Metric::Ber,
            mean,
            half_width: hw,
            runs,
        });
    }
    let mses: Vec<f64> = outcomes
        .iter()
        .map(|o| o.channel_mse[range.clone()].iter().sum::<f64>() / range.len() as f64)
        .collect();
    let (mean, hw) = mean_half_width(&mses);
    points.push(SeriesPoint {
        axis_value,
        series: CHANNEL_SERIES.to_string(),
        metric: Metric::ChannelMse,
        mean,
        half_width: hw,
        runs,
    });
    points
}

/// Smoothed per-symbol BER and channel error at the requested indices.
pub fn symbol_points(scn: &Scenario, outcomes: &[TrialOutcome], indices: &[f64], window: usize) -> Vec<SeriesPoint> {
    let runs = outcomes.len();
    let mut points = Vec::new();
    let mut emit = |series: &str, metric: Metric, curves: Vec<Vec<f64>>, bits: Option<usize>| {
        for &v in indices {
            let i = v as usize;
            let at: Vec<f64> = curves.iter().map(|c| c[i]).collect();
            let (mean, mut hw) = mean_half_width(&at);
            if let (1, Some(b)) = (runs, bits) {
                hw = binomial_half_width(mean, b * (i + 1).min(window.max(1)));
            }
            points.push(SeriesPoint {
                axis_value: v,
                series: series.to_string(),
                metric,
                mean,
                half_width: hw,
                runs,
            });
        }
    };
    for (a, alg) in scn.algorithms.iter().enumerate() {
        let curves = outcomes
            .iter()
            .map(|o| {
                let rate: Vec<f64> = o.bit_errors[a].iter().map(|&e| e as f64 / 2.0).collect();
                smooth(&rate, window)
            })
            .collect();
        emit(alg.id(), Metric::Ber, curves, Some(2));
    }
    let curves = outcomes.iter().map(|o| smooth(&o.channel_mse, window)).collect();
    emit(CHANNEL_SERIES, Metric::ChannelMse, curves, None);
    points
}
