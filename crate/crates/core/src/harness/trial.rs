use std::ops::Range;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::metrics::phase_invariant_mse;
use super::scenario::{Algorithm, ChannelEstimatorMode, CovarianceSource, EstimatorCovariance, Scenario};
use crate::error::Result;
use crate::estimator::{estimate_channel_exact, sg_channel_step, ChannelEstimate, CovarianceEstimate, PsiEstimate};
use crate::receiver::{
    ccm_exact_filter, ccm_sg_step, cmv_exact_filter, cmv_sg_step, combine, detect, trained_lms_step, CcmStatistics,
    CombinerGains, FilterPair, ProjectionPair,
};
use crate::signal::{bit_errors, random_qpsk, BlockAssembler, ConstraintMatrices, SpaceTimeChannel, SpreadingSet, SymbolStream};
use crate::{CMat, CVec};

/// Filter norm above which an adaptive receiver is declared diverged.
pub const FILTER_NORM_LIMIT: f64 = 1e6;

const STREAM_CODES: u64 = 1;
const STREAM_POWERS: u64 = 2;
const STREAM_SYMBOLS: u64 = 3;
const STREAM_CHANNELS: u64 = 4;
const STREAM_NOISE: u64 = 5;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Result of one packet.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub seed: u64,
    pub algorithms: Vec<Algorithm>,
    /// Bit errors (0, 1 or 2) of the desired user per symbol, one row per algorithm.
    pub bit_errors: Vec<Vec<u8>>,
    /// Phase-invariant channel estimation error per symbol (mean over receive antennas).
    pub channel_mse: Vec<f64>,
    /// Whether each algorithm hit the divergence guard at least once.
    pub diverged: Vec<bool>,
    /// Times the `R^{-1} C` recursion was restarted after blowing up.
    pub estimator_resets: usize,
    pub warnings: Vec<String>,
}

impl TrialOutcome {
    pub fn symbols(&self) -> usize {
        self.channel_mse.len()
    }

    pub fn index_of(&self, alg: Algorithm) -> Option<usize> {
        self.algorithms.iter().position(|&a| a == alg)
    }

    pub fn errors(&self, alg: usize, range: Range<usize>) -> u64 {
        self.bit_errors[alg][range].iter().map(|&e| e as u64).sum()
    }

    /// Bit error rate over the symbol range.
    pub fn ber(&self, alg: usize, range: Range<usize>) -> f64 {
        let bits = 2 * range.len();
        if bits == 0 {
            return 0.0;
        }
        self.errors(alg, range) as f64 / bits as f64
    }

    pub fn any_diverged(&self) -> bool {
        self.diverged.iter().any(|&d| d)
    }
}

enum Receiver {
    CcmSg(FilterPair),
    CmvSg(FilterPair),
    Lms(FilterPair),
    CcmExact { stats: CcmStatistics, fp: FilterPair },
    CmvExact { cov: CovarianceEstimate, fp: FilterPair },
}

impl Receiver {
    fn new(alg: Algorithm, scn: &Scenario, pp: &ProjectionPair, h: &CVec, dim: usize) -> Self {
        let feasible = FilterPair::feasible(pp, h, scn.nu);
        match alg {
            Algorithm::CcmSg => Receiver::CcmSg(feasible),
            Algorithm::CmvSg => Receiver::CmvSg(feasible),
            Algorithm::TrainedLms => Receiver::Lms(FilterPair::new(CVec::zeros(dim), CVec::zeros(dim))),
            Algorithm::CcmExact => {
                let mut stats = CcmStatistics::new(dim, scn.forgetting);
                stats.loading = scn.loading;
                Receiver::CcmExact { stats, fp: feasible }
            }
            Algorithm::CmvExact => {
                let mut cov = CovarianceEstimate::new(dim, scn.forgetting);
                cov.loading = scn.loading;
                Receiver::CmvExact { cov, fp: feasible }
            }
        }
    }

    fn filter(&self) -> &FilterPair {
        match self {
            Receiver::CcmSg(fp) | Receiver::CmvSg(fp) | Receiver::Lms(fp) => fp,
            Receiver::CcmExact { fp, .. } | Receiver::CmvExact { fp, .. } => fp,
        }
    }

    fn filter_mut(&mut self) -> &mut FilterPair {
        match self {
            Receiver::CcmSg(fp) | Receiver::CmvSg(fp) | Receiver::Lms(fp) => fp,
            Receiver::CcmExact { fp, .. } | Receiver::CmvExact { fp, .. } => fp,
        }
    }
}

struct Context<'a> {
    scn: &'a Scenario,
    cm: &'a ConstraintMatrices,
    pp: &'a ProjectionPair,
    model_r: Option<&'a CMat>,
}

impl Context<'_> {
    fn step_size(&self, mu: f64, y: &CVec) -> f64 {
        if self.scn.normalized_step {
            mu / (y.norm_squared() + 1e-12)
        } else {
            mu
        }
    }

    /// Soft outputs from the current filters, then one adaptation step.
    fn process(&self, rx: &mut Receiver, y: &CVec, h: &CVec, training: (Complex64, Complex64)) -> (Complex64, Complex64) {
        let nu = self.scn.nu;
        if let (Receiver::CmvExact { fp, .. }, Some(r)) = (&mut *rx, self.model_r) {
            if let Ok(next) = cmv_exact_filter(r, self.cm, h, nu) {
                *fp = next;
            }
            return fp.outputs(y);
        }
        let z = rx.filter().outputs(y);
        match rx {
            Receiver::CcmSg(fp) => *fp = ccm_sg_step(fp, self.pp, y, h, nu, self.step_size(self.scn.mu_ccm, y)),
            Receiver::CmvSg(fp) => *fp = cmv_sg_step(fp, self.pp, y, h, nu, self.step_size(self.scn.mu_cmv, y)),
            Receiver::Lms(fp) => {
                let mu = self.step_size(self.scn.mu_lms, y);
                fp.w = trained_lms_step(&fp.w, y, training.0, mu);
                fp.wbar = trained_lms_step(&fp.wbar, y, training.1, mu);
            }
            // Sample-matrix filters wait for as many snapshots as dimensions;
            // before that the estimate can cancel the desired signal.
            Receiver::CcmExact { stats, fp } => {
                stats.update(y, z.0, z.1);
                if stats.samples_weight() < y.len() as f64 {
                    *fp = FilterPair::feasible(self.pp, h, nu);
                } else if let Ok(next) = ccm_exact_filter(stats, self.cm, h, nu) {
                    *fp = next;
                }
            }
            Receiver::CmvExact { cov, fp } => {
                cov.update(y);
                if cov.updates() < y.len() {
                    *fp = FilterPair::feasible(self.pp, h, nu);
                } else if let Ok(next) = cmv_exact_filter(&cov.matrix(), self.cm, h, nu) {
                    *fp = next;
                }
            }
        }
        z
    }
}

/// Signal covariance of the active users plus white noise, ignoring
/// intersymbol interference.
pub fn model_covariance(
    assembler: &BlockAssembler,
    amplitudes: &[f64],
    h: &CVec,
    sigma2: f64,
) -> CMat {
    let dim = 2 * assembler.window();
    let mut r = CMat::identity(dim, dim) * Complex64::new(sigma2, 0.0);
    let hc = h.conjugate();
    for (k, &a) in amplitudes.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let cm = assembler.constraints(k);
        let s1 = &cm.c * h;
        let s2 = &cm.cbar * &hc;
        let p = Complex64::new(2.0 * a * a, 0.0);
        r.gerc(p, &s1, &s1, Complex64::new(1.0, 0.0));
        r.gerc(p, &s2, &s2, Complex64::new(1.0, 0.0));
    }
    r
}

struct AntennaState {
    channel: SpaceTimeChannel,
    estimate: ChannelEstimate,
    cov: Option<CovarianceEstimate>,
    psi: Option<PsiEstimate>,
    receivers: Vec<Receiver>,
}

/// Simulates one packet.
pub fn run_trial(scn: &Scenario, seed: u64) -> Result<TrialOutcome> {
    let warnings = scn.validate()?;
    let blocks = scn.blocks();
    let total = scn.total_users();
    let switch = scn.switch_block();

    let mut rng = stream(seed, STREAM_CODES);
    let spreading = SpreadingSet::random(total, scn.processing_gain, scn.spreading, &mut rng)?;
    let assembler = BlockAssembler::new(&spreading, scn.paths)?;
    let cm = assembler.constraints(0).clone();
    let pp = ProjectionPair::new(&cm)?;
    let dim = cm.window() * 2;

    let mut rng = stream(seed, STREAM_POWERS);
    let mut users = Vec::with_capacity(total);
    let mut symbol_rng = stream(seed, STREAM_SYMBOLS);
    for k in 0..total {
        let x1: f64 = StandardNormal.sample(&mut rng);
        let x2: f64 = StandardNormal.sample(&mut rng);
        let (a1, a2) = if k == 0 {
            (1.0, 1.0)
        } else {
            (
                10f64.powf(scn.interferer_sigma_db * x1 / 20.0),
                10f64.powf(scn.interferer_sigma_db_after * x2 / 20.0),
            )
        };
        let a1 = if k >= scn.users { 0.0 } else { a1 };
        let segments = match switch {
            Some(b) if b > 0 => vec![(0, a1), (b, a2)],
            Some(_) => vec![(0, a2)],
            None => vec![(0, a1)],
        };
        let symbols = (0..2 * blocks).map(|_| random_qpsk(&mut symbol_rng)).collect();
        users.push(SymbolStream::with_segments(symbols, segments)?);
    }

    let mut rng = stream(seed, STREAM_CHANNELS);
    let mut antennas = Vec::with_capacity(scn.receive_antennas);
    for _ in 0..scn.receive_antennas {
        let channel = SpaceTimeChannel::random(
            scn.paths,
            &scn.path_powers_db,
            scn.doppler,
            scn.fading,
            scn.transmit_antennas == 2,
            &mut rng,
        )?;
        let estimate = ChannelEstimate::initial(scn.paths);
        let start = match scn.channel_estimator {
            ChannelEstimatorMode::Genie => unit(&channel.stacked()),
            _ => estimate.h.clone(),
        };
        let receivers = scn.algorithms.iter().map(|&a| Receiver::new(a, scn, &pp, &start, dim)).collect();
        let mut cov = None;
        if scn.channel_estimator == ChannelEstimatorMode::Svd {
            let mut c = CovarianceEstimate::new(dim, scn.forgetting);
            c.loading = scn.loading;
            cov = Some(c);
        }
        let psi = (scn.channel_estimator == ChannelEstimatorMode::Sg)
            .then(|| PsiEstimate::new(&cm, scn.psi_forgetting, scn.psi_step));
        antennas.push(AntennaState {
            channel,
            estimate,
            cov,
            psi,
            receivers,
        });
    }

    let ccm_index = scn
        .algorithms
        .iter()
        .position(|a| matches!(a, Algorithm::CcmSg | Algorithm::CcmExact));
    let interval = scn.estimate_interval / 2;
    let sigma2 = scn.noise_variance();
    let static_model = scn.doppler == 0.0 || scn.fading == crate::signal::FadingKind::None;
    let mut model_cache: Vec<Option<(usize, CMat)>> = vec![None; scn.receive_antennas];

    let mut noise_rng = stream(seed, STREAM_NOISE);
    let nalg = scn.algorithms.len();
    let mut errors = vec![vec![0u8; 2 * blocks]; nalg];
    let mut mse = vec![0.0; 2 * blocks];
    let mut diverged = vec![false; nalg];
    let mut resets = 0;

    for block in 0..blocks {
        let t = 2.0 * block as f64;
        let amps: Vec<f64> = users.iter().map(|u| u.amplitude_at(block)).collect();
        let desired = users[0].pair(block as isize).expect("block inside packet");
        let mut soft = vec![Vec::with_capacity(scn.receive_antennas); nalg];
        let mut energies = Vec::with_capacity(scn.receive_antennas);
        let mut block_mse = 0.0;

        for (m, ant) in antennas.iter_mut().enumerate() {
            ant.channel.advance_to(t);
            let truth = ant.channel.stacked();
            energies.push(truth.norm_squared());
            let chans = vec![&ant.channel; total];
            let y = assembler.assemble(&users, &chans, block, sigma2, scn.include_isi, &mut noise_rng)?.y;
            let reference = unit(&truth);

            let h = match scn.channel_estimator {
                ChannelEstimatorMode::Genie => {
                    ant.estimate = ChannelEstimate::new(truth.clone(), ant.estimate.method);
                    reference.clone()
                }
                ChannelEstimatorMode::Svd => {
                    let cov = ant.cov.as_mut().expect("svd estimator keeps a covariance");
                    if scn.estimator_covariance == EstimatorCovariance::Received {
                        cov.update(&y);
                    }
                    if (block + 1) % interval == 0 {
                        if let Ok(est) = estimate_channel_exact(cov, &cm, scn.subspace_power) {
                            ant.estimate = est;
                        }
                    }
                    aligned(scn, &ant.estimate, &reference)
                }
                ChannelEstimatorMode::Sg => {
                    let psi = ant.psi.as_mut().expect("sg estimator keeps a psi recursion");
                    if psi.step(&y).is_err() {
                        *psi = PsiEstimate::new(&cm, scn.psi_forgetting, scn.psi_step);
                        resets += 1;
                    }
                    if let Ok(next) = sg_channel_step(&ant.estimate, psi, &cm) {
                        ant.estimate = next;
                    }
                    aligned(scn, &ant.estimate, &reference)
                }
            };
            block_mse += phase_invariant_mse(&ant.estimate.h, &truth);

            let model_r = if scn.cmv_covariance == CovarianceSource::Model
                && scn.algorithms.contains(&Algorithm::CmvExact)
            {
                let stale = match &model_cache[m] {
                    Some((at, _)) => !static_model || amps != amplitudes_at(&users, *at),
                    None => true,
                };
                if stale {
                    model_cache[m] = Some((block, model_covariance(&assembler, &amps, &truth, sigma2)));
                }
                model_cache[m].as_ref().map(|(_, r)| r)
            } else {
                None
            };
            let ctx = Context {
                scn,
                cm: &cm,
                pp: &pp,
                model_r,
            };
            for (i, rx) in ant.receivers.iter_mut().enumerate() {
                let z = ctx.process(rx, &y, &h, desired);
                let fp = rx.filter_mut();
                if !(z.0.is_finite() && z.1.is_finite()) || !(fp.norm() <= FILTER_NORM_LIMIT) {
                    diverged[i] = true;
                    *fp = match scn.algorithms[i] {
                        Algorithm::TrainedLms => FilterPair::new(CVec::zeros(dim), CVec::zeros(dim)),
                        _ => FilterPair::feasible(&pp, &h, scn.nu),
                    };
                }
                soft[i].push(z);
            }
            if scn.estimator_covariance == EstimatorCovariance::CcmWeighted {
                if let (Some(cov), Some(i)) = (ant.cov.as_mut(), ccm_index) {
                    let z = soft[i].last().expect("output pushed").0;
                    cov.update_weighted(&y, z.norm_sqr());
                }
            }
        }

        let gains = CombinerGains::new(scn.combiner, &energies)?;
        for (i, outputs) in soft.iter().enumerate() {
            let (z1, z2) = combine(outputs, &gains)?;
            errors[i][2 * block] = bit_errors(desired.0, detect(z1));
            errors[i][2 * block + 1] = bit_errors(desired.1, detect(z2));
        }
        let avg = block_mse / scn.receive_antennas as f64;
        mse[2 * block] = avg;
        mse[2 * block + 1] = avg;
    }

    Ok(TrialOutcome {
        seed,
        algorithms: scn.algorithms.clone(),
        bit_errors: errors,
        channel_mse: mse,
        diverged,
        estimator_resets: resets,
        warnings,
    })
}

fn amplitudes_at(users: &[SymbolStream], block: usize) -> Vec<f64> {
    users.iter().map(|u| u.amplitude_at(block)).collect()
}

fn unit(h: &CVec) -> CVec {
    let n = h.norm();
    if n > 0.0 {
        h.unscale(n)
    } else {
        h.clone()
    }
}

fn aligned(scn: &Scenario, est: &ChannelEstimate, reference: &CVec) -> CVec {
    if scn.resolve_phase {
        est.aligned_to(reference)
    } else {
        est.h.clone()
    }
}
