use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::receiver::CombinerMode;
use crate::signal::{FadingKind, SpreadingScheme};

/// Receiver algorithms the harness can run side by side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    CcmSg,
    CmvSg,
    TrainedLms,
    CcmExact,
    CmvExact,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::CcmSg,
        Algorithm::CmvSg,
        Algorithm::TrainedLms,
        Algorithm::CcmExact,
        Algorithm::CmvExact,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::CcmSg => "ccm-sg",
            Algorithm::CmvSg => "cmv-sg",
            Algorithm::TrainedLms => "trained-lms",
            Algorithm::CcmExact => "ccm-exact",
            Algorithm::CmvExact => "cmv-exact",
        }
    }

    /// Whether the algorithm relies on the channel reference.
    pub fn uses_channel(self) -> bool {
        self != Algorithm::TrainedLms
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// Source of the channel vector handed to the constrained receivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelEstimatorMode {
    /// True channel (normalised to unit norm).
    Genie,
    /// Minimum eigenvector of `C^H R^{-p} C`, refreshed periodically.
    Svd,
    /// Recursive `R^{-1} C` plus power-method tracking every block.
    #[default]
    Sg,
}

/// Covariance fed to the subspace estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorCovariance {
    /// `E[y y^H]`.
    #[default]
    Received,
    /// `E[|z|² y y^H]` with `z` from the first CCM receiver in the run.
    CcmWeighted,
}

/// Covariance used by the closed-form CMV receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CovarianceSource {
    /// Exponentially weighted sample estimate.
    #[default]
    Sample,
    /// Known model covariance (signal terms of every active user plus noise,
    /// without intersymbol interference).
    Model,
}

/// Full description of one experiment.
///
/// Symbol counts (`packet_symbols`, `add_users_at`, `estimate_interval`,
/// `ber_skip_symbols`) are in symbol periods; one STBC block spans two.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    /// Chips per symbol, N.
    pub processing_gain: usize,
    /// Users active from the start, including the desired user 0.
    pub users: usize,
    /// Users that join at `add_users_at`.
    pub added_users: usize,
    /// Symbol index where users join and the interferer power spread changes.
    pub add_users_at: Option<usize>,
    /// Channel taps Lp (upper bound on the delay spread).
    pub paths: usize,
    /// Relative path powers in dB.
    pub path_powers_db: Vec<f64>,
    /// Eb/N0 of the desired user in dB.
    pub snr_db: f64,
    /// Log-normal spread (dB) of the interferer powers around the desired user.
    pub interferer_sigma_db: f64,
    /// Spread after `add_users_at`.
    pub interferer_sigma_db_after: f64,
    /// Doppler frequency normalised by the symbol rate, fdT.
    pub doppler: f64,
    pub fading: FadingKind,
    /// Packet length P in symbols; must be even.
    pub packet_symbols: usize,
    /// 2 for Alamouti, 1 for a single transmit antenna.
    pub transmit_antennas: usize,
    pub receive_antennas: usize,
    pub combiner: CombinerMode,
    pub spreading: SpreadingScheme,
    pub algorithms: Vec<Algorithm>,
    pub channel_estimator: ChannelEstimatorMode,
    /// Inverse power p of the subspace estimator.
    pub subspace_power: u32,
    /// Symbols between subspace estimates.
    pub estimate_interval: usize,
    pub estimator_covariance: EstimatorCovariance,
    pub cmv_covariance: CovarianceSource,
    pub include_isi: bool,
    /// Remove the unit-modulus ambiguity of blind estimates using the true
    /// channel as phase reference.
    pub resolve_phase: bool,
    pub seed: u64,
    /// Allow more users than chips.
    pub allow_overload: bool,
    /// Constraint constant ν.
    pub nu: f64,
    pub mu_ccm: f64,
    pub mu_cmv: f64,
    pub mu_lms: f64,
    /// Divide SG step sizes by `‖y‖²`.
    pub normalized_step: bool,
    /// Forgetting factor of covariance and CCM moment estimates.
    pub forgetting: f64,
    /// Forgetting factor α of the `R^{-1} C` recursion.
    pub psi_forgetting: f64,
    /// Step size μ_h of the `R^{-1} C` recursion.
    pub psi_step: f64,
    /// Diagonal loading δ.
    pub loading: f64,
    /// Symbols at the start of the packet left out of packet-level BER.
    pub ber_skip_symbols: usize,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            processing_gain: 32,
            users: 8,
            added_users: 0,
            add_users_at: None,
            paths: 6,
            path_powers_db: vec![0.0, -3.0, -6.0],
            snr_db: 15.0,
            interferer_sigma_db: 3.0,
            interferer_sigma_db_after: 6.0,
            doppler: 1e-4,
            fading: FadingKind::Rayleigh,
            packet_symbols: 1500,
            transmit_antennas: 2,
            receive_antennas: 1,
            combiner: CombinerMode::Mrc,
            spreading: SpreadingScheme::ZeroPadded,
            algorithms: vec![Algorithm::CcmSg, Algorithm::CmvSg, Algorithm::TrainedLms],
            channel_estimator: ChannelEstimatorMode::Sg,
            subspace_power: 2,
            estimate_interval: 50,
            estimator_covariance: EstimatorCovariance::Received,
            cmv_covariance: CovarianceSource::Sample,
            include_isi: true,
            resolve_phase: true,
            seed: 1,
            allow_overload: false,
            nu: 1.0,
            mu_ccm: 5e-3,
            mu_cmv: 5e-3,
            mu_lms: 0.005,
            normalized_step: false,
            forgetting: 0.998,
            psi_forgetting: 0.998,
            psi_step: 2e-3,
            loading: 1e-6,
            ber_skip_symbols: 0,
        }
    }
}

impl Scenario {
    pub fn total_users(&self) -> usize {
        self.users + self.added_users
    }

    pub fn blocks(&self) -> usize {
        self.packet_symbols / 2
    }

    /// Block at which users join / the power spread changes, if inside the packet.
    pub fn switch_block(&self) -> Option<usize> {
        self.add_users_at.map(|s| s / 2).filter(|&b| b < self.blocks())
    }

    /// Noise variance per complex chip sample for the configured Eb/N0.
    ///
    /// The desired user has unit amplitude and `±1±j` symbols (one unit of
    /// energy per bit per unit channel gain); each active transmit antenna
    /// contributes unit average channel energy.
    pub fn noise_variance(&self) -> f64 {
        self.transmit_antennas as f64 / 10f64.powf(self.snr_db / 10.0)
    }

    /// Checks every field; returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        let fail = |field: &str, reason: &str| Err(Error::scenario(field, reason));
        if self.processing_gain < 2 {
            return fail("processing_gain", "must be at least 2");
        }
        if self.users == 0 {
            return fail("users", "must be at least 1");
        }
        if self.total_users() > self.processing_gain {
            if self.allow_overload {
                warnings.push(format!(
                    "{} users exceed processing gain {}",
                    self.total_users(),
                    self.processing_gain
                ));
            } else {
                return fail("users", "users + added_users exceeds processing_gain (set allow_overload)");
            }
        }
        if self.packet_symbols < 2 || !self.packet_symbols.is_multiple_of(2) {
            return fail("packet_symbols", "must be even and at least 2");
        }
        if let Some(at) = self.add_users_at {
            if at % 2 != 0 || at > self.packet_symbols {
                return fail("add_users_at", "must be even and inside the packet");
            }
        } else if self.added_users > 0 {
            return fail("add_users_at", "required when added_users > 0");
        }
        if self.paths == 0 {
            return fail("paths", "must be at least 1");
        }
        if self.path_powers_db.is_empty() || self.path_powers_db.iter().any(|p| !p.is_finite()) {
            return fail("path_powers_db", "must be a non-empty list of finite values");
        }
        if !self.snr_db.is_finite() {
            return fail("snr_db", "must be finite");
        }
        for (field, v) in [
            ("interferer_sigma_db", self.interferer_sigma_db),
            ("interferer_sigma_db_after", self.interferer_sigma_db_after),
            ("doppler", self.doppler),
            ("mu_ccm", self.mu_ccm),
            ("mu_cmv", self.mu_cmv),
            ("mu_lms", self.mu_lms),
            ("psi_step", self.psi_step),
            ("loading", self.loading),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return fail(field, "must be finite and non-negative");
            }
        }
        if !(1..=2).contains(&self.transmit_antennas) {
            return fail("transmit_antennas", "must be 1 or 2");
        }
        if self.receive_antennas == 0 {
            return fail("receive_antennas", "must be at least 1");
        }
        if self.spreading != SpreadingScheme::Independent && !self.processing_gain.is_multiple_of(2) {
            return fail("processing_gain", "must be even for zero-padded or sign-flipped spreading");
        }
        if self.algorithms.is_empty() {
            return fail("algorithms", "must list at least one algorithm");
        }
        if self.subspace_power == 0 {
            return fail("subspace_power", "must be at least 1");
        }
        if self.estimate_interval < 2 || !self.estimate_interval.is_multiple_of(2) {
            return fail("estimate_interval", "must be even and at least 2");
        }
        if self.estimator_covariance == EstimatorCovariance::CcmWeighted
            && !self.algorithms.iter().any(|a| matches!(a, Algorithm::CcmSg | Algorithm::CcmExact))
        {
            return fail("estimator_covariance", "ccm-weighted needs a CCM algorithm in the run");
        }
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return fail("nu", "must be positive");
        }
        if !(self.forgetting > 0.0 && self.forgetting <= 1.0) {
            return fail("forgetting", "must lie in (0, 1]");
        }
        if !(self.psi_forgetting > 0.0 && self.psi_forgetting < 1.0) {
            return fail("psi_forgetting", "must lie in (0, 1)");
        }
        if self.ber_skip_symbols >= self.packet_symbols {
            return fail("ber_skip_symbols", "must be smaller than packet_symbols");
        }
        Ok(warnings)
    }
}
