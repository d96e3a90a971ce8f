//! Blind adaptive multiuser receivers for downlink DS-CDMA with Alamouti
//! space-time block coding over multipath channels.
//!
//! The crate is organised along the processing chain:
//!
//! * [`signal`] builds spreading codes, convolution and constraint matrices,
//!   Clarke fading processes and the stacked two-slot received vectors.
//! * [`receiver`] holds the code-constrained constant-modulus (CCM) receiver
//!   (closed form and stochastic gradient), the constrained minimum variance
//!   (CMV) baseline, a trained LMS reference, detection and combining.
//! * [`estimator`] performs blind space-time channel estimation: the subspace
//!   estimator built on inverse covariance powers and its low-cost SG tracker.
//! * [`harness`] runs seeded Monte Carlo trials and sweeps.
//! * [`oracle`] contains independent reference computations used by the
//!   self-test and the test suites.

pub mod error;
pub mod estimator;
pub mod harness;
pub mod linalg;
pub mod oracle;
pub mod receiver;
pub mod selftest;
pub mod signal;

pub use error::{Error, Result};
pub use estimator::{ChannelEstimate, CovarianceEstimate, EstimateMethod, PsiEstimate};
pub use harness::{
    Algorithm, Axis, ChannelEstimatorMode, MetricsSeries, Scenario, TrialOutcome,
};
pub use receiver::{CcmStatistics, CombinerGains, CombinerMode, FilterPair, ProjectionPair};
pub use signal::{
    ConstraintMatrices, ConvolutionMatrix, ReceivedBlock, SpaceTimeChannel, SpreadingScheme,
    SpreadingSet, SymbolStream,
};

pub use num_complex::Complex64;

/// Dense complex matrix.
pub type CMat = nalgebra::DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVec = nalgebra::DVector<Complex64>;
