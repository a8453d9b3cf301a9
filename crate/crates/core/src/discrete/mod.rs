//! Exact finite-alphabet counterparts of the Gaussian closed forms:
//! entropy and mutual-information measures on dense joint PMFs,
//! Blahut-Arimoto solvers for the classic, bivariate, semantic, and
//! indirect rate-distortion functions, discrete memoryless channel rates
//! and capacities, and verbatim evaluators for the general converse and
//! achievability inequality systems.
//!
//! All information values are in nats.

mod ba;
mod channel;
mod info;
mod rdf;
mod checkers;
mod textio;

pub use ba::BAResult;
pub use channel::{capacity, channel_rate, max_secrecy_rate, secrecy_rate, Dmc};
pub use info::{
    conditional_entropy, conditional_mi, mutual_information, subset_entropy, JointPMF,
};
pub use rdf::{
    ba_rdf_bivariate, ba_rdf_classic, ba_rdf_indirect, ba_rdf_semantic, modified_distortion,
    DistortionMatrix,
};
pub use checkers::{
    achievability_check_discrete, converse_check_discrete, AchievabilityResult,
    AchievabilityTerms, ReconMap,
};
pub use textio::{parse_distortion, parse_dmc, parse_pmf};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiscreteError {
    #[error("probability mass sums to {total}, must be 1 within 1e-12")]
    MassNotNormalized { total: f64 },
    #[error("negative or nonfinite probability {value} at flat index {index}")]
    InvalidProbability { index: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("axis {axis} out of range for rank {rank}")]
    AxisOutOfRange { axis: usize, rank: usize },
    #[error("axis sets must be disjoint and strictly increasing")]
    InvalidAxes,
    #[error("distortion entries must be nonnegative and finite")]
    InvalidDistortionMatrix,
    #[error("channel row {row} sums to {total}, must be 1 within 1e-12")]
    InvalidChannelRow { row: usize, total: f64 },
    #[error("distortion {name} = {requested} below the minimum achievable {minimum}")]
    InfeasibleDistortion { name: &'static str, requested: f64, minimum: f64 },
    #[error("distortion target {value} must be finite")]
    InvalidTarget { value: f64 },
    #[error("solver did not converge after {iterations} iterations (last change {last_change})")]
    NotConverged { iterations: usize, last_change: f64 },
    #[error("joint marginal deviates from the given source law by {max_dev}")]
    MarginalMismatch { max_dev: f64 },
    #[error("reconstruction map entry {value} exceeds output alphabet {out_size}")]
    ReconOutOfRange { value: usize, out_size: usize },
    #[error("parse error: {reason}")]
    Parse { reason: String },
}
