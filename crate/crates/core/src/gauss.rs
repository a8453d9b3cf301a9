//! Closed forms for the jointly Gaussian source and the Gaussian wiretap
//! channel.
//!
//! Source model: `(S, U)` zero-mean jointly Gaussian with variances `P_s`,
//! `P_u` and cross-covariance `P_su`. `S` is the intrinsic (semantic) state,
//! `U` the sensor observation available to the encoder.
//!
//! Channel model: `Y = X + N_1`, `Z = Y + N_2` with input power limit `P`
//! and independent Gaussian noises of variances `P_n1`, `P_n2`. The
//! eavesdropper's output `Z` is a degraded version of `Y` by construction.
//!
//! Key quantities (all logs natural; see [`crate::units::LogBase`]):
//!
//! | quantity                | formula                                            |
//! |-------------------------|----------------------------------------------------|
//! | `eta`                   | `P_s - P_su^2 / P_u` (semantic distortion floor)   |
//! | `det_cov`               | `P_s P_u - P_su^2`                                 |
//! | `capacity_main`         | `1/2 log(1 + P/P_n1)`                              |
//! | `secrecy_capacity`      | `1/2 log(P_n (P+P_n1) / (P_n1 (P+P_n)))`           |
//! | `rdf_observed(D_u)`     | `1/2 log^+(P_u / D_u)`                             |
//! | `rdf_semantic(D_s)`     | `1/2 log^+(P_su^2 / (P_u (D_s - eta)))`            |
//!
//! where `P_n = P_n1 + P_n2` and `log^+ = max(0, log)`. The semantic
//! rate-distortion function is the indirect (remote-source) one: the encoder
//! only sees `U`, so no code can push `D_s` to or below `eta` and the
//! function returns `+inf` for `D_s <= eta`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::log_plus;

/// `2 * pi * e`, the variance-to-entropy factor for Gaussians.
pub const TWO_PI_E: f64 = 2.0 * core::f64::consts::PI * core::f64::consts::E;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaussError {
    #[error("source powers must be positive and finite: p_s={p_s}, p_u={p_u}")]
    InvalidSourcePower { p_s: f64, p_u: f64 },
    #[error("cross-covariance is inconsistent: p_su^2={got} exceeds p_s*p_u={limit}")]
    InvalidCrossCovariance { got: f64, limit: f64 },
    #[error("channel input power and main noise must be positive and finite: power={power}, p_n1={p_n1}")]
    InvalidChannelPower { power: f64, p_n1: f64 },
    #[error("eavesdropper noise p_n2 must be nonnegative and finite, got {0}")]
    InvalidEveNoise(f64),
    #[error("observation distortion must be positive, got {0}")]
    NonPositiveDistortion(f64),
    #[error("source covariance is singular (det = {0}); joint differential entropy is undefined")]
    SingularCovariance(f64),
}

/// Zero-mean jointly Gaussian semantic source `(S, U)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemanticSourceGaussian {
    pub p_s: f64,
    pub p_u: f64,
    pub p_su: f64,
}

impl SemanticSourceGaussian {
    /// Validates `p_s > 0`, `p_u > 0`, `p_su^2 <= p_s * p_u`.
    pub fn new(p_s: f64, p_u: f64, p_su: f64) -> Result<Self, GaussError> {
        if !(p_s > 0.0 && p_s.is_finite() && p_u > 0.0 && p_u.is_finite()) {
            return Err(GaussError::InvalidSourcePower { p_s, p_u });
        }
        if !(p_su.is_finite() && p_su * p_su <= p_s * p_u) {
            return Err(GaussError::InvalidCrossCovariance { got: p_su * p_su, limit: p_s * p_u });
        }
        Ok(Self { p_s, p_u, p_su })
    }

    /// Determinant of the source covariance matrix, `P_s P_u - P_su^2`.
    pub fn det_cov(&self) -> f64 {
        self.p_s * self.p_u - self.p_su * self.p_su
    }

    /// MMSE floor for estimating `S` from `U`: `P_s - P_su^2 / P_u`.
    ///
    /// No encoder observing only `U` can achieve semantic distortion at or
    /// below this value.
    pub fn eta(&self) -> f64 {
        self.p_s - self.p_su * self.p_su / self.p_u
    }

    /// Rate-distortion function of the observation `U` under squared error,
    /// `1/2 log^+(P_u / D_u)` nats. Errors when `d_u <= 0`.
    pub fn rdf_observed(&self, d_u: f64) -> Result<f64, GaussError> {
        if !(d_u > 0.0) {
            return Err(GaussError::NonPositiveDistortion(d_u));
        }
        Ok(0.5 * log_plus(self.p_u / d_u))
    }

    /// Indirect rate-distortion function for the semantic state estimated
    /// through `U`, `1/2 log^+(P_su^2 / (P_u (D_s - eta)))` nats.
    ///
    /// Returns `+inf` for `d_s <= eta`: such distortions are unreachable at
    /// any rate, and the sentinel keeps feasibility arithmetic well-defined.
    pub fn rdf_semantic_indirect(&self, d_s: f64) -> f64 {
        let gap = d_s - self.eta();
        if gap <= 0.0 {
            return f64::INFINITY;
        }
        0.5 * log_plus(self.p_su * self.p_su / (self.p_u * gap))
    }

    /// Differential entropy of `S`, `1/2 log(2 pi e P_s)` nats.
    pub fn diff_entropy_s(&self) -> f64 {
        0.5 * (TWO_PI_E * self.p_s).ln()
    }

    /// Differential entropy of `U`, `1/2 log(2 pi e P_u)` nats.
    pub fn diff_entropy_u(&self) -> f64 {
        0.5 * (TWO_PI_E * self.p_u).ln()
    }

    /// Joint differential entropy, `1/2 log((2 pi e)^2 det_cov)` nats.
    /// Errors when the covariance is singular.
    pub fn diff_entropy_su(&self) -> Result<f64, GaussError> {
        let det = self.det_cov();
        if det <= 0.0 {
            return Err(GaussError::SingularCovariance(det));
        }
        Ok(0.5 * (TWO_PI_E * TWO_PI_E * det).ln())
    }
}

/// Gaussian wiretap channel `Y = X + N_1`, `Z = Y + N_2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianWiretapChannel {
    /// Input power limit `P`.
    pub power: f64,
    /// Main channel noise variance.
    pub p_n1: f64,
    /// Additional noise variance on the eavesdropper tap.
    pub p_n2: f64,
}

impl GaussianWiretapChannel {
    pub fn new(power: f64, p_n1: f64, p_n2: f64) -> Result<Self, GaussError> {
        if !(power > 0.0 && power.is_finite() && p_n1 > 0.0 && p_n1.is_finite()) {
            return Err(GaussError::InvalidChannelPower { power, p_n1 });
        }
        if !(p_n2 >= 0.0 && p_n2.is_finite()) {
            return Err(GaussError::InvalidEveNoise(p_n2));
        }
        Ok(Self { power, p_n1, p_n2 })
    }

    /// Total noise variance seen by the eavesdropper, `P_n = P_n1 + P_n2`.
    pub fn p_n(&self) -> f64 {
        self.p_n1 + self.p_n2
    }

    /// Main channel capacity per channel use, `1/2 log(1 + P/P_n1)` nats.
    pub fn capacity_main(&self) -> f64 {
        0.5 * (1.0 + self.power / self.p_n1).ln()
    }

    /// Secrecy capacity per channel use,
    /// `1/2 log(P_n (P + P_n1) / (P_n1 (P + P_n)))` nats.
    ///
    /// Zero when `p_n2 = 0` (eavesdropper sees the main output exactly).
    pub fn secrecy_capacity(&self) -> f64 {
        let p_n = self.p_n();
        0.5 * ((p_n * (self.power + self.p_n1)) / (self.p_n1 * (self.power + p_n))).ln()
    }
}
