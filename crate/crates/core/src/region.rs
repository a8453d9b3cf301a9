//! Shared region-point, feasibility-report, and trace-grid types.

use serde::Serialize;
use thiserror::Error;

use crate::gauss::SemanticSourceGaussian;
use crate::units::DEFAULT_TOL;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionError {
    #[error("rates must be nonnegative and finite: r={r}, r_k={r_k}")]
    InvalidRate { r: f64, r_k: f64 },
    #[error("distortions must be positive and finite: d_s={d_s}, d_u={d_u}")]
    InvalidDistortion { d_s: f64, d_u: f64 },
    #[error("equivocations must be finite: delta_s={delta_s}, delta_u={delta_u}, delta_su={delta_su}")]
    InvalidEquivocation { delta_s: f64, delta_u: f64, delta_su: f64 },
    #[error("grid axis {axis} must be finite and strictly increasing")]
    InvalidGrid { axis: &'static str },
    #[error("grid axis {axis} must be positive; starts at {value}")]
    NonPositiveGrid { axis: &'static str, value: f64 },
}

/// A candidate operating point
/// `(R, R_k, D_s, D_u, delta_s, delta_u, delta_su)`.
///
/// `r` is channel uses per source symbol, `r_k` the secret-key rate;
/// equivocations are in nats and may be negative (they bound differential
/// entropies in the Gaussian case).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionPoint {
    pub r: f64,
    pub r_k: f64,
    pub d_s: f64,
    pub d_u: f64,
    pub delta_s: f64,
    pub delta_u: f64,
    pub delta_su: f64,
}

impl RegionPoint {
    pub fn new(
        r: f64,
        r_k: f64,
        d_s: f64,
        d_u: f64,
        delta_s: f64,
        delta_u: f64,
        delta_su: f64,
    ) -> Result<Self, RegionError> {
        if !(r >= 0.0 && r.is_finite() && r_k >= 0.0 && r_k.is_finite()) {
            return Err(RegionError::InvalidRate { r, r_k });
        }
        if !(d_s > 0.0 && d_s.is_finite() && d_u > 0.0 && d_u.is_finite()) {
            return Err(RegionError::InvalidDistortion { d_s, d_u });
        }
        if !(delta_s.is_finite() && delta_u.is_finite() && delta_su.is_finite()) {
            return Err(RegionError::InvalidEquivocation { delta_s, delta_u, delta_su });
        }
        Ok(Self { r, r_k, d_s, d_u, delta_s, delta_u, delta_su })
    }
}

/// One signed constraint margin. Positive means satisfied with room to
/// spare; the sign convention is `slack = bound - demand` throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Slack {
    pub name: &'static str,
    pub value: f64,
    /// `"nats"` for information quantities, `"variance"` or `"distortion"`
    /// for squared-error quantities.
    pub units: &'static str,
}

impl Slack {
    pub fn nats(name: &'static str, value: f64) -> Self {
        Slack { name, value, units: "nats" }
    }

    pub fn variance(name: &'static str, value: f64) -> Self {
        Slack { name, value, units: "variance" }
    }

    pub fn distortion(name: &'static str, value: f64) -> Self {
        Slack { name, value, units: "distortion" }
    }
}

/// Outcome of evaluating a system of inequalities at one point.
///
/// Feasible iff every slack is at least `-tol`. A NaN slack counts as
/// infeasible.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub slacks: Vec<Slack>,
    pub tol: f64,
}

impl FeasibilityReport {
    pub fn new(slacks: Vec<Slack>) -> Self {
        Self { slacks, tol: DEFAULT_TOL }
    }

    pub fn with_tol(slacks: Vec<Slack>, tol: f64) -> Self {
        Self { slacks, tol }
    }

    pub fn feasible(&self) -> bool {
        self.slacks.iter().all(|s| s.value >= -self.tol)
    }

    /// The slack closest to (or deepest into) violation.
    pub fn worst(&self) -> Option<&Slack> {
        self.slacks.iter().min_by(|a, b| {
            a.value.partial_cmp(&b.value).unwrap_or_else(|| {
                // NaN sorts first: it is the most broken constraint.
                if a.value.is_nan() {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                }
            })
        })
    }

    pub fn slack(&self, name: &str) -> Option<f64> {
        self.slacks.iter().find(|s| s.name == name).map(|s| s.value)
    }
}

/// Equivocation floors that a traced boundary must support, in nats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SecrecyMode {
    /// Full semantic secrecy: `delta_s = h(S)`, `delta_u = 0`,
    /// `delta_su = h(S)`. The eavesdropper learns nothing about the
    /// semantic state beyond its prior.
    FullSemantic,
    /// Explicit targets.
    Custom { delta_s: f64, delta_u: f64, delta_su: f64 },
}

impl SecrecyMode {
    /// Resolves the mode into `(delta_s, delta_u, delta_su)` targets.
    pub fn targets(&self, src: &SemanticSourceGaussian) -> (f64, f64, f64) {
        match *self {
            SecrecyMode::FullSemantic => {
                let h_s = src.diff_entropy_s();
                (h_s, 0.0, h_s)
            }
            SecrecyMode::Custom { delta_s, delta_u, delta_su } => (delta_s, delta_u, delta_su),
        }
    }
}

/// Grid for boundary tracing. `r` and `d_u` enumerate cells; `d_s` only
/// fixes the search interval (its first and last entries) for the bisected
/// boundary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceGrid {
    pub r: Vec<f64>,
    pub d_u: Vec<f64>,
    pub d_s: Vec<f64>,
}

impl TraceGrid {
    pub fn validate(&self) -> Result<(), RegionError> {
        for (axis, values) in [("r", &self.r), ("d_u", &self.d_u), ("d_s", &self.d_s)] {
            if values.is_empty()
                || values.iter().any(|v| !v.is_finite())
                || values.windows(2).any(|w| w[0] >= w[1])
            {
                return Err(RegionError::InvalidGrid { axis });
            }
        }
        if self.d_s.len() < 2 {
            return Err(RegionError::InvalidGrid { axis: "d_s" });
        }
        for (axis, values) in [("d_u", &self.d_u), ("d_s", &self.d_s)] {
            if values[0] <= 0.0 {
                return Err(RegionError::NonPositiveGrid { axis, value: values[0] });
            }
        }
        if self.r[0] < 0.0 {
            return Err(RegionError::InvalidGrid { axis: "r" });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_validation() {
        assert!(RegionPoint::new(1.0, 0.0, 0.5, 0.5, 0.0, 0.0, 0.0).is_ok());
        assert!(RegionPoint::new(-1.0, 0.0, 0.5, 0.5, 0.0, 0.0, 0.0).is_err());
        assert!(RegionPoint::new(1.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0).is_err());
        assert!(RegionPoint::new(1.0, 0.0, 0.5, 0.5, f64::INFINITY, 0.0, 0.0).is_err());
    }

    #[test]
    fn feasibility_respects_tolerance_and_nan() {
        let ok = FeasibilityReport::new(vec![Slack::nats("a", 0.5), Slack::nats("b", -1e-12)]);
        assert!(ok.feasible());
        let bad = FeasibilityReport::new(vec![Slack::nats("a", 0.5), Slack::nats("b", -1e-3)]);
        assert!(!bad.feasible());
        assert_eq!(bad.worst().unwrap().name, "b");
        let nan = FeasibilityReport::new(vec![Slack::nats("a", f64::NAN)]);
        assert!(!nan.feasible());
    }

    #[test]
    fn grid_validation() {
        let ok = TraceGrid { r: vec![0.5, 1.0], d_u: vec![0.2], d_s: vec![0.5, 1.0] };
        assert!(ok.validate().is_ok());
        let bad = TraceGrid { r: vec![1.0, 0.5], d_u: vec![0.2], d_s: vec![0.5, 1.0] };
        assert!(matches!(bad.validate(), Err(RegionError::InvalidGrid { axis: "r" })));
        let bad = TraceGrid { r: vec![1.0], d_u: vec![0.2], d_s: vec![0.5] };
        assert!(bad.validate().is_err());
        let bad = TraceGrid { r: vec![1.0], d_u: vec![-0.2, 0.3], d_s: vec![0.5, 1.0] };
        assert!(matches!(bad.validate(), Err(RegionError::NonPositiveGrid { axis: "d_u", .. })));
    }
}
