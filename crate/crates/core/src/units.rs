//! Information units.
//!
//! Everything in this crate computes in nats. Conversion happens only at API
//! boundaries; `bits = nats / ln 2`.

use serde::{Deserialize, Serialize};

/// Default absolute tolerance, in nats, for feasibility slacks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Logarithm base for reported information quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    Nats,
    #[default]
    Bits,
}

impl LogBase {
    /// Converts a value in nats into this base.
    pub fn from_nats(self, x: f64) -> f64 {
        match self {
            LogBase::Nats => x,
            LogBase::Bits => x / core::f64::consts::LN_2,
        }
    }

    /// Converts a value in this base into nats.
    pub fn to_nats(self, x: f64) -> f64 {
        match self {
            LogBase::Nats => x,
            LogBase::Bits => x * core::f64::consts::LN_2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LogBase::Nats => "nats",
            LogBase::Bits => "bits",
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nats" | "nat" => Ok(LogBase::Nats),
            "bits" | "bit" => Ok(LogBase::Bits),
            other => Err(format!("unknown log base {other:?}; expected \"bits\" or \"nats\"")),
        }
    }
}

/// `max(0, ln x)` for `x >= 0`.
///
/// Callers guarantee nonnegative arguments (they are ratios of powers);
/// a negative argument is a caller bug, not a data condition.
pub(crate) fn log_plus(x: f64) -> f64 {
    debug_assert!(x >= 0.0 || x.is_nan(), "log_plus argument must be nonnegative, got {x}");
    if x <= 1.0 {
        0.0
    } else {
        x.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bits_nats_roundtrip() {
        let base = LogBase::Bits;
        for &x in &[0.0, 1.0, 0.3942286801821351, -2.5] {
            let b = base.from_nats(x);
            assert!((b * core::f64::consts::LN_2 - x).abs() <= 1e-12 * x.abs().max(1.0));
            assert!((base.to_nats(b) - x).abs() <= 1e-12 * x.abs().max(1.0));
        }
        assert_eq!(LogBase::Nats.from_nats(1.25), 1.25);
    }

    #[test]
    fn log_plus_clamps_at_one() {
        assert_eq!(log_plus(0.0), 0.0);
        assert_eq!(log_plus(0.5), 0.0);
        assert_eq!(log_plus(1.0), 0.0);
        assert!((log_plus(core::f64::consts::E) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn parse_log_base() {
        assert_eq!("bits".parse::<LogBase>().unwrap(), LogBase::Bits);
        assert_eq!("NATS".parse::<LogBase>().unwrap(), LogBase::Nats);
        assert!("decimal".parse::<LogBase>().is_err());
    }
}
