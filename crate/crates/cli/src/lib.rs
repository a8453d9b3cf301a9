//! Command-line front end over `semsec-core`: configuration resolution,
//! boundary-trace jobs, solver invocation, and CSV/JSON/SVG emission.

pub mod args;
pub mod commands;
pub mod config;
mod csvout;
mod report;
mod svg;

use semsec_core::discrete::DiscreteError;
use semsec_core::gauss::GaussError;
use semsec_core::inner::InnerError;
use semsec_core::mc::McError;
use semsec_core::outer::OuterError;
use semsec_core::region::RegionError;
use thiserror::Error;

/// Command failures, partitioned by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("infeasible or empty result: {0}")]
    Infeasible(String),
    #[error("solver did not converge: {0}")]
    NotConverged(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::NotConverged(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

/// Runs one parsed command. Success means every requested artifact was
/// written; the error's [`exit_code`](CliError::exit_code) is the process
/// status.
pub fn run(cli: args::Cli) -> Result<(), CliError> {
    commands::dispatch(cli)
}

impl From<GaussError> for CliError {
    fn from(e: GaussError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<RegionError> for CliError {
    fn from(e: RegionError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<OuterError> for CliError {
    fn from(e: OuterError) -> Self {
        match e {
            OuterError::DistortionBelowFloor { .. } | OuterError::RateInfeasible { .. } => {
                CliError::Infeasible(e.to_string())
            }
            OuterError::Grid(g) => g.into(),
            OuterError::Gauss(g) => g.into(),
        }
    }
}

impl From<InnerError> for CliError {
    fn from(e: InnerError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<DiscreteError> for CliError {
    fn from(e: DiscreteError) -> Self {
        match e {
            DiscreteError::NotConverged { .. } => CliError::NotConverged(e.to_string()),
            DiscreteError::InfeasibleDistortion { .. } => CliError::Infeasible(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<McError> for CliError {
    fn from(e: McError) -> Self {
        match e {
            // Numerical breakdown during sampling or covariance reduction.
            McError::NonFiniteSample { .. } | McError::Singular { .. } => {
                CliError::NotConverged(e.to_string())
            }
            McError::InvalidConfig { .. } => CliError::Config(e.to_string()),
            McError::Inner(inner) => inner.into(),
            McError::Gauss(g) => g.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_partition_into_the_documented_exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Infeasible("x".into()).exit_code(), 3);
        assert_eq!(CliError::NotConverged("x".into()).exit_code(), 4);
        assert_eq!(CliError::Io("x".into()).exit_code(), 5);
    }

    #[test]
    fn core_errors_map_onto_exit_codes_by_kind() {
        let e: CliError =
            DiscreteError::NotConverged { iterations: 10, last_change: 1.0 }.into();
        assert_eq!(e.exit_code(), 4);
        let e: CliError = DiscreteError::InfeasibleDistortion {
            name: "d_u",
            requested: 0.0,
            minimum: 0.1,
        }
        .into();
        assert_eq!(e.exit_code(), 3);
        let e: CliError = DiscreteError::MassNotNormalized { total: 0.9 }.into();
        assert_eq!(e.exit_code(), 2);
        let e: CliError =
            OuterError::DistortionBelowFloor { d_s: 0.4, eta: 0.45 }.into();
        assert_eq!(e.exit_code(), 3);
        let e: CliError = McError::NonFiniteSample { index: 3 }.into();
        assert_eq!(e.exit_code(), 4);
        let e: CliError = GaussError::InvalidEveNoise(-1.0).into();
        assert_eq!(e.exit_code(), 2);
    }
}
