//! Command-line grammar. All numeric overrides are optional; values left
//! unset fall through to the configuration file and built-in defaults.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use semsec_core::LogBase;
use serde::Serialize;

use crate::config::{Axis, Span};

#[derive(Parser, Debug)]
#[command(
    name = "semsec",
    version,
    about = "Rate-distortion-equivocation analysis of semantic sources over degraded wiretap channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Trace the converse boundary (minimal semantic distortion) over an
    /// (r, d_u) grid
    OuterTrace(TraceArgs),
    /// Trace the achievable boundary of the layered linear-Gaussian scheme
    InnerTrace(TraceArgs),
    /// Evaluate the converse inequalities at one operating point
    PointCheck(PointCheckArgs),
    /// Solve one rate-distortion problem by Blahut-Arimoto
    Ba(BaArgs),
    /// Monte Carlo validation of the layered scheme against its closed forms
    McValidate(McArgs),
}

#[derive(clap::Args, Debug, Clone)]
pub struct CommonArgs {
    /// TOML configuration file; command-line flags override it
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Seed for randomized solvers and samplers (overrides SEMSEC_SEED)
    #[arg(long)]
    pub seed: Option<u64>,

    /// Unit for information quantities in outputs
    #[arg(long, value_parser = parse_log_base, value_name = "bits|nats")]
    pub log_base: Option<LogBase>,
}

/// Gaussian source and channel overrides shared by the Gaussian-model
/// commands.
#[derive(clap::Args, Debug, Clone)]
pub struct GaussArgs {
    /// Semantic state power P_s
    #[arg(long)]
    pub p_s: Option<f64>,

    /// Observation power P_u
    #[arg(long)]
    pub p_u: Option<f64>,

    /// Cross-covariance P_su
    #[arg(long)]
    pub p_su: Option<f64>,

    /// Channel input power budget
    #[arg(long)]
    pub power: Option<f64>,

    /// Main-channel noise power
    #[arg(long)]
    pub p_n1: Option<f64>,

    /// Additional eavesdropper noise power
    #[arg(long)]
    pub p_n2: Option<f64>,
}

#[derive(clap::Args, Debug)]
pub struct TraceArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(flatten)]
    pub gauss: GaussArgs,

    /// Output CSV path
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,

    /// Also render an SVG heatmap of the traced boundary
    #[arg(long, value_name = "FILE")]
    pub svg: Option<PathBuf>,

    /// Channel-uses-per-symbol axis as start:stop:count
    #[arg(long, value_parser = parse_axis, value_name = "START:STOP:N")]
    pub grid_r: Option<Axis>,

    /// Observation-distortion axis as start:stop:count
    #[arg(long, value_parser = parse_axis, value_name = "START:STOP:N")]
    pub grid_du: Option<Axis>,

    /// Semantic-distortion search interval as start:stop
    #[arg(long, value_parser = parse_span, value_name = "START:STOP")]
    pub span_ds: Option<Span>,

    /// Secret-key rate
    #[arg(long)]
    pub r_k: Option<f64>,

    /// Optimizer restarts per cell (inner trace only)
    #[arg(long)]
    pub multistarts: Option<usize>,
}

#[derive(clap::Args, Debug)]
pub struct PointCheckArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(flatten)]
    pub gauss: GaussArgs,

    /// Channel uses per source symbol
    #[arg(long)]
    pub r: f64,

    /// Secret-key rate
    #[arg(long, default_value_t = 0.0)]
    pub r_k: f64,

    /// Semantic distortion
    #[arg(long)]
    pub d_s: f64,

    /// Observation distortion
    #[arg(long)]
    pub d_u: f64,

    /// Demanded semantic equivocation, in the active log base
    #[arg(long)]
    pub delta_s: f64,

    /// Demanded observation equivocation, in the active log base
    #[arg(long)]
    pub delta_u: f64,

    /// Demanded joint equivocation, in the active log base
    #[arg(long)]
    pub delta_su: f64,

    /// Joint source PMF file; selects the discrete check together with the
    /// four file flags below
    #[arg(long, value_name = "FILE")]
    pub pmf: Option<PathBuf>,

    /// Main-channel transition matrix file
    #[arg(long, value_name = "FILE")]
    pub dmc_main: Option<PathBuf>,

    /// Eavesdropper tap from the main output, as a transition matrix file
    #[arg(long, value_name = "FILE")]
    pub dmc_eve: Option<PathBuf>,

    /// Semantic distortion table file
    #[arg(long, value_name = "FILE")]
    pub dist_s: Option<PathBuf>,

    /// Observation distortion table file
    #[arg(long, value_name = "FILE")]
    pub dist_u: Option<PathBuf>,

    /// Output JSON path; stdout if omitted
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    /// Classic rate-distortion of a rank-1 source (--target-u)
    Classic,
    /// Remote rate-distortion of the semantic letter through its
    /// observation (--target-s)
    Indirect,
    /// Joint description under both distortion constraints
    Bivariate,
    /// Observation coding under a semantic and an observation constraint
    Semantic,
}

#[derive(clap::Args, Debug)]
pub struct BaArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Which rate-distortion problem to solve
    #[arg(long, value_enum)]
    pub solver: Solver,

    /// Source PMF file: rank 1 for classic, rank 2 (semantic, observed)
    /// otherwise
    #[arg(long, value_name = "FILE")]
    pub pmf: PathBuf,

    /// Semantic distortion table; Hamming if omitted
    #[arg(long, value_name = "FILE")]
    pub dist_s: Option<PathBuf>,

    /// Observation distortion table; Hamming if omitted
    #[arg(long, value_name = "FILE")]
    pub dist_u: Option<PathBuf>,

    /// Semantic distortion target
    #[arg(long)]
    pub target_s: Option<f64>,

    /// Observation distortion target
    #[arg(long)]
    pub target_u: Option<f64>,

    /// Output JSON path; stdout if omitted
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct McArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(flatten)]
    pub gauss: GaussArgs,

    /// Number of samples
    #[arg(long)]
    pub n_samples: Option<u64>,

    /// Channel uses per source symbol for the rate identities
    #[arg(long)]
    pub r: Option<f64>,

    /// Output JSON path; stdout if omitted
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

fn parse_log_base(s: &str) -> Result<LogBase, String> {
    s.parse()
}

fn parse_axis(s: &str) -> Result<Axis, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, count] = parts[..] else {
        return Err(format!("expected START:STOP:COUNT, got {s:?}"));
    };
    let axis = Axis {
        start: parse_num(start)?,
        stop: parse_num(stop)?,
        count: count.parse().map_err(|_| format!("bad count {count:?}"))?,
    };
    if axis.count == 0 {
        return Err("count must be at least 1".into());
    }
    Ok(axis)
}

fn parse_span(s: &str) -> Result<Span, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop] = parts[..] else {
        return Err(format!("expected START:STOP, got {s:?}"));
    };
    Ok(Span { start: parse_num(start)?, stop: parse_num(stop)? })
}

fn parse_num(s: &str) -> Result<f64, String> {
    s.parse().map_err(|_| format!("bad number {s:?}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn grammar_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn axis_and_span_syntax() {
        assert_eq!(
            parse_axis("3.2:6.0:20").unwrap(),
            Axis { start: 3.2, stop: 6.0, count: 20 }
        );
        assert!(parse_axis("3.2:6.0").is_err());
        assert!(parse_axis("3.2:6.0:0").is_err());
        assert_eq!(parse_span("0.05:0.7").unwrap(), Span { start: 0.05, stop: 0.7 });
        assert!(parse_span("0.05").is_err());
    }
}
