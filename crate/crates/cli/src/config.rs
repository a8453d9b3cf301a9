//! Layered run configuration: built-in defaults, an optional TOML file,
//! the `SEMSEC_SEED` environment variable, and command-line overrides, in
//! rising precedence. The fully resolved configuration is embedded into
//! every artifact so a run can be reproduced from its output alone.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use semsec_core::inner::InnerParams;
use semsec_core::units::LogBase;

use crate::CliError;

/// One trace axis, expanded to `count` evenly spaced values.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        // An empty expansion is caught downstream by grid validation.
        if self.count <= 1 {
            return vec![self.start; self.count];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.start + step * i as f64).collect()
    }
}

/// Search interval for the bisected distortion boundary.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Span {
    pub start: f64,
    pub stop: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SourceSpec {
    Gaussian { p_s: f64, p_u: f64, p_su: f64 },
    Pmf { path: PathBuf },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ChannelSpec {
    Gaussian { power: f64, p_n1: f64, p_n2: f64 },
    /// `main` is the transition matrix to the legitimate output; `eve` the
    /// further tap from that output to the eavesdropper.
    Dmc { main: PathBuf, eve: PathBuf },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SecrecySpec {
    FullSemantic,
    /// Explicit equivocation floors, in the configured log base.
    Custom { delta_s: f64, delta_u: f64, delta_su: f64 },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct McSpec {
    pub n_samples: u64,
    pub chunk: u64,
    pub r: f64,
    pub params: InnerParams,
}

/// Fully resolved configuration of one command invocation.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunConfig {
    pub source: SourceSpec,
    pub channel: ChannelSpec,
    pub grid_r: Axis,
    pub grid_d_u: Axis,
    pub grid_d_s: Span,
    pub secrecy: SecrecySpec,
    pub r_k: f64,
    pub multistarts: usize,
    pub nm_max_iters: usize,
    pub mc: McSpec,
    pub seed: u64,
    pub log_base: LogBase,
}

// The TOML layer: every field optional so a file may set only what it
// needs. Unknown keys are rejected to catch typos early.

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    source: Option<SourceSpec>,
    channel: Option<ChannelSpec>,
    grid: Option<GridFile>,
    secrecy: Option<SecrecySpec>,
    trace: Option<TraceFile>,
    inner: Option<InnerFile>,
    mc: Option<McFile>,
    output: Option<OutputFile>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    r: Option<Axis>,
    d_u: Option<Axis>,
    d_s: Option<Span>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TraceFile {
    r_k: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct InnerFile {
    multistarts: Option<usize>,
    nm_max_iters: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct McFile {
    n_samples: Option<u64>,
    chunk: Option<u64>,
    r: Option<f64>,
    alpha1: Option<f64>,
    alpha2: Option<f64>,
    gamma: Option<f64>,
    p_ap: Option<f64>,
    p_bp: Option<f64>,
    p_qc: Option<f64>,
    p_qp: Option<f64>,
    p_wc: Option<f64>,
    p_xt: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputFile {
    log_base: Option<LogBase>,
    seed: Option<u64>,
}

/// Command-line values that override the file layer. Collected by the
/// argument parser; `None` means "not given".
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub p_s: Option<f64>,
    pub p_u: Option<f64>,
    pub p_su: Option<f64>,
    pub power: Option<f64>,
    pub p_n1: Option<f64>,
    pub p_n2: Option<f64>,
    pub r_axis: Option<Axis>,
    pub d_u_axis: Option<Axis>,
    pub d_s_span: Option<Span>,
    pub r_k: Option<f64>,
    pub multistarts: Option<usize>,
    pub seed: Option<u64>,
    pub log_base: Option<LogBase>,
    pub mc_n: Option<u64>,
    pub mc_r: Option<f64>,
}

fn default_mc() -> McSpec {
    McSpec {
        n_samples: 1_000_000,
        chunk: 65_536,
        r: 2.0,
        params: InnerParams {
            alpha1: 1.0,
            alpha2: 1.0,
            gamma: 0.0,
            p_ap: 0.7,
            p_bp: 0.45,
            p_qc: 0.25,
            p_qp: 0.25,
            p_wc: 0.25,
            p_xt: 0.25,
        },
    }
}

impl RunConfig {
    pub fn defaults() -> Self {
        RunConfig {
            source: SourceSpec::Gaussian { p_s: 0.7, p_u: 1.0, p_su: 0.5 },
            channel: ChannelSpec::Gaussian { power: 1.0, p_n1: 0.10, p_n2: 0.15 },
            grid_r: Axis { start: 3.2, stop: 6.0, count: 20 },
            grid_d_u: Axis { start: 0.15, stop: 1.0, count: 20 },
            // Commands narrow this: the converse floor starts above the
            // posterior variance, the layered scheme can go below it.
            grid_d_s: Span { start: 0.451, stop: 0.7 },
            secrecy: SecrecySpec::FullSemantic,
            r_k: 0.0,
            multistarts: 32,
            nm_max_iters: 300,
            mc: default_mc(),
            seed: 0,
            log_base: LogBase::Bits,
        }
    }

    /// Defaults <- file <- `SEMSEC_SEED` <- command line.
    pub fn resolve(path: Option<&Path>, over: &Overrides) -> Result<Self, CliError> {
        Self::resolve_from(Self::defaults(), path, over)
    }

    /// As [`resolve`](Self::resolve) but layering on top of `base`, letting
    /// commands adjust the built-in defaults (the achievable tracer searches
    /// distortions the converse floor excludes).
    pub fn resolve_from(
        base: RunConfig,
        path: Option<&Path>,
        over: &Overrides,
    ) -> Result<Self, CliError> {
        let mut cfg = base;

        if let Ok(seed) = std::env::var("SEMSEC_SEED") {
            cfg.seed = seed
                .parse()
                .map_err(|_| CliError::Config(format!("SEMSEC_SEED {seed:?} is not a u64")))?;
        }

        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
            let file: FileConfig = toml::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            if let Some(source) = file.source {
                cfg.source = source;
            }
            if let Some(channel) = file.channel {
                cfg.channel = channel;
            }
            if let Some(grid) = file.grid {
                if let Some(r) = grid.r {
                    cfg.grid_r = r;
                }
                if let Some(d_u) = grid.d_u {
                    cfg.grid_d_u = d_u;
                }
                if let Some(d_s) = grid.d_s {
                    cfg.grid_d_s = d_s;
                }
            }
            if let Some(secrecy) = file.secrecy {
                cfg.secrecy = secrecy;
            }
            if let Some(trace) = file.trace {
                if let Some(r_k) = trace.r_k {
                    cfg.r_k = r_k;
                }
            }
            if let Some(inner) = file.inner {
                if let Some(m) = inner.multistarts {
                    cfg.multistarts = m;
                }
                if let Some(n) = inner.nm_max_iters {
                    cfg.nm_max_iters = n;
                }
            }
            if let Some(mc) = file.mc {
                let d = &mut cfg.mc;
                let p = &mut d.params;
                if let Some(v) = mc.n_samples {
                    d.n_samples = v;
                }
                if let Some(v) = mc.chunk {
                    d.chunk = v;
                }
                if let Some(v) = mc.r {
                    d.r = v;
                }
                for (slot, given) in [
                    (&mut p.alpha1, mc.alpha1),
                    (&mut p.alpha2, mc.alpha2),
                    (&mut p.gamma, mc.gamma),
                    (&mut p.p_ap, mc.p_ap),
                    (&mut p.p_bp, mc.p_bp),
                    (&mut p.p_qc, mc.p_qc),
                    (&mut p.p_qp, mc.p_qp),
                    (&mut p.p_wc, mc.p_wc),
                    (&mut p.p_xt, mc.p_xt),
                ] {
                    if let Some(v) = given {
                        *slot = v;
                    }
                }
            }
            if let Some(output) = file.output {
                if let Some(base) = output.log_base {
                    cfg.log_base = base;
                }
                if let Some(seed) = output.seed {
                    cfg.seed = seed;
                }
            }
        }

        if let (Some(p_s), Some(p_u), Some(p_su)) = (over.p_s, over.p_u, over.p_su) {
            cfg.source = SourceSpec::Gaussian { p_s, p_u, p_su };
        } else if over.p_s.is_some() || over.p_u.is_some() || over.p_su.is_some() {
            match &mut cfg.source {
                SourceSpec::Gaussian { p_s, p_u, p_su } => {
                    *p_s = over.p_s.unwrap_or(*p_s);
                    *p_u = over.p_u.unwrap_or(*p_u);
                    *p_su = over.p_su.unwrap_or(*p_su);
                }
                SourceSpec::Pmf { .. } => {
                    return Err(CliError::Config(
                        "Gaussian source flags conflict with a PMF source".into(),
                    ));
                }
            }
        }
        if over.power.is_some() || over.p_n1.is_some() || over.p_n2.is_some() {
            match &mut cfg.channel {
                ChannelSpec::Gaussian { power, p_n1, p_n2 } => {
                    *power = over.power.unwrap_or(*power);
                    *p_n1 = over.p_n1.unwrap_or(*p_n1);
                    *p_n2 = over.p_n2.unwrap_or(*p_n2);
                }
                ChannelSpec::Dmc { .. } => {
                    return Err(CliError::Config(
                        "Gaussian channel flags conflict with a DMC channel".into(),
                    ));
                }
            }
        }
        if let Some(axis) = over.r_axis {
            cfg.grid_r = axis;
        }
        if let Some(axis) = over.d_u_axis {
            cfg.grid_d_u = axis;
        }
        if let Some(span) = over.d_s_span {
            cfg.grid_d_s = span;
        }
        if let Some(r_k) = over.r_k {
            cfg.r_k = r_k;
        }
        if let Some(m) = over.multistarts {
            cfg.multistarts = m;
        }
        if let Some(seed) = over.seed {
            cfg.seed = seed;
        }
        if let Some(base) = over.log_base {
            cfg.log_base = base;
        }
        if let Some(n) = over.mc_n {
            cfg.mc.n_samples = n;
        }
        if let Some(r) = over.mc_r {
            cfg.mc.r = r;
        }
        Ok(cfg)
    }

    /// Equivocation floors in nats for the Gaussian tracers.
    pub fn secrecy_mode(&self) -> semsec_core::SecrecyMode {
        match self.secrecy {
            SecrecySpec::FullSemantic => semsec_core::SecrecyMode::FullSemantic,
            SecrecySpec::Custom { delta_s, delta_u, delta_su } => {
                semsec_core::SecrecyMode::Custom {
                    delta_s: self.log_base.to_nats(delta_s),
                    delta_u: self.log_base.to_nats(delta_u),
                    delta_su: self.log_base.to_nats(delta_su),
                }
            }
        }
    }
}
