//! Subcommand implementations. Each resolves its configuration, runs the
//! corresponding library operation, writes every requested artifact, and
//! only then reports a nonzero condition, so an infeasible result still
//! leaves its (NaN-marked or negative-slack) output on disk.

use std::path::{Path, PathBuf};

use semsec_core::discrete::{
    ba_rdf_bivariate, ba_rdf_classic, ba_rdf_indirect, ba_rdf_semantic, converse_check_discrete,
    parse_distortion, parse_dmc, parse_pmf, BAResult, DistortionMatrix,
};
use semsec_core::gauss::{GaussianWiretapChannel, SemanticSourceGaussian};
use semsec_core::inner::{trace_inner, OptimizeOptions};
use semsec_core::mc::{validate_inner_point, McConfig};
use semsec_core::outer::{outer_feasible, trace_outer};
use semsec_core::{LogBase, RegionPoint, TraceGrid};
use serde::Serialize;

use crate::args::{
    BaArgs, Cli, Cmd, CommonArgs, GaussArgs, McArgs, PointCheckArgs, Solver, TraceArgs,
};
use crate::config::{Overrides, RunConfig, SourceSpec, Span};
use crate::report::{self, Envelope, SlackOut};
use crate::{csvout, svg, CliError};

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::OuterTrace(a) => trace(&a, TraceKind::Outer),
        Cmd::InnerTrace(a) => trace(&a, TraceKind::Inner),
        Cmd::PointCheck(a) => point_check(&a),
        Cmd::Ba(a) => ba(&a),
        Cmd::McValidate(a) => mc_validate(&a),
    }
}

fn base_overrides(common: &CommonArgs, gauss: &GaussArgs) -> Overrides {
    Overrides {
        p_s: gauss.p_s,
        p_u: gauss.p_u,
        p_su: gauss.p_su,
        power: gauss.power,
        p_n1: gauss.p_n1,
        p_n2: gauss.p_n2,
        seed: common.seed,
        log_base: common.log_base,
        ..Default::default()
    }
}

fn gaussian_system(
    cfg: &RunConfig,
) -> Result<(SemanticSourceGaussian, GaussianWiretapChannel), CliError> {
    let (p_s, p_u, p_su) = match cfg.source {
        SourceSpec::Gaussian { p_s, p_u, p_su } => (p_s, p_u, p_su),
        SourceSpec::Pmf { .. } => {
            return Err(CliError::Config(
                "this operation needs a Gaussian source; the configuration names a PMF".into(),
            ));
        }
    };
    let (power, p_n1, p_n2) = match cfg.channel {
        crate::config::ChannelSpec::Gaussian { power, p_n1, p_n2 } => (power, p_n1, p_n2),
        crate::config::ChannelSpec::Dmc { .. } => {
            return Err(CliError::Config(
                "this operation needs a Gaussian channel; the configuration names a DMC".into(),
            ));
        }
    };
    Ok((
        SemanticSourceGaussian::new(p_s, p_u, p_su)?,
        GaussianWiretapChannel::new(power, p_n1, p_n2)?,
    ))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))
}

enum TraceKind {
    Outer,
    Inner,
}

fn trace(a: &TraceArgs, kind: TraceKind) -> Result<(), CliError> {
    let mut over = base_overrides(&a.common, &a.gauss);
    over.r_axis = a.grid_r;
    over.d_u_axis = a.grid_du;
    over.d_s_span = a.span_ds;
    over.r_k = a.r_k;
    over.multistarts = a.multistarts;

    let mut base = RunConfig::defaults();
    if matches!(kind, TraceKind::Inner) {
        // The layered scheme reaches semantic distortions the converse
        // floor rules out for observation-only encoders.
        base.grid_d_s = Span { start: 0.05, stop: 0.7 };
    }
    let cfg = RunConfig::resolve_from(base, a.common.config.as_deref(), &over)?;
    let (src, ch) = gaussian_system(&cfg)?;
    let grid = TraceGrid {
        r: cfg.grid_r.values(),
        d_u: cfg.grid_d_u.values(),
        d_s: vec![cfg.grid_d_s.start, cfg.grid_d_s.stop],
    };

    let (csv, boundary, label) = match kind {
        TraceKind::Outer => {
            let rows = trace_outer(&src, &ch, cfg.r_k, &grid, cfg.secrecy_mode())?;
            let boundary: Vec<f64> = rows.iter().map(|r| r.d_s_boundary).collect();
            (csvout::render_outer(&cfg, &rows)?, boundary, "converse boundary d_s")
        }
        TraceKind::Inner => {
            let opts = OptimizeOptions {
                multistarts: cfg.multistarts,
                seed: cfg.seed,
                nm_max_iters: cfg.nm_max_iters,
                ..OptimizeOptions::default()
            };
            let rows = trace_inner(&src, &ch, &grid, cfg.secrecy_mode(), &opts)?;
            let boundary: Vec<f64> = rows.iter().map(|r| r.d_s_boundary).collect();
            (csvout::render_inner(&cfg, &rows)?, boundary, "achievable boundary d_s")
        }
    };

    csvout::write_file(&a.out, &csv)?;
    if let Some(path) = &a.svg {
        let doc = svg::heatmap(
            label,
            "observation distortion d_u",
            "channel uses per symbol r",
            &grid.d_u,
            &grid.r,
            &boundary,
        )?;
        csvout::write_file(path, &doc)?;
    }
    if boundary.iter().all(|v| v.is_nan()) {
        return Err(CliError::Infeasible(
            "no grid cell supports the secrecy targets".into(),
        ));
    }
    Ok(())
}

#[derive(Serialize)]
struct PointIn {
    r: f64,
    r_k: f64,
    d_s: f64,
    d_u: f64,
    delta_s: f64,
    delta_u: f64,
    delta_su: f64,
    units: &'static str,
}

#[derive(Serialize)]
struct DiscreteFiles {
    pmf: PathBuf,
    dmc_main: PathBuf,
    dmc_eve: PathBuf,
    dist_s: PathBuf,
    dist_u: PathBuf,
}

#[derive(Serialize)]
struct PointCheckConfig<'a> {
    run: &'a RunConfig,
    point: PointIn,
    #[serde(skip_serializing_if = "Option::is_none")]
    discrete: Option<DiscreteFiles>,
}

#[derive(Serialize)]
struct FeasibilityOut {
    slacks: Vec<SlackOut>,
    /// Acceptance tolerance on raw slack values (nats for information
    /// quantities).
    tol: f64,
}

#[derive(Serialize)]
struct PointCheckDiag {
    model: &'static str,
    feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    worst: Option<SlackOut>,
}

fn point_check(a: &PointCheckArgs) -> Result<(), CliError> {
    let files = [&a.pmf, &a.dmc_main, &a.dmc_eve, &a.dist_s, &a.dist_u];
    let given = files.iter().filter(|f| f.is_some()).count();
    if given != 0 && given != 5 {
        return Err(CliError::Config(
            "a discrete check needs --pmf, --dmc-main, --dmc-eve, --dist-s and --dist-u together"
                .into(),
        ));
    }
    let discrete = given == 5;
    let g = &a.gauss;
    if discrete
        && [g.p_s, g.p_u, g.p_su, g.power, g.p_n1, g.p_n2].iter().any(Option::is_some)
    {
        return Err(CliError::Config(
            "Gaussian parameter flags conflict with discrete input files".into(),
        ));
    }

    let cfg = RunConfig::resolve(a.common.config.as_deref(), &base_overrides(&a.common, g))?;
    let base = cfg.log_base;
    let point = RegionPoint::new(
        a.r,
        a.r_k,
        a.d_s,
        a.d_u,
        base.to_nats(a.delta_s),
        base.to_nats(a.delta_u),
        base.to_nats(a.delta_su),
    )?;

    let (model, report) = if discrete {
        let pmf = parse_pmf(&read_text(a.pmf.as_ref().unwrap())?)?;
        let dist_s = parse_distortion(&read_text(a.dist_s.as_ref().unwrap())?)?;
        let dist_u = parse_distortion(&read_text(a.dist_u.as_ref().unwrap())?)?;
        let main = parse_dmc(&read_text(a.dmc_main.as_ref().unwrap())?)?;
        let eve = parse_dmc(&read_text(a.dmc_eve.as_ref().unwrap())?)?;
        ("discrete", converse_check_discrete(&point, &pmf, &dist_s, &dist_u, &main, &eve)?)
    } else {
        let (src, ch) = gaussian_system(&cfg)?;
        ("gaussian", outer_feasible(&point, &src, &ch))
    };

    let slacks = report::convert_slacks(&report, base);
    let feasible = report.feasible();
    let worst = report
        .worst()
        .map(|w| slacks.iter().find(|s| s.name == w.name).unwrap().clone());
    let text = report::render(&Envelope {
        config: PointCheckConfig {
            run: &cfg,
            point: PointIn {
                r: a.r,
                r_k: a.r_k,
                d_s: a.d_s,
                d_u: a.d_u,
                delta_s: a.delta_s,
                delta_u: a.delta_u,
                delta_su: a.delta_su,
                units: base.label(),
            },
            discrete: discrete.then(|| DiscreteFiles {
                pmf: a.pmf.clone().unwrap(),
                dmc_main: a.dmc_main.clone().unwrap(),
                dmc_eve: a.dmc_eve.clone().unwrap(),
                dist_s: a.dist_s.clone().unwrap(),
                dist_u: a.dist_u.clone().unwrap(),
            }),
        },
        results: FeasibilityOut { slacks: slacks.clone(), tol: report.tol },
        diagnostics: PointCheckDiag { model, feasible, worst: worst.clone() },
    })?;
    report::emit(a.out.as_deref(), &text)?;

    if !feasible {
        let w = worst.expect("an infeasible report has a worst slack");
        return Err(CliError::Infeasible(format!(
            "constraint {} violated by {} {}",
            w.name,
            -w.value,
            w.units
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct BaConfig<'a> {
    solver: Solver,
    pmf: &'a PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    dist_s: Option<&'a PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dist_u: Option<&'a PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    target_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    target_u: Option<f64>,
    log_base: LogBase,
    seed: u64,
}

#[derive(Serialize)]
struct BaOut {
    /// Minimum coding rate, in the configured log base.
    rate: f64,
    distortions: Vec<f64>,
    /// Slopes of the rate-distortion surface, per distortion unit in the
    /// configured log base.
    multipliers: Vec<f64>,
    iterations: usize,
    converged: bool,
}

#[derive(Serialize)]
struct BaDiag {
    converged: bool,
    iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'static str>,
}

fn ba(a: &BaArgs) -> Result<(), CliError> {
    let over = Overrides {
        seed: a.common.seed,
        log_base: a.common.log_base,
        ..Default::default()
    };
    let cfg = RunConfig::resolve(a.common.config.as_deref(), &over)?;
    let base = cfg.log_base;
    let pmf = parse_pmf(&read_text(&a.pmf)?)?;

    let load_dist = |path: &Option<PathBuf>, n: usize| -> Result<DistortionMatrix, CliError> {
        match path {
            Some(p) => Ok(parse_distortion(&read_text(p)?)?),
            None => Ok(DistortionMatrix::hamming(n)),
        }
    };
    let need = |t: Option<f64>, flag: &str| {
        t.ok_or_else(|| CliError::Config(format!("{flag} is required for this solver")))
    };
    let require_rank2 = || -> Result<(), CliError> {
        if pmf.rank() != 2 {
            return Err(CliError::Config(format!(
                "this solver needs a rank-2 (semantic, observed) PMF, got rank {}",
                pmf.rank()
            )));
        }
        Ok(())
    };

    let result: BAResult = match a.solver {
        Solver::Classic => {
            if pmf.rank() != 1 {
                return Err(CliError::Config(format!(
                    "the classic solver needs a rank-1 PMF, got rank {}",
                    pmf.rank()
                )));
            }
            let d = load_dist(&a.dist_u, pmf.dims()[0])?;
            ba_rdf_classic(pmf.probs(), &d, need(a.target_u, "--target-u")?)?
        }
        Solver::Indirect => {
            require_rank2()?;
            let d_s = load_dist(&a.dist_s, pmf.dims()[0])?;
            ba_rdf_indirect(&pmf, &d_s, need(a.target_s, "--target-s")?)?
        }
        Solver::Bivariate | Solver::Semantic => {
            require_rank2()?;
            let d_s = load_dist(&a.dist_s, pmf.dims()[0])?;
            let d_u = load_dist(&a.dist_u, pmf.dims()[1])?;
            let t_s = need(a.target_s, "--target-s")?;
            let t_u = need(a.target_u, "--target-u")?;
            if a.solver == Solver::Bivariate {
                ba_rdf_bivariate(&pmf, &d_s, &d_u, t_s, t_u)?
            } else {
                ba_rdf_semantic(&pmf, &d_s, &d_u, t_s, t_u)?
            }
        }
    };

    let text = report::render(&Envelope {
        config: BaConfig {
            solver: a.solver,
            pmf: &a.pmf,
            dist_s: a.dist_s.as_ref(),
            dist_u: a.dist_u.as_ref(),
            target_s: a.target_s,
            target_u: a.target_u,
            log_base: base,
            seed: cfg.seed,
        },
        results: BaOut {
            rate: base.from_nats(result.rate),
            distortions: result.distortions.clone(),
            multipliers: result.multipliers.iter().map(|&m| base.from_nats(m)).collect(),
            iterations: result.iterations,
            converged: result.converged,
        },
        diagnostics: BaDiag {
            converged: result.converged,
            iterations: result.iterations,
            // The final iterate is always an achievable pair; only the
            // certified optimality gap is affected by an iteration cap.
            note: (!result.converged)
                .then_some("iteration cap reached; rate may exceed the optimum by the residual dual gap"),
        },
    })?;
    report::emit(a.out.as_deref(), &text)
}

#[derive(Serialize)]
struct McDiag {
    passed: bool,
    checks: usize,
    failed: usize,
    warnings: usize,
}

fn mc_validate(a: &McArgs) -> Result<(), CliError> {
    let mut over = base_overrides(&a.common, &a.gauss);
    over.mc_n = a.n_samples;
    over.mc_r = a.r;
    let cfg = RunConfig::resolve(a.common.config.as_deref(), &over)?;
    let (src, ch) = gaussian_system(&cfg)?;
    let mc_cfg = McConfig { n_samples: cfg.mc.n_samples, seed: cfg.seed, chunk: cfg.mc.chunk };
    let mut validation = validate_inner_point(&src, &ch, &cfg.mc.params, cfg.mc.r, &mc_cfg)?;

    let base = cfg.log_base;
    // Equivocations of the evaluated point convert to the output base;
    // check entries keep each comparison's native units.
    validation.point.delta_s = base.from_nats(validation.point.delta_s);
    validation.point.delta_u = base.from_nats(validation.point.delta_u);
    validation.point.delta_su = base.from_nats(validation.point.delta_su);
    validation.delta_s_channel_closed = base.from_nats(validation.delta_s_channel_closed);
    validation.delta_s_channel_cov = base.from_nats(validation.delta_s_channel_cov);

    let diag = McDiag {
        passed: validation.passed,
        checks: validation.checks.len(),
        failed: validation.checks.iter().filter(|c| !c.pass).count(),
        warnings: validation.warnings.len(),
    };
    let text = report::render(&Envelope {
        config: &cfg,
        results: &validation,
        diagnostics: diag,
    })?;
    report::emit(a.out.as_deref(), &text)
}
