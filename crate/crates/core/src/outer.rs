//! Converse (outer) region for the Gaussian model, for an encoder that
//! observes only the noisy observation `U`.
//!
//! A point `(R, R_k, D_s, D_u, delta_s, delta_u, delta_su)` lies inside the
//! outer region iff all of the following hold (logs natural):
//!
//! 1. `D_s > eta` (semantic distortion floor),
//! 2. `max{R_u(D_u), R_s(D_s)} <= R * capacity_main`,
//! 3. `delta_u  <= R_k + R C_s + 1/2 log(2 pi e D_u)`,
//! 4. `delta_s  <= R_k + R C_s - 1/2 log^+(P_su^2 / (2 pi e P_s P_u (D_s - eta)))`,
//! 5. `delta_su <= R_k + R C_s - max{R_u(D_u), R_s(D_s)} + 1/2 log((2 pi e)^2 det_cov)`.
//!
//! The right-hand sides are evaluated exactly as written: the observation
//! bound (3) carries no `h(U)` term and none of the bounds are clamped at
//! the corresponding source entropy. They can therefore exceed `h(S)` or
//! drop below zero; callers compare, they do not reinterpret.

use serde::Serialize;
use thiserror::Error;

use crate::gauss::{GaussError, GaussianWiretapChannel, SemanticSourceGaussian, TWO_PI_E};
use crate::region::{FeasibilityReport, RegionError, RegionPoint, SecrecyMode, Slack, TraceGrid};
use crate::units::{log_plus, DEFAULT_TOL};

/// Absolute bisection tolerance on traced distortion boundaries.
pub const TRACE_BISECT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OuterError {
    #[error("semantic distortion {d_s} does not exceed the floor eta = {eta}")]
    DistortionBelowFloor { d_s: f64, eta: f64 },
    #[error("rate constraint violated: max rate-distortion demand {demand} nats exceeds r * capacity = {budget} nats")]
    RateInfeasible { demand: f64, budget: f64 },
    #[error(transparent)]
    Grid(#[from] RegionError),
    #[error(transparent)]
    Gauss(#[from] GaussError),
}

/// Right-hand sides of the three equivocation bounds, `-inf` when the
/// distortion floor is violated. Shared by the feasibility check, the
/// precondition-checked public op, and the tracer.
fn equivocation_rhs(
    r: f64,
    r_k: f64,
    d_s: f64,
    d_u: f64,
    src: &SemanticSourceGaussian,
    ch: &GaussianWiretapChannel,
) -> (f64, f64, f64) {
    let base = r_k + r * ch.secrecy_capacity();
    let rhs_u = base + 0.5 * (TWO_PI_E * d_u).ln();
    let gap = d_s - src.eta();
    if gap <= 0.0 {
        return (f64::NEG_INFINITY, rhs_u, f64::NEG_INFINITY);
    }
    let rhs_s = base - 0.5 * log_plus(src.p_su * src.p_su / (TWO_PI_E * src.p_s * src.p_u * gap));
    let max_rdf = src
        .rdf_observed(d_u)
        .map(|r_u| r_u.max(src.rdf_semantic_indirect(d_s)))
        .unwrap_or(f64::INFINITY);
    let rhs_su = base - max_rdf + 0.5 * (TWO_PI_E * TWO_PI_E * src.det_cov()).ln();
    (rhs_s, rhs_u, rhs_su)
}

/// Evaluates the five outer-region inequalities at `pt`.
///
/// Slack names: `ds_floor` (variance units), `rate_main`,
/// `equivocation_observed`, `equivocation_semantic`, `equivocation_joint`
/// (nats).
pub fn outer_feasible(
    pt: &RegionPoint,
    src: &SemanticSourceGaussian,
    ch: &GaussianWiretapChannel,
) -> FeasibilityReport {
    outer_feasible_with_tol(pt, src, ch, DEFAULT_TOL)
}

pub fn outer_feasible_with_tol(
    pt: &RegionPoint,
    src: &SemanticSourceGaussian,
    ch: &GaussianWiretapChannel,
    tol: f64,
) -> FeasibilityReport {
    let demand = match pt.d_u > 0.0 {
        true => src.rdf_observed(pt.d_u).unwrap().max(src.rdf_semantic_indirect(pt.d_s)),
        false => f64::INFINITY,
    };
    let rate_slack = pt.r * ch.capacity_main() - demand;
    let (rhs_s, rhs_u, rhs_su) = equivocation_rhs(pt.r, pt.r_k, pt.d_s, pt.d_u, src, ch);
    FeasibilityReport::with_tol(
        vec![
            Slack::variance("ds_floor", pt.d_s - src.eta()),
            Slack::nats("rate_main", rate_slack),
            Slack::nats("equivocation_observed", rhs_u - pt.delta_u),
            Slack::nats("equivocation_semantic", rhs_s - pt.delta_s),
            Slack::nats("equivocation_joint", rhs_su - pt.delta_su),
        ],
        tol,
    )
}

/// Largest equivocation triple `(delta_s, delta_u, delta_su)` compatible
/// with `(r, r_k, d_s, d_u)`, i.e. the right-hand sides of bounds 3-5.
///
/// Errors when the distortion floor or the rate constraint already fails;
/// use [`outer_feasible`] for a non-failing evaluation.
pub fn max_equivocations(
    r: f64,
    r_k: f64,
    d_s: f64,
    d_u: f64,
    src: &SemanticSourceGaussian,
    ch: &GaussianWiretapChannel,
) -> Result<(f64, f64, f64), OuterError> {
    if d_s <= src.eta() {
        return Err(OuterError::DistortionBelowFloor { d_s, eta: src.eta() });
    }
    let demand = src.rdf_observed(d_u)?.max(src.rdf_semantic_indirect(d_s));
    let budget = r * ch.capacity_main();
    if demand > budget + DEFAULT_TOL {
        return Err(OuterError::RateInfeasible { demand, budget });
    }
    let (rhs_s, rhs_u, rhs_su) = equivocation_rhs(r, r_k, d_s, d_u, src, ch);
    Ok((rhs_s, rhs_u, rhs_su))
}

/// One traced boundary cell. `d_s_boundary` and the equivocation bounds are
/// NaN when no distortion in the search interval supports the targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OuterTraceRow {
    pub r: f64,
    pub d_u: f64,
    pub d_s_boundary: f64,
    pub delta_s_max: f64,
    pub delta_u_max: f64,
    pub delta_su_max: f64,
}

/// Traces the minimal semantic distortion supporting the secrecy targets
/// over the `(r, d_u)` grid.
///
/// For each cell, bisects `d_s` over `[grid.d_s.first, grid.d_s.last]` to
/// absolute tolerance [`TRACE_BISECT_TOL`] and reports the smallest value
/// verified feasible under [`outer_feasible`]. Sweeps `r` in ascending
/// order and caps each search at the previous boundary, which the monotone
/// feasible set makes exact: reported boundaries never increase in `r`.
/// Rows are emitted in row-major `(r, d_u)` order.
pub fn trace_outer(
    src: &SemanticSourceGaussian,
    ch: &GaussianWiretapChannel,
    r_k: f64,
    grid: &TraceGrid,
    mode: SecrecyMode,
) -> Result<Vec<OuterTraceRow>, OuterError> {
    grid.validate()?;
    let (t_s, t_u, t_su) = mode.targets(src);
    let lo = grid.d_s[0];
    let hi = *grid.d_s.last().unwrap();

    let feasible = |r: f64, d_u: f64, d_s: f64| -> bool {
        let pt = RegionPoint {
            r,
            r_k,
            d_s,
            d_u,
            delta_s: t_s,
            delta_u: t_u,
            delta_su: t_su,
        };
        outer_feasible(&pt, src, ch).feasible()
    };

    let mut cells = vec![f64::NAN; grid.r.len() * grid.d_u.len()];
    for (j, &d_u) in grid.d_u.iter().enumerate() {
        let mut cap = hi;
        for (i, &r) in grid.r.iter().enumerate() {
            if !feasible(r, d_u, cap) {
                continue; // boundary above the cap cannot exist: stays NaN
            }
            let boundary = if feasible(r, d_u, lo) {
                lo
            } else {
                let (mut bad, mut good) = (lo, cap);
                while good - bad > TRACE_BISECT_TOL {
                    let mid = 0.5 * (bad + good);
                    if feasible(r, d_u, mid) {
                        good = mid;
                    } else {
                        bad = mid;
                    }
                }
                good
            };
            cells[i * grid.d_u.len() + j] = boundary;
            cap = boundary;
        }
    }

    let mut rows = Vec::with_capacity(cells.len());
    for (i, &r) in grid.r.iter().enumerate() {
        for (j, &d_u) in grid.d_u.iter().enumerate() {
            let b = cells[i * grid.d_u.len() + j];
            let (rhs_s, rhs_u, rhs_su) = if b.is_nan() {
                (f64::NAN, f64::NAN, f64::NAN)
            } else {
                equivocation_rhs(r, r_k, b, d_u, src, ch)
            };
            rows.push(OuterTraceRow {
                r,
                d_u,
                d_s_boundary: b,
                delta_s_max: rhs_s,
                delta_u_max: rhs_u,
                delta_su_max: rhs_su,
            });
        }
    }
    Ok(rows)
}
