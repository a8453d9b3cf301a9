//! Achievable (inner) region for the Gaussian model when the encoder sees
//! both the semantic state and the observation.
//!
//! The construction is layered linear-Gaussian. Source descriptions:
//! `A_p = alpha1 S + N(0, p_ap)` for the semantic state and
//! `B_p = alpha2 U + N(0, p_bp) + gamma S` for the observation. Channel
//! input, built from independent layers with powers summing to the budget
//! `P`: `Q_c ~ N(0, p_qc)`, `Q_p = Q_c + N(0, p_qp)`,
//! `W_c = Q_c + N(0, p_wc)`, `X = Q_c + N(0, p_qp) + N(0, p_wc) +
//! N(0, p_xt)`. The `Q` layers carry the semantic description, `W_c` and
//! the innovation `X~` carry the observation description.
//!
//! A tuple `(R, D_s, D_u, delta_s, delta_u, delta_su)` is achievable at
//! parameters `p` (secret-key rate zero, logs natural) if
//!
//! 1. `(1 + alpha1^2 P_s / p_ap) <= (1 + (p_qc + p_qp)/(p_wc + p_xt + P_N1))^R`,
//! 2. `(1 + alpha2^2 |K| / (P_s p_bp))
//!       <= (1 + p_wc/(p_xt + p_qp + P_N1))^R (1 + p_xt/P_N1)^R`,
//! 3. `D_s >= P_s - alpha1^2 P_s^2 / (alpha1^2 P_s + p_ap)`,
//! 4. `D_u >= P_u - alpha2^2 P_u^2 / (alpha2^2 P_u + p_bp)`,
//! 5. `delta_s <= 1/2 log(2 pi e P_s p_ap / (alpha1^2 P_s + p_ap))
//!       + (R/2) log(P_N (P - p_qc) / ((p_wc + p_xt + P_N1)(P - p_qc + P_N)))`,
//! 6. `delta_u <= 1/2 log(2 pi e P_s P_u p_ap p_bp /
//!       ((alpha1^2 P_s + p_ap)(alpha2^2 |K| + P_s p_bp)))
//!       + (R/2) log(P_N (p_xt + P_N1)(p_qp + p_wc + p_xt + P_N1) /
//!                   (P_N1 (p_wc + p_xt + P_N1)(p_qp + p_xt + P_N)))`,
//! 7. `delta_su` bounded by the joint-source analogue of 6 (same channel
//!    term, `(2 pi e)^2 |K|` in place of `2 pi e P_s P_u`),
//!
//! where `|K|` is the source covariance determinant. The right-hand sides
//! are evaluated exactly as written. [`optimize_inner`] searches the
//! parameter space for the best achievable point; [`trace_inner`] maps the
//! distortion boundary that supports given equivocation floors.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gauss::{GaussianWiretapChannel, SemanticSourceGaussian, TWO_PI_E};
use crate::optim::{halton, nelder_mead};
use crate::region::{FeasibilityReport, RegionError, SecrecyMode, Slack, TraceGrid};
use crate::units::DEFAULT_TOL;

/// Absolute bisection tolerance on traced distortion boundaries. Coarser
/// than the converse tracer's: each probe is a full optimizer run.
pub const INNER_TRACE_TOL: f64 = 1e-6;

/// Hard cap on distortion-target overshoot for reported points.
const DIST_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InnerError {
    #[error("parameter {name} = {value} must be nonnegative and finite")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("channel layer powers sum to {sum}, budget is {power}")]
    PowerBudget { sum: f64, power: f64 },
    #[error("degenerate {side} estimator: description gain and noise are both zero")]
    DegenerateEstimator { side: &'static str },
    #[error("log argument {factor} = {value} must be positive")]
    NonPositiveLogArgument { factor: &'static str, value: f64 },
    #[error("distortion target {name} = {value} outside (0, {max}]")]
    InvalidTarget { name: &'static str, value: f64, max: f64 },
    #[error(transparent)]
    Grid(#[from] RegionError),
}

/// Parameters of the layered scheme. Powers are variances; `p_ap`, `p_bp`
/// are the description-noise powers and the remaining four are the channel
/// layer powers, which must sum to the channel budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerParams {
    pub alpha1: f64,
    pub alpha2: f64,
    /// Semantic leakage gain into the observation description. Carried by
    /// the construction but absent from every closed form above; the
    /// optimizer holds it at zero.
    #[serde(default)]
    pub gamma: f64,
    pub p_ap: f64,
    pub p_bp: f64,
    pub p_qc: f64,
    pub p_qp: f64,
    pub p_wc: f64,
    pub p_xt: f64,
}

impl InnerParams {
    pub fn channel_power(&self) -> f64 {
        self.p_qc + self.p_qp + self.p_wc + self.p_xt
    }

    /// Checks signs, finiteness, and the channel power budget
    /// (`|sum - P| <= 1e-9 max(1, P)`).
    pub fn validate(&self, ch: &GaussianWiretapChannel) -> Result<(), InnerError> {
        for (name, value) in [
            ("p_ap", self.p_ap),
            ("p_bp", self.p_bp),
            ("p_qc", self.p_qc),
            ("p_qp", self.p_qp),
            ("p_wc", self.p_wc),
            ("p_xt", self.p_xt),
        ] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(InnerError::InvalidParameter { name, value });
            }
        }
        for (name, value) in
            [("alpha1", self.alpha1), ("alpha2", self.alpha2), ("gamma", self.gamma)]
        {
            if !value.is_finite() {
                return Err(InnerError::InvalidParameter { name, value });
            }
        }
        let sum = self.channel_power();
        if (sum - ch.power).abs() > 1e-9 * ch.power.max(1.0) {
            return Err(InnerError::PowerBudget { sum, power: ch.power });
        }
        Ok(())
    }
}

/// An evaluated operating point of the scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InnerPoint {
    pub params: InnerParams,
    pub r: f64,
    pub d_s: f64,
    pub d_u: f64,
    pub delta_s: f64,
    pub delta_u: f64,
    pub delta_su: f64,
    pub rate_ok: bool,
}

impl InnerPoint {
    /// Full evaluation of `params` at rate `r`: closed-form distortions,
    /// rate feasibility, and equivocation bounds.
    pub fn evaluate(
        params: &InnerParams,
        src: &SemanticSourceGaussian,
        ch: &GaussianWiretapChannel,
        r: f64,
    ) -> Result<Self, InnerError> {
        let (d_s, d_u) = mmse_distortions(params, src)?;
        let rep = rate_feasible(params, src, ch, r)?;
        let (delta_s, delta_u, delta_su) = inner_equivocations(params, src, ch, r)?;
        Ok(InnerPoint {
            params: *params,
            r,
            d_s,
            d_u,
            delta_s,
            delta_u,
            delta_su,
            rate_ok: rep.feasible(),
        })
    }
}

/// Closed-form MMSE distortions `(D_s, D_u)` of the two descriptions:
/// `S` estimated from `A_p`, `U` from `B_p`.
pub fn mmse_distortions(
    p: &InnerParams,
    src: &SemanticSourceGaussian,
) -> Result<(f64, f64), InnerError> {
    for (name, value) in [("p_ap", p.p_ap), ("p_bp", p.p_bp)] {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(InnerError::InvalidParameter { name, value });
        }
    }
    let denom_s = p.alpha1 * p.alpha1 * src.p_s + p.p_ap;
    if denom_s == 0.0 {
        return Err(InnerError::DegenerateEstimator { side: "semantic" });
    }
    let denom_u = p.alpha2 * p.alpha2 * src.p_u + p.p_bp;
    if denom_u == 0.0 {
        return Err(InnerError::DegenerateEstimator { side: "observation" });
    }
    let d_s = src.p_s - p.alpha1 * p.alpha1 * src.p_s * src.p_s / denom_s;
    let d_u = src.p_u - p.alpha2 * p.alpha2 * src.p_u * src.p_u / denom_u;
    Ok((d_s, d_u))
}

/// Signed slacks (nats) of the two source-channel matching inequalities:
/// description rate of each layer against what its channel layers carry
/// over `r` uses.
///
/// Slack names: `rate_semantic_layer`, `rate_observation_layer`.
pub fn rate_feasible(
    p: &InnerParams,
    src: &SemanticSourceGaussian,
    ch: &GaussianWiretapChannel,
    r: f64,
) -> Result<FeasibilityReport, InnerError> {
    p.validate(ch)?;
    for (name, value) in [("p_ap", p.p_ap), ("p_bp", p.p_bp)] {
        if value <= 0.0 {
            return Err(InnerError::InvalidParameter { name, value });
        }
    }
    let lhs1 = (p.alpha1 * p.alpha1 * src.p_s / p.p_ap).ln_1p();
    let rhs1 = r * ((p.p_qc + p.p_qp) / (p.p_wc + p.p_xt + ch.p_n1)).ln_1p();
    let lhs2 = (p.alpha2 * p.alpha2 * src.det_cov() / (src.p_s * p.p_bp)).ln_1p();
    let rhs2 = r
        * ((p.p_wc / (p.p_xt + p.p_qp + ch.p_n1)).ln_1p() + (p.p_xt / ch.p_n1).ln_1p());
    Ok(FeasibilityReport::new(vec![
        Slack::nats("rate_semantic_layer", rhs1 - lhs1),
        Slack::nats("rate_observation_layer", rhs2 - lhs2),
    ]))
}

/// Right-hand sides of the three equivocation bounds at parameters `p`,
/// in nats. Evaluated verbatim; the semantic channel term can be negative
/// (leakage exceeding the key-free budget) and no clamping is applied.
pub fn inner_equivocations(
    p: &InnerParams,
    src: &SemanticSourceGaussian,
    ch: &GaussianWiretapChannel,
    r: f64,
) -> Result<(f64, f64, f64), InnerError> {
    p.validate(ch)?;
    let det = src.det_cov();
    let p_res = p.p_qp + p.p_wc + p.p_xt; // = P - p_qc without cancellation
    for (factor, value) in [
        ("p_ap", p.p_ap),
        ("p_bp", p.p_bp),
        ("det_cov", det),
        ("p_qp + p_wc + p_xt", p_res),
    ] {
        if value <= 0.0 {
            return Err(InnerError::NonPositiveLogArgument { factor, value });
        }
    }
    let denom_s = p.alpha1 * p.alpha1 * src.p_s + p.p_ap;
    let denom_u = p.alpha2 * p.alpha2 * det + src.p_s * p.p_bp;
    let p_n = ch.p_n();

    let source_s = 0.5 * (TWO_PI_E * src.p_s * p.p_ap / denom_s).ln();
    let chan_s = 0.5
        * r
        * (p_n * p_res / ((p.p_wc + p.p_xt + ch.p_n1) * (p_res + p_n))).ln();

    let source_u =
        0.5 * (TWO_PI_E * src.p_s * src.p_u * p.p_ap * p.p_bp / (denom_s * denom_u)).ln();
    let chan_u = 0.5
        * r
        * (p_n * (p.p_xt + ch.p_n1) * (p.p_qp + p.p_wc + p.p_xt + ch.p_n1)
            / (ch.p_n1 * (p.p_wc + p.p_xt + ch.p_n1) * (p.p_qp + p.p_xt + p_n)))
        .ln();

    let source_su =
        0.5 * (TWO_PI_E * TWO_PI_E * det * src.p_s * p.p_ap * p.p_bp / (denom_s * denom_u)).ln();

    Ok((source_s + chan_s, source_u + chan_u, source_su + chan_u))
}

/// Upper bounds the reported point must not exceed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionTargets {
    pub d_s: f64,
    pub d_u: f64,
}

/// Which equivocation bound [`optimize_inner`] maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    DeltaS,
    DeltaU,
    DeltaSu,
}

impl Objective {
    fn pick(&self, e: (f64, f64, f64)) -> f64 {
        match self {
            Objective::DeltaS => e.0,
            Objective::DeltaU => e.1,
            Objective::DeltaSu => e.2,
        }
    }
}

/// Search budget and acceptance filters for [`optimize_inner`].
#[derive(Debug, Clone, Serialize)]
pub struct OptimizeOptions {
    pub multistarts: usize,
    pub seed: u64,
    pub nm_max_iters: usize,
    /// Minimum `(delta_s, delta_u, delta_su)` a candidate must reach to be
    /// reported (hard filter, tolerance 1e-9).
    pub floors: Option<(f64, f64, f64)>,
    /// Parameter sets tried directly and used as extra search starts.
    pub warm_starts: Vec<InnerParams>,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            multistarts: 32,
            seed: 0,
            nm_max_iters: 300,
            floors: None,
            warm_starts: Vec::new(),
        }
    }
}

/// Power split proportional to targeted per-layer rates would need the
/// optimizer anyway; this start just matches the distortion targets
/// exactly at unit gains and splits the channel budget evenly.
fn heuristic_params(src: &SemanticSourceGaussian, power: f64, t: DistortionTargets) -> InnerParams {
    let split = power / 4.0;
    let noise = |prior: f64, target: f64| -> f64 {
        if target < prior {
            prior * target / (prior - target)
        } else {
            1e13
        }
    };
    InnerParams {
        alpha1: 1.0,
        alpha2: 1.0,
        gamma: 0.0,
        p_ap: noise(src.p_s, t.d_s),
        p_bp: noise(src.p_u, t.d_u),
        p_qc: split,
        p_qp: split,
        p_wc: split,
        p_xt: split,
    }
}

/// Zero-gain descriptions: distortions equal the priors, nothing leaks
/// through the source layer. Feasible at any rate.
fn baseline_params(src: &SemanticSourceGaussian, power: f64) -> InnerParams {
    let split = power / 4.0;
    InnerParams {
        alpha1: 0.0,
        alpha2: 0.0,
        gamma: 0.0,
        p_ap: src.p_s,
        p_bp: src.p_u,
        p_qc: split,
        p_qp: split,
        p_wc: split,
        p_xt: split,
    }
}

fn params_key(p: &InnerParams) -> [f64; 9] {
    [p.alpha1, p.alpha2, p.gamma, p.p_ap, p.p_bp, p.p_qc, p.p_qp, p.p_wc, p.p_xt]
}

/// True when `a` should replace `b` as incumbent: larger objective, ties
/// broken toward the lexicographically smaller parameter vector so the
/// reduction is order-independent.
fn improves(a: &(f64, InnerPoint), b: &(f64, InnerPoint)) -> bool {
    if a.0 != b.0 {
        return a.0 > b.0;
    }
    let (ka, kb) = (params_key(&a.1.params), params_key(&b.1.params));
    for (x, y) in ka.iter().zip(&kb) {
        if x != y {
            return x < y;
        }
    }
    false
}

fn admissible(pt: &InnerPoint, t: DistortionTargets, floors: Option<(f64, f64, f64)>) -> bool {
    if !pt.rate_ok || pt.d_s > t.d_s + DIST_TOL || pt.d_u > t.d_u + DIST_TOL {
        return false;
    }
    match floors {
        Some((f_s, f_u, f_su)) => {
            pt.delta_s >= f_s - DEFAULT_TOL
                && pt.delta_u >= f_u - DEFAULT_TOL
                && pt.delta_su >= f_su - DEFAULT_TOL
        }
        None => true,
    }
}

/// Search-space encoding: four logits (softmax onto the power simplex,
/// scaled by the budget), log description-noise powers, and the two gains.
fn decode(x: &[f64], power: f64) -> InnerParams {
    let mut w = [0.0f64; 4];
    let mx = x[..4].iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b.clamp(-30.0, 30.0)));
    let mut z = 0.0;
    for k in 0..4 {
        w[k] = (x[k].clamp(-30.0, 30.0) - mx).exp();
        z += w[k];
    }
    InnerParams {
        alpha1: x[6].abs(),
        alpha2: x[7].abs(),
        gamma: 0.0,
        p_ap: x[4].clamp(-30.0, 30.0).exp(),
        p_bp: x[5].clamp(-30.0, 30.0).exp(),
        p_qc: power * w[0] / z,
        p_qp: power * w[1] / z,
        p_wc: power * w[2] / z,
        p_xt: power * w[3] / z,
    }
}

fn encode(p: &InnerParams) -> Vec<f64> {
    let l = |v: f64| v.max(1e-12).ln();
    vec![
        l(p.p_qc),
        l(p.p_qp),
        l(p.p_wc),
        l(p.p_xt),
        l(p.p_ap),
        l(p.p_bp),
        p.alpha1.abs(),
        p.alpha2.abs(),
    ]
}

fn hinge(v: f64) -> f64 {
    let v = v.max(0.0);
    v + v * v
}

/// Best achievable point at rate `r` under the distortion targets,
/// maximizing `objective`.
///
/// Multistart Nelder-Mead over the 8-dimensional encoding (the power
/// simplex is built into the encoding, so every candidate meets the budget
/// exactly). Constraint violations are penalized during the search but
/// reported incumbents must pass hard filters: rate slacks `>= -1e-9`,
/// distortions within `1e-12` of target, floors within `1e-9`. Returns
/// `None` when no admissible point is found; deterministic for a fixed
/// seed.
pub fn optimize_inner(
    src: &SemanticSourceGaussian,
    ch: &GaussianWiretapChannel,
    r: f64,
    targets: DistortionTargets,
    objective: Objective,
    opts: &OptimizeOptions,
) -> Result<Option<InnerPoint>, InnerError> {
    if !(targets.d_s > 0.0 && targets.d_s <= src.p_s) {
        return Err(InnerError::InvalidTarget { name: "d_s", value: targets.d_s, max: src.p_s });
    }
    if !(targets.d_u > 0.0 && targets.d_u <= src.p_u) {
        return Err(InnerError::InvalidTarget { name: "d_u", value: targets.d_u, max: src.p_u });
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(InnerError::InvalidParameter { name: "r", value: r });
    }

    let score = |params: &InnerParams| -> Option<(f64, InnerPoint)> {
        let pt = InnerPoint::evaluate(params, src, ch, r).ok()?;
        admissible(&pt, targets, opts.floors)
            .then(|| (objective.pick((pt.delta_s, pt.delta_u, pt.delta_su)), pt))
    };
    let cost = |x: &[f64]| -> f64 {
        let p = decode(x, ch.power);
        let Ok(pt) = InnerPoint::evaluate(&p, src, ch, r) else {
            return 1e15;
        };
        let Ok(rep) = rate_feasible(&p, src, ch, r) else {
            return 1e15;
        };
        let mut pen = 0.0;
        for s in &rep.slacks {
            pen += hinge(-s.value);
        }
        pen += hinge(pt.d_s - targets.d_s) + hinge(pt.d_u - targets.d_u);
        if let Some((f_s, f_u, f_su)) = opts.floors {
            pen += hinge(f_s - pt.delta_s) + hinge(f_u - pt.delta_u) + hinge(f_su - pt.delta_su);
        }
        -objective.pick((pt.delta_s, pt.delta_u, pt.delta_su)) + 1e3 * pen
    };

    let mut best: Option<(f64, InnerPoint)> = None;
    let consider = |cand: Option<(f64, InnerPoint)>, best: &mut Option<(f64, InnerPoint)>| {
        if let Some(c) = cand {
            if best.as_ref().map_or(true, |b| improves(&c, b)) {
                *best = Some(c);
            }
        }
    };

    let mut starts: Vec<Vec<f64>> = Vec::new();
    for w in &opts.warm_starts {
        consider(score(w), &mut best);
        starts.push(encode(w));
    }
    for p0 in [heuristic_params(src, ch.power, targets), baseline_params(src, ch.power)] {
        consider(score(&p0), &mut best);
        starts.push(encode(&p0));
    }
    let offset = opts.seed % 1_000_003;
    for i in 0..opts.multistarts as u64 {
        let h = halton(offset + i, 8);
        starts.push(vec![
            6.0 * (h[0] - 0.5),
            6.0 * (h[1] - 0.5),
            6.0 * (h[2] - 0.5),
            6.0 * (h[3] - 0.5),
            -7.0 + 12.0 * h[4],
            -7.0 + 12.0 * h[5],
            3.0 * h[6],
            3.0 * h[7],
        ]);
    }

    let steps = [0.5, 0.5, 0.5, 0.5, 0.4, 0.4, 0.2, 0.2];
    for x0 in &starts {
        let (x, _) = nelder_mead(&cost, x0, &steps, opts.nm_max_iters);
        consider(score(&decode(&x, ch.power)), &mut best);
    }
    Ok(best.map(|(_, pt)| pt))
}

/// One traced boundary cell. NaN boundary (and `None` params) marks a cell
/// where no admissible parameters were found in the search interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InnerTraceRow {
    pub r: f64,
    pub d_u: f64,
    pub d_s_boundary: f64,
    pub delta_s: f64,
    pub delta_u: f64,
    pub delta_su: f64,
    pub params: Option<InnerParams>,
}

/// Traces the minimal semantic distortion target supporting the mode's
/// equivocation floors over the `(r, d_u)` grid.
///
/// Bisects the `d_s` target over `[grid.d_s.first, min(grid.d_s.last, P_s)]`
/// to [`INNER_TRACE_TOL`]; each probe asks [`optimize_inner`] (objective
/// `delta_s`, floors from `mode`) for an admissible point, trying the
/// previous cell's parameters first. Sweeps `r` ascending per `d_u` column,
/// capping each search at the previous boundary and reusing its witness as
/// a warm start. At floors that force a nonnegative semantic channel term
/// (any full-secrecy target does), a witness stays admissible at larger
/// `r`, so the cap is exact and reported boundaries never increase in `r`.
/// Every reported cell carries the witness parameters and its achieved
/// equivocations, independently re-checkable via [`inner_equivocations`].
pub fn trace_inner(
    src: &SemanticSourceGaussian,
    ch: &GaussianWiretapChannel,
    grid: &TraceGrid,
    mode: SecrecyMode,
    opts: &OptimizeOptions,
) -> Result<Vec<InnerTraceRow>, InnerError> {
    grid.validate()?;
    let floors = mode.targets(src);
    let lo = grid.d_s[0];
    let hi = grid.d_s.last().unwrap().min(src.p_s);
    if lo >= hi {
        return Err(InnerError::InvalidTarget { name: "d_s", value: lo, max: hi });
    }

    let mut cells: Vec<Option<(f64, InnerPoint)>> = vec![None; grid.r.len() * grid.d_u.len()];
    for (j, &d_u) in grid.d_u.iter().enumerate() {
        let d_u_t = d_u.min(src.p_u);
        let mut cap = hi;
        let mut warm: Vec<InnerParams> = Vec::new();
        for (i, &r) in grid.r.iter().enumerate() {
            let probe = |t_ds: f64, pool: &[InnerParams]| -> Option<InnerPoint> {
                let t = DistortionTargets { d_s: t_ds, d_u: d_u_t };
                let direct = pool
                    .iter()
                    .copied()
                    .chain([heuristic_params(src, ch.power, t)])
                    .filter_map(|p| InnerPoint::evaluate(&p, src, ch, r).ok())
                    .find(|pt| admissible(pt, t, Some(floors)));
                direct.or_else(|| {
                    let mut o = opts.clone();
                    o.floors = Some(floors);
                    o.warm_starts = pool.to_vec();
                    optimize_inner(src, ch, r, t, Objective::DeltaS, &o).unwrap_or(None)
                })
            };

            let Some(mut witness) = probe(cap, &warm) else {
                continue; // nothing admissible even at the cap: cell stays NaN
            };
            // A witness admissible at target t achieves d_s <= t, so its own
            // distortion tightens the boundary for free.
            let mut good = witness.d_s.max(lo).min(cap);
            let mut bad = lo;
            while good - bad > INNER_TRACE_TOL {
                let mid = 0.5 * (bad + good);
                let pool: Vec<InnerParams> =
                    std::iter::once(witness.params).chain(warm.iter().copied()).collect();
                match probe(mid, &pool) {
                    Some(pt) => {
                        good = pt.d_s.max(lo).min(mid);
                        witness = pt;
                    }
                    None => bad = mid,
                }
            }
            cap = good;
            warm = vec![witness.params];
            cells[i * grid.d_u.len() + j] = Some((good, witness));
        }
    }

    let mut rows = Vec::with_capacity(cells.len());
    for (i, &r) in grid.r.iter().enumerate() {
        for (j, &d_u) in grid.d_u.iter().enumerate() {
            let row = match &cells[i * grid.d_u.len() + j] {
                Some((boundary, pt)) => InnerTraceRow {
                    r,
                    d_u,
                    d_s_boundary: *boundary,
                    delta_s: pt.delta_s,
                    delta_u: pt.delta_u,
                    delta_su: pt.delta_su,
                    params: Some(pt.params),
                },
                None => InnerTraceRow {
                    r,
                    d_u,
                    d_s_boundary: f64::NAN,
                    delta_s: f64::NAN,
                    delta_u: f64::NAN,
                    delta_su: f64::NAN,
                    params: None,
                },
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig() -> (SemanticSourceGaussian, GaussianWiretapChannel) {
        (
            SemanticSourceGaussian::new(0.7, 1.0, 0.5).unwrap(),
            GaussianWiretapChannel::new(1.0, 0.10, 0.15).unwrap(),
        )
    }

    fn canonical() -> InnerParams {
        InnerParams {
            alpha1: 1.0,
            alpha2: 1.0,
            gamma: 0.0,
            p_ap: 0.7,
            p_bp: 0.45,
            p_qc: 0.4,
            p_qp: 0.3,
            p_wc: 0.2,
            p_xt: 0.1,
        }
    }

    #[test]
    fn canonical_point_frozen_values() {
        let (src, ch) = fig();
        let p = canonical();
        let (d_s, d_u) = mmse_distortions(&p, &src).unwrap();
        assert!((d_s - 0.35).abs() < 1e-15);
        assert!((d_u - 0.3103448275862069).abs() < 1e-15);
        let (e_s, e_u, e_su) = inner_equivocations(&p, &src, &ch, 1.0).unwrap();
        assert!((e_s - 0.4848723091983582).abs() < 1e-12);
        assert!((e_u - 0.7773391071582145).abs() < 1e-12);
        assert!((e_su - 1.7970237922540016).abs() < 1e-12);
    }

    #[test]
    fn zero_gain_distortion_is_prior() {
        let (src, _) = fig();
        let mut p = canonical();
        p.alpha1 = 0.0;
        let (d_s, _) = mmse_distortions(&p, &src).unwrap();
        assert_eq!(d_s, src.p_s);
        p.p_ap = 0.0;
        assert!(matches!(
            mmse_distortions(&p, &src),
            Err(InnerError::DegenerateEstimator { side: "semantic" })
        ));
    }

    #[test]
    fn zero_rate_needs_zero_gains() {
        let (src, ch) = fig();
        let rep = rate_feasible(&canonical(), &src, &ch, 0.0).unwrap();
        assert!(!rep.feasible());
        let mut p = baseline_params(&src, ch.power);
        p.p_ap = 1.0;
        p.p_bp = 1.0;
        let rep = rate_feasible(&p, &src, &ch, 0.0).unwrap();
        assert!(rep.feasible());
        assert_eq!(rep.slack("rate_semantic_layer"), Some(0.0));
    }

    #[test]
    fn zero_semantic_gain_leaks_nothing() {
        let (src, ch) = fig();
        let mut p = canonical();
        p.alpha1 = 0.0;
        let (e_s, _, _) = inner_equivocations(&p, &src, &ch, 1.0).unwrap();
        // Source term is h(S); only the channel term remains.
        let chan = 0.5 * (0.25 * 0.6 / (0.4 * 0.85f64)).ln();
        assert!((e_s - (src.diff_entropy_s() + chan)).abs() < 1e-12);
    }

    #[test]
    fn full_common_layer_is_degenerate() {
        let (src, ch) = fig();
        let mut p = canonical();
        p.p_qc = 1.0;
        p.p_qp = 0.0;
        p.p_wc = 0.0;
        p.p_xt = 0.0;
        let err = inner_equivocations(&p, &src, &ch, 1.0).unwrap_err();
        assert!(matches!(
            err,
            InnerError::NonPositiveLogArgument { factor: "p_qp + p_wc + p_xt", .. }
        ));
    }

    #[test]
    fn budget_violation_rejected() {
        let (src, ch) = fig();
        let mut p = canonical();
        p.p_xt = 0.2;
        assert!(matches!(
            rate_feasible(&p, &src, &ch, 1.0),
            Err(InnerError::PowerBudget { .. })
        ));
    }

    #[test]
    fn optimizer_beats_baseline_without_pressure() {
        let (src, ch) = fig();
        let targets = DistortionTargets { d_s: src.p_s, d_u: src.p_u };
        let opts = OptimizeOptions { multistarts: 8, ..OptimizeOptions::default() };
        let pt = optimize_inner(&src, &ch, 1.0, targets, Objective::DeltaS, &opts)
            .unwrap()
            .expect("baseline is admissible");
        let base = InnerPoint::evaluate(&baseline_params(&src, ch.power), &src, &ch, 1.0).unwrap();
        assert!(pt.delta_s >= base.delta_s - 1e-12);
        assert!(pt.d_s <= targets.d_s + 1e-12);
        assert!((pt.params.channel_power() - ch.power).abs() < 1e-12);
    }
}
