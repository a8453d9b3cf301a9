//! Evaluators for the two general single-letter inequality systems: a
//! converse system phrased through rate-distortion functions and channel
//! capacities, and an achievability system phrased through a layered
//! auxiliary structure with common and private description layers.

use serde::Serialize;

use super::channel::{capacity, max_secrecy_rate, Dmc};
use super::info::{
    conditional_entropy, conditional_mi, mutual_information, subset_entropy, JointPMF,
};
use super::rdf::{ba_rdf_bivariate, ba_rdf_classic, ba_rdf_indirect, DistortionMatrix};
use super::DiscreteError;
use crate::region::{FeasibilityReport, RegionPoint, Slack};

/// Deterministic reconstruction table over a tuple of finite alphabets,
/// row-major like [`JointPMF`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconMap {
    dims: Vec<usize>,
    out_size: usize,
    table: Vec<usize>,
}

impl ReconMap {
    pub fn new(
        dims: Vec<usize>,
        out_size: usize,
        table: Vec<usize>,
    ) -> Result<Self, DiscreteError> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) || out_size == 0 {
            return Err(DiscreteError::InvalidAxes);
        }
        let expected: usize = dims.iter().product();
        if table.len() != expected {
            return Err(DiscreteError::DimensionMismatch { expected, got: table.len() });
        }
        if let Some(&value) = table.iter().find(|&&v| v >= out_size) {
            return Err(DiscreteError::ReconOutOfRange { value, out_size });
        }
        Ok(Self { dims, out_size, table })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn out_size(&self) -> usize {
        self.out_size
    }

    pub fn apply(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dims.len());
        let mut flat = 0;
        for (k, &i) in idx.iter().enumerate() {
            debug_assert!(i < self.dims[k]);
            flat = flat * self.dims[k] + i;
        }
        self.table[flat]
    }
}

fn rate_or_inf(result: Result<super::BAResult, DiscreteError>) -> Result<f64, DiscreteError> {
    match result {
        Ok(out) => Ok(out.rate),
        // A distortion below its floor has an infinite rate demand: the
        // point is outside the region, not a solver failure.
        Err(DiscreteError::InfeasibleDistortion { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// Checks a candidate tuple against the general converse system. Each
/// inequality bounds a rate-distortion demand by the best the channel
/// pair can offer, maximized over input laws inequality by inequality:
///
/// - three rate constraints against `r` times the main-channel capacity,
/// - three equivocation ceilings of the form
///   `r_k + r * max(I(X;Y) - I(X;Z)) - R(.) + H(.)`.
///
/// Slack convention: `bound - demand`, nonnegative when satisfied.
pub fn converse_check_discrete(
    point: &RegionPoint,
    p_su: &JointPMF,
    d_s: &DistortionMatrix,
    d_u: &DistortionMatrix,
    main: &Dmc,
    eve_given_y: &Dmc,
) -> Result<FeasibilityReport, DiscreteError> {
    if p_su.rank() != 2 {
        return Err(DiscreteError::DimensionMismatch { expected: 2, got: p_su.rank() });
    }
    let p_u = p_su.marginal(&[1])?;
    let r_u = rate_or_inf(ba_rdf_classic(p_u.probs(), d_u, point.d_u))?;
    let r_s = rate_or_inf(ba_rdf_indirect(p_su, d_s, point.d_s))?;
    let r_joint = rate_or_inf(ba_rdf_bivariate(p_su, d_s, d_u, point.d_s, point.d_u))?;
    let (c_main, _) = capacity(main)?;
    let (c_sec, _) = max_secrecy_rate(main, eve_given_y)?;
    let h_s = subset_entropy(p_su, &[0])?;
    let h_u = subset_entropy(p_su, &[1])?;
    let h_su = p_su.entropy();
    let budget = point.r_k + point.r * c_sec;
    Ok(FeasibilityReport::new(vec![
        Slack::nats("rate_observed", point.r * c_main - r_u),
        Slack::nats("rate_semantic", point.r * c_main - r_s),
        Slack::nats("rate_joint", point.r * c_main - r_joint),
        Slack::nats("equivocation_observed", budget - r_u + h_u - point.delta_u),
        Slack::nats("equivocation_semantic", budget - r_s + h_s - point.delta_s),
        Slack::nats("equivocation_joint", budget - r_joint + h_su - point.delta_su),
    ]))
}

/// Every information term of the achievability system, in nats. The
/// source side lives on `(S, U, A_c, A_p, B_c, B_p)`, the channel side
/// on `(Q_c, Q_p, W_c, X, Y, Z)`; the two blocks are independent by
/// construction since they come from separate joint laws.
#[derive(Debug, Clone, Serialize)]
pub struct AchievabilityTerms {
    pub i_s_ac: f64,
    pub i_s_acap: f64,
    pub i_u_bc_given_s_ac: f64,
    pub i_u_bp_given_s_acapbc: f64,
    /// Conditioned on the common description alone, without the state.
    pub i_u_bc_given_ac: f64,
    pub h_s: f64,
    pub h_u: f64,
    pub h_su: f64,
    pub h_s_given_acap: f64,
    pub i_qc_y: f64,
    pub i_y_qcqp: f64,
    pub i_wc_y_given_qc: f64,
    pub i_x_y_given_qcqpwc: f64,
    pub i_qp_y_given_qc: f64,
    pub h_z_given_x: f64,
    pub h_z_given_qc: f64,
    pub h_z_given_qcwc: f64,
}

/// Achieved operating values of one auxiliary choice: expected
/// distortions, the three equivocation floors the construction
/// guarantees, and the four layered rate constraints at `r`.
#[derive(Debug, Clone, Serialize)]
pub struct AchievabilityResult {
    pub terms: AchievabilityTerms,
    pub r: f64,
    pub d_s: f64,
    pub d_u: f64,
    pub delta_s: f64,
    pub delta_u: f64,
    pub delta_su: f64,
    pub rate_slacks: FeasibilityReport,
}

impl AchievabilityResult {
    /// Slacks of a candidate tuple against this auxiliary choice: the
    /// rate layers must fit, the targets must dominate the achieved
    /// distortions, and the requested equivocations must not exceed the
    /// guaranteed floors.
    pub fn check_point(
        &self,
        d_s: f64,
        d_u: f64,
        delta_s: f64,
        delta_u: f64,
        delta_su: f64,
    ) -> FeasibilityReport {
        let mut slacks = self.rate_slacks.slacks.clone();
        slacks.push(Slack::distortion("distortion_semantic", d_s - self.d_s));
        slacks.push(Slack::distortion("distortion_observed", d_u - self.d_u));
        slacks.push(Slack::nats("equivocation_semantic", self.delta_s - delta_s));
        slacks.push(Slack::nats("equivocation_observed", self.delta_u - delta_u));
        slacks.push(Slack::nats("equivocation_joint", self.delta_su - delta_su));
        FeasibilityReport::new(slacks)
    }
}

/// Evaluates the achievability system for one auxiliary structure.
///
/// `source_aux` is the joint law of `(S, U, A_c, A_p, B_c, B_p)`;
/// `channel_aux` the law of `(Q_c, Q_p, W_c, X)`. The eavesdropper
/// observes the legitimate output through `eve_given_y`, so the pair is
/// degraded by construction. `p_su` is the reference source law; the
/// `(S, U)` marginal of `source_aux` must match it within 1e-9.
#[allow(clippy::too_many_arguments)]
pub fn achievability_check_discrete(
    source_aux: &JointPMF,
    channel_aux: &JointPMF,
    main: &Dmc,
    eve_given_y: &Dmc,
    recon_s: &ReconMap,
    recon_u: &ReconMap,
    d_s: &DistortionMatrix,
    d_u: &DistortionMatrix,
    r: f64,
    p_su: &JointPMF,
) -> Result<AchievabilityResult, DiscreteError> {
    if source_aux.rank() != 6 {
        return Err(DiscreteError::DimensionMismatch { expected: 6, got: source_aux.rank() });
    }
    if channel_aux.rank() != 4 {
        return Err(DiscreteError::DimensionMismatch { expected: 4, got: channel_aux.rank() });
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(DiscreteError::InvalidTarget { value: r });
    }
    let sd = source_aux.dims();
    if channel_aux.dims()[3] != main.in_size() {
        return Err(DiscreteError::DimensionMismatch {
            expected: main.in_size(),
            got: channel_aux.dims()[3],
        });
    }
    if recon_s.dims() != &sd[2..4] {
        return Err(DiscreteError::InvalidAxes);
    }
    if recon_u.dims() != &sd[2..6] {
        return Err(DiscreteError::InvalidAxes);
    }
    if d_s.nrows() != sd[0] || d_s.ncols() < recon_s.out_size() {
        return Err(DiscreteError::DimensionMismatch {
            expected: sd[0],
            got: d_s.nrows(),
        });
    }
    if d_u.nrows() != sd[1] || d_u.ncols() < recon_u.out_size() {
        return Err(DiscreteError::DimensionMismatch {
            expected: sd[1],
            got: d_u.nrows(),
        });
    }
    let marg = source_aux.marginal(&[0, 1])?;
    if marg.dims() != p_su.dims() {
        return Err(DiscreteError::DimensionMismatch {
            expected: p_su.probs().len(),
            got: marg.probs().len(),
        });
    }
    let max_dev = marg
        .probs()
        .iter()
        .zip(p_su.probs())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if max_dev > 1e-9 {
        return Err(DiscreteError::MarginalMismatch { max_dev });
    }

    // Extend the channel block with the legitimate and eavesdropper
    // outputs: axes (Q_c, Q_p, W_c, X, Y, Z).
    let mut chan_dims = channel_aux.dims().to_vec();
    chan_dims.push(main.out_size());
    chan_dims.push(eve_given_y.out_size());
    let chan = JointPMF::from_fn_normalized(chan_dims, |idx| {
        channel_aux.prob(&idx[..4]) * main.prob(idx[3], idx[4]) * eve_given_y.prob(idx[4], idx[5])
    })?;

    let terms = AchievabilityTerms {
        i_s_ac: mutual_information(source_aux, &[0], &[2])?,
        i_s_acap: mutual_information(source_aux, &[0], &[2, 3])?,
        i_u_bc_given_s_ac: conditional_mi(source_aux, &[1], &[4], &[0, 2])?,
        i_u_bp_given_s_acapbc: conditional_mi(source_aux, &[1], &[5], &[0, 2, 3, 4])?,
        i_u_bc_given_ac: conditional_mi(source_aux, &[1], &[4], &[2])?,
        h_s: subset_entropy(source_aux, &[0])?,
        h_u: subset_entropy(source_aux, &[1])?,
        h_su: subset_entropy(source_aux, &[0, 1])?,
        h_s_given_acap: conditional_entropy(source_aux, &[0], &[2, 3])?,
        i_qc_y: mutual_information(&chan, &[0], &[4])?,
        i_y_qcqp: mutual_information(&chan, &[0, 1], &[4])?,
        i_wc_y_given_qc: conditional_mi(&chan, &[2], &[4], &[0])?,
        i_x_y_given_qcqpwc: conditional_mi(&chan, &[3], &[4], &[0, 1, 2])?,
        i_qp_y_given_qc: conditional_mi(&chan, &[1], &[4], &[0])?,
        h_z_given_x: conditional_entropy(&chan, &[5], &[3])?,
        h_z_given_qc: conditional_entropy(&chan, &[5], &[0])?,
        h_z_given_qcwc: conditional_entropy(&chan, &[5], &[0, 2])?,
    };

    let mut e_ds = 0.0;
    let mut e_du = 0.0;
    for (idx, p) in source_aux.support() {
        e_ds += p * d_s.get(idx[0], recon_s.apply(&[idx[2], idx[3]]));
        e_du += p * d_u.get(idx[1], recon_u.apply(&[idx[2], idx[3], idx[4], idx[5]]));
    }

    // Semantic leakage is throttled by the common channel layer alone;
    // the observation bounds also credit the private and innermost
    // layers.
    let delta_s = terms.h_s_given_acap
        + r * (terms.h_z_given_x - terms.h_z_given_qc + terms.i_qp_y_given_qc);
    let chan_credit = terms.h_z_given_x - terms.h_z_given_qcwc
        + terms.i_qp_y_given_qc
        + terms.i_x_y_given_qcqpwc;
    let delta_u = terms.h_u
        - terms.i_s_acap
        - terms.i_u_bc_given_ac
        - terms.i_u_bp_given_s_acapbc
        + r * chan_credit;
    let delta_su = terms.h_su
        - terms.i_s_acap
        - terms.i_u_bp_given_s_acapbc
        - terms.i_u_bc_given_s_ac
        + r * chan_credit;

    let rate_slacks = FeasibilityReport::new(vec![
        Slack::nats("rate_common_semantic", r * terms.i_qc_y - terms.i_s_ac),
        Slack::nats("rate_full_semantic", r * terms.i_y_qcqp - terms.i_s_acap),
        Slack::nats(
            "rate_common_observation",
            r * terms.i_wc_y_given_qc - terms.i_u_bc_given_s_ac,
        ),
        Slack::nats(
            "rate_total_observation",
            r * (terms.i_wc_y_given_qc + terms.i_x_y_given_qcqpwc)
                - (terms.i_u_bc_given_s_ac + terms.i_u_bp_given_s_acapbc),
        ),
    ]);

    Ok(AchievabilityResult {
        terms,
        r,
        d_s: e_ds,
        d_u: e_du,
        delta_s,
        delta_u,
        delta_su,
        rate_slacks,
    })
}
