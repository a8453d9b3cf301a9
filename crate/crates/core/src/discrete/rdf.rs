//! Rate-distortion functions over finite alphabets: the classic direct
//! problem, the bivariate problem with two fidelity constraints, and the
//! semantic problem where the intrinsic variable is never observed and
//! enters only through a posterior-averaged distortion.

use ndarray::Array2;

use super::ba::{solve_pair, solve_single, BAResult};
use super::{DiscreteError, JointPMF};

/// Per-letter distortion table, rows indexed by the source letter and
/// columns by the reconstruction letter. The column count fixes the
/// reconstruction alphabet, so larger-than-source alphabets are just
/// wider matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionMatrix {
    d: Array2<f64>,
}

impl DistortionMatrix {
    pub fn new(d: Array2<f64>) -> Result<Self, DiscreteError> {
        if d.nrows() == 0 || d.ncols() == 0 {
            return Err(DiscreteError::InvalidDistortionMatrix);
        }
        if d.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(DiscreteError::InvalidDistortionMatrix);
        }
        Ok(Self { d })
    }

    /// 0-1 loss on a square alphabet.
    pub fn hamming(n: usize) -> Self {
        Self {
            d: Array2::from_shape_fn((n, n), |(i, j)| if i == j { 0.0 } else { 1.0 }),
        }
    }

    /// Squared error between embedded source and reconstruction points.
    pub fn squared_error(source: &[f64], recon: &[f64]) -> Result<Self, DiscreteError> {
        Self::new(Array2::from_shape_fn((source.len(), recon.len()), |(i, j)| {
            (source[i] - recon[j]).powi(2)
        }))
    }

    pub fn nrows(&self) -> usize {
        self.d.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.d.ncols()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.d[(row, col)]
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.d
    }
}

fn validate_pmf_slice(p: &[f64]) -> Result<(), DiscreteError> {
    for (index, &value) in p.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(DiscreteError::InvalidProbability { index, value });
        }
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(DiscreteError::MassNotNormalized { total });
    }
    Ok(())
}

fn validate_target(value: f64) -> Result<(), DiscreteError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(DiscreteError::InvalidTarget { value })
    }
}

fn expect_rank2(p_su: &JointPMF) -> Result<(usize, usize), DiscreteError> {
    match p_su.dims() {
        [s, u] => Ok((*s, *u)),
        dims => Err(DiscreteError::DimensionMismatch { expected: 2, got: dims.len() }),
    }
}

/// R_u(D_u): least rate describing the observation within distortion
/// `target`, in nats.
pub fn ba_rdf_classic(
    p_u: &[f64],
    d_u: &DistortionMatrix,
    target: f64,
) -> Result<BAResult, DiscreteError> {
    validate_pmf_slice(p_u)?;
    validate_target(target)?;
    if p_u.len() != d_u.nrows() {
        return Err(DiscreteError::DimensionMismatch {
            expected: d_u.nrows(),
            got: p_u.len(),
        });
    }
    solve_single(p_u, &d_u.d, "observed", target)
}

/// Posterior-averaged distortion for the unobserved variable: the
/// intrinsic loss collapses onto the observation alphabet as
/// `d(u, s_hat) = sum_s p(s|u) d_s(s, s_hat)`. Rows for zero-mass
/// observation letters are zeroed; they carry no weight in any
/// expectation.
pub fn modified_distortion(
    p_su: &JointPMF,
    d_s: &DistortionMatrix,
) -> Result<DistortionMatrix, DiscreteError> {
    let (s_size, u_size) = expect_rank2(p_su)?;
    if d_s.nrows() != s_size {
        return Err(DiscreteError::DimensionMismatch {
            expected: s_size,
            got: d_s.nrows(),
        });
    }
    let p_u = p_su.marginal(&[1])?;
    let mut out = Array2::zeros((u_size, d_s.ncols()));
    for u in 0..u_size {
        let mass = p_u.prob(&[u]);
        if mass == 0.0 {
            continue;
        }
        for shat in 0..d_s.ncols() {
            let mut acc = 0.0;
            for s in 0..s_size {
                acc += p_su.prob(&[s, u]) / mass * d_s.get(s, shat);
            }
            out[(u, shat)] = acc;
        }
    }
    DistortionMatrix::new(out)
}

/// R_s(D_s): least rate describing the intrinsic variable through the
/// observation, a classic problem under the posterior-averaged loss.
pub fn ba_rdf_indirect(
    p_su: &JointPMF,
    d_s: &DistortionMatrix,
    target: f64,
) -> Result<BAResult, DiscreteError> {
    validate_target(target)?;
    let d_mod = modified_distortion(p_su, d_s)?;
    let p_u = p_su.marginal(&[1])?;
    solve_single(p_u.probs(), &d_mod.d, "semantic", target)
}

/// R(D_s, D_u) when the encoder sees the pair (S, U) and reconstructs
/// both within their respective distortions.
pub fn ba_rdf_bivariate(
    p_su: &JointPMF,
    d_s: &DistortionMatrix,
    d_u: &DistortionMatrix,
    target_s: f64,
    target_u: f64,
) -> Result<BAResult, DiscreteError> {
    let (s_size, u_size) = expect_rank2(p_su)?;
    validate_target(target_s)?;
    validate_target(target_u)?;
    if d_s.nrows() != s_size || d_u.nrows() != u_size {
        return Err(DiscreteError::DimensionMismatch {
            expected: s_size,
            got: d_s.nrows(),
        });
    }
    let (ms, mu) = (d_s.ncols(), d_u.ncols());
    // Source letters are (s,u) pairs in row-major order, matching the
    // joint PMF storage; reconstruction letters are (s_hat, u_hat) pairs.
    let dd_s = Array2::from_shape_fn((s_size * u_size, ms * mu), |(w, x)| {
        d_s.get(w / u_size, x / mu)
    });
    let dd_u = Array2::from_shape_fn((s_size * u_size, ms * mu), |(w, x)| {
        d_u.get(w % u_size, x % mu)
    });
    solve_pair(
        p_su.probs(),
        [&dd_s, &dd_u],
        ["semantic", "observed"],
        [target_s, target_u],
    )
}

/// R(D_s, D_u) when the encoder sees only the observation: minimizes
/// I(U; S_hat, U_hat) with the intrinsic loss replaced by its posterior
/// average.
pub fn ba_rdf_semantic(
    p_su: &JointPMF,
    d_s: &DistortionMatrix,
    d_u: &DistortionMatrix,
    target_s: f64,
    target_u: f64,
) -> Result<BAResult, DiscreteError> {
    let (_, u_size) = expect_rank2(p_su)?;
    validate_target(target_s)?;
    validate_target(target_u)?;
    if d_u.nrows() != u_size {
        return Err(DiscreteError::DimensionMismatch {
            expected: u_size,
            got: d_u.nrows(),
        });
    }
    let d_mod = modified_distortion(p_su, d_s)?;
    let p_u = p_su.marginal(&[1])?;
    let (ms, mu) = (d_mod.ncols(), d_u.ncols());
    let dd_s = Array2::from_shape_fn((u_size, ms * mu), |(u, x)| d_mod.get(u, x / mu));
    let dd_u = Array2::from_shape_fn((u_size, ms * mu), |(u, x)| d_u.get(u, x % mu));
    solve_pair(
        p_u.probs(),
        [&dd_s, &dd_u],
        ["semantic", "observed"],
        [target_s, target_u],
    )
}
