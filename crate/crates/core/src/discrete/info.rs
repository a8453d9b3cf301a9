//! Dense joint PMFs over finite alphabets and the entropy calculus on them.

use super::DiscreteError;

const MASS_TOL: f64 = 1e-12;

/// Dense joint probability mass function over a tuple of finite alphabets.
///
/// Storage is row-major: the last axis varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPMF {
    dims: Vec<usize>,
    probs: Vec<f64>,
}

impl JointPMF {
    /// Builds a PMF from row-major probabilities, validating shape,
    /// nonnegativity, and total mass 1 within 1e-12.
    pub fn new(dims: Vec<usize>, probs: Vec<f64>) -> Result<Self, DiscreteError> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(DiscreteError::InvalidAxes);
        }
        let expected: usize = dims.iter().product();
        if probs.len() != expected {
            return Err(DiscreteError::DimensionMismatch { expected, got: probs.len() });
        }
        for (index, &value) in probs.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(DiscreteError::InvalidProbability { index, value });
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(DiscreteError::MassNotNormalized { total });
        }
        Ok(Self { dims, probs })
    }

    /// Builds a PMF by evaluating `f` at every multi-index.
    pub fn from_fn(
        dims: Vec<usize>,
        f: impl Fn(&[usize]) -> f64,
    ) -> Result<Self, DiscreteError> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(DiscreteError::InvalidAxes);
        }
        let len: usize = dims.iter().product();
        let mut probs = Vec::with_capacity(len);
        let mut idx = vec![0usize; dims.len()];
        for _ in 0..len {
            probs.push(f(&idx));
            advance(&mut idx, &dims);
        }
        Self::new(dims, probs)
    }

    /// Like [`from_fn`](Self::from_fn) but rescales to total mass one.
    /// Products of separately validated factors accumulate roundoff that
    /// the strict mass check would reject.
    pub fn from_fn_normalized(
        dims: Vec<usize>,
        f: impl Fn(&[usize]) -> f64,
    ) -> Result<Self, DiscreteError> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(DiscreteError::InvalidAxes);
        }
        let len: usize = dims.iter().product();
        let mut probs = Vec::with_capacity(len);
        let mut idx = vec![0usize; dims.len()];
        for _ in 0..len {
            probs.push(f(&idx));
            advance(&mut idx, &dims);
        }
        for (index, &value) in probs.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(DiscreteError::InvalidProbability { index, value });
            }
        }
        let total: f64 = probs.iter().sum();
        if !(total > 0.0) {
            return Err(DiscreteError::MassNotNormalized { total });
        }
        for v in &mut probs {
            *v /= total;
        }
        Ok(Self { dims, probs })
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Probability at a full multi-index.
    pub fn prob(&self, idx: &[usize]) -> f64 {
        debug_assert_eq!(idx.len(), self.dims.len());
        self.probs[self.flat(idx)]
    }

    fn flat(&self, idx: &[usize]) -> usize {
        let mut out = 0;
        for (k, &i) in idx.iter().enumerate() {
            debug_assert!(i < self.dims[k]);
            out = out * self.dims[k] + i;
        }
        out
    }

    /// Marginal over the given axes, which must be strictly increasing.
    pub fn marginal(&self, keep: &[usize]) -> Result<JointPMF, DiscreteError> {
        validate_axes(keep, self.rank())?;
        if keep.is_empty() {
            return Err(DiscreteError::InvalidAxes);
        }
        let out_dims: Vec<usize> = keep.iter().map(|&a| self.dims[a]).collect();
        let in_strides = strides(&self.dims);
        let out_strides = strides(&out_dims);
        let mut out = vec![0.0; out_dims.iter().product()];
        for (i, &v) in self.probs.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let mut oi = 0;
            for (k, &axis) in keep.iter().enumerate() {
                oi += (i / in_strides[axis]) % self.dims[axis] * out_strides[k];
            }
            out[oi] += v;
        }
        JointPMF::new(out_dims, out)
    }

    /// Shannon entropy of the full joint, in nats.
    pub fn entropy(&self) -> f64 {
        self.probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.ln())
            .sum()
    }

    /// Iterates `(multi-index, probability)` over cells with positive mass.
    pub fn support(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        let strides = strides(&self.dims);
        self.probs.iter().enumerate().filter(|(_, &v)| v > 0.0).map(move |(i, &v)| {
            let idx: Vec<usize> =
                (0..self.dims.len()).map(|k| (i / strides[k]) % self.dims[k]).collect();
            (idx, v)
        })
    }
}

fn advance(idx: &mut [usize], dims: &[usize]) {
    for k in (0..dims.len()).rev() {
        idx[k] += 1;
        if idx[k] < dims[k] {
            return;
        }
        idx[k] = 0;
    }
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

fn validate_axes(axes: &[usize], rank: usize) -> Result<(), DiscreteError> {
    for (k, &axis) in axes.iter().enumerate() {
        if axis >= rank {
            return Err(DiscreteError::AxisOutOfRange { axis, rank });
        }
        if k > 0 && axes[k - 1] >= axis {
            return Err(DiscreteError::InvalidAxes);
        }
    }
    Ok(())
}

/// Merges two strictly increasing axis sets, erroring on overlap.
fn union(a: &[usize], b: &[usize]) -> Result<Vec<usize>, DiscreteError> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x == y => return Err(DiscreteError::InvalidAxes),
            (Some(&x), Some(&y)) if x < y => {
                out.push(x);
                i += 1;
            }
            (Some(_), Some(&y)) => {
                out.push(y);
                j += 1;
            }
            (Some(&x), None) => {
                out.push(x);
                i += 1;
            }
            (None, Some(&y)) => {
                out.push(y);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    Ok(out)
}

/// H(A) for a subset of axes, in nats.
pub fn subset_entropy(p: &JointPMF, a: &[usize]) -> Result<f64, DiscreteError> {
    validate_axes(a, p.rank())?;
    Ok(p.marginal(a)?.entropy())
}

/// H(A | C), in nats. An empty conditioning set gives H(A).
pub fn conditional_entropy(p: &JointPMF, a: &[usize], c: &[usize]) -> Result<f64, DiscreteError> {
    if c.is_empty() {
        return subset_entropy(p, a);
    }
    let ac = union(a, c)?;
    Ok(subset_entropy(p, &ac)? - subset_entropy(p, c)?)
}

/// I(A ; B), in nats. Clamped at zero against roundoff.
pub fn mutual_information(p: &JointPMF, a: &[usize], b: &[usize]) -> Result<f64, DiscreteError> {
    let ab = union(a, b)?;
    let v = subset_entropy(p, a)? + subset_entropy(p, b)? - subset_entropy(p, &ab)?;
    Ok(v.max(0.0))
}

/// I(A ; B | C), in nats. Clamped at zero against roundoff.
pub fn conditional_mi(
    p: &JointPMF,
    a: &[usize],
    b: &[usize],
    c: &[usize],
) -> Result<f64, DiscreteError> {
    if c.is_empty() {
        return mutual_information(p, a, b);
    }
    let ac = union(a, c)?;
    let bc = union(b, c)?;
    let abc = union(&union(a, b)?, c)?;
    let v = subset_entropy(p, &ac)? + subset_entropy(p, &bc)?
        - subset_entropy(p, &abc)?
        - subset_entropy(p, c)?;
    Ok(v.max(0.0))
}
