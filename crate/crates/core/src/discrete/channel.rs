//! Discrete memoryless channels: transition matrices, composition,
//! information rates, capacity, and the best secrecy rate of a degraded
//! pair.

use ndarray::Array2;

use super::info::mutual_information;
use super::{DiscreteError, JointPMF};
use crate::optim::{halton, nelder_mead};

const CAPACITY_TOL: f64 = 1e-9;
// The divergence bracket closes only harmonically when a suboptimal
// input dies slowly; the cap must cover that regime at the tolerance.
const CAPACITY_MAX_ITERS: usize = 500_000;

/// Discrete memoryless channel as a row-stochastic matrix: rows index
/// inputs, columns outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Dmc {
    p: Array2<f64>,
}

impl Dmc {
    pub fn new(p: Array2<f64>) -> Result<Self, DiscreteError> {
        if p.nrows() == 0 || p.ncols() == 0 {
            return Err(DiscreteError::InvalidChannelRow { row: 0, total: 0.0 });
        }
        for (row, r) in p.rows().into_iter().enumerate() {
            if r.iter().any(|&v| !v.is_finite() || v < 0.0) {
                return Err(DiscreteError::InvalidChannelRow { row, total: f64::NAN });
            }
            let total: f64 = r.sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(DiscreteError::InvalidChannelRow { row, total });
            }
        }
        Ok(Self { p })
    }

    /// Binary symmetric channel with crossover probability `eps`.
    pub fn bsc(eps: f64) -> Self {
        assert!((0.0..=1.0).contains(&eps), "crossover {eps} outside [0, 1]");
        Self {
            p: Array2::from_shape_fn((2, 2), |(i, j)| {
                if i == j {
                    1.0 - eps
                } else {
                    eps
                }
            }),
        }
    }

    pub fn in_size(&self) -> usize {
        self.p.nrows()
    }

    pub fn out_size(&self) -> usize {
        self.p.ncols()
    }

    pub fn prob(&self, input: usize, output: usize) -> f64 {
        self.p[(input, output)]
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.p
    }

    /// Cascade: the output of `self` feeds `next`. The result is the
    /// matrix product, so a cascade is degraded with respect to its
    /// first stage by construction.
    pub fn compose(&self, next: &Dmc) -> Result<Dmc, DiscreteError> {
        if self.out_size() != next.in_size() {
            return Err(DiscreteError::DimensionMismatch {
                expected: self.out_size(),
                got: next.in_size(),
            });
        }
        Dmc::new(self.p.dot(&next.p))
    }
}

fn joint_with_input(p_x: &[f64], ch: &Dmc) -> Result<JointPMF, DiscreteError> {
    if p_x.len() != ch.in_size() {
        return Err(DiscreteError::DimensionMismatch {
            expected: ch.in_size(),
            got: p_x.len(),
        });
    }
    JointPMF::from_fn_normalized(vec![ch.in_size(), ch.out_size()], |idx| {
        p_x[idx[0]] * ch.prob(idx[0], idx[1])
    })
}

/// I(X;Y) for a fixed input law, in nats.
pub fn channel_rate(p_x: &[f64], ch: &Dmc) -> Result<f64, DiscreteError> {
    let joint = joint_with_input(p_x, ch)?;
    mutual_information(&joint, &[0], &[1])
}

/// I(X;Y) - I(X;Z) for a fixed input law, where the eavesdropper sees
/// the legitimate output through a further channel. Nonnegative by data
/// processing.
pub fn secrecy_rate(
    p_x: &[f64],
    main: &Dmc,
    eve_given_y: &Dmc,
) -> Result<f64, DiscreteError> {
    let eve = main.compose(eve_given_y)?;
    Ok(channel_rate(p_x, main)? - channel_rate(p_x, &eve)?)
}

/// Channel capacity and a maximizing input law, by the multiplicative
/// ascent whose per-iteration divergence extremes bracket the capacity.
pub fn capacity(ch: &Dmc) -> Result<(f64, Vec<f64>), DiscreteError> {
    let n = ch.in_size();
    let m = ch.out_size();
    let mut q = vec![1.0 / n as f64; n];
    let mut d = vec![0.0; n];
    for iterations in 1..=CAPACITY_MAX_ITERS {
        let mut p_y = vec![0.0; m];
        for (x, &qx) in q.iter().enumerate() {
            for y in 0..m {
                p_y[y] += qx * ch.prob(x, y);
            }
        }
        for x in 0..n {
            d[x] = (0..m)
                .filter(|&y| ch.prob(x, y) > 0.0)
                .map(|y| ch.prob(x, y) * (ch.prob(x, y) / p_y[y]).ln())
                .sum();
        }
        let lower: f64 = q.iter().zip(&d).map(|(&qx, &dx)| qx * dx).sum();
        let upper = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if upper - lower <= CAPACITY_TOL {
            return Ok((lower.max(0.0), q));
        }
        let mut total = 0.0;
        for x in 0..n {
            q[x] *= d[x].exp();
            total += q[x];
        }
        for v in &mut q {
            *v /= total;
        }
        if iterations == CAPACITY_MAX_ITERS {
            return Err(DiscreteError::NotConverged {
                iterations,
                last_change: upper - lower,
            });
        }
    }
    unreachable!()
}

fn softmax(v: &[f64]) -> Vec<f64> {
    let top = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = v.iter().map(|&x| (x - top).exp()).collect();
    let total: f64 = out.iter().sum();
    for x in &mut out {
        *x /= total;
    }
    out
}

/// Best secrecy rate over input laws and a maximizing law. The objective
/// is concave over the simplex for a degraded pair; a deterministic
/// multistart simplex search over softmax logits finds it.
pub fn max_secrecy_rate(
    main: &Dmc,
    eve_given_y: &Dmc,
) -> Result<(f64, Vec<f64>), DiscreteError> {
    let eve = main.compose(eve_given_y)?;
    let n = main.in_size();
    let objective = |logits: &[f64]| -> f64 {
        let p = softmax(logits);
        let direct = channel_rate(&p, main).expect("validated shapes");
        let leak = channel_rate(&p, &eve).expect("validated shapes");
        -(direct - leak)
    };
    let mut starts = vec![vec![0.0; n]];
    for k in 0..8 {
        let h = halton(k, n);
        starts.push(h.iter().map(|&x| 6.0 * (x - 0.5)).collect());
    }
    let mut best_val = f64::INFINITY;
    let mut best_x = vec![0.0; n];
    for start in starts {
        let (x, value) = nelder_mead(&objective, &start, &vec![0.5; n], 400);
        if value < best_val {
            best_val = value;
            best_x = x;
        }
    }
    Ok(((-best_val).max(0.0), softmax(&best_x)))
}
