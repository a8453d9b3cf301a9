//! Blahut-Arimoto engine shared by every rate-distortion solver: a
//! fixed-multiplier inner loop plus multiplier search for one or two
//! distortion constraints.

use ndarray::Array2;
use serde::Serialize;

use super::DiscreteError;

const PRUNE: f64 = 1e-15;
// Support-death modes close the dual gap only harmonically, so the gap
// criterion cannot fire on them at any practical tolerance; they stop on
// the objective-change criterion instead, with residual error of the
// gap's order. Geometric modes hit the gap criterion long before.
const MAX_INNER_ITERS: usize = 50_000;
const INNER_REL_TOL: f64 = 1e-9;
const GAP_TOL: f64 = 1e-10;
const MAX_BISECT: usize = 200;
const BRACKET_CAP: f64 = (1u64 << 40) as f64;
const FEASIBILITY_GRID: usize = 2000;
const DIST_SLACK: f64 = 1e-9;

/// Output of a rate-distortion solve.
#[derive(Debug, Clone, Serialize)]
pub struct BAResult {
    /// Minimum coding rate in nats per source symbol.
    pub rate: f64,
    /// Achieved expected distortions, one per constraint.
    pub distortions: Vec<f64>,
    /// Lagrange multipliers at the solution (nats per distortion unit).
    pub multipliers: Vec<f64>,
    /// Total inner iterations across all multiplier evaluations.
    pub iterations: usize,
    pub converged: bool,
}

/// One inner solve at fixed multipliers. The reported pair is achievable
/// for any iterate, converged or not; `converged` false means the rate
/// may sit up to the residual dual gap above the true optimum.
struct Probe {
    rate: f64,
    distortions: Vec<f64>,
    iterations: usize,
    converged: bool,
}

/// Minimizes sum_w p(w) * [-ln sum_x q(x) exp(-sum_k s_k d_k(w,x))] over
/// the output law q. The objective is nonincreasing across iterations;
/// that invariant is asserted every pass.
fn ba_fixed(p_w: &[f64], dists: &[&Array2<f64>], s: &[f64]) -> Probe {
    let n = p_w.len();
    let m = dists[0].ncols();
    // Row-shifted kernel: subtracting each row's minimum exponent keeps
    // the partition sums away from underflow at any multiplier size and
    // leaves the conditionals unchanged.
    let mut a = Array2::<f64>::zeros((n, m));
    for w in 0..n {
        let exponents: Vec<f64> = (0..m)
            .map(|x| dists.iter().zip(s).map(|(d, &sk)| sk * d[(w, x)]).sum())
            .collect();
        let shift = exponents.iter().cloned().fold(f64::INFINITY, f64::min);
        for x in 0..m {
            a[(w, x)] = (shift - exponents[x]).exp();
        }
    }
    let mut q = vec![1.0 / m as f64; m];
    let mut z = vec![1.0; n];
    let mut prev = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_INNER_ITERS {
        iterations += 1;
        for w in 0..n {
            if p_w[w] == 0.0 {
                continue;
            }
            z[w] = (0..m).map(|x| q[x] * a[(w, x)]).sum();
        }
        let obj: f64 = (0..n)
            .filter(|&w| p_w[w] > 0.0)
            .map(|w| -p_w[w] * z[w].ln())
            .sum();
        if prev.is_finite() {
            assert!(
                obj <= prev + 1e-8 * (1.0 + prev.abs()),
                "Blahut-Arimoto objective increased: {prev} -> {obj}"
            );
            if (prev - obj).abs() <= INNER_REL_TOL * (1.0 + obj.abs()) {
                converged = true;
                break;
            }
        }
        prev = obj;
        // Multiplicative growth factors. Their q-weighted mean is one, and
        // the log of their support maximum bounds the remaining objective
        // gap, giving a certified stop long before the step sizes vanish.
        let mut growth = vec![0.0; m];
        for w in 0..n {
            if p_w[w] == 0.0 {
                continue;
            }
            let c = p_w[w] / z[w];
            for x in 0..m {
                growth[x] += c * a[(w, x)];
            }
        }
        let gap = (0..m)
            .filter(|&x| q[x] > 0.0)
            .map(|x| growth[x])
            .fold(0.0f64, f64::max)
            .ln();
        if gap <= GAP_TOL {
            converged = true;
            break;
        }
        let mut total = 0.0;
        for x in 0..m {
            let v = q[x] * growth[x];
            q[x] = if v < PRUNE { 0.0 } else { v };
            total += q[x];
        }
        for v in &mut q {
            *v /= total;
        }
    }
    // Hitting the cap is not an error: support-death modes close the gap
    // only harmonically, and the current iterate is still achievable.
    // A zero multiplier leaves its distortion invisible to the kernel, so
    // reconstruction letters tied on every visible distortion carry exactly
    // duplicated kernel columns and span a flat optimal face. Concentrate
    // each tied group's mass on the member cheapest in the first hidden
    // dimension: rate and every kernel-visible distortion are unchanged,
    // and the reported hidden distortion becomes the face optimum that an
    // activity decision needs.
    if let Some(hidden) = s.iter().position(|&v| v == 0.0) {
        let mut claimed = vec![false; m];
        for x0 in 0..m {
            if claimed[x0] || q[x0] == 0.0 {
                continue;
            }
            let mut group = vec![x0];
            for x in x0 + 1..m {
                if !claimed[x]
                    && q[x] > 0.0
                    && (0..n).all(|w| a[(w, x)] == a[(w, x0)])
                {
                    claimed[x] = true;
                    group.push(x);
                }
            }
            if group.len() < 2 {
                continue;
            }
            let score = |x: usize| -> f64 {
                (0..n)
                    .filter(|&w| p_w[w] > 0.0)
                    .map(|w| p_w[w] * a[(w, x)] / z[w] * dists[hidden][(w, x)])
                    .sum()
            };
            let best = *group
                .iter()
                .min_by(|&&x, &&y| score(x).partial_cmp(&score(y)).unwrap())
                .unwrap();
            let mass: f64 = group.iter().map(|&x| q[x]).sum();
            for &x in &group {
                q[x] = 0.0;
            }
            q[best] = mass;
        }
    }
    // Rate and distortions from the converged conditionals w(x|w) = q a / z.
    let mut q_out = vec![0.0; m];
    for w in 0..n {
        if p_w[w] == 0.0 {
            continue;
        }
        for x in 0..m {
            q_out[x] += p_w[w] * q[x] * a[(w, x)] / z[w];
        }
    }
    let mut rate = 0.0;
    let mut distortions = vec![0.0; dists.len()];
    for w in 0..n {
        if p_w[w] == 0.0 {
            continue;
        }
        for x in 0..m {
            let cond = q[x] * a[(w, x)] / z[w];
            if cond > 0.0 {
                rate += p_w[w] * cond * (cond / q_out[x]).ln();
                for (k, d) in dists.iter().enumerate() {
                    distortions[k] += p_w[w] * cond * d[(w, x)];
                }
            }
        }
    }
    Probe { rate: rate.max(0.0), distortions, iterations, converged }
}

/// Expected distortion of the best constant reconstruction, per matrix.
fn best_constant(p_w: &[f64], dists: &[&Array2<f64>]) -> (usize, Vec<f64>) {
    let m = dists[0].ncols();
    let columns: Vec<Vec<f64>> = (0..m)
        .map(|x| {
            dists
                .iter()
                .map(|d| (0..p_w.len()).map(|w| p_w[w] * d[(w, x)]).sum())
                .collect()
        })
        .collect();
    let best = (0..m)
        .min_by(|&a, &b| {
            let sa: f64 = columns[a].iter().sum();
            let sb: f64 = columns[b].iter().sum();
            sa.partial_cmp(&sb).unwrap()
        })
        .unwrap();
    (best, columns[best].clone())
}

/// Smallest multiplier on the feasible side for constraint `which`,
/// holding the others fixed. Returns the feasible-side probe and, when
/// one was evaluated, the closest infeasible-side probe.
#[allow(clippy::type_complexity)]
fn bisect_multiplier(
    eval: &mut dyn FnMut(f64) -> Probe,
    which: usize,
    target: f64,
) -> Result<(f64, Probe, Option<(f64, Probe)>), DiscreteError> {
    let mut hi = 1.0;
    let mut hi_probe = eval(hi);
    let mut lo = 0.0;
    let mut lo_probe = None;
    if hi_probe.distortions[which] > target {
        // Grow until feasible.
        loop {
            if hi >= BRACKET_CAP {
                if hi_probe.distortions[which] <= target + DIST_SLACK {
                    break;
                }
                return Err(DiscreteError::NotConverged {
                    iterations: hi_probe.iterations,
                    last_change: hi_probe.distortions[which] - target,
                });
            }
            lo = hi;
            let next = hi * 4.0;
            let probe = eval(next);
            if probe.distortions[which] <= target {
                lo_probe = Some(std::mem::replace(&mut hi_probe, probe));
                hi = next;
                break;
            }
            hi = next;
            hi_probe = probe;
        }
    } else {
        // Shrink until the lower endpoint is infeasible; multiplier zero
        // is an acceptable lower endpoint without a probe.
        let mut s = 1.0;
        while s > 1.0 / BRACKET_CAP {
            s /= 4.0;
            let probe = eval(s);
            if probe.distortions[which] > target {
                lo = s;
                lo_probe = Some(probe);
                break;
            }
            hi = s;
            hi_probe = probe;
        }
    }
    for _ in 0..MAX_BISECT {
        if hi - lo <= 1e-10 * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (hi + lo);
        let probe = eval(mid);
        if probe.distortions[which] <= target {
            hi = mid;
            hi_probe = probe;
        } else {
            lo = mid;
            lo_probe = Some(probe);
        }
    }
    Ok((hi, hi_probe, lo_probe.map(|p| (lo, p))))
}

/// Rate-distortion solve with a single fidelity constraint.
pub(crate) fn solve_single(
    p_w: &[f64],
    d: &Array2<f64>,
    name: &'static str,
    target: f64,
) -> Result<BAResult, DiscreteError> {
    let dists = [d];
    let floor: f64 = (0..p_w.len())
        .map(|w| {
            p_w[w] * (0..d.ncols()).map(|x| d[(w, x)]).fold(f64::INFINITY, f64::min)
        })
        .sum();
    if target < floor - 1e-12 {
        return Err(DiscreteError::InfeasibleDistortion {
            name,
            requested: target,
            minimum: floor,
        });
    }
    let (_, consts) = best_constant(p_w, &dists);
    if consts[0] <= target {
        return Ok(BAResult {
            rate: 0.0,
            distortions: consts,
            multipliers: vec![0.0],
            iterations: 0,
            converged: true,
        });
    }
    let mut total_iters = 0usize;
    let mut all_converged = true;
    let mut eval = |s: f64| {
        let probe = ba_fixed(p_w, &dists, &[s]);
        total_iters += probe.iterations;
        all_converged &= probe.converged;
        probe
    };
    let (s, feasible, infeasible) = bisect_multiplier(&mut eval, 0, target)?;
    let d_hi = feasible.distortions[0];
    // A gap between the two sides of a collapsed bracket marks a linear
    // segment of the rate-distortion curve; the chord through the two
    // endpoints is exact there.
    let (rate, achieved) = if d_hi < target - DIST_SLACK {
        let (r_lo, d_lo) = match &infeasible {
            Some((_, p)) => (p.rate, p.distortions[0]),
            None => (0.0, consts[0]),
        };
        if d_lo > target {
            let t = (target - d_hi) / (d_lo - d_hi);
            ((1.0 - t) * feasible.rate + t * r_lo, target)
        } else {
            (feasible.rate, d_hi)
        }
    } else {
        (feasible.rate, d_hi)
    };
    Ok(BAResult {
        rate,
        distortions: vec![achieved],
        multipliers: vec![s],
        iterations: total_iters,
        converged: all_converged,
    })
}

/// Rate-distortion solve with two fidelity constraints, by coordinate
/// ascent on the pair of multipliers with inactive constraints pinned
/// at multiplier zero.
pub(crate) fn solve_pair(
    p_w: &[f64],
    d_pair: [&Array2<f64>; 2],
    names: [&'static str; 2],
    targets: [f64; 2],
) -> Result<BAResult, DiscreteError> {
    // The achievable distortion pairs form a convex set; a requested pair
    // is feasible iff every supporting half-plane admits it. The pure-axis
    // directions go first so a per-axis floor violation is named for its
    // own axis rather than for whichever mixed direction trips first.
    let directions =
        std::iter::once(FEASIBILITY_GRID).chain(0..FEASIBILITY_GRID);
    for i in directions {
        let lambda = i as f64 / FEASIBILITY_GRID as f64;
        let support: f64 = (0..p_w.len())
            .map(|w| {
                let row_min = (0..d_pair[0].ncols())
                    .map(|x| lambda * d_pair[0][(w, x)] + (1.0 - lambda) * d_pair[1][(w, x)])
                    .fold(f64::INFINITY, f64::min);
                p_w[w] * row_min
            })
            .sum();
        let requested = lambda * targets[0] + (1.0 - lambda) * targets[1];
        if requested < support - 1e-12 {
            let name = if lambda == 1.0 {
                names[0]
            } else if lambda == 0.0 {
                names[1]
            } else {
                "joint"
            };
            return Err(DiscreteError::InfeasibleDistortion {
                name,
                requested,
                minimum: support,
            });
        }
    }
    // Zero rate when some constant reconstruction meets both targets.
    let m = d_pair[0].ncols();
    for x in 0..m {
        let e0: f64 = (0..p_w.len()).map(|w| p_w[w] * d_pair[0][(w, x)]).sum();
        let e1: f64 = (0..p_w.len()).map(|w| p_w[w] * d_pair[1][(w, x)]).sum();
        if e0 <= targets[0] && e1 <= targets[1] {
            return Ok(BAResult {
                rate: 0.0,
                distortions: vec![e0, e1],
                multipliers: vec![0.0, 0.0],
                iterations: 0,
                converged: true,
            });
        }
    }
    let dists = [d_pair[0], d_pair[1]];
    let mut total_iters = 0usize;
    let mut all_converged = true;
    let mut s = [1.0, 1.0];
    let mut stable = false;
    for _ in 0..80 {
        let s_prev = s;
        for k in 0..2 {
            let other = 1 - k;
            let s_other = s[other];
            // Inactive constraint: already met at multiplier zero.
            let mut pinned = [0.0; 2];
            pinned[other] = s_other;
            let at_zero = ba_fixed(p_w, &dists, &pinned);
            total_iters += at_zero.iterations;
            all_converged &= at_zero.converged;
            if at_zero.distortions[k] <= targets[k] + 1e-8 {
                s[k] = 0.0;
                continue;
            }
            let mut eval = |v: f64| {
                let mut mult = [0.0; 2];
                mult[k] = v;
                mult[other] = s_other;
                let probe = ba_fixed(p_w, &dists, &mult);
                total_iters += probe.iterations;
                all_converged &= probe.converged;
                probe
            };
            let (sk, _, _) = bisect_multiplier(&mut eval, k, targets[k])?;
            s[k] = sk;
        }
        if (0..2).all(|k| (s[k] - s_prev[k]).abs() <= 1e-9 * (1.0 + s[k].abs())) {
            stable = true;
            break;
        }
    }
    let final_probe = ba_fixed(p_w, &dists, &s);
    total_iters += final_probe.iterations;
    all_converged &= final_probe.converged;
    let feasible =
        (0..2).all(|k| final_probe.distortions[k] <= targets[k] + 1e-6);
    if !feasible {
        let worst = (0..2)
            .map(|k| final_probe.distortions[k] - targets[k])
            .fold(f64::NEG_INFINITY, f64::max);
        return Err(DiscreteError::NotConverged {
            iterations: total_iters,
            last_change: worst,
        });
    }
    Ok(BAResult {
        rate: final_probe.rate,
        distortions: final_probe.distortions,
        multipliers: s.to_vec(),
        iterations: total_iters,
        converged: stable && all_converged,
    })
}
