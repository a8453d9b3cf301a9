//! Deterministic derivative-free minimization used by the achievability
//! searcher: classic Nelder-Mead plus a Halton sequence for multistarts.

/// First ten primes; caps the Halton dimension.
const HALTON_BASES: [u64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];

/// Radical-inverse point of the Halton sequence, coordinates in (0, 1).
///
/// Panics if `dim` exceeds the available bases.
pub(crate) fn halton(index: u64, dim: usize) -> Vec<f64> {
    assert!(dim <= HALTON_BASES.len(), "halton dimension > {}", HALTON_BASES.len());
    // Index 0 maps every coordinate to 0; skip it so points stay interior.
    let i = index + 1;
    HALTON_BASES[..dim]
        .iter()
        .map(|&b| {
            let (mut n, mut f, mut x) = (i, 1.0, 0.0);
            while n > 0 {
                f /= b as f64;
                x += f * (n % b) as f64;
                n /= b;
            }
            x
        })
        .collect()
}

/// Minimizes `f` from `x0` with per-coordinate initial steps `steps`;
/// returns the best vertex and its value.
///
/// Standard coefficients (reflect 1, expand 2, contract 1/2, shrink 1/2).
/// Stops when the simplex function spread falls below `1e-12 * (1 + |best|)`
/// or after `max_iters` reflections. Fully deterministic; ties in the
/// vertex ordering break by insertion order.
pub(crate) fn nelder_mead(
    f: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    steps: &[f64],
    max_iters: usize,
) -> (Vec<f64>, f64) {
    assert_eq!(x0.len(), steps.len());
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += steps[i];
        let fv = f(&v);
        simplex.push((v, fv));
    }

    for _ in 0..max_iters {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(core::cmp::Ordering::Equal));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        if !best.is_finite() || worst - best <= 1e-12 * (1.0 + best.abs()) {
            break;
        }

        // Centroid of all but the worst vertex.
        let mut c = vec![0.0; n];
        for (v, _) in &simplex[..n] {
            for (ci, vi) in c.iter_mut().zip(v) {
                *ci += vi / n as f64;
            }
        }
        let lerp = |t: f64| -> Vec<f64> {
            c.iter().zip(&simplex[n].0).map(|(ci, wi)| ci + t * (ci - wi)).collect()
        };

        let xr = lerp(1.0);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = lerp(2.0);
            let fe = f(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[n].1 {
                let x = lerp(0.5);
                let v = f(&x);
                (x, v)
            } else {
                let x = lerp(-0.5);
                let v = f(&x);
                (x, v)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                // Shrink toward the best vertex.
                let anchor = simplex[0].0.clone();
                for (v, fv) in simplex.iter_mut().skip(1) {
                    for (vi, ai) in v.iter_mut().zip(&anchor) {
                        *vi = ai + 0.5 * (*vi - ai);
                    }
                    *fv = f(v);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(core::cmp::Ordering::Equal));
    simplex.swap_remove(0)
}
