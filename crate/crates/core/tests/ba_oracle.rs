//! Blahut-Arimoto solvers against independent oracles: binary closed
//! forms, a discretized-Gaussian continuum limit, product instances with
//! exact sum-rate, and a conditional-probability grid search for the
//! indirect solver.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semsec_core::discrete::{
    ba_rdf_bivariate, ba_rdf_classic, ba_rdf_indirect, modified_distortion, DistortionMatrix,
    JointPMF,
};

const LN_2: f64 = core::f64::consts::LN_2;

fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
}

/// Binary-source RDF under Hamming distortion, nats.
fn binary_rdf(pi: f64, d: f64) -> f64 {
    if d >= pi.min(1.0 - pi) {
        return 0.0;
    }
    h2(pi) - h2(d)
}

#[test]
fn classic_matches_binary_closed_form() {
    let ham = DistortionMatrix::hamming(2);
    for (pi, d) in [(0.5, 0.05), (0.5, 0.11), (0.5, 0.25), (0.5, 0.45), (0.3, 0.1), (0.7, 0.2)] {
        let got = ba_rdf_classic(&[1.0 - pi, pi], &ham, d).unwrap();
        assert!(
            (got.rate - binary_rdf(pi, d)).abs() < 1e-6,
            "pi={pi} d={d}: {} vs {}",
            got.rate,
            binary_rdf(pi, d)
        );
        assert!(got.distortions[0] <= d + 1e-9);
        assert!(got.converged);
    }
}

/// 64 equal cells over [-4, 4], standard normal mass per cell by Simpson
/// integration, reconstruction letters at the midpoints.
fn discretized_gaussian(n: usize) -> (Vec<f64>, Vec<f64>) {
    let density = |x: f64| (-0.5 * x * x).exp() / (2.0 * core::f64::consts::PI).sqrt();
    let width = 8.0 / n as f64;
    let mut probs = Vec::with_capacity(n);
    let mut mids = Vec::with_capacity(n);
    for i in 0..n {
        let lo = -4.0 + i as f64 * width;
        let mut mass = 0.0;
        let steps = 200;
        let h = width / steps as f64;
        for k in 0..steps {
            let a = lo + k as f64 * h;
            mass += h / 6.0 * (density(a) + 4.0 * density(a + 0.5 * h) + density(a + h));
        }
        probs.push(mass);
        mids.push(lo + 0.5 * width);
    }
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    (probs, mids)
}

#[test]
fn classic_approaches_gaussian_rdf() {
    let (probs, mids) = discretized_gaussian(64);
    let d = DistortionMatrix::squared_error(&mids, &mids).unwrap();
    let got = ba_rdf_classic(&probs, &d, 0.25).unwrap();
    // Continuum limit: R(0.25) = 1/2 log2(1/0.25) = 1 bit.
    assert!(
        (got.rate / LN_2 - 1.0).abs() < 0.02,
        "64-level Gaussian rate {} bits",
        got.rate / LN_2
    );
    assert!(got.distortions[0] <= 0.25 + 1e-9);
}

fn joint2(p00: f64, p01: f64, p10: f64, p11: f64) -> JointPMF {
    JointPMF::new(vec![2, 2], vec![p00, p01, p10, p11]).unwrap()
}

/// min over 2x2 kernels p(shat|u) of I(U; Shat) subject to the modified
/// distortion cap, by nested grid refinement on the two kernel rows.
fn grid_oracle_indirect(p_su: &JointPMF, d: f64) -> f64 {
    let d_mod = modified_distortion(p_su, &DistortionMatrix::hamming(2)).unwrap();
    let p_u = p_su.marginal(&[1]).unwrap();
    let (q0, q1) = (p_u.probs()[0], p_u.probs()[1]);
    let eval = |a: f64, b: f64| -> (f64, f64) {
        // a = P(shat=1|u=0), b = P(shat=1|u=1)
        let m1 = q0 * a + q1 * b; // P(shat=1)
        let m0 = 1.0 - m1;
        let term = |p: f64, m: f64| if p > 0.0 && m > 0.0 { p * (p / m).ln() } else { 0.0 };
        let mi = q0 * (term(1.0 - a, m0) + term(a, m1)) + q1 * (term(1.0 - b, m0) + term(b, m1));
        let dist = q0 * ((1.0 - a) * d_mod.get(0, 0) + a * d_mod.get(0, 1))
            + q1 * ((1.0 - b) * d_mod.get(1, 0) + b * d_mod.get(1, 1));
        (mi, dist)
    };
    let (mut ca, mut cb, mut half) = (0.5, 0.5, 0.5);
    let mut best = f64::INFINITY;
    for _ in 0..3 {
        let (mut na, mut nb) = (ca, cb);
        for i in 0..=20 {
            for j in 0..=20 {
                let a = (ca - half + i as f64 * half / 10.0).clamp(0.0, 1.0);
                let b = (cb - half + j as f64 * half / 10.0).clamp(0.0, 1.0);
                let (mi, dist) = eval(a, b);
                if dist <= d + 1e-12 && mi < best {
                    best = mi;
                    na = a;
                    nb = b;
                }
            }
        }
        ca = na;
        cb = nb;
        half /= 10.0;
    }
    best
}

#[test]
fn indirect_matches_grid_oracle_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for case in 0..8 {
        let mut p = [0.0f64; 4];
        for v in &mut p {
            *v = rng.gen_range(0.05..1.0);
        }
        let z: f64 = p.iter().sum();
        let p_su = joint2(p[0] / z, p[1] / z, p[2] / z, p[3] / z);
        let d_mod = modified_distortion(&p_su, &DistortionMatrix::hamming(2)).unwrap();
        let p_u = p_su.marginal(&[1]).unwrap();
        let d_min: f64 = (0..2)
            .map(|u| p_u.probs()[u] * d_mod.get(u, 0).min(d_mod.get(u, 1)))
            .sum();
        let d_zero = (0..2)
            .map(|s| (0..2).map(|u| p_u.probs()[u] * d_mod.get(u, s)).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        let t = rng.gen_range(0.15..0.85);
        let d = d_min + t * (d_zero - d_min);

        let oracle = grid_oracle_indirect(&p_su, d);
        let got = ba_rdf_indirect(&p_su, &DistortionMatrix::hamming(2), d).unwrap();
        assert!(
            got.rate <= oracle + 1e-6 && got.rate >= oracle - 0.01 * LN_2,
            "case {case}: solver {} vs grid {}",
            got.rate,
            oracle
        );
        assert!(got.distortions[0] <= d + 1e-6);
    }
}

#[test]
fn bivariate_matches_sum_rate_on_product_instances() {
    let ham = DistortionMatrix::hamming(2);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..8 {
        let pi_s = rng.gen_range(0.2..0.8);
        let pi_u = rng.gen_range(0.2..0.8);
        let p_su = joint2(
            (1.0 - pi_s) * (1.0 - pi_u),
            (1.0 - pi_s) * pi_u,
            pi_s * (1.0 - pi_u),
            pi_s * pi_u,
        );
        let cap_s = pi_s.min(1.0 - pi_s);
        let cap_u = pi_u.min(1.0 - pi_u);
        let d_s = rng.gen_range(0.05..cap_s - 0.02);
        let d_u = rng.gen_range(0.05..cap_u - 0.02);
        // Independent components with separate caps: rates add.
        let oracle = binary_rdf(pi_s, d_s) + binary_rdf(pi_u, d_u);
        let got = ba_rdf_bivariate(&p_su, &ham, &ham, d_s, d_u).unwrap();
        assert!(
            (got.rate - oracle).abs() < 0.01 * LN_2,
            "case {case}: solver {} vs sum {}",
            got.rate,
            oracle
        );
        assert!(got.distortions[0] <= d_s + 1e-6 && got.distortions[1] <= d_u + 1e-6);
    }
}

#[test]
fn bivariate_with_slack_side_matches_marginal_rdf() {
    let ham = DistortionMatrix::hamming(2);
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for case in 0..6 {
        let mut p = [0.0f64; 4];
        for v in &mut p {
            *v = rng.gen_range(0.05..1.0);
        }
        let z: f64 = p.iter().sum();
        let p_su = joint2(p[0] / z, p[1] / z, p[2] / z, p[3] / z);
        let pi_s = (p[2] + p[3]) / z;
        let d_s = rng.gen_range(0.05..pi_s.min(1.0 - pi_s) - 0.02);
        // The observed cap is above the worst letter: only the semantic
        // constraint can bind, so the pair solver must price the other at
        // zero and land on the marginal RDF of S.
        let got = ba_rdf_bivariate(&p_su, &ham, &ham, d_s, 1.0).unwrap();
        let oracle = binary_rdf(pi_s, d_s);
        assert!(
            (got.rate - oracle).abs() < 0.01 * LN_2,
            "case {case}: solver {} vs marginal {}",
            got.rate,
            oracle
        );
        assert!(got.multipliers[1].abs() < 1e-6, "slack constraint priced at zero");
    }
}
