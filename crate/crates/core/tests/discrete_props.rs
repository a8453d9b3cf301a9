//! Information measures and channel quantities: reference values,
//! invariances, data processing, and nonnegative secrecy rates across
//! randomly drawn degraded cascades.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semsec_core::discrete::{
    capacity, channel_rate, conditional_mi, max_secrecy_rate, mutual_information, secrecy_rate,
    subset_entropy, Dmc, JointPMF,
};

const LN_2: f64 = core::f64::consts::LN_2;

fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
}

fn random_dmc(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Dmc {
    let mut rows = Array2::zeros((n, m));
    for i in 0..n {
        let mut z = 0.0;
        for j in 0..m {
            let v: f64 = rng.gen_range(0.02..1.0);
            rows[(i, j)] = v;
            z += v;
        }
        for j in 0..m {
            rows[(i, j)] /= z;
        }
    }
    Dmc::new(rows).unwrap()
}

fn random_pmf(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut p: Vec<f64> = (0..n).map(|_| rng.gen_range(0.02..1.0)).collect();
    let z: f64 = p.iter().sum();
    for v in &mut p {
        *v /= z;
    }
    p
}

#[test]
fn doubly_symmetric_pair_reference_value() {
    // Uniform bit observed through a 0.11 crossover: I(S;U) = ln2 - h2(0.11).
    let c = 0.11;
    let joint = JointPMF::new(
        vec![2, 2],
        vec![0.5 * (1.0 - c), 0.5 * c, 0.5 * c, 0.5 * (1.0 - c)],
    )
    .unwrap();
    let mi = mutual_information(&joint, &[0], &[1]).unwrap();
    assert!((mi - (LN_2 - h2(c))).abs() < 1e-14);
    assert!((mi / LN_2 - 0.5000840418354721).abs() < 1e-12);
}

#[test]
fn information_measures_are_permutation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let probs: Vec<f64> = {
        let mut p: Vec<f64> = (0..12).map(|_| rng.gen_range(0.01..1.0)).collect();
        let z: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= z);
        p
    };
    let joint = JointPMF::new(vec![3, 4], probs.clone()).unwrap();
    // Relabel rows (3-cycle) and columns (reversal).
    let rperm = [1usize, 2, 0];
    let cperm = [3usize, 2, 1, 0];
    let mut moved = vec![0.0; 12];
    for s in 0..3 {
        for u in 0..4 {
            moved[rperm[s] * 4 + cperm[u]] = probs[s * 4 + u];
        }
    }
    let relabeled = JointPMF::new(vec![3, 4], moved).unwrap();
    for axes in [&[0usize][..], &[1], &[0, 1]] {
        let a = subset_entropy(&joint, axes).unwrap();
        let b = subset_entropy(&relabeled, axes).unwrap();
        assert!((a - b).abs() < 1e-14);
    }
    let a = mutual_information(&joint, &[0], &[1]).unwrap();
    let b = mutual_information(&relabeled, &[0], &[1]).unwrap();
    assert!((a - b).abs() < 1e-14);
}

#[test]
fn garbling_obeys_data_processing() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..25 {
        let p_s = random_pmf(&mut rng, 3);
        let su = random_dmc(&mut rng, 3, 4);
        let uv = random_dmc(&mut rng, 4, 3);
        // Chain S -> U -> V.
        let joint = JointPMF::from_fn_normalized(vec![3, 4, 3], |idx| {
            p_s[idx[0]] * su.prob(idx[0], idx[1]) * uv.prob(idx[1], idx[2])
        })
        .unwrap();
        let i_su = mutual_information(&joint, &[0], &[1]).unwrap();
        let i_sv = mutual_information(&joint, &[0], &[2]).unwrap();
        assert!(i_sv <= i_su + 1e-12, "processing gained information");
        let leak = conditional_mi(&joint, &[0], &[2], &[1]).unwrap();
        assert!(leak.abs() < 1e-12, "chain has conditional leakage {leak}");
    }
}

#[test]
fn degraded_cascades_never_have_negative_secrecy_rate() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..40 {
        let n = rng.gen_range(2..5);
        let m = rng.gen_range(2..5);
        let k = rng.gen_range(2..5);
        let main = random_dmc(&mut rng, n, m);
        let eve = random_dmc(&mut rng, m, k);
        for _ in 0..20 {
            let p = random_pmf(&mut rng, n);
            let s = secrecy_rate(&p, &main, &eve).unwrap();
            assert!(s >= -1e-12, "secrecy rate {s} negative under degradedness");
        }
    }
}

#[test]
fn bsc_cascade_reference_secrecy_rate() {
    // 0.1 then 0.15 compose to crossover 0.1*0.85 + 0.9*0.15 = 0.22.
    let main = Dmc::bsc(0.1);
    let eve = Dmc::bsc(0.15);
    let s = secrecy_rate(&[0.5, 0.5], &main, &eve).unwrap();
    assert!((s - (h2(0.22) - h2(0.1))).abs() < 1e-14);
    assert!((s / LN_2 - 0.2911719093726844).abs() < 1e-12);
    // The uniform input is optimal for the symmetric pair.
    let (best, p_star) = max_secrecy_rate(&main, &eve).unwrap();
    assert!(best >= s - 1e-9);
    assert!((best - s).abs() < 1e-6);
    assert!((p_star[0] - 0.5).abs() < 1e-3);
}

#[test]
fn cascade_capacity_never_exceeds_either_stage() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for _ in 0..15 {
        let a = random_dmc(&mut rng, 3, 3);
        let b = random_dmc(&mut rng, 3, 3);
        let (ca, _) = capacity(&a).unwrap();
        let (cb, _) = capacity(&b).unwrap();
        let (cab, _) = capacity(&a.compose(&b).unwrap()).unwrap();
        assert!(cab <= ca + 1e-8);
        assert!(cab <= cb + 1e-8);
    }
}

#[test]
fn capacity_dominates_every_input_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let ch = random_dmc(&mut rng, 4, 3);
    let (c, q_star) = capacity(&ch).unwrap();
    assert!((channel_rate(&q_star, &ch).unwrap() - c).abs() < 1e-6);
    for _ in 0..50 {
        let p = random_pmf(&mut rng, 4);
        assert!(channel_rate(&p, &ch).unwrap() <= c + 1e-8);
    }
    // Binary symmetric reference.
    let (c_bsc, _) = capacity(&Dmc::bsc(0.11)).unwrap();
    assert!((c_bsc - (LN_2 - h2(0.11))).abs() < 1e-8);
}
