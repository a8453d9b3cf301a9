//! The layered achievability evaluator and its optimizer: exact-rational
//! re-evaluation of the equivocation formulas, a lattice oracle the
//! optimizer must dominate, and the structural properties (determinism,
//! power budget, monotone value in the number of channel uses).

use num_bigint::BigInt;
use num_rational::BigRational;
use semsec_core::gauss::{GaussianWiretapChannel, SemanticSourceGaussian, TWO_PI_E};
use semsec_core::inner::{
    inner_equivocations, optimize_inner, DistortionTargets, InnerParams, InnerPoint, Objective,
    OptimizeOptions,
};

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

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn to_f64(r: &BigRational) -> f64 {
    let num: f64 = r.numer().to_string().parse().unwrap();
    let den: f64 = r.denom().to_string().parse().unwrap();
    num / den
}

/// The three equivocation formulas re-derived in exact rational arithmetic
/// (every product and quotient of parameters reduced as a fraction, one
/// floating logarithm at the end), then compared to the library's stepwise
/// floating evaluation.
#[test]
fn equivocations_match_exact_rational_recomputation() {
    let (src, ch) = fig();
    let p = canonical();
    let (d_s, d_u, d_su) = inner_equivocations(&p, &src, &ch, 1.0).unwrap();

    // Parameters as exact fractions.
    let p_s = rat(7, 10);
    let p_u = rat(1, 1);
    let det = &p_s * &p_u - rat(1, 4); // 9/20
    let p_ap = rat(7, 10);
    let p_bp = rat(9, 20);
    let (p_qp, p_wc, p_xt) = (rat(3, 10), rat(1, 5), rat(1, 10));
    let p_n1 = rat(1, 10);
    let p_n = rat(1, 4);

    let denom_s = &p_s + &p_ap; // alpha1 = 1
    let denom_u = &det + &p_s * &p_bp;

    let src_s = &p_s * &p_ap / &denom_s;
    let src_u = &p_s * &p_u * &p_ap * &p_bp / (&denom_s * &denom_u);
    let src_su = &det * &p_s * &p_ap * &p_bp / (&denom_s * &denom_u);
    assert_eq!(src_s, rat(7, 20));
    assert_eq!(src_u, rat(7, 34));
    assert_eq!(src_su, rat(63, 680));

    let p_res = &p_qp + &p_wc + &p_xt;
    let chan_s = &p_n * &p_res / ((&p_wc + &p_xt + &p_n1) * (&p_res + &p_n));
    let chan_u = &p_n * (&p_xt + &p_n1) * (&p_qp + &p_wc + &p_xt + &p_n1)
        / (&p_n1 * (&p_wc + &p_xt + &p_n1) * (&p_qp + &p_xt + &p_n));
    assert_eq!(chan_s, rat(15, 34));
    assert_eq!(chan_u, rat(35, 26));

    let oracle_s = 0.5 * ((TWO_PI_E * to_f64(&src_s)).ln() + to_f64(&chan_s).ln());
    let oracle_u = 0.5 * ((TWO_PI_E * to_f64(&src_u)).ln() + to_f64(&chan_u).ln());
    let oracle_su =
        0.5 * ((TWO_PI_E * TWO_PI_E * to_f64(&src_su)).ln() + to_f64(&chan_u).ln());
    assert!((d_s - oracle_s).abs() < 1e-12, "delta_s {d_s} vs {oracle_s}");
    assert!((d_u - oracle_u).abs() < 1e-12, "delta_u {d_u} vs {oracle_u}");
    assert!((d_su - oracle_su).abs() < 1e-12, "delta_su {d_su} vs {oracle_su}");

    // Frozen decimal expansions.
    assert!((d_s - 0.4848723091983582).abs() < 1e-12);
    assert!((d_u - 0.7773391071582145).abs() < 1e-12);
    assert!((d_su - 1.7970237922540016).abs() < 1e-12);
}

/// At r = 0 only the source terms remain, and each is capped by the
/// corresponding source entropy for every parameter choice.
#[test]
fn source_terms_never_exceed_source_entropies() {
    let (src, _) = fig();
    let ch = GaussianWiretapChannel::new(1.0, 0.10, 0.15).unwrap();
    let h_s = src.diff_entropy_s();
    let h_u = src.diff_entropy_u();
    let h_su = src.diff_entropy_su().unwrap();
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..200 {
        let raw = [next(), next(), next(), next()];
        let z: f64 = raw.iter().sum();
        let p = InnerParams {
            alpha1: 3.0 * next(),
            alpha2: 3.0 * next(),
            gamma: 0.0,
            p_ap: 0.05 + 5.0 * next(),
            p_bp: 0.05 + 5.0 * next(),
            p_qc: raw[0] / z,
            p_qp: raw[1] / z,
            p_wc: raw[2] / z,
            p_xt: raw[3] / z,
        };
        let (e_s, e_u, e_su) = inner_equivocations(&p, &src, &ch, 0.0).unwrap();
        assert!(e_s <= h_s + 1e-12);
        assert!(e_u <= h_u + 1e-12);
        assert!(e_su <= h_su + 1e-12);
    }
}

/// Every composition of the budget into four positive layer powers on a
/// 35-point lattice, crossed with five description-noise levels per side.
fn lattice(src: &SemanticSourceGaussian, power: f64, t: DistortionTargets) -> Vec<InnerParams> {
    let noise = |prior: f64, target: f64| prior * target / (prior - target);
    let scales = [0.3, 0.5, 0.7, 0.9, 1.0];
    let mut out = Vec::new();
    for a in 1..=5i32 {
        for b in 1..=5i32 {
            for c in 1..=5i32 {
                let d = 8 - a - b - c;
                if !(1..=5).contains(&d) {
                    continue;
                }
                for sa in scales {
                    for sb in scales {
                        out.push(InnerParams {
                            alpha1: 1.0,
                            alpha2: 1.0,
                            gamma: 0.0,
                            p_ap: noise(src.p_s, t.d_s) * sa,
                            p_bp: noise(src.p_u, t.d_u) * sb,
                            p_qc: power * a as f64 / 8.0,
                            p_qp: power * b as f64 / 8.0,
                            p_wc: power * c as f64 / 8.0,
                            p_xt: power * d as f64 / 8.0,
                        });
                    }
                }
            }
        }
    }
    out
}

#[test]
fn optimizer_dominates_lattice_oracle() {
    let (src, ch) = fig();
    let r = 2.0;
    let t = DistortionTargets { d_s: 0.45, d_u: 0.35 };
    let opts = OptimizeOptions::default();

    let candidates = lattice(&src, ch.power, t);
    assert!(candidates.len() >= 35 * 25 / 2);
    for objective in [Objective::DeltaS, Objective::DeltaU, Objective::DeltaSu] {
        let mut best_grid = f64::NEG_INFINITY;
        for p in &candidates {
            if let Ok(pt) = InnerPoint::evaluate(p, &src, &ch, r) {
                if pt.rate_ok && pt.d_s <= t.d_s + 1e-12 && pt.d_u <= t.d_u + 1e-12 {
                    let v = match objective {
                        Objective::DeltaS => pt.delta_s,
                        Objective::DeltaU => pt.delta_u,
                        Objective::DeltaSu => pt.delta_su,
                    };
                    best_grid = best_grid.max(v);
                }
            }
        }
        assert!(best_grid.is_finite(), "lattice found nothing admissible");
        let found = optimize_inner(&src, &ch, r, t, objective, &opts)
            .unwrap()
            .expect("optimizer found nothing");
        let got = match objective {
            Objective::DeltaS => found.delta_s,
            Objective::DeltaU => found.delta_u,
            Objective::DeltaSu => found.delta_su,
        };
        assert!(
            got >= best_grid - 1e-6,
            "{objective:?}: optimizer {got} below lattice {best_grid}"
        );
        assert!(found.d_s <= t.d_s + 1e-12 && found.d_u <= t.d_u + 1e-12);
        assert!(found.rate_ok);
        assert!((found.params.channel_power() - ch.power).abs() < 1e-9);
    }
}

#[test]
fn optimizer_is_deterministic() {
    let (src, ch) = fig();
    let t = DistortionTargets { d_s: 0.5, d_u: 0.4 };
    let opts = OptimizeOptions { multistarts: 12, ..OptimizeOptions::default() };
    let a = optimize_inner(&src, &ch, 1.5, t, Objective::DeltaSu, &opts).unwrap().unwrap();
    let b = optimize_inner(&src, &ch, 1.5, t, Objective::DeltaSu, &opts).unwrap().unwrap();
    assert_eq!(a.params, b.params);
    assert_eq!(a.delta_su.to_bits(), b.delta_su.to_bits());
}

#[test]
fn unreachable_floors_return_none() {
    let (src, ch) = fig();
    let t = DistortionTargets { d_s: src.p_s, d_u: src.p_u };
    let opts = OptimizeOptions {
        multistarts: 8,
        floors: Some((
            2.0 * src.diff_entropy_s(),
            2.0 * src.diff_entropy_u(),
            2.0 * src.diff_entropy_su().unwrap(),
        )),
        ..OptimizeOptions::default()
    };
    // r = 0: no channel credit at all, the source terms cannot reach twice
    // the entropies.
    let got = optimize_inner(&src, &ch, 0.0, t, Objective::DeltaSu, &opts).unwrap();
    assert!(got.is_none());
}

#[test]
fn value_is_monotone_in_channel_uses() {
    let (src, ch) = fig();
    let t = DistortionTargets { d_s: 0.5, d_u: 0.4 };
    let mut opts = OptimizeOptions { multistarts: 16, ..OptimizeOptions::default() };
    let mut prev: Option<InnerPoint> = None;
    for r in [1.0, 1.5, 2.0, 3.0] {
        if let Some(w) = &prev {
            opts.warm_starts = vec![w.params];
        }
        let pt = optimize_inner(&src, &ch, r, t, Objective::DeltaSu, &opts)
            .unwrap()
            .expect("admissible point expected");
        if let Some(w) = &prev {
            assert!(
                pt.delta_su >= w.delta_su - 1e-9,
                "value dropped from {} to {} at r={r}",
                w.delta_su,
                pt.delta_su
            );
        }
        prev = Some(pt);
    }
}

#[test]
fn rejects_malformed_inputs() {
    let (src, ch) = fig();
    let opts = OptimizeOptions::default();
    let bad_ds = DistortionTargets { d_s: src.p_s + 0.1, d_u: 0.4 };
    assert!(optimize_inner(&src, &ch, 1.0, bad_ds, Objective::DeltaS, &opts).is_err());
    let bad_du = DistortionTargets { d_s: 0.5, d_u: 0.0 };
    assert!(optimize_inner(&src, &ch, 1.0, bad_du, Objective::DeltaS, &opts).is_err());
    let t = DistortionTargets { d_s: 0.5, d_u: 0.4 };
    assert!(optimize_inner(&src, &ch, f64::NAN, t, Objective::DeltaS, &opts).is_err());
    let mut p = canonical();
    p.p_qc += 0.2;
    assert!(InnerPoint::evaluate(&p, &src, &ch, 1.0).is_err());
}
