//! A fully hand-computable instance of the layered achievability system:
//! every auxiliary variable is a binary symmetric perturbation, so every
//! information term reduces to binary entropies of cascaded crossovers.
//! The evaluator must reproduce the closed forms term by term, and its
//! point checker must flag injected violations on the right slack.

use semsec_core::discrete::{
    achievability_check_discrete, AchievabilityResult, DistortionMatrix, Dmc, JointPMF, ReconMap,
};

const LN_2: f64 = core::f64::consts::LN_2;

fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
}

/// Crossover of two cascaded binary symmetric flips.
fn conv(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + b * (1.0 - a)
}

fn flip(bit: usize, eps: f64) -> f64 {
    if bit == 1 {
        eps
    } else {
        1.0 - eps
    }
}

// Source block: S fair, U = S + 0.2, A_c = S + 0.1, A_p = S + 0.15,
// B_c = U + 0.1, B_p = U + 0.25, all flips independent.
const E_U: f64 = 0.2;
const E_AC: f64 = 0.1;
const E_AP: f64 = 0.15;
const E_BC: f64 = 0.1;
const E_BP: f64 = 0.25;

// Channel block: Q_c fair, Q_p = Q_c + 0.2, W_c = Q_c + 0.15,
// X = Q_c + (Q_p - Q_c) + (W_c - Q_c) + 0.05, main +0.1, eavesdropper +0.15.
const E_QP: f64 = 0.2;
const E_WC: f64 = 0.15;
const E_X: f64 = 0.05;
const E_MAIN: f64 = 0.1;
const E_EVE: f64 = 0.15;

fn source_aux() -> JointPMF {
    JointPMF::from_fn_normalized(vec![2, 2, 2, 2, 2, 2], |i| {
        let (s, u, a_c, a_p, b_c, b_p) = (i[0], i[1], i[2], i[3], i[4], i[5]);
        0.5 * flip(u ^ s, E_U)
            * flip(a_c ^ s, E_AC)
            * flip(a_p ^ s, E_AP)
            * flip(b_c ^ u, E_BC)
            * flip(b_p ^ u, E_BP)
    })
    .unwrap()
}

fn channel_aux() -> JointPMF {
    JointPMF::from_fn_normalized(vec![2, 2, 2, 2], |i| {
        let (q_c, q_p, w_c, x) = (i[0], i[1], i[2], i[3]);
        0.5 * flip(q_p ^ q_c, E_QP)
            * flip(w_c ^ q_c, E_WC)
            * flip(x ^ q_p ^ w_c ^ q_c, E_X)
    })
    .unwrap()
}

fn evaluate(r: f64) -> AchievabilityResult {
    let d = DistortionMatrix::hamming(2);
    // Reconstructions read the common layers: S from A_c, U from B_c.
    let recon_s = ReconMap::new(vec![2, 2], 2, vec![0, 0, 1, 1]).unwrap();
    let table_u: Vec<usize> = (0..16).map(|f| (f >> 1) & 1).collect();
    let recon_u = ReconMap::new(vec![2, 2, 2, 2], 2, table_u).unwrap();
    let p_su = JointPMF::from_fn_normalized(vec![2, 2], |i| 0.5 * flip(i[1] ^ i[0], E_U)).unwrap();
    achievability_check_discrete(
        &source_aux(),
        &channel_aux(),
        &Dmc::bsc(E_MAIN),
        &Dmc::bsc(E_EVE),
        &recon_s,
        &recon_u,
        &d,
        &d,
        r,
        &p_su,
    )
    .unwrap()
}

#[test]
fn every_term_matches_its_cascade_closed_form() {
    let out = evaluate(10.0);
    let t = &out.terms;
    let tol = 1e-12;

    // Source side.
    assert!((t.h_s - LN_2).abs() < tol);
    assert!((t.h_u - LN_2).abs() < tol);
    assert!((t.h_su - (LN_2 + h2(E_U))).abs() < tol);
    assert!((t.i_s_ac - (LN_2 - h2(E_AC))).abs() < tol);
    // (A_c, A_p) is a symmetric pair with crossover 0.1 * 0.15.
    let e_acap = conv(E_AC, E_AP);
    assert!((t.i_s_acap - (LN_2 + h2(e_acap) - h2(E_AC) - h2(E_AP))).abs() < tol);
    assert!((t.h_s_given_acap - (h2(E_AC) + h2(E_AP) - h2(e_acap))).abs() < tol);
    // Given S the A-layer drops out of every U term.
    assert!((t.i_u_bc_given_s_ac - (h2(conv(E_U, E_BC)) - h2(E_BC))).abs() < tol);
    // B_p given (S, B_c): posterior of U after seeing B_c, then one more flip.
    let p_bc1 = conv(E_U, E_BC);
    let u_given_bc1 = E_U * (1.0 - E_BC) / p_bc1;
    let u_given_bc0 = E_U * E_BC / (1.0 - p_bc1);
    let h_bp_given_s_bc =
        p_bc1 * h2(conv(u_given_bc1, E_BP)) + (1.0 - p_bc1) * h2(conv(u_given_bc0, E_BP));
    assert!((t.i_u_bp_given_s_acapbc - (h_bp_given_s_bc - h2(E_BP))).abs() < tol);
    // Without S: B_c sits three flips away from A_c.
    let e_bc_ac = conv(E_U, conv(E_BC, E_AC));
    assert!((t.i_u_bc_given_ac - (h2(e_bc_ac) - h2(E_BC))).abs() < tol);

    // Channel side. X is 0.2 * 0.15 * 0.05 away from Q_c.
    let e_x_qc = conv(conv(E_QP, E_WC), E_X);
    let e_y = conv(e_x_qc, E_MAIN);
    assert!((t.i_qc_y - (LN_2 - h2(e_y))).abs() < tol);
    assert!((t.h_z_given_x - h2(conv(E_MAIN, E_EVE))).abs() < tol);
    assert!((t.h_z_given_qc - h2(conv(e_x_qc, conv(E_MAIN, E_EVE)))).abs() < tol);
    // Knowing W_c besides Q_c strips the 0.15 stage.
    let e_x_wc = conv(E_QP, E_X);
    assert!((t.h_z_given_qcwc - h2(conv(e_x_wc, conv(E_MAIN, E_EVE)))).abs() < tol);
    assert!((t.i_wc_y_given_qc - (h2(e_y) - h2(conv(e_x_wc, E_MAIN)))).abs() < tol);
    // Knowing Q_p strips the 0.2 stage.
    let e_x_qp = conv(E_WC, E_X);
    assert!((t.i_qp_y_given_qc - (h2(e_y) - h2(conv(e_x_qp, E_MAIN)))).abs() < tol);
    assert!((t.i_y_qcqp - (LN_2 - h2(conv(e_x_qp, E_MAIN)))).abs() < tol);
    assert!((t.i_x_y_given_qcqpwc - (h2(conv(E_X, E_MAIN)) - h2(E_MAIN))).abs() < tol);

    // Reading each common layer leaves exactly its crossover as error.
    assert!((out.d_s - E_AC).abs() < tol);
    assert!((out.d_u - E_BC).abs() < tol);

    // Leakage floors assembled from the same closed forms.
    let delta_s = (h2(E_AC) + h2(E_AP) - h2(e_acap))
        + 10.0
            * (h2(conv(E_MAIN, E_EVE)) - h2(conv(e_x_qc, conv(E_MAIN, E_EVE))) + h2(e_y)
                - h2(conv(e_x_qp, E_MAIN)));
    assert!((out.delta_s - delta_s).abs() < 1e-9, "delta_s {} want {delta_s}", out.delta_s);
    let chan_credit = h2(conv(E_MAIN, E_EVE)) - h2(conv(e_x_wc, conv(E_MAIN, E_EVE)))
        + (h2(e_y) - h2(conv(e_x_qp, E_MAIN)))
        + (h2(conv(E_X, E_MAIN)) - h2(E_MAIN));
    let delta_u = LN_2
        - (LN_2 + h2(e_acap) - h2(E_AC) - h2(E_AP))
        - (h2(e_bc_ac) - h2(E_BC))
        - (h_bp_given_s_bc - h2(E_BP))
        + 10.0 * chan_credit;
    assert!((out.delta_u - delta_u).abs() < 1e-9, "delta_u {} want {delta_u}", out.delta_u);
    let delta_su = (LN_2 + h2(E_U))
        - (LN_2 + h2(e_acap) - h2(E_AC) - h2(E_AP))
        - (h_bp_given_s_bc - h2(E_BP))
        - (h2(conv(E_U, E_BC)) - h2(E_BC))
        + 10.0 * chan_credit;
    assert!((out.delta_su - delta_su).abs() < 1e-9, "delta_su {} want {delta_su}", out.delta_su);

    // Ten channel uses leave every layer's rate constraint slack.
    assert!(out.rate_slacks.feasible());
    let want = 10.0 * (LN_2 - h2(e_y)) - (LN_2 - h2(E_AC));
    let got = out.rate_slacks.slack("rate_common_semantic").unwrap();
    assert!((got - want).abs() < 1e-9);
}

#[test]
fn starved_channel_flips_the_rate_slacks() {
    let out = evaluate(0.5);
    let e_x_qc = conv(conv(E_QP, E_WC), E_X);
    let e_y = conv(e_x_qc, E_MAIN);
    let want = 0.5 * (LN_2 - h2(e_y)) - (LN_2 - h2(E_AC));
    let got = out.rate_slacks.slack("rate_common_semantic").unwrap();
    assert!((got - want).abs() < 1e-12);
    assert!(got < 0.0);
    assert!(!out.rate_slacks.feasible());
}

#[test]
fn injected_violations_land_on_the_named_slack() {
    let out = evaluate(10.0);
    let bit = 0.1 * LN_2;
    // The achieved tuple itself sits on the boundary of every added slack.
    let exact = out.check_point(out.d_s, out.d_u, out.delta_s, out.delta_u, out.delta_su);
    assert!(exact.feasible());
    for name in [
        "distortion_semantic",
        "distortion_observed",
        "equivocation_semantic",
        "equivocation_observed",
        "equivocation_joint",
    ] {
        assert!(exact.slack(name).unwrap().abs() < 1e-12);
    }

    // One demand at a time moved 0.1 bit past the guarantee.
    let cases: [(&str, [f64; 5]); 5] = [
        ("distortion_semantic", [-0.1 * LN_2, 0.0, 0.0, 0.0, 0.0]),
        ("distortion_observed", [0.0, -0.1 * LN_2, 0.0, 0.0, 0.0]),
        ("equivocation_semantic", [0.0, 0.0, bit, 0.0, 0.0]),
        ("equivocation_observed", [0.0, 0.0, 0.0, bit, 0.0]),
        ("equivocation_joint", [0.0, 0.0, 0.0, 0.0, bit]),
    ];
    for (name, d) in cases {
        let report = out.check_point(
            out.d_s + d[0],
            out.d_u + d[1],
            out.delta_s + d[2],
            out.delta_u + d[3],
            out.delta_su + d[4],
        );
        assert!(!report.feasible(), "{name} should break feasibility");
        let worst = report.worst().unwrap();
        assert_eq!(worst.name, name);
        let magnitude = d.iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!((worst.value + magnitude).abs() < 1e-12, "{name} slack {}", worst.value);
    }
}
