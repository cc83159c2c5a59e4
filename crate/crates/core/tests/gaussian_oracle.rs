mod common;

use num_complex::Complex64;
use pathamp_core::oracle::compare_with_oracle;
use pathamp_core::{
    brute_force_amplitude, build_action_matrix, transition_amplitude, ActionMatrix,
    OscillatorNetwork, QuadratureSpec,
};

const EPSILONS: [f64; 2] = [0.1, 0.05];

fn spec(eps: f64, dim: usize) -> QuadratureSpec {
    QuadratureSpec::for_epsilon(eps, if dim <= 2 { 801 } else { 201 }).unwrap()
}

fn lattice_case(steps: usize) -> ActionMatrix {
    let net = OscillatorNetwork::single(0.3, 0.5, 1.0, steps).unwrap();
    build_action_matrix(&net)
}

fn cases() -> Vec<(&'static str, ActionMatrix, Vec<f64>)> {
    vec![
        ("lattice M=1 N=2", lattice_case(2), vec![0.2, -0.1]),
        ("lattice M=1 N=3", lattice_case(3), vec![0.15, 0.0, -0.1]),
        (
            "mixed-sign 2x2",
            ActionMatrix::from_real_dense(&[vec![0.8, 0.3], vec![0.3, -0.6]]).unwrap(),
            vec![0.1, 0.25],
        ),
        (
            "mixed-sign 3x3",
            ActionMatrix::from_real_dense(&[
                vec![0.7, 0.2, -0.1],
                vec![0.2, -0.5, 0.15],
                vec![-0.1, 0.15, 0.9],
            ])
            .unwrap(),
            vec![0.1, -0.2, 0.05],
        ),
    ]
}

#[test]
fn closed_form_matches_quadrature() {
    for (name, a, j) in cases() {
        for eps in EPSILONS {
            let cmp = compare_with_oracle(&a, &j, &spec(eps, a.dim())).unwrap();
            assert!(
                cmp.relative_difference <= 1e-2,
                "{name} ε={eps}: closed {} vs quadrature {} (rel {:e})",
                cmp.closed_form,
                cmp.quadrature,
                cmp.relative_difference
            );
        }
    }
}

#[test]
fn source_ratio_is_exponential_factor() {
    let a = [[0.8, 0.3], [0.3, -0.6]];
    let m = ActionMatrix::from_real_dense(&[a[0].to_vec(), a[1].to_vec()]).unwrap();
    let j = [0.3, -0.2];
    for eps in EPSILONS {
        let s = spec(eps, 2);
        let with = brute_force_amplitude(&m, &j, &s).unwrap().to_complex();
        let without = brute_force_amplitude(&m, &[0.0, 0.0], &s)
            .unwrap()
            .to_complex();
        // (A + iεI)⁻¹ by the 2x2 adjugate
        let i = Complex64::new(0.0, 1.0);
        let (p, q, r) = (a[0][0] + i * eps, a[0][1] + 0.0 * i, a[1][1] + i * eps);
        let det = p * r - q * q;
        let form = (r * j[0] * j[0] - q * 2.0 * j[0] * j[1] + p * j[1] * j[1]) / det;
        let expect = (-0.5 * i * form).exp();
        let ratio = with / without;
        assert!(
            (ratio - expect).norm() < 1e-3 * expect.norm(),
            "ε={eps}: {ratio} vs {expect}"
        );
    }
}

#[test]
fn quadrature_invariant_under_axis_permutation() {
    let a = [[0.7, 0.2, -0.1], [0.2, -0.5, 0.15], [-0.1, 0.15, 0.9]];
    let j = [0.1, -0.2, 0.05];
    let perm = [2, 0, 1];
    let rows: Vec<Vec<f64>> = a.iter().map(|r| r.to_vec()).collect();
    let prows: Vec<Vec<f64>> = (0..3)
        .map(|r| (0..3).map(|c| a[perm[r]][perm[c]]).collect())
        .collect();
    let pj: Vec<f64> = (0..3).map(|r| j[perm[r]]).collect();
    let s = QuadratureSpec::for_epsilon(0.1, 101).unwrap();
    let z = brute_force_amplitude(&ActionMatrix::from_real_dense(&rows).unwrap(), &j, &s).unwrap();
    let zp =
        brute_force_amplitude(&ActionMatrix::from_real_dense(&prows).unwrap(), &pj, &s).unwrap();
    assert!(zp.relative_difference(z) < 1e-10);
}

#[test]
fn damped_closed_form_tends_to_undamped_branch() {
    // one positive and one negative eigenvalue: zero signature, zero phase
    let m = ActionMatrix::from_real_dense(&[vec![0.8, 0.3], vec![0.3, -0.6]]).unwrap();
    let j = [0.1, 0.25];
    let bare = transition_amplitude(&m, &j).unwrap();
    let damped = transition_amplitude(&m.regularized(1e-8), &j).unwrap();
    assert!(damped.relative_difference(bare) < 1e-6);
    let prefactor_only = transition_amplitude(&m, &[0.0, 0.0]).unwrap();
    assert!(common::phase_gap(prefactor_only.phase, 0.0).abs() < 1e-15);
}

#[test]
fn oracle_rejects_dim_four() {
    let net = OscillatorNetwork::single(0.3, 0.5, 1.0, 4).unwrap();
    let a = build_action_matrix(&net);
    assert!(brute_force_amplitude(&a, &[0.0; 4], &spec(0.1, 3)).is_err());
}
