//! Printed structure matrices and frozen closed-geodesic data.

use nilgeo_core::catalog::{build_pair, pair_algebra};
use nilgeo_core::flow::TangentState;
use nilgeo_core::linalg::Matrix;
use nilgeo_core::periodicity::{construct_closed_geodesic, is_period, translational_oracle_rk4};
use nilgeo_core::scalar::{q_int, to_q_vec};
use nilgeo_core::spectral::{char_poly, expected_pair_char_poly};
use nilgeo_core::{Which, Q};

fn m(rows: [[i64; 5]; 5]) -> Matrix<Q> {
    Matrix::from_rows(&rows.iter().map(|r| to_q_vec(r)).collect::<Vec<_>>())
}

// j(Z_c) and j'(Z_c) as printed, in the basis X_i, X_j, Y_i, Y_j, Y_k.
fn printed_j([i, j, k]: [i64; 3]) -> Matrix<Q> {
    m([
        [0, 0, 0, -k, j],
        [0, 0, k, 0, -i],
        [0, -k, 0, 0, 0],
        [k, 0, 0, 0, 0],
        [-j, i, 0, 0, 0],
    ])
}

fn printed_j_prime([i, j, k]: [i64; 3]) -> Matrix<Q> {
    m([
        [0, -k, 0, 0, 0],
        [k, 0, 0, 0, 0],
        [0, 0, 0, -k, j],
        [0, 0, k, 0, -i],
        [0, 0, -j, i, 0],
    ])
}

#[test]
fn j_matrices_match_printed_form() {
    let (a, b) = (pair_algebra(Which::M), pair_algebra(Which::MPrime));
    for c in [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1], [2, -3, 5]] {
        let cq = to_q_vec(&c);
        assert_eq!(a.j_matrix(&cq).unwrap(), printed_j(c), "M at {c:?}");
        assert_eq!(b.j_matrix(&cq).unwrap(), printed_j_prime(c), "M' at {c:?}");
    }
}

#[test]
fn char_poly_at_integer_point() {
    // c = (1, 2, 2): c_k^2 = 4, |c|^2 = 9, so lambda^5 + 13 lambda^3 + 36 lambda.
    let c = to_q_vec(&[1, 2, 2]);
    let p = char_poly(&pair_algebra(Which::M).j_matrix(&c).unwrap()).unwrap();
    assert_eq!(p, expected_pair_char_poly(&c));
    assert_eq!(p.coeff(3), &q_int(13));
    assert_eq!(p.coeff(1), &q_int(36));
    assert_eq!(p.coeff(0), &q_int(0));
}

fn reference_target() -> TangentState {
    TangentState::new(
        vec![0.1, 0.2, -0.1, 0.3, 0.0],
        vec![0.0; 3],
        vec![0.3, -0.2, 0.4, 0.1, 0.2],
        vec![0.4, 0.2, 0.4],
    )
}

// Frozen outputs of the construction; cross-checked against RK4 flow composition.
#[test]
fn reference_closed_geodesics() {
    let (pm, pmp) = build_pair();
    let cases = [
        (Which::M, &pm, [0, 0, 80, 40, 80, 168, 54, 120], 81),
        (
            Which::MPrime,
            &pmp,
            [0, 0, 240, 120, 240, 470, 190, 380],
            243,
        ),
    ];
    for (w, data, a, tau_over_pi) in cases {
        let cg = construct_closed_geodesic(w, data, &reference_target(), 0.2).unwrap();
        assert_eq!(cg.a.to_vec(), to_q_vec(&a), "{w:?}");
        assert_eq!(cg.tau_over_pi, q_int(tau_over_pi));
        assert!(is_period(&cg, data).unwrap().pass());
        let oracle = translational_oracle_rk4(&data.alg, &cg.state, cg.tau(), 400_000);
        let err = oracle
            .to_vec()
            .iter()
            .zip(a)
            .fold(0.0f64, |e, (x, y)| e.max((x - y as f64).abs()));
        assert!(err < 1e-7, "{w:?}: {err}");
    }
}
