use nilgeo_core::catalog::{build_pair, pair_algebra, PAIR_V_NAMES, PAIR_Z_NAMES};
use nilgeo_core::scalar::{q_int, to_q_vec};
use nilgeo_core::spectral::{char_poly_grid_check, gw_certificate, GwParams};
use nilgeo_core::{AlgebraData, Which};

// M' brackets with entry `idx` multiplied by `s`.
fn mutated_prime(idx: usize, s: i64) -> AlgebraData {
    let table = [
        (0, 1, [0, 0, 1]),
        (2, 3, [0, 0, 1]),
        (3, 4, [1, 0, 0]),
        (2, 4, [0, -1, 0]),
    ];
    let br: Vec<_> = table
        .iter()
        .enumerate()
        .map(|(i, (p, q, z))| {
            let f = if i == idx { s } else { 1 };
            (*p, *q, to_q_vec(&z.map(|x| f * x)))
        })
        .collect();
    AlgebraData::from_brackets(&PAIR_V_NAMES, &PAIR_Z_NAMES, &br).unwrap()
}

#[test]
fn table_reproduces_mprime() {
    assert_eq!(mutated_prime(0, 1), pair_algebra(Which::MPrime));
}

#[test]
fn self_comparison_passes() {
    let (m, _) = build_pair();
    assert_eq!(char_poly_grid_check(&m.alg, &m.alg, true), None);
    let p = GwParams {
        r2: q_int(20),
        dual_bound: 2,
        random_samples: 10,
        seed: 7,
        check_closed_form: true,
    };
    assert!(gw_certificate(&m, &m, &p).pass());
}

// A single sign flip is undone by negating one basis vector, so it never
// separates the char polys.
#[test]
fn sign_flips_keep_char_poly() {
    let m = pair_algebra(Which::M);
    for idx in 0..4 {
        assert_eq!(
            char_poly_grid_check(&m, &mutated_prime(idx, -1), false),
            None
        );
    }
}

#[test]
fn scaled_bracket_is_caught() {
    let m = pair_algebra(Which::M);
    for idx in 0..4 {
        let w = char_poly_grid_check(&m, &mutated_prime(idx, 2), false);
        assert!(w.is_some(), "bracket {idx}");
    }
    let (pm, mut pmp) = build_pair();
    pmp.alg = mutated_prime(1, 2);
    let p = GwParams {
        r2: q_int(20),
        dual_bound: 2,
        random_samples: 10,
        seed: 7,
        check_closed_form: false,
    };
    let cert = gw_certificate(&pm, &pmp, &p);
    assert!(!cert.pass());
    assert!(cert.first_failure().is_some());
}
