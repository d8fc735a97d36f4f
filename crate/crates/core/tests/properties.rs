use nilgeo_core::catalog::{build_pair, pair_algebra};
use nilgeo_core::flow::{flow_exact_vv, is_generic, TangentState};
use nilgeo_core::integrals::{Integral, IntegralSet};
use nilgeo_core::scalar::{dot, q_frac};
use nilgeo_core::spectral::char_poly;
use nilgeo_core::{GroupElement, Which, Q};
use proptest::prelude::*;

fn rat() -> impl Strategy<Value = Q> {
    (-12i64..=12, 1i64..=7).prop_map(|(n, d)| q_frac(n, d))
}

fn rvec(n: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(rat(), n)
}

fn elem() -> impl Strategy<Value = GroupElement<Q>> {
    (rvec(5), rvec(3)).prop_map(|(v, z)| GroupElement::new(v, z))
}

fn which() -> impl Strategy<Value = Which> {
    prop_oneof![Just(Which::M), Just(Which::MPrime)]
}

fn fvec(n: usize, r: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-r..r, n)
}

fn state() -> impl Strategy<Value = TangentState> {
    (fvec(5, 1.0), fvec(3, 1.0), fvec(5, 1.0), fvec(3, 2.0))
        .prop_map(|(v, z, fv, fz)| TangentState::new(v, z, fv, fz))
}

proptest! {
    #[test]
    fn product_is_associative(w in which(), a in elem(), b in elem(), c in elem()) {
        let alg = pair_algebra(w);
        prop_assert_eq!(a.mul(&alg, &b).mul(&alg, &c), a.mul(&alg, &b.mul(&alg, &c)));
    }

    #[test]
    fn inverse_and_conjugation(w in which(), a in elem(), b in elem()) {
        let alg = pair_algebra(w);
        prop_assert_eq!(a.mul(&alg, &a.inv()), GroupElement::identity(&alg));
        prop_assert_eq!(a.conjugate(&alg, &b), a.mul(&alg, &b).mul(&alg, &a.inv()));
    }

    #[test]
    fn j_is_skew_and_dual_to_bracket(w in which(), z in rvec(3), x in rvec(5), y in rvec(5)) {
        let alg = pair_algebra(w);
        let j = alg.j_matrix(&z).unwrap();
        prop_assert_eq!(j.transpose(), j.scale(&q_frac(-1, 1)));
        prop_assert_eq!(dot(&alg.j_apply(&z, &x), &y), dot(&z, &alg.bracket_v(&x, &y)));
    }

    #[test]
    fn pair_char_polys_agree(z in rvec(3)) {
        let a = char_poly(&pair_algebra(Which::M).j_matrix(&z).unwrap()).unwrap();
        let b = char_poly(&pair_algebra(Which::MPrime).j_matrix(&z).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn exact_flow_is_a_group_action(w in which(), st in state(), s in 0.0f64..5.0, t in 0.0f64..5.0) {
        prop_assume!(is_generic(w, &st.fiber_z, &st.fiber_v, 1e-3));
        let (v1, f1) = flow_exact_vv(w, &st, s).unwrap();
        let mid = TangentState::new(v1, st.base.z.clone(), f1, st.fiber_z.clone());
        let (v2, f2) = flow_exact_vv(w, &mid, t).unwrap();
        let (v3, f3) = flow_exact_vv(w, &st, s + t).unwrap();
        for (a, b) in v2.iter().chain(&f2).zip(v3.iter().chain(&f3)) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        let speed = |x: &[f64]| x.iter().map(|y| y * y).sum::<f64>();
        prop_assert!((speed(&f3) - speed(&st.fiber_v)).abs() < 1e-9);
    }

    #[test]
    fn fiber_integrals_ignore_base_point(st in state(), dv in fvec(5, 3.0), dz in fvec(3, 3.0)) {
        prop_assume!(st.fiber_z[2].abs() > 1e-2);
        let set = IntegralSet { which: Which::M };
        let moved = TangentState::new(dv, dz, st.fiber_v.clone(), st.fiber_z.clone());
        for f in Integral::ALL.iter().filter(|f| f.fiber_only()) {
            prop_assert_eq!(set.eval(*f, &st), set.eval(*f, &moved));
        }
    }

}

#[test]
fn lattice_double_dual() {
    let (m, mp) = build_pair();
    for l in [m.log_lattice, mp.log_lattice] {
        assert_eq!(l.dual().unwrap().dual().unwrap(), l);
    }
}
