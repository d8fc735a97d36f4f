//! The eight first integrals on the integrable member of the pair, their
//! left-trivialized gradients and Hamiltonian fields, Poisson brackets, and
//! the functional-independence rank.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::algebra::{AlgebraData, GroupElement};
use crate::catalog::Which;
use crate::error::{Error, Result};
use crate::flow::{frame_vectors, TangentState};
use crate::scalar::dot;

/// Labels of the integral set, in their canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Integral {
    QZi,
    QZj,
    QZk,
    H1,
    H2,
    K,
    FXi,
    FXj,
}

impl Integral {
    pub const ALL: [Integral; 8] = [
        Integral::QZi,
        Integral::QZj,
        Integral::QZk,
        Integral::H1,
        Integral::H2,
        Integral::K,
        Integral::FXi,
        Integral::FXj,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Integral::QZi => "q^Zi",
            Integral::QZj => "q^Zj",
            Integral::QZk => "q^Zk",
            Integral::H1 => "h1",
            Integral::H2 => "h2",
            Integral::K => "k",
            Integral::FXi => "f^Xi",
            Integral::FXj => "f^Xj",
        }
    }

    /// Depends on the fiber `V + Z` only.
    pub fn fiber_only(self) -> bool {
        !matches!(self, Integral::FXi | Integral::FXj)
    }
}

/// `C(Z): y → x` as a 2×3 matrix in the bases `(X_i, X_j)` and `(Y_i, Y_j, Y_k)`.
/// Satisfies `C(Z) ∘ j(Z)|_x = Id_x`.
pub fn c_matrix(z: &[f64]) -> Result<[[f64; 3]; 2]> {
    let (ci, cj, ck) = (z[0], z[1], z[2]);
    if ck == 0.0 {
        return Err(Error::Degenerate(alloc::format!(
            "C(Z) needs c_k != 0, got c = {z:?}"
        )));
    }
    let d = ck * (ci * ci + cj * cj + ck * ck);
    Ok([
        [-ci * cj / d, (ci * ci + ck * ck) / d, -cj * ck / d],
        [-(cj * cj + ck * ck) / d, ci * cj / d, ci * ck / d],
    ])
}

/// `e^{-1/x²}` extended by `0` at `0`.
pub fn phi(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        libm::exp(-1.0 / (x * x))
    }
}

/// `Φ(Z) = φ(c_k |c|²)`.
pub fn phi_factor(z: &[f64]) -> f64 {
    phi(z[2] * dot(z, z))
}

/// Below this `|c_k|` the `f^X` integrals take their zero branch.
pub const CK_ZERO: f64 = 1e-300;

/// Evaluation context: which manifold's eigenframe defines `h1`, `h2`, `k`.
/// The integrals are first integrals on `M`; the `M′` variant is exploratory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntegralSet {
    pub which: Which,
}

impl Default for IntegralSet {
    fn default() -> Self {
        IntegralSet { which: Which::M }
    }
}

impl IntegralSet {
    pub fn eval(&self, f: Integral, s: &TangentState) -> f64 {
        let z = &s.fiber_z;
        let vv = &s.fiber_v;
        match f {
            Integral::QZi => z[0],
            Integral::QZj => z[1],
            Integral::QZk => z[2],
            Integral::H1 | Integral::H2 | Integral::K => {
                let n = libm::sqrt(dot(z, z));
                let fr = frame_vectors(self.which, z, &n);
                let p = |i: usize| dot(vv, &fr[i]);
                match f {
                    Integral::H1 => p(0) * p(0) + p(1) * p(1),
                    Integral::H2 => p(2) * p(2) + p(3) * p(3),
                    _ => p(4),
                }
            }
            Integral::FXi | Integral::FXj => {
                if libm::fabs(z[2]) < CK_ZERO {
                    return 0.0;
                }
                let c = c_matrix(z).expect("c_k nonzero");
                let row = if f == Integral::FXi { 0 } else { 1 };
                let cv = c[row][0] * vv[2] + c[row][1] * vv[3] + c[row][2] * vv[4];
                let w = s.base.v[row] - cv;
                phi_factor(z) * libm::sin(2.0 * core::f64::consts::PI * w)
            }
        }
    }

    pub fn eval_all(&self, s: &TangentState) -> [f64; 8] {
        Integral::ALL.map(|f| self.eval(f, s))
    }
}

/// Energy `½|V + Z|²`.
pub fn energy(s: &TangentState) -> f64 {
    0.5 * (dot(&s.fiber_v, &s.fiber_v) + dot(&s.fiber_z, &s.fiber_z))
}

/// Gradient in the left-trivialized product metric: `base` in the
/// left-invariant frame of `N`, `fiber` in `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeftGradient {
    pub base: Vec<f64>,
    pub fiber: Vec<f64>,
}

impl LeftGradient {
    pub fn to_vec(&self) -> Vec<f64> {
        let mut out = self.base.clone();
        out.extend(&self.fiber);
        out
    }
}

fn basis_vector(n: usize, i: usize, s: f64) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = s;
    e
}

/// `((v, z) · exp(s·e), V + Z)` for a left-invariant direction `e ∈ n`.
pub fn move_base(alg: &AlgebraData, st: &TangentState, dir: &[f64], s: f64) -> TangentState {
    let dv = alg.dim_v();
    let step = GroupElement::new(
        dir[..dv].iter().map(|x| s * x).collect(),
        dir[dv..].iter().map(|x| s * x).collect(),
    );
    TangentState {
        base: st.base.mul(alg, &step),
        ..st.clone()
    }
}

fn move_fiber(alg: &AlgebraData, st: &TangentState, dir: &[f64], s: f64) -> TangentState {
    let dv = alg.dim_v();
    let mut out = st.clone();
    for i in 0..dv {
        out.fiber_v[i] += s * dir[i];
    }
    for r in 0..alg.dim_z() {
        out.fiber_z[r] += s * dir[dv + r];
    }
    out
}

/// Central-difference gradient with step `h`.
pub fn left_gradient<F: Fn(&TangentState) -> f64>(
    alg: &AlgebraData,
    f: F,
    st: &TangentState,
    h: f64,
) -> LeftGradient {
    let n = alg.dim();
    let mut base = vec![0.0; n];
    let mut fiber = vec![0.0; n];
    for i in 0..n {
        let e = basis_vector(n, i, 1.0);
        base[i] = (f(&move_base(alg, st, &e, h)) - f(&move_base(alg, st, &e, -h))) / (2.0 * h);
        fiber[i] = (f(&move_fiber(alg, st, &e, h)) - f(&move_fiber(alg, st, &e, -h))) / (2.0 * h);
    }
    LeftGradient { base, fiber }
}

/// Hamiltonian vector field in left-trivialized form: a left-invariant base
/// direction and a fiber direction.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianField {
    pub base: Vec<f64>,
    pub fiber: Vec<f64>,
}

/// For gradient `(B, A)` the field is `(A, -B + j(Z)A_v)`.
pub fn field_from_gradient(
    alg: &AlgebraData,
    grad: &LeftGradient,
    st: &TangentState,
) -> HamiltonianField {
    let dv = alg.dim_v();
    let ja = alg.j_apply(&st.fiber_z, &grad.fiber[..dv]);
    let mut fiber: Vec<f64> = grad.base.iter().map(|b| -b).collect();
    for i in 0..dv {
        fiber[i] += ja[i];
    }
    HamiltonianField {
        base: grad.fiber.clone(),
        fiber,
    }
}

pub fn hamiltonian_field<F: Fn(&TangentState) -> f64>(
    alg: &AlgebraData,
    f: F,
    st: &TangentState,
    h: f64,
) -> HamiltonianField {
    field_from_gradient(alg, &left_gradient(alg, f, st, h), st)
}

/// Point reached after moving a parameter `s` along a field.
pub fn move_along(
    alg: &AlgebraData,
    st: &TangentState,
    field: &HamiltonianField,
    s: f64,
) -> TangentState {
    move_fiber(alg, &move_base(alg, st, &field.base, s), &field.fiber, s)
}

/// Derivative of `f` along a field by central differences.
pub fn directional<F: Fn(&TangentState) -> f64>(
    alg: &AlgebraData,
    f: F,
    st: &TangentState,
    field: &HamiltonianField,
    h: f64,
) -> f64 {
    (f(&move_along(alg, st, field, h)) - f(&move_along(alg, st, field, -h))) / (2.0 * h)
}

/// `{f, g} = df(X_g)`.
pub fn poisson_bracket<F, G>(alg: &AlgebraData, f: F, g: G, st: &TangentState, h: f64) -> f64
where
    F: Fn(&TangentState) -> f64,
    G: Fn(&TangentState) -> f64,
{
    let xg = hamiltonian_field(alg, g, st, h);
    directional(alg, f, st, &xg, h)
}

/// Gradients of all eight integrals as an 8 × 2·dim(n) matrix (rows `(B, A)`).
pub fn gradient_matrix(
    alg: &AlgebraData,
    set: &IntegralSet,
    st: &TangentState,
    h: f64,
) -> Vec<Vec<f64>> {
    Integral::ALL
        .iter()
        .map(|&f| left_gradient(alg, |s| set.eval(f, s), st, h).to_vec())
        .collect()
}

/// Singular values (descending) of a row-normalized matrix; zero rows stay zero.
pub fn normalized_singular_values(rows: &[Vec<f64>]) -> Vec<f64> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    let mut m = DMatrix::<f64>::zeros(r, c);
    for (i, row) in rows.iter().enumerate() {
        let n = libm::sqrt(dot(row, row));
        if n > 0.0 {
            for (j, x) in row.iter().enumerate() {
                m[(i, j)] = x / n;
            }
        }
    }
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Number of singular values above `threshold` times the largest.
pub fn numerical_rank(sv: &[f64], threshold: f64) -> usize {
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > threshold * top).count()
}

/// Rank of the 8 × 16 gradient matrix of the integral set.
///
/// Rows are normalized before the SVD: the `f^X` gradients carry the factor
/// `Φ(Z)`, which can be many orders of magnitude below the others while still
/// nonzero, and row scaling does not change rank.
pub fn independence_rank(
    alg: &AlgebraData,
    set: &IntegralSet,
    st: &TangentState,
    h: f64,
    threshold: f64,
) -> usize {
    numerical_rank(
        &normalized_singular_values(&gradient_matrix(alg, set, st, h)),
        threshold,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::pair_algebra;

    fn state() -> TangentState {
        TangentState::new(
            vec![0.3, -0.7, 0.2, 0.1, -0.4],
            vec![0.5, 0.0, -0.2],
            vec![0.6, 0.1, -0.3, 0.4, 0.2],
            vec![0.8, -0.5, 1.2],
        )
    }

    #[test]
    fn c_matrix_inverts_j_on_x() {
        let alg = pair_algebra(Which::M);
        let z = [0.4, -1.3, 0.9];
        let c = c_matrix(&z).unwrap();
        for (col, x) in [[1.0, 0.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0, 0.0]]
            .iter()
            .enumerate()
        {
            let jx = alg.j_apply(&z, x);
            for row in 0..2 {
                let v = c[row][0] * jx[2] + c[row][1] * jx[3] + c[row][2] * jx[4];
                let expect = if row == col { 1.0 } else { 0.0 };
                assert!(libm::fabs(v - expect) < 1e-14);
            }
        }
        assert!(c_matrix(&[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi_factor(&[0.0, 1.0, 0.0]), 0.0);
        assert!(libm::fabs(phi_factor(&[0.0, 0.0, 1.0]) - libm::exp(-1.0)) < 1e-16);
        assert_eq!(
            phi_factor(&[0.3, 0.2, -0.9]),
            phi_factor(&[-0.3, -0.2, 0.9])
        );
    }

    #[test]
    fn energy_field_is_geodesic_rhs() {
        let alg = pair_algebra(Which::M);
        let s = state();
        let x = hamiltonian_field(&alg, energy, &s, 1e-6);
        let jv = alg.j_apply(&s.fiber_z, &s.fiber_v);
        for i in 0..5 {
            assert!(libm::fabs(x.base[i] - s.fiber_v[i]) < 1e-9);
            assert!(libm::fabs(x.fiber[i] - jv[i]) < 1e-9);
        }
        for r in 0..3 {
            assert!(libm::fabs(x.base[5 + r] - s.fiber_z[r]) < 1e-9);
            assert!(libm::fabs(x.fiber[5 + r]) < 1e-9);
        }
    }

    #[test]
    fn sanity_bracket_is_one() {
        let alg = pair_algebra(Which::M);
        let b = poisson_bracket(
            &alg,
            |s: &TangentState| s.base.v[0],
            |s: &TangentState| s.fiber_v[0],
            &state(),
            1e-6,
        );
        assert!(libm::fabs(b - 1.0) < 1e-6, "{b}");
    }
}
