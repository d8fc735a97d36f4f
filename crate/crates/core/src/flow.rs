//! Geodesic flow of a left-invariant metric on a two-step nilpotent group:
//! closed-form propagation of `(v, V)` via the eigenframes of `j(Z)`, Simpson
//! quadrature for `z`, and a classical RK4 integrator for any algebra.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{AlgebraData, GroupElement};
use crate::catalog::Which;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{dot, Scalar};

/// A left-trivialized tangent vector `((v, z), V + Z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentState {
    pub base: GroupElement<f64>,
    pub fiber_v: Vec<f64>,
    pub fiber_z: Vec<f64>,
}

impl TangentState {
    pub fn new(v: Vec<f64>, z: Vec<f64>, fv: Vec<f64>, fz: Vec<f64>) -> Self {
        TangentState {
            base: GroupElement::new(v, z),
            fiber_v: fv,
            fiber_z: fz,
        }
    }

    /// `|V + Z|`.
    pub fn speed(&self) -> f64 {
        libm::sqrt(dot(&self.fiber_v, &self.fiber_v) + dot(&self.fiber_z, &self.fiber_z))
    }

    /// Same base point, fiber scaled to unit length.
    pub fn normalized(&self) -> Self {
        let s = self.speed();
        TangentState {
            base: self.base.clone(),
            fiber_v: self.fiber_v.iter().map(|x| x / s).collect(),
            fiber_z: self.fiber_z.iter().map(|x| x / s).collect(),
        }
    }

    /// All 16 (or 12) coordinates in the order `v, z, V, Z`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut out = self.base.v.clone();
        out.extend(&self.base.z);
        out.extend(&self.fiber_v);
        out.extend(&self.fiber_z);
        out
    }

    pub fn from_vec(x: &[f64], dim_v: usize, dim_z: usize) -> Self {
        let (v, rest) = x.split_at(dim_v);
        let (z, rest) = rest.split_at(dim_z);
        let (fv, fz) = rest.split_at(dim_v);
        TangentState::new(v.to_vec(), z.to_vec(), fv.to_vec(), fz[..dim_z].to_vec())
    }

    /// Product-metric distance on `N × n` in exponential coordinates.
    pub fn distance(&self, other: &Self) -> f64 {
        let a = self.to_vec();
        let b = other.to_vec();
        libm::sqrt(a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum())
    }
}

/// The explicit frame vectors `E1..E4, Y` of `j(Z_c)` (or `j′(Z_c)`), given `c`
/// and a value for `|c|` (which may be exact when `|c|` is rational).
pub fn frame_vectors<S: Scalar>(which: Which, c: &[S], norm_c: &S) -> [Vec<S>; 5] {
    let (ci, cj, ck) = (c[0].clone(), c[1].clone(), c[2].clone());
    let z = S::zero;
    let cij2 = ci.clone() * ci.clone() + cj.clone() * cj.clone();
    let e4 = vec![
        z(),
        z(),
        ck.clone() * ci.clone(),
        ck.clone() * cj.clone(),
        -cij2,
    ];
    let y = vec![z(), z(), ci.clone(), cj.clone(), ck];
    match which {
        Which::M => [
            vec![ci.clone(), cj.clone(), z(), z(), z()],
            vec![z(), z(), -cj.clone(), ci.clone(), z()],
            vec![
                norm_c.clone() * cj.clone(),
                -(norm_c.clone() * ci.clone()),
                z(),
                z(),
                z(),
            ],
            e4,
            y,
        ],
        Which::MPrime => [
            vec![S::one(), z(), z(), z(), z()],
            vec![z(), S::one(), z(), z(), z()],
            vec![z(), z(), norm_c.clone() * cj, -(norm_c.clone() * ci), z()],
            e4,
            y,
        ],
    }
}

/// Eigenframe of `j(Z)` for the pair with frequencies `|c_k|` and `|c|`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenFrame {
    pub which: Which,
    pub c: [f64; 3],
    pub e: [Vec<f64>; 4],
    pub y: Vec<f64>,
    pub freq_low: f64,
    pub freq_high: f64,
}

impl EigenFrame {
    /// Signed rotation rates of the two planes: `j E_a = ω E_b` with `ω = c_k`, `|c|`.
    pub fn omegas(&self) -> [f64; 2] {
        [self.c[2], self.freq_high]
    }
}

pub fn eigenframe(which: Which, z: &[f64]) -> Result<EigenFrame> {
    if z.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: z.len(),
        });
    }
    let c = [z[0], z[1], z[2]];
    if c[2] == 0.0 {
        return Err(Error::Degenerate(format!("c_k = 0 at c = {c:?}")));
    }
    if c[0] == 0.0 && c[1] == 0.0 {
        return Err(Error::Degenerate(format!(
            "(c_i, c_j) = 0 at c = {c:?}; |c| = |c_k|"
        )));
    }
    let norm = libm::sqrt(dot(&c, &c));
    let [e1, e2, e3, e4, y] = frame_vectors(which, &c, &norm);
    Ok(EigenFrame {
        which,
        c,
        e: [e1, e2, e3, e4],
        y,
        freq_low: libm::fabs(c[2]),
        freq_high: norm,
    })
}

/// Decomposition `V = V_ck + V_abs + V_0` along the eigenspaces of `j(Z)²`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSplit {
    pub v_ck: Vec<f64>,
    pub v_abs: Vec<f64>,
    pub v_0: Vec<f64>,
    /// Coefficients of `V_⊥` in the (non-normalized) frame `E1..E4`.
    pub alphas: [f64; 4],
    /// `V_0 = beta · Y_c`.
    pub beta: f64,
}

/// Coefficients `(α1..α4, β)` of `V` in a frame `[E1, E2, E3, E4, Y]`.
pub fn frame_coefficients<S: Scalar>(frame: &[Vec<S>; 5], v: &[S]) -> ([S; 4], S) {
    let plane = |a: &Vec<S>, b: &Vec<S>| -> (S, S) {
        let g = Matrix::from_rows(&[vec![dot(a, a), dot(a, b)], vec![dot(b, a), dot(b, b)]]);
        let x = g
            .solve(&[dot(a, v), dot(b, v)])
            .expect("frame vectors independent");
        (x[0].clone(), x[1].clone())
    };
    let (a1, a2) = plane(&frame[0], &frame[1]);
    let (a3, a4) = plane(&frame[2], &frame[3]);
    let beta = dot(&frame[4], v)
        .checked_div(&dot(&frame[4], &frame[4]))
        .expect("Y_c nonzero");
    ([a1, a2, a3, a4], beta)
}

fn combo(a: f64, x: &[f64], b: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(p, q)| a * p + b * q).collect()
}

pub fn spectral_split(which: Which, z: &[f64], v: &[f64]) -> Result<SpectralSplit> {
    let f = eigenframe(which, z)?;
    Ok(split_with(&f, v))
}

pub fn split_with(f: &EigenFrame, v: &[f64]) -> SpectralSplit {
    let frame = [
        f.e[0].clone(),
        f.e[1].clone(),
        f.e[2].clone(),
        f.e[3].clone(),
        f.y.clone(),
    ];
    let (alphas, beta) = frame_coefficients(&frame, v);
    SpectralSplit {
        v_ck: combo(alphas[0], &f.e[0], alphas[1], &f.e[1]),
        v_abs: combo(alphas[2], &f.e[2], alphas[3], &f.e[3]),
        v_0: f.y.iter().map(|y| beta * y).collect(),
        alphas,
        beta,
    }
}

fn norm(x: &[f64]) -> f64 {
    libm::sqrt(dot(x, x))
}

/// Genericity: `|c| > |c_k| > 0` and all three spectral components nonzero,
/// each with margin `tol`.
pub fn is_generic(which: Which, z: &[f64], v: &[f64], tol: f64) -> bool {
    if z.len() != 3 || v.len() != 5 {
        return false;
    }
    let ck = libm::fabs(z[2]);
    let n = norm(z);
    if !(n - ck > tol && ck > tol) {
        return false;
    }
    match spectral_split(which, z, v) {
        Ok(s) => norm(&s.v_ck) > tol && norm(&s.v_abs) > tol && norm(&s.v_0) > tol,
        Err(_) => false,
    }
}

pub const GENERIC_TOL: f64 = 1e-9;

/// Rotated and integrated plane coefficients after time `t` at rate `w`.
fn plane_motion(a: f64, b: f64, w: f64, t: f64) -> ((f64, f64), (f64, f64)) {
    let (s, c) = (libm::sin(w * t), libm::cos(w * t));
    let rot = (a * c - b * s, a * s + b * c);
    let int = ((a * s + b * (c - 1.0)) / w, (a * (1.0 - c) + b * s) / w);
    (rot, int)
}

/// `(v(t), V(t))` in closed form from the eigenframe of `j(Z)`.
pub fn flow_exact_vv(which: Which, state: &TangentState, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let f = eigenframe(which, &state.fiber_z)?;
    let s = split_with(&f, &state.fiber_v);
    Ok(propagate_vv(&f, &s, &state.base.v, t))
}

pub fn propagate_vv(f: &EigenFrame, s: &SpectralSplit, v0: &[f64], t: f64) -> (Vec<f64>, Vec<f64>) {
    let mut v = v0
        .iter()
        .zip(&s.v_0)
        .map(|(x, y)| x + t * y)
        .collect::<Vec<_>>();
    let mut vel = s.v_0.clone();
    for (plane, w) in f.omegas().iter().enumerate() {
        let (ea, eb) = (&f.e[2 * plane], &f.e[2 * plane + 1]);
        let (rot, int) = plane_motion(s.alphas[2 * plane], s.alphas[2 * plane + 1], *w, t);
        for i in 0..vel.len() {
            vel[i] += rot.0 * ea[i] + rot.1 * eb[i];
            v[i] += int.0 * ea[i] + int.1 * eb[i];
        }
    }
    (v, vel)
}

/// Full state at time `t`: closed-form `(v, V)` and `z` by composite Simpson
/// quadrature of `½[v(s), V(s)]` with `intervals` (rounded up to even) panels.
pub fn flow_exact(
    which: Which,
    alg: &AlgebraData,
    state: &TangentState,
    t: f64,
    intervals: usize,
) -> Result<TangentState> {
    let f = eigenframe(which, &state.fiber_z)?;
    let s = split_with(&f, &state.fiber_v);
    let n = (intervals.max(2) + 1) & !1;
    let h = t / n as f64;
    let mut acc = vec![0.0; alg.dim_z()];
    for i in 0..=n {
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let (v, vel) = propagate_vv(&f, &s, &state.base.v, i as f64 * h);
        let br = alg.bracket_v(&v, &vel);
        for r in 0..acc.len() {
            acc[r] += w * br[r];
        }
    }
    let (v, vel) = propagate_vv(&f, &s, &state.base.v, t);
    let z = (0..acc.len())
        .map(|r| state.base.z[r] + t * state.fiber_z[r] + 0.5 * acc[r] * h / 3.0)
        .collect();
    Ok(TangentState::new(v, z, vel, state.fiber_z.clone()))
}

/// `|e^{t j(Z)} V - V|` via the plane rotations.
pub fn rotation_residual(which: Which, z: &[f64], v: &[f64], t: f64) -> Result<f64> {
    let f = eigenframe(which, z)?;
    let s = split_with(&f, v);
    let (_, vel) = propagate_vv(&f, &s, &vec![0.0; v.len()], t);
    Ok(norm(
        &vel.iter().zip(v).map(|(a, b)| a - b).collect::<Vec<_>>(),
    ))
}

fn geodesic_rhs(alg: &AlgebraData, y: &[f64], out: &mut [f64]) {
    let (dv, dz) = (alg.dim_v(), alg.dim_z());
    let v = &y[..dv];
    let fv = &y[dv + dz..2 * dv + dz];
    let fz = &y[2 * dv + dz..];
    let br = alg.bracket_v(v, fv);
    let jv = alg.j_apply(fz, fv);
    out[..dv].copy_from_slice(fv);
    for r in 0..dz {
        out[dv + r] = fz[r] + 0.5 * br[r];
    }
    out[dv + dz..2 * dv + dz].copy_from_slice(&jv);
    for x in &mut out[2 * dv + dz..] {
        *x = 0.0;
    }
}

/// Classical RK4 for `V̇ = j(Z)V, Ż = 0, v̇ = V, ż = Z + ½[v, V]`.
pub fn flow_rk4(alg: &AlgebraData, state: &TangentState, t: f64, steps: usize) -> TangentState {
    let (dv, dz) = (alg.dim_v(), alg.dim_z());
    let n = 2 * (dv + dz);
    let steps = steps.max(1);
    let h = t / steps as f64;
    let mut y = state.to_vec();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    for _ in 0..steps {
        geodesic_rhs(alg, &y, &mut k1);
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        geodesic_rhs(alg, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        geodesic_rhs(alg, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + h * k3[i];
        }
        geodesic_rhs(alg, &tmp, &mut k4);
        for i in 0..n {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    TangentState::from_vec(&y, dv, dz)
}

/// Default RK4 step count `ceil(|t| · 1000)`.
pub fn default_steps(t: f64) -> usize {
    crate::tolerances::Tolerances::default().rk4_steps(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::pair_algebra;

    fn frame_relations(which: Which, c: [f64; 3]) -> f64 {
        let alg = pair_algebra(which);
        let f = eigenframe(which, &c).unwrap();
        let j = |x: &[f64]| alg.j_apply(&c, x);
        let mut err = 0.0f64;
        let [w1, w2] = f.omegas();
        let targets = [
            (j(&f.e[0]), combo(w1, &f.e[1], 0.0, &f.e[1])),
            (j(&f.e[1]), combo(-w1, &f.e[0], 0.0, &f.e[0])),
            (j(&f.e[2]), combo(w2, &f.e[3], 0.0, &f.e[3])),
            (j(&f.e[3]), combo(-w2, &f.e[2], 0.0, &f.e[2])),
            (j(&f.y), vec![0.0; 5]),
        ];
        for (a, b) in targets {
            for (x, y) in a.iter().zip(&b) {
                err = err.max(libm::fabs(x - y));
            }
        }
        err
    }

    #[test]
    fn frames_satisfy_rotation_relations() {
        for which in [Which::M, Which::MPrime] {
            for c in [
                [1.0, 0.0, 1.0],
                [0.0, 1.0, 1.0],
                [1.0, 2.0, 3.0],
                [-0.3, 0.7, -1.1],
            ] {
                assert!(frame_relations(which, c) < 1e-12, "{which:?} {c:?}");
            }
        }
        assert!(eigenframe(Which::M, &[0.0, 0.0, 1.0]).is_err());
        assert!(eigenframe(Which::M, &[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn exact_matches_rk4_short() {
        let alg = pair_algebra(Which::M);
        let s = TangentState::new(
            vec![0.1, -0.2, 0.3, 0.0, 0.5],
            vec![0.0, 0.1, 0.0],
            vec![0.3, -0.4, 0.2, 0.5, -0.1],
            vec![0.4, -0.2, 0.7],
        );
        let (v, vel) = flow_exact_vv(Which::M, &s, 2.0).unwrap();
        let r = flow_rk4(&alg, &s, 2.0, 2000);
        for i in 0..5 {
            assert!(libm::fabs(v[i] - r.base.v[i]) < 1e-10);
            assert!(libm::fabs(vel[i] - r.fiber_v[i]) < 1e-10);
        }
        let q = flow_exact(Which::M, &alg, &s, 2.0, 2000).unwrap();
        for i in 0..3 {
            assert!(libm::fabs(q.base.z[i] - r.base.z[i]) < 1e-10);
        }
    }
}
