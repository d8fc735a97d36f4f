//! Translational elements at full-rotation times, exact construction of closed
//! geodesics near a target vector, and numerical dimensions of closed-geodesic
//! families.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::algebra::{AlgebraData, GroupElement};
use crate::catalog::{NilmanifoldData, Which};
use crate::error::{Error, Result};
use crate::flow::{
    eigenframe, flow_exact, is_generic, split_with, EigenFrame, SpectralSplit, TangentState,
    GENERIC_TOL,
};
use crate::integrals::{Integral, IntegralSet};
use crate::sampling::{random_rational, uniform};
use crate::scalar::{
    dot, lcm_denominators, q_from_f64, q_int, q_to_f64, simplest_rational_between,
    simplest_rational_near, Q,
};

/// A closed geodesic produced by [`construct_closed_geodesic`].
///
/// `state` is the unnormalized initial vector whose period is `tau()`; `initial`
/// is its unit-speed rescaling with period `period = tau() · speed`.
/// Both have the same translational element `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedGeodesic {
    pub which: Which,
    /// Rational `c` with `Z = Z_c` in `state`.
    pub c: Vec<Q>,
    /// `|c|`, rational.
    pub norm_c: Q,
    /// `c_k/|c| = p/q` in lowest terms.
    pub ratio: Q,
    /// `V_0 = (b/σ) Y_c`.
    pub b: Q,
    /// Coefficient of `Z_c` in the z-part of `a` at `τ = σ`.
    pub n: Q,
    /// Coefficients along `P = −c_jZ_i + c_iZ_j` and `Q = c_k(c_iZ_i + c_jZ_j) − (c_i²+c_j²)Z_k`.
    pub t1: Q,
    pub t2: Q,
    pub m: BigInt,
    /// `τ/π = 2mq/|c|`.
    pub tau_over_pi: Q,
    pub a: GroupElement<Q>,
    pub state: TangentState,
    pub speed: f64,
    pub initial: TangentState,
    pub period: f64,
    pub generic: bool,
}

impl ClosedGeodesic {
    /// Period of the unnormalized `state`.
    pub fn tau(&self) -> f64 {
        q_to_f64(&self.tau_over_pi) * PI
    }

    /// `q` in `c_k/|c| = p/q`.
    pub fn q(&self) -> BigInt {
        self.ratio.denom().clone()
    }
}

fn norm(x: &[f64]) -> f64 {
    libm::sqrt(dot(x, x))
}

fn scaled(s: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|y| s * y).collect()
}

fn axpy(acc: &mut [f64], s: f64, x: &[f64]) {
    for (a, b) in acc.iter_mut().zip(x) {
        *a += s * b;
    }
}

/// `j(Z)⁻¹` on the two rotation planes: `α_a E_a + α_b E_b ↦ (α_b E_a − α_a E_b)/ω`.
fn j_inverse_plane(f: &EigenFrame, alphas: &[f64; 4], plane: usize) -> Vec<f64> {
    let w = f.omegas()[plane];
    let (a, b) = (alphas[2 * plane], alphas[2 * plane + 1]);
    let mut out = scaled(b / w, &f.e[2 * plane]);
    axpy(&mut out, -a / w, &f.e[2 * plane + 1]);
    out
}

/// z-part of `a/τ`: `Z + [v,V_0] + [V_0, j⁻¹V_⊥] + ½[j⁻¹V_ck, V_ck] + ½[j⁻¹V_abs, V_abs]`.
fn zpart_rate(
    alg: &AlgebraData,
    f: &EigenFrame,
    s: &SpectralSplit,
    v: &[f64],
    z: &[f64],
) -> Vec<f64> {
    let jck = j_inverse_plane(f, &s.alphas, 0);
    let jabs = j_inverse_plane(f, &s.alphas, 1);
    let jperp: Vec<f64> = jck.iter().zip(&jabs).map(|(a, b)| a + b).collect();
    let mut out = z.to_vec();
    axpy(&mut out, 1.0, &alg.bracket_v(v, &s.v_0));
    axpy(&mut out, 1.0, &alg.bracket_v(&s.v_0, &jperp));
    axpy(&mut out, 0.5, &alg.bracket_v(&jck, &s.v_ck));
    axpy(&mut out, 0.5, &alg.bracket_v(&jabs, &s.v_abs));
    out
}

fn generic_split(which: Which, state: &TangentState) -> Result<(EigenFrame, SpectralSplit)> {
    if !is_generic(which, &state.fiber_z, &state.fiber_v, GENERIC_TOL) {
        return Err(Error::NonGeneric(format!(
            "Z = {:?}, V = {:?}",
            state.fiber_z, state.fiber_v
        )));
    }
    let f = eigenframe(which, &state.fiber_z)?;
    let s = split_with(&f, &state.fiber_v);
    Ok((f, s))
}

fn check_preconditions(
    which: Which,
    state: &TangentState,
    tau: f64,
) -> Result<(EigenFrame, SpectralSplit)> {
    let (f, s) = generic_split(which, state)?;
    let res = crate::flow::rotation_residual(which, &state.fiber_z, &state.fiber_v, tau)?;
    if res > 1e-8 * norm(&state.fiber_v).max(1.0) {
        return Err(Error::RotationViolated(res));
    }
    Ok((f, s))
}

/// `a = γ(τ)γ(0)⁻¹` at a full-rotation time, by the bracket formula.
pub fn translational_element(
    which: Which,
    alg: &AlgebraData,
    state: &TangentState,
    tau: f64,
) -> Result<GroupElement<f64>> {
    let (f, s) = check_preconditions(which, state, tau)?;
    let z = zpart_rate(alg, &f, &s, &state.base.v, &state.fiber_z);
    Ok(GroupElement::new(scaled(tau, &s.v_0), scaled(tau, &z)))
}

/// The same element from the fully expanded coordinate formulas.
pub fn translational_element_expanded(
    which: Which,
    state: &TangentState,
    tau: f64,
) -> Result<GroupElement<f64>> {
    let (f, s) = check_preconditions(which, state, tau)?;
    let [ci, cj, ck] = f.c;
    let c2 = ci * ci + cj * cj + ck * ck;
    let cij2 = ci * ci + cj * cj;
    let nc = libm::sqrt(c2);
    let perp2 = dot(&s.v_ck, &s.v_ck) + dot(&s.v_abs, &s.v_abs);
    let ck2 = dot(&s.v_ck, &s.v_ck);
    let beta = s.beta;
    let [_, a2, a3, a4] = s.alphas;
    let v = &state.base.v;
    let (coef_p, coef_q) = match which {
        Which::M => {
            let (xi, xj) = (v[0], v[1]);
            (
                beta * (a2 - ck / cij2 * (xi * ci + xj * cj)),
                -ck2 / (2.0 * ck * c2) + beta * (a4 - (xi * cj - xj * ci) / cij2),
            )
        }
        Which::MPrime => {
            let (yi, yj, yk) = (v[2], v[3], v[4]);
            (
                beta * (-nc * a3 + yk - ck / cij2 * (yi * ci + yj * cj)),
                -ck2 / (2.0 * ck * c2) + beta * (a4 - (yi * cj - yj * ci) / cij2),
            )
        }
    };
    let coef_c = 1.0 + perp2 / (2.0 * c2);
    let p = [-cj, ci, 0.0];
    let q = [ck * ci, ck * cj, -cij2];
    let z = (0..3)
        .map(|r| tau * (coef_c * f.c[r] + coef_p * p[r] + coef_q * q[r]))
        .collect();
    Ok(GroupElement::new(scaled(tau, &s.v_0), z))
}

/// Coordinates of a z-vector along `(Z_c, P, Q)`.
pub fn zc_pq_coordinates(c: &[f64; 3], z: &[f64]) -> [f64; 3] {
    let p = [-c[1], c[0], 0.0];
    let q = [c[2] * c[0], c[2] * c[1], -(c[0] * c[0] + c[1] * c[1])];
    [
        dot(z, c) / dot(c, c),
        dot(z, &p) / dot(&p, &p),
        dot(z, &q) / dot(&q, &q),
    ]
}

/// A rational unit vector near a direction, with the rational ratio `w_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalDirection {
    /// Integer vector `c` with `c/|c| = w`.
    pub c: Vec<Q>,
    /// `|c|` (an integer).
    pub norm: Q,
    /// Rational unit vector.
    pub w: Vec<Q>,
    /// `c_k/|c|` in lowest terms.
    pub ratio: Q,
}

/// Rational point on the unit sphere within `eps` of `u`, avoiding the pole
/// and the equator so that `|c| > |c_k| > 0`.
///
/// Uses stereographic projection from the pole opposite to `u`, rational
/// approximation of the projected point, and the inverse projection.
pub fn rationalize_sphere_direction(u: &[f64; 3], eps: f64) -> RationalDirection {
    let nu = norm(u);
    let u = if nu > 0.0 {
        [u[0] / nu, u[1] / nu, u[2] / nu]
    } else {
        [1.0, 0.0, 1.0]
    };
    let sign = if u[2] < 0.0 { -1 } else { 1 };
    let d = 1.0 + libm::fabs(u[2]);
    let tol = (eps / 4.0).min(0.25);
    let mut s = [
        simplest_rational_near(u[0] / d, tol),
        simplest_rational_near(u[1] / d, tol),
    ];
    // Stay off the pole: s = 0 gives (w_i, w_j) = 0.
    if s[0].is_zero() && s[1].is_zero() {
        s[0] = simplest_positive_in(tol / 2.0, tol);
    }
    // Stay off the equator: |s| = 1 gives w_k = 0.
    let s2 = &s[0] * &s[0] + &s[1] * &s[1];
    if s2 == Q::one() {
        let fix = simplest_positive_in(tol / 4.0, tol / 2.0);
        let k = if s[0].abs() >= s[1].abs() { 0 } else { 1 };
        s[k] = if s[k].is_positive() {
            &s[k] - fix
        } else {
            &s[k] + fix
        };
    }
    let s2 = &s[0] * &s[0] + &s[1] * &s[1];
    let den = Q::one() + &s2;
    let two = q_int(2);
    let w = vec![
        &two * &s[0] / &den,
        &two * &s[1] / &den,
        q_int(sign) * (Q::one() - &s2) / &den,
    ];
    let l = lcm_denominators(w.iter());
    let lq = Q::from_integer(l);
    let c = w.iter().map(|x| x * &lq).collect();
    let ratio = w[2].clone();
    RationalDirection {
        c,
        norm: lq,
        w,
        ratio,
    }
}

fn simplest_positive_in(lo: f64, hi: f64) -> Q {
    simplest_rational_between(
        &q_from_f64(lo).expect("finite"),
        &q_from_f64(hi).expect("finite"),
    )
}

/// Distance of `c` from `{c_k = 0} ∪ {c_i = c_j = 0}`.
pub fn cone_distance(c: &[f64]) -> f64 {
    libm::fabs(c[2]).min(libm::hypot(c[0], c[1]))
}

fn v_of_y(c: &[f64; 3]) -> Vec<f64> {
    vec![0.0, 0.0, c[0], c[1], c[2]]
}

/// Construct a closed geodesic whose unit initial vector lies within `eps` of
/// the normalized `target`.
///
/// The z-part of `a` at `τ = σ = 2πq/|c|` is `n Z_c + t1 P + t2 Q` with
/// rational `n, t1, t2`; `n` is fixed through `|V_⊥|² = 2|c|²(n/σ − 1)` and
/// `t1, t2` by a least-norm correction of `v`.
pub fn construct_closed_geodesic(
    which: Which,
    data: &NilmanifoldData<Q>,
    target: &TangentState,
    eps: f64,
) -> Result<ClosedGeodesic> {
    if !(eps > 0.0) {
        return Err(Error::Construction(format!(
            "epsilon must be positive, got {eps}"
        )));
    }
    if target.fiber_v.len() != 5 || target.fiber_z.len() != 3 || target.speed() == 0.0 {
        return Err(Error::Construction(
            "target must be a nonzero tangent vector of a pair member".into(),
        ));
    }
    let target = target.normalized();
    let cd = cone_distance(&target.fiber_z);
    if cd < eps / 10.0 {
        return Err(Error::Construction(format!(
            "target Z is within {cd:.3e} of the cone |c| = |c_k|, c_k = 0; use epsilon above {:.3e}",
            10.0 * cd
        )));
    }
    let mut delta = eps;
    let mut last = f64::INFINITY;
    for _ in 0..16 {
        if let Some(cg) = attempt(which, data, &target, delta)? {
            let dist = cg.initial.distance(&target);
            if dist < eps {
                return Ok(cg);
            }
            last = dist;
        }
        delta /= 2.0;
    }
    Err(Error::Construction(format!(
        "no closed geodesic found within {eps} (best distance {last:.3e})"
    )))
}

fn attempt(
    which: Which,
    data: &NilmanifoldData<Q>,
    target: &TangentState,
    delta: f64,
) -> Result<Option<ClosedGeodesic>> {
    let alg = &data.alg;
    let zbar = &target.fiber_z;
    let vbar = &target.fiber_v;
    let nz = norm(zbar);
    // c = r·w.
    let dir = rationalize_sphere_direction(&[zbar[0], zbar[1], zbar[2]], delta / (2.0 * nz));
    let r = {
        let lo = q_from_f64((nz - delta / 2.0).max(nz / 2.0)).expect("finite");
        let hi = q_from_f64(nz + delta / 2.0).expect("finite");
        simplest_rational_between(&lo, &hi)
    };
    let cq: Vec<Q> = dir.w.iter().map(|x| x * &r).collect();
    let c = [q_to_f64(&cq[0]), q_to_f64(&cq[1]), q_to_f64(&cq[2])];
    let rf = q_to_f64(&r);
    let qden = dir.ratio.denom().clone();
    let sigma = 2.0 * PI * num_traits::ToPrimitive::to_f64(&qden).unwrap_or(f64::INFINITY) / rf;
    if !sigma.is_finite() {
        return Ok(None);
    }
    let f = eigenframe(which, &c)?;

    // V_0 = (b/σ) Y_c.
    let ysq = rf * rf;
    let beta_bar = dot(vbar, &f.y) / ysq;
    let unit = delta / rf;
    let beta_t = if libm::fabs(beta_bar) >= unit / 2.0 {
        beta_bar
    } else if beta_bar < 0.0 {
        -unit / 2.0
    } else {
        unit / 2.0
    };
    let b = {
        let lo = q_from_f64((beta_t - unit / 4.0) * sigma).expect("finite");
        let hi = q_from_f64((beta_t + unit / 4.0) * sigma).expect("finite");
        simplest_rational_between(&lo, &hi)
    };
    let beta = q_to_f64(&b) / sigma;

    // Direction of V_⊥ with both plane parts nonzero.
    let sbar = split_with(&f, vbar);
    let mut planes = [sbar.v_ck.clone(), sbar.v_abs.clone()];
    for (k, pl) in planes.iter_mut().enumerate() {
        let nrm = norm(pl);
        if nrm < delta / 4.0 {
            let e = &f.e[2 * k];
            axpy(pl, delta / 4.0 / norm(e), e);
        }
    }
    let w: Vec<f64> = planes[0]
        .iter()
        .zip(&planes[1])
        .map(|(a, b)| a + b)
        .collect();
    let nw2 = dot(&w, &w);
    let nw = libm::sqrt(nw2);
    // |V_⊥|² = 2r²(n/σ − 1).
    let n_target = sigma * (1.0 + nw2 / (2.0 * ysq));
    let n_tol = (delta / 4.0) * nw * sigma / (2.0 * ysq);
    let n = {
        let lo = q_from_f64((n_target - n_tol).max(sigma * (1.0 + 1e-12))).expect("finite");
        let hi = q_from_f64(n_target + n_tol).expect("finite");
        if lo > hi {
            return Ok(None);
        }
        simplest_rational_between(&lo, &hi)
    };
    let perp2 = 2.0 * ysq * (q_to_f64(&n) / sigma - 1.0);
    if !(perp2 > 0.0) {
        return Ok(None);
    }
    let vperp = scaled(libm::sqrt(perp2 / nw2), &w);
    let mut vel = scaled(beta, &f.y);
    axpy(&mut vel, 1.0, &vperp);
    let s = split_with(&f, &vel);

    // Correct v so that the P and Q coefficients become rational.
    let mut v = target.base.v.clone();
    let coords = zc_pq_coordinates(&c, &scaled(sigma, &zpart_rate(alg, &f, &s, &v, &c)));
    // Linear map Δv ↦ coordinates of σ[Δv, V_0] along (P, Q).
    let y = v_of_y(&c);
    let cols: Vec<[f64; 2]> = (0..5)
        .map(|i| {
            let mut e = vec![0.0; 5];
            e[i] = sigma * beta;
            let k = zc_pq_coordinates(&c, &alg.bracket_v(&e, &y));
            [k[1], k[2]]
        })
        .collect();
    let mut mm = DMatrix::<f64>::zeros(2, 5);
    for (i, col) in cols.iter().enumerate() {
        mm[(0, i)] = col[0];
        mm[(1, i)] = col[1];
    }
    let smin = mm
        .clone()
        .singular_values()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if !(smin > 0.0) {
        return Ok(None);
    }
    let t_tol = 0.45 * delta * smin;
    let t1 = simplest_rational_near(coords[1], t_tol);
    let t2 = simplest_rational_near(coords[2], t_tol);
    let rhs =
        nalgebra::DVector::from_vec(vec![q_to_f64(&t1) - coords[1], q_to_f64(&t2) - coords[2]]);
    let gram = &mm * mm.transpose();
    let Some(gi) = gram.try_inverse() else {
        return Ok(None);
    };
    let dv = mm.transpose() * (gi * rhs);
    for i in 0..5 {
        v[i] += dv[i];
    }

    // Exact a at τ = σ, then the lattice multiple.
    let ycq = vec![
        q_int(0),
        q_int(0),
        cq[0].clone(),
        cq[1].clone(),
        cq[2].clone(),
    ];
    let a_v: Vec<Q> = ycq.iter().map(|x| x * &b).collect();
    let pq = [-cq[1].clone(), cq[0].clone(), q_int(0)];
    let qq = [
        &cq[2] * &cq[0],
        &cq[2] * &cq[1],
        -(&cq[0] * &cq[0] + &cq[1] * &cq[1]),
    ];
    let a_z: Vec<Q> = (0..3)
        .map(|i| &n * &cq[i] + &t1 * &pq[i] + &t2 * &qq[i])
        .collect();
    let a_sigma = GroupElement::new(a_v, a_z);
    let coords_q = data
        .log_lattice
        .coordinates(&a_sigma.to_vec())
        .ok_or_else(|| {
            Error::Construction("translational element outside the lattice span".into())
        })?;
    let m = lcm_denominators(coords_q.iter());
    let mq = Q::from_integer(m.clone());
    let a = GroupElement::new(
        a_sigma.v.iter().map(|x| x * &mq).collect(),
        a_sigma.z.iter().map(|x| x * &mq).collect(),
    );
    let tau_over_pi = Q::from_integer(BigInt::from(2) * &m * &qden) / &r;

    let state = TangentState::new(v, target.base.z.clone(), vel, c.to_vec());
    let speed = state.speed();
    let initial = state.normalized();
    let period = q_to_f64(&tau_over_pi) * PI * speed;
    let generic = is_generic(which, &state.fiber_z, &state.fiber_v, GENERIC_TOL);
    Ok(Some(ClosedGeodesic {
        which,
        c: cq,
        norm_c: r,
        ratio: dir.ratio,
        b,
        n,
        t1,
        t2,
        m,
        tau_over_pi,
        a,
        state,
        speed,
        initial,
        period,
        generic,
    }))
}

/// Outcome of [`is_period`].
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodCheck {
    /// `a ∈ Γ`, exact.
    pub a_in_gamma: bool,
    /// `τc_k/(2π) ∈ Z` and `τ|c|/(2π) ∈ Z`, exact.
    pub rotation_exact: bool,
    /// `|e^{τj(Z)}V − V|` in floating point.
    pub rotation_residual: f64,
    /// Max-norm distance between the formula value of `a` and the stored `a`.
    pub a_consistency: f64,
}

impl PeriodCheck {
    pub fn pass(&self) -> bool {
        self.a_in_gamma
            && self.rotation_exact
            && self.rotation_residual <= 1e-9
            && self.a_consistency <= 1e-6
    }
}

pub fn is_period(cg: &ClosedGeodesic, data: &NilmanifoldData<Q>) -> Result<PeriodCheck> {
    let a_in_gamma = data.contains(&cg.a);
    let half = &cg.tau_over_pi / q_int(2);
    let rotation_exact = (&half * &cg.c[2]).is_integer()
        && (&half * &cg.norm_c).is_integer()
        && &cg.norm_c * &cg.norm_c == cg.c.iter().map(|x| x * x).fold(Q::zero(), |s, x| s + x);
    let rotation_residual = reduced_rotation_residual(cg)? / norm(&cg.state.fiber_v).max(1.0);
    let (f, s) = generic_split(cg.which, &cg.state)?;
    let tau = cg.tau();
    let z = zpart_rate(&data.alg, &f, &s, &cg.state.base.v, &cg.state.fiber_z);
    let a = GroupElement::new(scaled(tau, &s.v_0), scaled(tau, &z));
    let af = cg.a.to_f64();
    let scale = af
        .to_vec()
        .iter()
        .fold(1.0f64, |m, x| m.max(libm::fabs(*x)));
    let a_consistency = a
        .to_vec()
        .iter()
        .zip(af.to_vec())
        .fold(0.0f64, |m, (x, y)| m.max(libm::fabs(x - y)))
        / scale;
    Ok(PeriodCheck {
        a_in_gamma,
        rotation_exact,
        rotation_residual,
        a_consistency,
    })
}

/// `|e^{τj(Z)}V − V|` with both rotation angles reduced modulo `2π` exactly
/// from the stored `τ/π` before going to floating point. Periods of
/// constructed geodesics can be far too long for a direct evaluation.
pub fn reduced_rotation_residual(cg: &ClosedGeodesic) -> Result<f64> {
    let f = eigenframe(cg.which, &cg.state.fiber_z)?;
    let s = split_with(&f, &cg.state.fiber_v);
    let two = q_int(2);
    let reduce = |x: Q| {
        let r = &x - (&x / &two).floor() * &two;
        q_to_f64(&r) * PI
    };
    let angles = [
        reduce(&cg.tau_over_pi * &cg.c[2]),
        reduce(&cg.tau_over_pi * &cg.norm_c),
    ];
    let mut out = s.v_0.clone();
    for (plane, th) in angles.iter().enumerate() {
        let (a, b) = (s.alphas[2 * plane], s.alphas[2 * plane + 1]);
        let (sn, cs) = (libm::sin(*th), libm::cos(*th));
        axpy(&mut out, a * cs - b * sn, &f.e[2 * plane]);
        axpy(&mut out, a * sn + b * cs, &f.e[2 * plane + 1]);
    }
    Ok(norm(
        &out.iter()
            .zip(&cg.state.fiber_v)
            .map(|(x, y)| x - y)
            .collect::<Vec<_>>(),
    ))
}

/// Simpson panels for a flow over `t` with top frequency `w`: 400 per oscillation.
pub fn simpson_intervals(t: f64, w: f64) -> usize {
    let osc = libm::ceil(libm::fabs(t * w) / (2.0 * PI)) as usize;
    (400 * osc).max(2000)
}

/// Flow-composition oracle `γ(τ)γ(0)⁻¹` by RK4.
pub fn translational_oracle_rk4(
    alg: &AlgebraData,
    state: &TangentState,
    tau: f64,
    steps: usize,
) -> GroupElement<f64> {
    let end = crate::flow::flow_rk4(alg, state, tau, steps);
    end.base.mul(alg, &state.base.inv())
}

/// The constraint map `G(v, z, V, Z) = (γ(τ)γ(0)⁻¹ − a, e^{τj(Z)}V − V)`.
fn constraint(
    which: Which,
    alg: &AlgebraData,
    p: &[f64],
    tau: f64,
    a: &[f64],
    intervals: usize,
) -> Result<Vec<f64>> {
    let st = TangentState::from_vec(p, 5, 3);
    let end = flow_exact(which, alg, &st, tau, intervals)?;
    let tr = end.base.mul(alg, &st.base.inv());
    let mut out: Vec<f64> = tr.to_vec().iter().zip(a).map(|(x, y)| x - y).collect();
    out.extend(end.fiber_v.iter().zip(&st.fiber_v).map(|(x, y)| x - y));
    Ok(out)
}

/// Result of [`family_dimension`].
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyDimension {
    pub nullity: usize,
    /// All 16 singular values, descending (padded rows give zeros).
    pub singular_values: Vec<f64>,
    /// Orthonormal basis of the numerical nullspace in `(v, z, V, Z)` coordinates.
    pub null_basis: Vec<Vec<f64>>,
}

/// Numerical dimension of the family of closed geodesics through `cg.state`
/// with the same `(a, τ)`: nullity of the central-difference Jacobian of the
/// constraint map at step `h`, counting singular values below
/// `threshold × largest`.
pub fn family_dimension(
    cg: &ClosedGeodesic,
    alg: &AlgebraData,
    h: f64,
    threshold: f64,
) -> Result<FamilyDimension> {
    if !cg.generic {
        return Err(Error::NonGeneric("closed geodesic is not generic".into()));
    }
    let tau = cg.tau();
    let a = cg.a.to_f64().to_vec();
    let p0 = cg.state.to_vec();
    let intervals = simpson_intervals(tau, norm(&cg.state.fiber_z));
    let np = p0.len();
    let mut jac = DMatrix::<f64>::zeros(np, np);
    for i in 0..np {
        let mut pp = p0.clone();
        let mut pm = p0.clone();
        pp[i] += h;
        pm[i] -= h;
        let gp = constraint(cg.which, alg, &pp, tau, &a, intervals)?;
        let gm = constraint(cg.which, alg, &pm, tau, &a, intervals)?;
        for (r, (x, y)) in gp.iter().zip(&gm).enumerate() {
            jac[(r, i)] = (x - y) / (2.0 * h);
        }
    }
    let svd = jac.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let mut idx: Vec<usize> = (0..np).collect();
    idx.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let singular_values: Vec<f64> = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let top = singular_values[0];
    let null_idx: Vec<usize> = idx
        .iter()
        .copied()
        .filter(|&i| svd.singular_values[i] <= threshold * top)
        .collect();
    let null_basis = null_idx
        .iter()
        .map(|&i| vt.row(i).iter().copied().collect())
        .collect();
    Ok(FamilyDimension {
        nullity: null_idx.len(),
        singular_values,
        null_basis,
    })
}

/// Projections of the integrals' differentials onto the family tangent space.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberCodim {
    pub rank: usize,
    /// Row per integral (in [`Integral::ALL`] order), one entry per null vector.
    pub projections: Vec<Vec<f64>>,
    pub singular_values: Vec<f64>,
}

impl FiberCodim {
    /// Largest absolute projection of one integral.
    pub fn max_projection(&self, f: Integral) -> f64 {
        let i = Integral::ALL.iter().position(|&g| g == f).expect("listed");
        self.projections[i]
            .iter()
            .fold(0.0, |m, x| m.max(libm::fabs(*x)))
    }
}

/// Central-difference derivatives of `f` along each null vector of the family.
pub fn family_projection<F: Fn(&TangentState) -> f64>(
    cg: &ClosedGeodesic,
    fam: &FamilyDimension,
    h: f64,
    f: F,
) -> Vec<f64> {
    let p0 = cg.state.to_vec();
    fam.null_basis
        .iter()
        .map(|nv| {
            let at = |s: f64| {
                let p: Vec<f64> = p0.iter().zip(nv).map(|(x, d)| x + s * d).collect();
                f(&TangentState::from_vec(&p, 5, 3))
            };
            (at(h) - at(-h)) / (2.0 * h)
        })
        .collect()
}

/// `⟨V, Y_c⟩/|c|²`, the `Y_c`-coefficient of `V`.
pub fn y_coefficient(st: &TangentState) -> f64 {
    let z = &st.fiber_z;
    (st.fiber_v[2] * z[0] + st.fiber_v[3] * z[1] + st.fiber_v[4] * z[2]) / dot(z, z)
}

/// Rank of the eight first integrals restricted to the family tangent space
/// (no row normalization), with singular values above `threshold × largest`.
pub fn invariant_fiber_codim(
    cg: &ClosedGeodesic,
    fam: &FamilyDimension,
    h: f64,
    threshold: f64,
) -> FiberCodim {
    let set = IntegralSet { which: cg.which };
    let projections: Vec<Vec<f64>> = Integral::ALL
        .iter()
        .map(|&f| family_projection(cg, fam, h, |st| set.eval(f, st)))
        .collect();
    let rows = projections.len();
    let cols = fam.null_basis.len();
    let mut m = DMatrix::<f64>::zeros(rows, cols.max(1));
    for (i, row) in projections.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            m[(i, j)] = *x;
        }
    }
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let rank = crate::integrals::numerical_rank(&sv, threshold);
    FiberCodim {
        rank,
        projections,
        singular_values: sv,
    }
}

/// Random generic state of a pair member together with a common rotation
/// period: `c = r·w` with `w` a rational unit vector, `τ = 2πq/r`.
pub fn random_periodic_state<R: Rng>(rng: &mut R, which: Which) -> (TangentState, f64) {
    loop {
        let s = [random_rational(rng, 6, 7), random_rational(rng, 6, 7)];
        let s2 = &s[0] * &s[0] + &s[1] * &s[1];
        if s2.is_zero() || s2 == Q::one() {
            continue;
        }
        let den = Q::one() + &s2;
        let w = [
            q_to_f64(&(q_int(2) * &s[0] / &den)),
            q_to_f64(&(q_int(2) * &s[1] / &den)),
            q_to_f64(&((Q::one() - &s2) / &den)),
        ];
        let wk = (Q::one() - &s2) / &den;
        let r = uniform(rng, 0.5, 2.0);
        let c = [r * w[0], r * w[1], r * w[2]];
        if cone_distance(&c) < 0.05 {
            continue;
        }
        let q = num_traits::ToPrimitive::to_f64(wk.denom()).unwrap_or(1.0);
        let tau = 2.0 * PI * q / r;
        let v: Vec<f64> = (0..5).map(|_| uniform(rng, -1.0, 1.0)).collect();
        let fv: Vec<f64> = (0..5).map(|_| uniform(rng, -1.0, 1.0)).collect();
        let z: Vec<f64> = (0..3).map(|_| uniform(rng, -1.0, 1.0)).collect();
        if !is_generic(which, &c, &fv, 1e-3) {
            continue;
        }
        return (TangentState::new(v, z, fv, c.to_vec()), tau);
    }
}

/// Random unit target away from the degenerate cone by at least `margin`.
pub fn random_target<R: Rng>(rng: &mut R, margin: f64) -> TangentState {
    loop {
        let x: Vec<f64> = (0..16).map(|_| crate::sampling::normal(rng)).collect();
        let mut st = TangentState::from_vec(&x, 5, 3);
        st = st.normalized();
        for i in 0..5 {
            st.base.v[i] = uniform(rng, -1.0, 1.0);
        }
        for i in 0..3 {
            st.base.z[i] = uniform(rng, -1.0, 1.0);
        }
        if cone_distance(&st.fiber_z) >= margin {
            return st;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::pair_member;
    use crate::flow::flow_rk4;
    use crate::sampling::rng_for;

    #[test]
    fn rationalize_examples() {
        let d = rationalize_sphere_direction(&[0.6, 0.0, 0.8], 1e-6);
        assert_eq!(d.c, vec![q_int(3), q_int(0), q_int(4)]);
        assert_eq!(d.ratio, crate::scalar::q_frac(4, 5));
        let p = rationalize_sphere_direction(&[0.0, 0.0, 1.0], 0.5);
        assert!(!(p.c[0].is_zero() && p.c[1].is_zero()));
        assert!(!p.c[2].is_zero());
    }

    #[test]
    fn proof_and_expanded_forms_agree() {
        for which in [Which::M, Which::MPrime] {
            let alg = crate::catalog::pair_algebra(which);
            let mut rng = rng_for(3, "periodicity.test");
            for _ in 0..50 {
                let (st, tau) = random_periodic_state(&mut rng, which);
                let a = translational_element(which, &alg, &st, tau).unwrap();
                let b = translational_element_expanded(which, &st, tau).unwrap();
                let err = a
                    .to_vec()
                    .iter()
                    .zip(b.to_vec())
                    .fold(0.0f64, |m, (x, y)| m.max(libm::fabs(x - y)));
                assert!(err < 1e-10 * tau.max(1.0), "{which:?} {err}");
            }
        }
    }

    #[test]
    fn short_period_matches_rk4() {
        for which in [Which::M, Which::MPrime] {
            let alg = crate::catalog::pair_algebra(which);
            // c = (3, 0, 4)/5 scaled by 2: τ = 2π·5/2.
            let st = TangentState::new(
                vec![0.1, -0.3, 0.2, 0.4, -0.1],
                vec![0.2, 0.0, -0.1],
                vec![0.3, -0.2, 0.5, 0.1, 0.4],
                vec![1.2, 0.0, 1.6],
            );
            let tau = 5.0 * PI;
            let a = translational_element(which, &alg, &st, tau).unwrap();
            let o = translational_oracle_rk4(&alg, &st, tau, 40_000);
            let err = a
                .to_vec()
                .iter()
                .zip(o.to_vec())
                .fold(0.0f64, |m, (x, y)| m.max(libm::fabs(x - y)));
            assert!(err < 1e-8, "{which:?} {err}");
            let _ = flow_rk4;
        }
    }

    #[test]
    fn construction_near_nice_target() {
        let data = pair_member(Which::M);
        let target = TangentState::new(
            vec![0.1, 0.2, -0.1, 0.3, 0.0],
            vec![0.0; 3],
            vec![0.3, -0.2, 0.4, 0.1, 0.2],
            vec![0.36, 0.0, 0.48],
        );
        let cg = construct_closed_geodesic(Which::M, &data, &target, 0.1).unwrap();
        assert!(cg.generic);
        let chk = is_period(&cg, &data).unwrap();
        assert!(chk.pass(), "{chk:?}");
        assert!(cg.initial.distance(&target.normalized()) < 0.1);
    }
}
