//! Deterministic randomness: every consumer draws from its own named stream
//! derived from one master seed.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use alloc::vec;
use alloc::vec::Vec;

use crate::catalog::Which;
use crate::flow::{is_generic, TangentState};
use crate::scalar::Q;

/// FNV-1a, used to turn a stream name into a ChaCha stream id.
fn fnv1a(name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Generator for the stream `name` under master seed `seed`.
pub fn rng_for(seed: u64, name: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(name));
    rng
}

/// Random rational `n/d` with `|n| ≤ max_num`, `1 ≤ d ≤ max_den`.
pub fn random_rational<R: Rng>(rng: &mut R, max_num: i64, max_den: i64) -> Q {
    let n = rng.random_range(-max_num..=max_num);
    let d = rng.random_range(1..=max_den);
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Standard normal deviate (Box–Muller).
pub fn normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
}

/// Random state with `|c_k| ∈ [0.5, 2]`, `c_i, c_j ∈ [-2, 2]`, all other
/// coordinates in `[-1, 1]`, generic with margin `1e-3` for `which`.
/// With `unit`, the fiber is rescaled to length one afterwards.
///
/// The ranges keep `Φ(Z) = exp(-1/(c_k|c|²)²)` well inside the normal doubles.
pub fn generic_state<R: Rng>(rng: &mut R, which: Which, unit: bool) -> TangentState {
    loop {
        let v: Vec<f64> = (0..5).map(|_| uniform(rng, -1.0, 1.0)).collect();
        let z: Vec<f64> = (0..3).map(|_| uniform(rng, -1.0, 1.0)).collect();
        let fv: Vec<f64> = (0..5).map(|_| uniform(rng, -1.0, 1.0)).collect();
        let ck = uniform(rng, 0.5, 2.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
        let fz = vec![uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0), ck];
        if libm::hypot(fz[0], fz[1]) < 0.05 || !is_generic(which, &fz, &fv, 1e-3) {
            continue;
        }
        let st = TangentState::new(v, z, fv, fz);
        return if unit { st.normalized() } else { st };
    }
}

/// Like [`generic_state`] but with `c_k = 0` (and `(c_i, c_j) ≠ 0`).
pub fn state_with_ck_zero<R: Rng>(rng: &mut R) -> TangentState {
    loop {
        let v: Vec<f64> = (0..5).map(|_| uniform(rng, -1.0, 1.0)).collect();
        let z: Vec<f64> = (0..3).map(|_| uniform(rng, -1.0, 1.0)).collect();
        let fv: Vec<f64> = (0..5).map(|_| uniform(rng, -1.0, 1.0)).collect();
        let fz = vec![uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0), 0.0];
        if libm::hypot(fz[0], fz[1]) > 0.05 {
            return TangentState::new(v, z, fv, fz);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_named_and_reproducible() {
        let a: u64 = rng_for(42, "a").random();
        let a2: u64 = rng_for(42, "a").random();
        let b: u64 = rng_for(42, "b").random();
        let c: u64 = rng_for(43, "a").random();
        assert_eq!(a, a2);
        assert_ne!(a, b);
        assert_ne!(a, c);
    }
}
