//! The concrete nilmanifolds: the isospectral pair built from the quaternion
//! sign table, and the one-parameter family of lattices on a 6-dimensional
//! algebra.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::str::FromStr;

use crate::algebra::{AlgScalar, AlgebraData, GroupElement};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::scalar::{q_frac, q_int, Q};

/// Which member of the isospectral pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Which {
    M,
    MPrime,
}

impl Which {
    pub fn label(self) -> &'static str {
        match self {
            Which::M => "M",
            Which::MPrime => "Mprime",
        }
    }
}

/// Manifold selector: `M`, `Mprime`, or `defo:<t>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Manifold {
    Pair(Which),
    Deformation(f64),
}

impl FromStr for Manifold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "M" => Ok(Manifold::Pair(Which::M)),
            "Mprime" => Ok(Manifold::Pair(Which::MPrime)),
            _ => s
                .strip_prefix("defo:")
                .and_then(|t| t.parse::<f64>().ok())
                .filter(|t| t.is_finite())
                .map(Manifold::Deformation)
                .ok_or_else(|| Error::BadSelector(s.to_string())),
        }
    }
}

impl Manifold {
    pub fn label(&self) -> String {
        match self {
            Manifold::Pair(w) => w.label().to_string(),
            Manifold::Deformation(t) => format!("defo:{t}"),
        }
    }

    pub fn algebra(&self) -> AlgebraData {
        match self {
            Manifold::Pair(w) => pair_algebra(*w),
            Manifold::Deformation(_) => deformation_algebra(),
        }
    }

    pub fn which(&self) -> Option<Which> {
        match self {
            Manifold::Pair(w) => Some(*w),
            Manifold::Deformation(_) => None,
        }
    }
}

/// A nilmanifold `Γ\N`: algebra plus lattice data.
///
/// `log_lattice` is the lattice in `n = v ⊕ z` whose exponential is `Γ`;
/// `lattice_v` is its projection to `v` and `lattice_z` its intersection with `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct NilmanifoldData<S = Q> {
    pub name: String,
    pub alg: AlgebraData,
    pub lattice_v: Lattice<S>,
    pub lattice_z: Lattice<S>,
    pub log_lattice: Lattice<S>,
}

impl<S: AlgScalar> NilmanifoldData<S> {
    /// Exact membership of a group element in `Γ`.
    pub fn contains(&self, g: &GroupElement<S>) -> bool {
        self.log_lattice.contains(&g.to_vec())
    }

    /// Whether `[b_p, b_q] ∈ 2·lattice_z` for all pairs of `lattice_v` basis vectors.
    pub fn brackets_in_double_z(&self) -> bool {
        let b = self.lattice_v.basis();
        let half = S::half();
        (0..b.len()).all(|p| {
            (p + 1..b.len()).all(|q| {
                let w: Vec<S> = self
                    .alg
                    .bracket_v(&b[p], &b[q])
                    .into_iter()
                    .map(|x| x * half.clone())
                    .collect();
                self.lattice_z.contains(&w)
            })
        })
    }
}

impl NilmanifoldData<Q> {
    /// The lattice generated by all `[b_p, b_q]`.
    pub fn bracket_lattice(&self) -> Lattice<Q> {
        let b = self.lattice_v.basis();
        let mut gens = Vec::new();
        for p in 0..b.len() {
            for q in p + 1..b.len() {
                gens.push(self.alg.bracket_v(&b[p], &b[q]));
            }
        }
        Lattice::from_generators(&gens, self.alg.dim_z()).expect("consistent dimensions")
    }
}

pub const PAIR_V_NAMES: [&str; 5] = ["X_i", "X_j", "Y_i", "Y_j", "Y_k"];
pub const PAIR_Z_NAMES: [&str; 3] = ["Z_i", "Z_j", "Z_k"];

/// Positions of X_a (a ∈ {i, j}) and Y_a (a ∈ {i, j, k}) in the v-basis.
pub const X_IDX: [usize; 2] = [0, 1];
pub const Y_IDX: [usize; 3] = [2, 3, 4];

/// Quaternion product of distinct units `a, b ∈ {i, j, k}` (as 0, 1, 2): `(sign, c)`.
pub fn quaternion_product(a: usize, b: usize) -> (i64, usize) {
    assert!(a != b && a < 3 && b < 3);
    let c = 3 - a - b;
    let sign = if (b + 3 - a) % 3 == 1 { 1 } else { -1 };
    (sign, c)
}

fn unit_z(sign: i64, c: usize) -> Vec<Q> {
    let mut z = vec![q_int(0); 3];
    z[c] = q_int(sign);
    z
}

/// Algebra of one member of the pair, generated from the quaternion rule.
pub fn pair_algebra(which: Which) -> AlgebraData {
    let mut br = Vec::new();
    match which {
        Which::M => {
            for (a, &xa) in X_IDX.iter().enumerate() {
                for (b, &yb) in Y_IDX.iter().enumerate() {
                    if a != b {
                        let (s, c) = quaternion_product(a, b);
                        br.push((xa, yb, unit_z(s, c)));
                    }
                }
            }
        }
        Which::MPrime => {
            let (s, c) = quaternion_product(0, 1);
            br.push((X_IDX[0], X_IDX[1], unit_z(s, c)));
            for a in 0..3 {
                for b in a + 1..3 {
                    let (s, c) = quaternion_product(a, b);
                    br.push((Y_IDX[a], Y_IDX[b], unit_z(s, c)));
                }
            }
        }
    }
    AlgebraData::from_brackets(&PAIR_V_NAMES, &PAIR_Z_NAMES, &br)
        .expect("quaternion table is antisymmetric")
}

fn product_data(
    name: &str,
    alg: AlgebraData,
    lattice_v: Lattice<Q>,
    lattice_z: Lattice<Q>,
) -> NilmanifoldData<Q> {
    let (dv, dz) = (alg.dim_v(), alg.dim_z());
    let mut gens: Vec<Vec<Q>> = Vec::new();
    for b in lattice_v.basis() {
        let mut g = b.clone();
        g.extend(vec![q_int(0); dz]);
        gens.push(g);
    }
    for b in lattice_z.basis() {
        let mut g = vec![q_int(0); dv];
        g.extend(b.iter().cloned());
        gens.push(g);
    }
    let log_lattice = Lattice::new(gens, dv + dz).expect("product basis is independent");
    NilmanifoldData {
        name: name.to_string(),
        alg,
        lattice_v,
        lattice_z,
        log_lattice,
    }
}

/// One member of the pair: `v`-lattice `Z^5`, `z`-lattice `(½Z)^3`.
pub fn pair_member(which: Which) -> NilmanifoldData<Q> {
    product_data(
        which.label(),
        pair_algebra(which),
        Lattice::scaled_standard(5, q_int(1)),
        Lattice::scaled_standard(3, q_frac(1, 2)),
    )
}

/// The isospectral pair `(M, M′)`.
pub fn build_pair() -> (NilmanifoldData<Q>, NilmanifoldData<Q>) {
    (pair_member(Which::M), pair_member(Which::MPrime))
}

pub const DEFO_V_NAMES: [&str; 4] = ["X_1", "X_2", "Y_1", "Y_2"];
pub const DEFO_Z_NAMES: [&str; 2] = ["Z_1", "Z_2"];

/// `[X_1,Y_1] = [X_2,Y_2] = Z_1`, `[X_1,Y_2] = Z_2`.
pub fn deformation_algebra() -> AlgebraData {
    let z1 = vec![q_int(1), q_int(0)];
    let z2 = vec![q_int(0), q_int(1)];
    AlgebraData::from_brackets(
        &DEFO_V_NAMES,
        &DEFO_Z_NAMES,
        &[(0, 2, z1.clone()), (1, 3, z1), (0, 3, z2)],
    )
    .expect("antisymmetric table")
}

fn deformation_in<S: AlgScalar>(t: S, name: String) -> NilmanifoldData<S> {
    let e = |i: usize| {
        let mut x = vec![S::zero(); 6];
        x[i] = S::one();
        x
    };
    let mut shifted = e(3);
    shifted[5] = t;
    let half = S::half();
    let mut hz1 = vec![S::zero(); 6];
    hz1[4] = half.clone();
    let mut hz2 = vec![S::zero(); 6];
    hz2[5] = half.clone();
    let log_lattice =
        Lattice::new(vec![e(0), e(1), e(2), shifted, hz1, hz2], 6).expect("independent generators");
    NilmanifoldData {
        name,
        alg: deformation_algebra(),
        lattice_v: Lattice::scaled_standard(4, S::one()),
        lattice_z: Lattice::scaled_standard(2, half),
        log_lattice,
    }
}

/// The deformation family member at a real parameter (double-mode lattice).
pub fn build_deformation(t: f64) -> NilmanifoldData<f64> {
    deformation_in(t, format!("defo:{t}"))
}

/// The deformation family member at a rational parameter (exact lattice).
pub fn build_deformation_exact(t: &Q) -> NilmanifoldData<Q> {
    deformation_in(t.clone(), format!("defo:{t}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quaternion_signs() {
        assert_eq!(quaternion_product(0, 1), (1, 2));
        assert_eq!(quaternion_product(1, 0), (-1, 2));
        assert_eq!(quaternion_product(1, 2), (1, 0));
        assert_eq!(quaternion_product(2, 0), (1, 1));
        assert_eq!(quaternion_product(0, 2), (-1, 1));
    }

    #[test]
    fn selectors() {
        assert_eq!("M".parse::<Manifold>(), Ok(Manifold::Pair(Which::M)));
        assert_eq!(
            "Mprime".parse::<Manifold>(),
            Ok(Manifold::Pair(Which::MPrime))
        );
        assert_eq!(
            "defo:0.5".parse::<Manifold>(),
            Ok(Manifold::Deformation(0.5))
        );
        assert!("defo:x".parse::<Manifold>().is_err());
        assert!("N".parse::<Manifold>().is_err());
    }

    #[test]
    fn deformation_at_zero_is_standard() {
        let d = build_deformation_exact(&q_int(0));
        let expect = product_data(
            "",
            deformation_algebra(),
            Lattice::scaled_standard(4, q_int(1)),
            Lattice::scaled_standard(2, q_frac(1, 2)),
        );
        assert_eq!(d.log_lattice, expect.log_lattice);
    }
}
