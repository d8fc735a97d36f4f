//! Two-step metric Lie algebras `n = v ⊕ z` and their groups in exponential
//! coordinates.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{q_to_f64, Scalar, Q};

/// A two-step nilpotent metric Lie algebra with orthonormal bases of `v` and `z`.
///
/// `[e_p, e_q] = Σ_r T[p][q][r] Z_r` for the v-basis `e_*` and z-basis `Z_*`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraData {
    dim_v: usize,
    dim_z: usize,
    v_names: Vec<String>,
    z_names: Vec<String>,
    table: Vec<Q>,
    table_f64: Vec<f64>,
}

/// Scalars for which a cached copy of the structure constants exists.
pub trait AlgScalar: Scalar {
    fn table(alg: &AlgebraData) -> &[Self];
}

impl AlgScalar for Q {
    fn table(alg: &AlgebraData) -> &[Q] {
        &alg.table
    }
}

impl AlgScalar for f64 {
    fn table(alg: &AlgebraData) -> &[f64] {
        &alg.table_f64
    }
}

impl AlgebraData {
    /// Build from a list of basis brackets `[e_p, e_q] = z` with `p < q` or `p > q`;
    /// the antisymmetric partner is filled in. Conflicting entries are rejected.
    pub fn from_brackets(
        v_names: &[&str],
        z_names: &[&str],
        brackets: &[(usize, usize, Vec<Q>)],
    ) -> Result<Self> {
        let dv = v_names.len();
        let dz = z_names.len();
        let mut table = vec![<Q as num_traits::Zero>::zero(); dv * dv * dz];
        let mut set = vec![false; dv * dv];
        for (p, q, z) in brackets {
            let (p, q) = (*p, *q);
            if z.len() != dz {
                return Err(Error::DimensionMismatch {
                    expected: dz,
                    got: z.len(),
                });
            }
            if p >= dv || q >= dv {
                return Err(Error::DimensionMismatch {
                    expected: dv,
                    got: p.max(q) + 1,
                });
            }
            if p == q {
                if z.iter().any(|x| !x.negligible(0.0)) {
                    return Err(Error::NotAntisymmetric(p, q));
                }
                continue;
            }
            for r in 0..dz {
                let fwd = (p * dv + q) * dz + r;
                let bwd = (q * dv + p) * dz + r;
                if set[p * dv + q] && table[fwd] != z[r] {
                    return Err(Error::NotAntisymmetric(p, q));
                }
                table[fwd] = z[r].clone();
                table[bwd] = -z[r].clone();
            }
            set[p * dv + q] = true;
            set[q * dv + p] = true;
        }
        Self::from_table(
            v_names.iter().map(|s| String::from(*s)).collect(),
            z_names.iter().map(|s| String::from(*s)).collect(),
            table,
        )
    }

    /// Build from a dense table indexed `(p * dim_v + q) * dim_z + r`.
    pub fn from_table(v_names: Vec<String>, z_names: Vec<String>, table: Vec<Q>) -> Result<Self> {
        let dv = v_names.len();
        let dz = z_names.len();
        if table.len() != dv * dv * dz {
            return Err(Error::DimensionMismatch {
                expected: dv * dv * dz,
                got: table.len(),
            });
        }
        for p in 0..dv {
            for q in 0..dv {
                for r in 0..dz {
                    if table[(p * dv + q) * dz + r] != -table[(q * dv + p) * dz + r].clone() {
                        return Err(Error::NotAntisymmetric(p, q));
                    }
                }
            }
        }
        let table_f64 = table.iter().map(q_to_f64).collect();
        Ok(AlgebraData {
            dim_v: dv,
            dim_z: dz,
            v_names,
            z_names,
            table,
            table_f64,
        })
    }

    pub fn dim_v(&self) -> usize {
        self.dim_v
    }

    pub fn dim_z(&self) -> usize {
        self.dim_z
    }

    pub fn dim(&self) -> usize {
        self.dim_v + self.dim_z
    }

    pub fn v_names(&self) -> &[String] {
        &self.v_names
    }

    pub fn z_names(&self) -> &[String] {
        &self.z_names
    }

    /// `[e_p, e_q]` as a z-vector.
    pub fn basis_bracket(&self, p: usize, q: usize) -> &[Q] {
        let o = (p * self.dim_v + q) * self.dim_z;
        &self.table[o..o + self.dim_z]
    }

    /// Bracket of two v-vectors.
    pub fn bracket_v<S: AlgScalar>(&self, a: &[S], b: &[S]) -> Vec<S> {
        debug_assert!(a.len() == self.dim_v && b.len() == self.dim_v);
        let t = S::table(self);
        let (dv, dz) = (self.dim_v, self.dim_z);
        let mut out = vec![S::zero(); dz];
        for p in 0..dv {
            if a[p].negligible(0.0) {
                continue;
            }
            for q in 0..dv {
                if p == q || b[q].negligible(0.0) {
                    continue;
                }
                let w = a[p].clone() * b[q].clone();
                let o = (p * dv + q) * dz;
                for r in 0..dz {
                    out[r] = out[r].clone() + w.clone() * t[o + r].clone();
                }
            }
        }
        out
    }

    /// Bracket of two full algebra vectors (v-part first, then z-part).
    /// z-components are central and contribute nothing.
    pub fn bracket<S: AlgScalar>(&self, a: &[S], b: &[S]) -> Result<Vec<S>> {
        for x in [a, b] {
            if x.len() != self.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.dim(),
                    got: x.len(),
                });
            }
        }
        Ok(self.bracket_v(&a[..self.dim_v], &b[..self.dim_v]))
    }

    /// The skew operator `j(Z)` on `v`, defined by `⟨j(Z)X, Y⟩ = ⟨Z, [X, Y]⟩`.
    pub fn j_matrix<S: AlgScalar>(&self, z: &[S]) -> Result<Matrix<S>> {
        if z.len() != self.dim_z {
            return Err(Error::DimensionMismatch {
                expected: self.dim_z,
                got: z.len(),
            });
        }
        let t = S::table(self);
        let (dv, dz) = (self.dim_v, self.dim_z);
        let mut m = Matrix::zeros(dv, dv);
        for p in 0..dv {
            for q in 0..dv {
                let o = (p * dv + q) * dz;
                let mut acc = S::zero();
                for r in 0..dz {
                    acc = acc + z[r].clone() * t[o + r].clone();
                }
                // column p is j(Z) e_p; its q-th entry is ⟨Z, [e_p, e_q]⟩
                m[(q, p)] = acc;
            }
        }
        Ok(m)
    }

    /// `j(Z) x` without materializing the matrix.
    pub fn j_apply<S: AlgScalar>(&self, z: &[S], x: &[S]) -> Vec<S> {
        let t = S::table(self);
        let (dv, dz) = (self.dim_v, self.dim_z);
        let mut out = vec![S::zero(); dv];
        for p in 0..dv {
            if x[p].negligible(0.0) {
                continue;
            }
            for q in 0..dv {
                let o = (p * dv + q) * dz;
                let mut acc = S::zero();
                for r in 0..dz {
                    acc = acc + z[r].clone() * t[o + r].clone();
                }
                out[q] = out[q].clone() + acc * x[p].clone();
            }
        }
        out
    }
}

/// `exp(v + z)` in exponential coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement<S> {
    pub v: Vec<S>,
    pub z: Vec<S>,
}

impl<S: AlgScalar> GroupElement<S> {
    pub fn new(v: Vec<S>, z: Vec<S>) -> Self {
        GroupElement { v, z }
    }

    pub fn identity(alg: &AlgebraData) -> Self {
        GroupElement {
            v: vec![S::zero(); alg.dim_v()],
            z: vec![S::zero(); alg.dim_z()],
        }
    }

    /// Two-step BCH: `(v, z)(v̄, z̄) = (v + v̄, z + z̄ + ½[v, v̄])`.
    pub fn mul(&self, alg: &AlgebraData, other: &Self) -> Self {
        let br = alg.bracket_v(&self.v, &other.v);
        let half = S::half();
        GroupElement {
            v: crate::scalar::add_vec(&self.v, &other.v),
            z: self
                .z
                .iter()
                .zip(&other.z)
                .zip(br)
                .map(|((a, b), c)| a.clone() + b.clone() + half.clone() * c)
                .collect(),
        }
    }

    pub fn inv(&self) -> Self {
        GroupElement {
            v: self.v.iter().map(|x| -x.clone()).collect(),
            z: self.z.iter().map(|x| -x.clone()).collect(),
        }
    }

    /// `g h g⁻¹ = (v̄, z̄ + [v, v̄])` for `g = self`, `h = (v̄, z̄)`.
    pub fn conjugate(&self, alg: &AlgebraData, h: &Self) -> Self {
        let br = alg.bracket_v(&self.v, &h.v);
        GroupElement {
            v: h.v.clone(),
            z: crate::scalar::add_vec(&h.z, &br),
        }
    }

    /// Coordinates as one vector `(v, z)`.
    pub fn to_vec(&self) -> Vec<S> {
        let mut out = self.v.clone();
        out.extend(self.z.iter().cloned());
        out
    }
}

impl GroupElement<Q> {
    pub fn to_f64(&self) -> GroupElement<f64> {
        GroupElement {
            v: crate::scalar::to_f64_vec(&self.v),
            z: crate::scalar::to_f64_vec(&self.z),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q_frac, q_int};

    fn heisenberg() -> AlgebraData {
        AlgebraData::from_brackets(&["X", "Y"], &["Z"], &[(0, 1, vec![q_int(1)])]).unwrap()
    }

    #[test]
    fn heisenberg_j_and_bch() {
        let h = heisenberg();
        let j = h.j_matrix(&[q_int(1)]).unwrap();
        // j(Z)X = Y, j(Z)Y = -X
        assert_eq!(j.col(0), vec![q_int(0), q_int(1)]);
        assert_eq!(j.col(1), vec![q_int(-1), q_int(0)]);
        let a = GroupElement::new(vec![q_int(1), q_int(0)], vec![q_int(0)]);
        let b = GroupElement::new(vec![q_int(0), q_int(1)], vec![q_int(0)]);
        assert_eq!(a.mul(&h, &b).z, vec![q_frac(1, 2)]);
        assert_eq!(b.mul(&h, &a).z, vec![q_frac(-1, 2)]);
    }

    #[test]
    fn rejects_inconsistent_brackets() {
        let r = AlgebraData::from_brackets(
            &["X", "Y"],
            &["Z"],
            &[(0, 1, vec![q_int(1)]), (1, 0, vec![q_int(1)])],
        );
        assert_eq!(r, Err(Error::NotAntisymmetric(1, 0)));
        assert!(heisenberg().bracket(&[q_int(1)], &[q_int(1)]).is_err());
    }

    #[test]
    fn j_apply_matches_matrix() {
        let h = heisenberg();
        let z = [2.5];
        let x = [0.3, -1.2];
        let m = h.j_matrix(&z).unwrap();
        assert_eq!(m.mul_vec(&x), h.j_apply(&z, &x));
    }
}
