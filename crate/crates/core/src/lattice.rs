//! Lattices given by a basis, with exact membership, duals, intersections
//! with subspaces, and length-spectrum enumeration.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{
    integer_column_echelon, integer_kernel, integer_row, orthogonal_complement, Matrix,
};
use crate::scalar::{floor_sqrt, lcm_denominators, Scalar, Q};

/// A lattice of some rank inside `S^ambient_dim`, spanned by independent basis vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice<S> {
    ambient_dim: usize,
    basis: Vec<Vec<S>>,
    gram: Matrix<S>,
}

pub type RationalLattice = Lattice<Q>;

impl<S: Scalar> Lattice<S> {
    pub fn new(basis: Vec<Vec<S>>, ambient_dim: usize) -> Result<Self> {
        for b in &basis {
            if b.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    got: b.len(),
                });
            }
        }
        if !basis.is_empty() && Matrix::from_cols(&basis, ambient_dim).rank() != basis.len() {
            return Err(Error::DependentBasis);
        }
        let gram = gram_of(&basis);
        Ok(Lattice {
            ambient_dim,
            basis,
            gram,
        })
    }

    /// The rank-zero lattice `{0}`.
    pub fn zero(ambient_dim: usize) -> Self {
        Lattice {
            ambient_dim,
            basis: Vec::new(),
            gram: Matrix::zeros(0, 0),
        }
    }

    /// `Z^n` with the standard basis, scaled by `s`.
    pub fn scaled_standard(n: usize, s: S) -> Self {
        let basis = (0..n)
            .map(|i| {
                let mut e = vec![S::zero(); n];
                e[i] = s.clone();
                e
            })
            .collect();
        Self::new(basis, n).expect("standard basis is independent")
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<S>] {
        &self.basis
    }

    pub fn gram(&self) -> &Matrix<S> {
        &self.gram
    }

    pub fn basis_matrix(&self) -> Matrix<S> {
        Matrix::from_cols(&self.basis, self.ambient_dim)
    }

    /// Coordinates of `w` in the basis, if `w` lies in the span.
    pub fn coordinates(&self, w: &[S]) -> Option<Vec<S>> {
        if w.len() != self.ambient_dim {
            return None;
        }
        if self.basis.is_empty() {
            return w.iter().all(|x| x.negligible(1.0)).then(Vec::new);
        }
        self.basis_matrix().solve(w)
    }

    /// Whether `w` is an integer combination of the basis.
    pub fn contains(&self, w: &[S]) -> bool {
        self.coordinates(w)
            .is_some_and(|x| x.iter().all(Scalar::is_integral))
    }
}

fn gram_of<S: Scalar>(basis: &[Vec<S>]) -> Matrix<S> {
    let r = basis.len();
    let mut g = Matrix::zeros(r, r);
    for i in 0..r {
        for j in 0..r {
            g[(i, j)] = crate::scalar::dot(&basis[i], &basis[j]);
        }
    }
    g
}

/// Squared lengths with multiplicities, up to a cutoff.
#[derive(Clone, Debug, PartialEq)]
pub struct LengthSpectrumSlice {
    pub cutoff: Q,
    /// Ascending squared lengths with multiplicities.
    pub entries: Vec<(Q, u64)>,
}

impl LengthSpectrumSlice {
    pub fn total(&self) -> u64 {
        self.entries.iter().map(|e| e.1).sum()
    }
}

impl Lattice<Q> {
    /// The lattice generated by an arbitrary finite set of rational vectors.
    pub fn from_generators(gens: &[Vec<Q>], ambient_dim: usize) -> Result<Self> {
        if gens.is_empty() {
            return Ok(Self::zero(ambient_dim));
        }
        for g in gens {
            if g.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    got: g.len(),
                });
            }
        }
        let d = lcm_denominators(gens.iter().flatten());
        let dq = Q::from_integer(d.clone());
        let rows: Vec<Vec<BigInt>> = (0..ambient_dim)
            .map(|i| gens.iter().map(|g| (&g[i] * &dq).to_integer()).collect())
            .collect();
        let (reduced, _, rank) = integer_column_echelon(&rows, gens.len());
        let basis = (0..rank)
            .map(|j| {
                (0..ambient_dim)
                    .map(|i| Q::new(reduced[i][j].clone(), d.clone()))
                    .collect()
            })
            .collect();
        Self::new(basis, ambient_dim)
    }

    /// Dual lattice `{w : ⟨w, b⟩ ∈ Z for all b}` of a full-rank lattice.
    pub fn dual(&self) -> Result<Self> {
        if self.rank() != self.ambient_dim {
            return Err(Error::NotFullRank);
        }
        let inv_t = self
            .basis_matrix()
            .inverse()
            .ok_or(Error::NotFullRank)?
            .transpose();
        let basis = (0..self.ambient_dim).map(|j| inv_t.col(j)).collect();
        Self::new(basis, self.ambient_dim)
    }

    /// All lattice points lying in `span(subspace)`.
    pub fn intersect_subspace(&self, subspace: &[Vec<Q>]) -> Result<Self> {
        for s in subspace {
            if s.len() != self.ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: self.ambient_dim,
                    got: s.len(),
                });
            }
        }
        if self.basis.is_empty() {
            return Ok(Self::zero(self.ambient_dim));
        }
        let perp = orthogonal_complement(subspace, self.ambient_dim);
        let b = self.basis_matrix();
        if perp.is_empty() {
            return Ok(self.clone());
        }
        let constraint = Matrix::from_rows(&perp).mul(&b);
        let kernel = integer_kernel(&constraint);
        let basis: Vec<Vec<Q>> = kernel
            .iter()
            .map(|x| {
                let xq: Vec<Q> = x.iter().map(|n| Q::from_integer(n.clone())).collect();
                b.mul_vec(&xq)
            })
            .collect();
        Self::new(basis, self.ambient_dim)
    }

    /// Exact enumeration of all lattice vectors with squared length `≤ r2`,
    /// collected by squared length. The zero vector is included.
    pub fn length_spectrum(&self, r2: &Q) -> LengthSpectrumSlice {
        let mut counts: BTreeMap<Q, u64> = BTreeMap::new();
        if r2.is_negative() {
            return LengthSpectrumSlice {
                cutoff: r2.clone(),
                entries: Vec::new(),
            };
        }
        let r = self.rank();
        if r == 0 {
            counts.insert(Q::zero(), 1);
            return LengthSpectrumSlice {
                cutoff: r2.clone(),
                entries: counts.into_iter().collect(),
            };
        }
        // |x_i|² ≤ r2 · (G⁻¹)_ii for any x with xᵀGx ≤ r2.
        let ginv = self.gram.inverse().expect("gram of independent basis");
        let bounds: Vec<i64> = (0..r)
            .map(|i| {
                floor_sqrt(&(r2 * &ginv[(i, i)]))
                    .to_i64()
                    .expect("enumeration bound fits i64")
            })
            .collect();
        // Integer Gram: d² · G is integral when d clears the basis denominators.
        let d = lcm_denominators(self.basis.iter().flatten());
        let dq = Q::from_integer(d.clone());
        let scaled: Vec<Vec<Q>> = self
            .basis
            .iter()
            .map(|b| b.iter().map(|x| x * &dq).collect())
            .collect();
        let gi: Vec<Vec<i128>> = gram_of(&scaled)
            .rows_vec()
            .into_iter()
            .map(|row| {
                row.iter()
                    .map(|x| x.to_integer().to_i128().expect("gram fits i128"))
                    .collect()
            })
            .collect();
        let d2 = &d * &d;
        let limit = (r2 * Q::from_integer(d2.clone()))
            .floor()
            .to_integer()
            .to_i128()
            .expect("cutoff fits i128");
        let mut x = vec![0i64; r];
        let mut raw: BTreeMap<i128, u64> = BTreeMap::new();
        enumerate_box(&bounds, &gi, limit, 0, &mut x, &mut raw);
        for (n, m) in raw {
            counts.insert(Q::new(BigInt::from(n), d2.clone()), m);
        }
        LengthSpectrumSlice {
            cutoff: r2.clone(),
            entries: counts.into_iter().collect(),
        }
    }

    /// Integer coordinates of a rational lattice element, scaled to a common denominator.
    pub fn integer_basis_rows(&self) -> Vec<Vec<BigInt>> {
        self.basis.iter().map(|b| integer_row(b)).collect()
    }
}

fn enumerate_box(
    bounds: &[i64],
    g: &[Vec<i128>],
    limit: i128,
    depth: usize,
    x: &mut Vec<i64>,
    out: &mut BTreeMap<i128, u64>,
) {
    if depth == bounds.len() {
        let mut q = 0i128;
        for i in 0..x.len() {
            if x[i] == 0 {
                continue;
            }
            for j in 0..x.len() {
                q += g[i][j] * x[i] as i128 * x[j] as i128;
            }
        }
        if q <= limit {
            *out.entry(q).or_insert(0) += 1;
        }
        return;
    }
    for c in -bounds[depth]..=bounds[depth] {
        x[depth] = c;
        enumerate_box(bounds, g, limit, depth + 1, x, out);
    }
    x[depth] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q_frac, q_int, to_q_vec};

    #[test]
    fn standard_square_spectrum() {
        let l = Lattice::scaled_standard(2, q_int(1));
        let s = l.length_spectrum(&q_int(2));
        assert_eq!(s.entries, vec![(q_int(0), 1), (q_int(1), 4), (q_int(2), 4)]);
        let z = Lattice::<Q>::zero(3).length_spectrum(&q_int(5));
        assert_eq!(z.entries, vec![(q_int(0), 1)]);
    }

    #[test]
    fn membership_and_dual() {
        let half = Lattice::scaled_standard(3, q_frac(1, 2));
        assert!(half.contains(&[q_frac(1, 2), q_int(0), q_int(3)]));
        assert!(!half.contains(&[q_frac(1, 4), q_int(0), q_int(0)]));
        let dual = half.dual().unwrap();
        assert_eq!(dual, Lattice::scaled_standard(3, q_int(2)));
        assert_eq!(dual.dual().unwrap(), half);
    }

    #[test]
    fn generators_and_intersection() {
        let l = Lattice::from_generators(
            &[to_q_vec(&[2, 0]), to_q_vec(&[0, 2]), to_q_vec(&[1, 1])],
            2,
        )
        .unwrap();
        assert_eq!(l.rank(), 2);
        assert!(l.contains(&to_q_vec(&[1, 1])));
        assert!(!l.contains(&to_q_vec(&[1, 0])));
        let z3 = Lattice::scaled_standard(3, q_int(1));
        let line = z3
            .intersect_subspace(&[vec![q_frac(1, 2), q_int(1), q_frac(3, 2)]])
            .unwrap();
        assert_eq!(line.rank(), 1);
        assert!(line.contains(&to_q_vec(&[1, 2, 3])));
        let irr = Lattice::scaled_standard(2, q_int(1))
            .intersect_subspace(&[])
            .unwrap();
        assert_eq!(irr.rank(), 0);
    }
}
