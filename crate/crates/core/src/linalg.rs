//! Small dense matrices over a [`Scalar`], elimination-based solvers, and
//! integer kernels for lattice work.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::{Scalar, Q};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().cloned());
        }
        Matrix {
            rows: r,
            cols: c,
            data,
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<S>], nrows: usize) -> Self {
        let mut m = Self::zeros(nrows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), nrows, "column length mismatch");
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn rows_vec(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.negligible(0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out[(i, j)].clone() + a.clone() * rhs[(k, j)].clone();
                    out[(i, j)] = v;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[S]) -> Vec<S> {
        assert_eq!(
            self.cols,
            x.len(),
            "dimension mismatch in matrix-vector product"
        );
        (0..self.rows)
            .map(|i| crate::scalar::dot(self.row(i), x))
            .collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols);
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| s.clone() * a.clone()).collect(),
        }
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.negligible(0.0))
    }

    fn max_magnitude(&self) -> f64 {
        self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    /// In-place reduced row echelon form. Returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let scale = self.max_magnitude();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let (best, best_mag) = (r..self.rows)
                .map(|i| (i, self[(i, c)].magnitude()))
                .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best_mag <= 0.0 || self[(best, c)].negligible(scale) {
                continue;
            }
            self.swap_rows(r, best);
            let p = self[(r, c)].clone();
            for j in c..self.cols {
                let v = self[(r, j)].checked_div(&p).expect("nonzero pivot");
                self[(r, j)] = v;
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self[(i, c)].clone();
                if f.negligible(0.0) {
                    continue;
                }
                for j in c..self.cols {
                    let v = self[(i, j)].clone() - f.clone() * self[(r, j)].clone();
                    self[(i, j)] = v;
                }
                self[(i, c)] = S::zero();
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right nullspace `{x : A x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<S>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![S::zero(); self.cols];
                x[f] = S::one();
                for (r, &p) in pivots.iter().enumerate() {
                    x[p] = -m[(r, f)].clone();
                }
                x
            })
            .collect()
    }

    /// A particular solution of `A x = b`, or `None` if inconsistent.
    /// Free variables are set to zero.
    pub fn solve(&self, b: &[S]) -> Option<Vec<S>> {
        assert_eq!(b.len(), self.rows, "right-hand side length mismatch");
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let scale = aug.max_magnitude();
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        // Rows below the pivots must be consistent (rref already zeroed them up to tolerance).
        for i in pivots.len()..self.rows {
            if !aug[(i, self.cols)].negligible(scale) {
                return None;
            }
        }
        let mut x = vec![S::zero(); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = aug[(r, self.cols)].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = S::one();
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Determinant by elimination.
    pub fn determinant(&self) -> S {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let scale = self.max_magnitude();
        let mut m = self.clone();
        let mut det = S::one();
        for c in 0..n {
            let (best, best_mag) = (c..n)
                .map(|i| (i, m[(i, c)].magnitude()))
                .fold((c, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best_mag <= 0.0 || m[(best, c)].negligible(scale) {
                return S::zero();
            }
            if best != c {
                m.swap_rows(best, c);
                det = -det;
            }
            let p = m[(c, c)].clone();
            det = det * p.clone();
            for i in c + 1..n {
                let f = m[(i, c)].checked_div(&p).expect("nonzero pivot");
                for j in c..n {
                    let v = m[(i, j)].clone() - f.clone() * m[(c, j)].clone();
                    m[(i, j)] = v;
                }
            }
        }
        det
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

/// Rank of a list of vectors.
pub fn span_rank<S: Scalar>(vectors: &[Vec<S>], dim: usize) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Matrix::from_cols(vectors, dim).rank()
}

/// A basis (subset of the rows of the rref) of the span of `vectors`.
pub fn span_basis<S: Scalar>(vectors: &[Vec<S>], dim: usize) -> Vec<Vec<S>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let mut m = Matrix::from_rows(vectors);
    debug_assert_eq!(m.ncols(), dim);
    let r = m.rref().len();
    (0..r).map(|i| m.row(i).to_vec()).collect()
}

/// Basis of the orthogonal complement (standard inner product) of `span(vectors)`.
pub fn orthogonal_complement<S: Scalar>(vectors: &[Vec<S>], dim: usize) -> Vec<Vec<S>> {
    if vectors.is_empty() {
        return (0..dim)
            .map(|i| {
                let mut e = vec![S::zero(); dim];
                e[i] = S::one();
                e
            })
            .collect();
    }
    Matrix::from_rows(vectors).nullspace()
}

/// Orthogonal projection of `x` onto `span(basis)` (basis linearly independent).
pub fn project_onto_span<S: Scalar>(basis: &[Vec<S>], x: &[S]) -> Vec<S> {
    let dim = x.len();
    if basis.is_empty() {
        return vec![S::zero(); dim];
    }
    let b = Matrix::from_cols(basis, dim);
    let bt = b.transpose();
    let gram = bt.mul(&b);
    let rhs = bt.mul_vec(x);
    let coeffs = gram.solve(&rhs).expect("independent basis");
    b.mul_vec(&coeffs)
}

/// Integer column reduction of `a` (k × r) to lower echelon form, tracking the
/// unimodular transform. Returns `(reduced, transform, rank)`: the first `rank`
/// columns of `reduced = a · transform` are independent, the remaining columns
/// are zero, and the matching columns of `transform` span the integer kernel.
pub fn integer_column_echelon(
    a: &[Vec<BigInt>],
    ncols: usize,
) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>, usize) {
    let mut m: Vec<Vec<BigInt>> = a.to_vec();
    let k = m.len();
    let mut u: Vec<Vec<BigInt>> = (0..ncols)
        .map(|i| {
            (0..ncols)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();
    let col_op =
        |m: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, dst: usize, src: usize, q: &BigInt| {
            // column dst -= q * column src
            for row in m.iter_mut() {
                let v = &row[dst] - q * &row[src];
                row[dst] = v;
            }
            for row in u.iter_mut() {
                let v = &row[dst] - q * &row[src];
                row[dst] = v;
            }
        };
    let col_swap = |m: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, a: usize, b: usize| {
        if a != b {
            for row in m.iter_mut() {
                row.swap(a, b);
            }
            for row in u.iter_mut() {
                row.swap(a, b);
            }
        }
    };
    let mut piv = 0;
    for i in 0..k {
        if piv == ncols {
            break;
        }
        loop {
            // column with smallest nonzero |entry| in row i among piv..ncols
            let best = (piv..ncols)
                .filter(|&j| !m[i][j].is_zero())
                .min_by(|&x, &y| m[i][x].abs().cmp(&m[i][y].abs()));
            let Some(best) = best else { break };
            col_swap(&mut m, &mut u, piv, best);
            let p = m[i][piv].clone();
            let mut done = true;
            for j in piv + 1..ncols {
                if m[i][j].is_zero() {
                    continue;
                }
                let q = m[i][j].div_floor(&p);
                col_op(&mut m, &mut u, j, piv, &q);
                if !m[i][j].is_zero() {
                    done = false;
                }
            }
            if done {
                if m[i][piv].is_negative() {
                    for row in m.iter_mut() {
                        row[piv] = -row[piv].clone();
                    }
                    for row in u.iter_mut() {
                        row[piv] = -row[piv].clone();
                    }
                }
                piv += 1;
                break;
            }
        }
    }
    (m, u, piv)
}

/// Basis of the integer kernel `{x ∈ Z^r : A x = 0}` of a rational matrix.
pub fn integer_kernel(a: &Matrix<Q>) -> Vec<Vec<BigInt>> {
    let r = a.ncols();
    if a.nrows() == 0 {
        return (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| {
                        if i == j {
                            BigInt::one()
                        } else {
                            BigInt::zero()
                        }
                    })
                    .collect()
            })
            .collect();
    }
    let rows: Vec<Vec<BigInt>> = (0..a.nrows()).map(|i| integer_row(a.row(i))).collect();
    let (_, u, rank) = integer_column_echelon(&rows, r);
    (rank..r)
        .map(|j| u.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// Scale a rational row to a primitive-denominator integer row.
pub fn integer_row(row: &[Q]) -> Vec<BigInt> {
    let d = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    row.iter()
        .map(|q| (q * Q::from_integer(d.clone())).to_integer())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q_frac, q_int};

    fn qm(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_rows(
            &rows
                .iter()
                .map(|r| r.iter().map(|&x| q_int(x)).collect())
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn rank_and_nullspace() {
        let a = qm(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 1);
        let y = a.mul_vec(&ns[0]);
        assert!(y.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn inverse_and_determinant() {
        let a = qm(&[&[2, 1], &[7, 4]]);
        assert_eq!(a.determinant(), q_int(1));
        let inv = a.inverse().unwrap();
        assert_eq!(inv, qm(&[&[4, -1], &[-7, 2]]));
        assert!(qm(&[&[1, 2], &[2, 4]]).inverse().is_none());
        let b = Matrix::from_rows(&[vec![q_frac(1, 2), q_int(0)], vec![q_int(3), q_int(2)]]);
        assert_eq!(b.determinant(), q_int(1));
    }

    #[test]
    fn solve_consistency() {
        let a = qm(&[&[1, 1], &[2, 2]]);
        assert!(a.solve(&[q_int(1), q_int(3)]).is_none());
        let x = a.solve(&[q_int(1), q_int(2)]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![q_int(1), q_int(2)]);
    }

    #[test]
    fn float_elimination() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let inv = a.inverse().unwrap();
        let id = a.mul(&inv);
        assert!((id[(0, 0)] - 1.0).abs() < 1e-14 && id[(0, 1)].abs() < 1e-14);
    }

    #[test]
    fn integer_kernel_of_row() {
        // 6x + 10y + 15z = 0 has a rank-2 integer kernel of index 1 in the rational kernel
        let a = qm(&[&[6, 10, 15]]);
        let k = integer_kernel(&a);
        assert_eq!(k.len(), 2);
        for v in &k {
            let s: BigInt = &v[0] * 6 + &v[1] * 10 + &v[2] * 15;
            assert!(s.is_zero());
        }
        // The kernel lattice has determinant (covolume²) = 6²+10²+15² = 361 → gram det 361
        let g00: BigInt = k[0].iter().map(|x| x * x).sum();
        let g11: BigInt = k[1].iter().map(|x| x * x).sum();
        let g01: BigInt = k[0].iter().zip(&k[1]).map(|(x, y)| x * y).sum();
        assert_eq!(g00 * g11 - &g01 * &g01, BigInt::from(361));
    }
}
