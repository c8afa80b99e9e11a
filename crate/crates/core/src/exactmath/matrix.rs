use std::fmt;

use num_traits::{One, Zero};

use super::rational::{format_rational, int, Rational};
use super::vector::RationalVector;
use super::MathError;

/// Row-major dense matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self, MathError> {
        if entries.len() != rows * cols {
            return Err(MathError::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: &[RationalVector]) -> Result<Self, MathError> {
        let cols = rows.first().map_or(0, RationalVector::dim);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.dim() != cols {
                return Err(MathError::DimensionMismatch {
                    expected: cols,
                    found: r.dim(),
                });
            }
            entries.extend(r.iter().cloned());
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            entries,
        })
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        let vs: Vec<_> = rows.iter().map(|r| RationalVector::from_ints(r)).collect();
        Self::from_rows(&vs).expect("ragged integer rows")
    }

    /// `|col)(row|`: the rank-one map `x -> (row . x) col`.
    pub fn outer(col: &RationalVector, row: &RationalVector) -> Self {
        let mut entries = Vec::with_capacity(col.dim() * row.dim());
        for a in col.iter() {
            for b in row.iter() {
                entries.push(a * b);
            }
        }
        Self {
            rows: col.dim(),
            cols: row.dim(),
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn row(&self, r: usize) -> RationalVector {
        RationalVector::new(self.entries[r * self.cols..(r + 1) * self.cols].to_vec())
    }

    pub fn row_vectors(&self) -> Vec<RationalVector> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn col(&self, c: usize) -> RationalVector {
        RationalVector::new((0..self.rows).map(|r| self.get(r, c).clone()).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.entries[c * self.rows + r] = self.get(r, c).clone();
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * k).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "mul: inner dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        out.entries[r * other.cols + c] += a * b;
                    }
                }
            }
        }
        out
    }

    /// `M x`.
    pub fn mul_vec(&self, x: &RationalVector) -> RationalVector {
        assert_eq!(self.cols, x.dim(), "mul_vec: dimension mismatch");
        RationalVector::new((0..self.rows).map(|r| self.row(r).dot(x)).collect())
    }

    /// `y^T M`, i.e. the functional `y` precomposed with `M`.
    pub fn vec_mul(&self, y: &RationalVector) -> RationalVector {
        assert_eq!(self.rows, y.dim(), "vec_mul: dimension mismatch");
        let mut out = RationalVector::zeros(self.cols).into_coords();
        for r in 0..self.rows {
            if y[r].is_zero() {
                continue;
            }
            for (c, slot) in out.iter_mut().enumerate() {
                let m = self.get(r, c);
                if !m.is_zero() {
                    *slot += &y[r] * m;
                }
            }
        }
        RationalVector::new(out)
    }

    /// Kronecker product, `self`-major.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                let a = self.get(r1, c1);
                if a.is_zero() {
                    continue;
                }
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        let b = other.get(r2, c2);
                        if !b.is_zero() {
                            out.set(r1 * other.rows + r2, c1 * other.cols + c2, a * b);
                        }
                    }
                }
            }
        }
        out
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m.get(row, col).recip();
            for c in col..m.cols {
                let v = m.get(row, c) * &inv;
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row || m.get(r, col).is_zero() {
                    continue;
                }
                let f = m.get(r, col).clone();
                for c in col..m.cols {
                    let sub = &f * m.get(row, c);
                    if !sub.is_zero() {
                        let v = m.get(r, c) - sub;
                        m.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Exact basis of `{x : M x = 0}`; one vector per free column, with a 1
    /// in that column.
    pub fn kernel_basis(&self) -> Vec<RationalVector> {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = RationalVector::zeros(self.cols).into_coords();
            v[free] = int(1);
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(i, free).clone();
            }
            basis.push(RationalVector::new(v));
        }
        basis
    }

    /// Inverse of a square matrix, `None` if singular.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, n + r, Rational::one());
        }
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut out = Self::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                out.set(r, c, red.get(r, n + c).clone());
            }
        }
        Some(out)
    }
}

/// Rank of a list of vectors of equal dimension.
pub fn rank_of(vectors: &[RationalVector]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    RationalMatrix::from_rows(vectors)
        .expect("rank_of: ragged vectors")
        .rank()
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            f.write_str("[")?;
            for c in 0..self.cols {
                if c > 0 {
                    f.write_str(", ")?;
                }
                f.write_str(&format_rational(self.get(r, c)))?;
            }
            f.write_str("]")?;
            if r + 1 < self.rows {
                f.write_str("\n")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::rat;

    #[test]
    fn kernel_of_identity_is_trivial() {
        assert!(RationalMatrix::identity(3).kernel_basis().is_empty());
    }

    #[test]
    fn kernel_of_zero_matrix_is_everything() {
        let k = RationalMatrix::zeros(2, 2).kernel_basis();
        assert_eq!(k.len(), 2);
        assert_eq!(rank_of(&k), 2);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let m = RationalMatrix::from_int_rows(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, -1, 0]]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.mul_vec(v).is_zero());
        }
    }

    #[test]
    fn inverse_round_trips() {
        let m = RationalMatrix::from_int_rows(&[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), RationalMatrix::identity(2));
        assert!(RationalMatrix::from_int_rows(&[&[1, 2], &[2, 4]])
            .inverse()
            .is_none());
    }

    #[test]
    fn vec_mul_is_functional_composition() {
        let m = RationalMatrix::from_int_rows(&[&[1, 2], &[3, 4]]);
        let y = RationalVector::new(vec![rat(1, 2), int(1)]);
        // (1/2, 1) M = (1/2 + 3, 1 + 4)
        assert_eq!(m.vec_mul(&y), RationalVector::new(vec![rat(7, 2), int(5)]));
    }

    #[test]
    fn kron_mixed_product() {
        let a = RationalMatrix::from_int_rows(&[&[1, 2], &[0, 1]]);
        let b = RationalMatrix::from_int_rows(&[&[0, 1], &[1, 0]]);
        let c = RationalMatrix::from_int_rows(&[&[1, 0], &[3, 1]]);
        let d = RationalMatrix::from_int_rows(&[&[2, 0], &[0, 5]]);
        assert_eq!(a.kron(&b).mul(&c.kron(&d)), a.mul(&c).kron(&b.mul(&d)));
    }
}
