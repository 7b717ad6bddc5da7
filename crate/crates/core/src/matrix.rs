//! Dense integer matrices with arbitrary-precision entries.
//!
//! Tower incidence matrices stay small, but their running products and the
//! height vectors they generate grow exponentially with the level, so every
//! entry is a [`BigInt`] and all products are exact.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Row-major dense matrix over `BigInt`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl BigMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BigMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Build from unsigned rows; panics if the rows are ragged or empty.
    pub fn from_rows_u64(rows: &[Vec<u64>]) -> Self {
        assert!(!rows.is_empty(), "matrix needs at least one row");
        let cols = rows[0].len();
        assert!(cols > 0, "matrix needs at least one column");
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        BigMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_rows_bigint(rows: Vec<Vec<BigInt>>) -> Self {
        assert!(!rows.is_empty());
        let cols = rows[0].len();
        assert!(cols > 0);
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r);
        }
        BigMatrix {
            rows: nrows,
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Exact product `self * rhs`; panics on a dimension mismatch
    /// (callers validate dimensions when systems are built).
    pub fn mul(&self, rhs: &BigMatrix) -> BigMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matrix product dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = BigMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let t = a * rhs.get(k, j);
                    out.data[i * rhs.cols + j] += t;
                }
            }
        }
        out
    }

    /// Exact matrix-vector product.
    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn all_positive(&self) -> bool {
        self.data.iter().all(|x| x.is_positive())
    }

    /// Exact rank-one test: nonzero matrix with all 2x2 minors vanishing.
    pub fn is_rank_one(&self) -> bool {
        if self.data.iter().all(|x| x.is_zero()) {
            return false;
        }
        for i in 0..self.rows {
            for k in (i + 1)..self.rows {
                for j in 0..self.cols {
                    for l in (j + 1)..self.cols {
                        let minor = self.get(i, j) * self.get(k, l) - self.get(i, l) * self.get(k, j);
                        if !minor.is_zero() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Determinant of a 2x2 matrix; panics on other shapes.
    pub fn det2(&self) -> BigInt {
        assert!(self.rows == 2 && self.cols == 2, "det2 needs a 2x2 matrix");
        self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0)
    }

    /// Exact inverse of a 2x2 matrix with determinant +-1.
    pub fn inverse2_unimodular(&self) -> Option<BigMatrix> {
        if self.rows != 2 || self.cols != 2 {
            return None;
        }
        let det = self.det2();
        if det.abs() != BigInt::one() {
            return None;
        }
        // adjugate divided by det; det = +-1 so division is multiplication
        let rows = vec![
            vec![self.get(1, 1) * &det, -self.get(0, 1) * &det],
            vec![-self.get(1, 0) * &det, self.get(0, 0) * &det],
        ];
        Some(BigMatrix::from_rows_bigint(rows))
    }
}

impl fmt::Display for BigMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_vector() {
        let m = BigMatrix::from_rows_u64(&[vec![2, 1], vec![1, 1]]);
        let m2 = m.mul(&m);
        assert_eq!(m2, BigMatrix::from_rows_u64(&[vec![5, 3], vec![3, 2]]));
        let h = vec![BigInt::from(1), BigInt::from(1)];
        assert_eq!(m.mul_vec(&h), vec![BigInt::from(3), BigInt::from(2)]);
    }

    #[test]
    fn identity_is_neutral() {
        let m = BigMatrix::from_rows_u64(&[vec![2, 1, 1], vec![1, 2, 1], vec![1, 1, 1]]);
        assert_eq!(BigMatrix::identity(3).mul(&m), m);
        assert_eq!(m.mul(&BigMatrix::identity(3)), m);
    }

    #[test]
    fn rank_one_detection() {
        assert!(BigMatrix::from_rows_u64(&[vec![1, 1], vec![1, 1]]).is_rank_one());
        assert!(BigMatrix::from_rows_u64(&[vec![2, 4], vec![1, 2]]).is_rank_one());
        assert!(!BigMatrix::from_rows_u64(&[vec![2, 1], vec![1, 1]]).is_rank_one());
        assert!(!BigMatrix::zeros(2, 2).is_rank_one());
    }

    #[test]
    fn unimodular_inverse() {
        let m = BigMatrix::from_rows_u64(&[vec![2, 1], vec![1, 1]]);
        let inv = m.inverse2_unimodular().unwrap();
        assert_eq!(m.mul(&inv), BigMatrix::identity(2));
        let a = BigMatrix::from_rows_u64(&[vec![5, 2], vec![2, 3]]);
        assert!(a.inverse2_unimodular().is_none()); // det 11
    }
}
