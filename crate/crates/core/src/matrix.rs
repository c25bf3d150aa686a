//! Dense row-major matrices over a semiring.

use std::fmt;

use crate::error::{Error, Result};
use crate::semiring::{Ring, Semiring};

#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: fmt::Debug> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<_> = self.data.chunks(self.cols.max(1)).collect();
        f.debug_struct("Matrix")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("data", &rows)
            .finish()
    }
}

impl<S: Semiring> Matrix<S> {
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

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
            m.data[i * n + i] = S::one();
        }
        m
    }

    /// Diagonal 0/1 matrix from a Boolean vector.
    pub fn from_diagonal_mask(mask: &[bool]) -> Self {
        let n = mask.len();
        let mut m = Self::zeros(n, n);
        for (i, &b) in mask.iter().enumerate() {
            if b {
                m.data[i * n + i] = S::one();
            }
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        self.data
            .chunks(self.cols.max(1))
            .map(<[S]>::to_vec)
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(S::is_zero)
    }

    pub fn map<T: Semiring>(&self, f: impl FnMut(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn mat_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k * other.cols + j];
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.data[idx] = out.data[idx].plus(&a.times(b));
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.plus(b))
                .collect(),
        })
    }

    /// `k * self`, entrywise.
    pub fn scale(&self, k: &S) -> Self {
        self.map(|x| k.times(x))
    }

    /// Block matrix whose (i, j) block is `self[i][j] * other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (p, q) = (other.rows, other.cols);
        let cols = self.cols * q;
        let mut out = Self::zeros(self.rows * p, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self.data[i * self.cols + j];
                if a.is_zero() {
                    continue;
                }
                for k in 0..p {
                    for l in 0..q {
                        let b = &other.data[k * q + l];
                        if !b.is_zero() {
                            out.data[(i * p + k) * cols + j * q + l] = a.times(b);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.data[i * self.cols + j].clone());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn pow(&self, mut n: u64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Shape("power of a non-square matrix".into()));
        }
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mat_mul(&base)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.mat_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[S]) -> Result<Vec<S>> {
        if v.len() != self.rows {
            return Err(Error::Shape(format!(
                "vector of length {} against {} rows",
                v.len(),
                self.rows
            )));
        }
        let mut out = vec![S::zero(); self.cols];
        for (i, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, a) in self.row(i).iter().enumerate() {
                if !a.is_zero() {
                    out[j] = out[j].plus(&x.times(a));
                }
            }
        }
        Ok(out)
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[S]) -> Result<Vec<S>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| dot(self.row(i), v))
            .collect())
    }

    /// Largest entrywise distance, or infinity on a shape mismatch.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| a.approx_eq(b))
    }
}

impl<S: Ring> Matrix<S> {
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.map(Ring::neg))
    }
}

pub fn dot<S: Semiring>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(S::zero(), |acc, (x, y)| acc.plus(&x.times(y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::{Boolean, Literal, Rational};
    use proptest::prelude::*;

    fn m(rows: Vec<Vec<f64>>) -> Matrix<f64> {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn identity_times_m_is_m() {
        let a = m(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(Matrix::identity(2).mat_mul(&a).unwrap(), a);
    }

    #[test]
    fn nilpotent_square_is_zero() {
        let n = m(vec![vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!(n.mat_mul(&n).unwrap().is_zero());
    }

    #[test]
    fn boolean_product() {
        let b = |x: u8| Boolean(x == 1);
        let a = Matrix::from_rows(vec![vec![b(1), b(1)], vec![b(0), b(1)]]).unwrap();
        let c = Matrix::from_rows(vec![vec![b(1), b(0)], vec![b(1), b(1)]]).unwrap();
        let want = Matrix::from_rows(vec![vec![b(1), b(1)], vec![b(1), b(1)]]).unwrap();
        assert_eq!(a.mat_mul(&c).unwrap(), want);
    }

    #[test]
    fn shape_errors() {
        let a = Matrix::<f64>::zeros(2, 3);
        assert!(matches!(a.mat_mul(&a), Err(Error::Shape(_))));
        assert!(matches!(a.add(&Matrix::zeros(3, 2)), Err(Error::Shape(_))));
        assert!(Matrix::<f64>::new(2, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn kron_with_one_by_one_identity() {
        let a = m(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(Matrix::identity(1).kron(&a), a);
    }

    #[test]
    fn kron_block_layout() {
        let n = m(vec![vec![0.0, 1.0], vec![0.0, 0.0]]);
        let k = n.kron(&Matrix::identity(2));
        for i in 0..4 {
            for j in 0..4 {
                // ones at (1,3) and (2,4), 1-indexed
                let want = if (i, j) == (0, 2) || (i, j) == (1, 3) { 1.0 } else { 0.0 };
                assert_eq!(*k.get(i, j), want);
            }
        }
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-5i64..=5, 1i64..=4).prop_map(|(p, q)| Literal::from_ratio(p, q).0)
    }

    fn mat2(n: usize) -> impl Strategy<Value = Matrix<Rational>> {
        proptest::collection::vec(small_rational(), n * n)
            .prop_map(move |d| Matrix::new(n, n, d).unwrap())
    }

    proptest! {
        #[test]
        fn mixed_product_property(a in mat2(2), b in mat2(2), c in mat2(2), d in mat2(2)) {
            let lhs = a.kron(&b).mat_mul(&c.kron(&d)).unwrap();
            let rhs = a.mat_mul(&c).unwrap().kron(&b.mat_mul(&d).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn kron_splits_into_identity_factors(a in mat2(2), b in mat2(2)) {
            let i = Matrix::identity(2);
            let lhs = a.kron(&i).mat_mul(&i.kron(&b)).unwrap();
            prop_assert_eq!(lhs, a.kron(&b));
        }

        #[test]
        fn mat_mul_is_associative(a in mat2(3), b in mat2(3), c in mat2(3)) {
            let l = a.mat_mul(&b).unwrap().mat_mul(&c).unwrap();
            let r = a.mat_mul(&b.mat_mul(&c).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }
    }
}
