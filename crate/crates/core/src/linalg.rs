//! Dense matrices over exact scalars (Q or a multiquadratic field).

use std::fmt;

use num_traits::{One, Zero};

use crate::arith::Rational;
use crate::error::{Error, Result};

/// Exact field operations needed by [`Matrix`].
///
/// Elements of a multiquadratic field carry their field, so constants are
/// produced from an existing element (`zero_like`, `one_like`).
pub trait Scalar: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn eq_zero(&self) -> bool;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negated(&self) -> Self;
    fn inverse(&self) -> Option<Self>;

    fn eq_one(&self) -> bool {
        *self == self.one_like()
    }
}

impl Scalar for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn one_like(&self) -> Self {
        Rational::one()
    }
    fn eq_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negated(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.cols.max(1))).finish()
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Matrix<T>> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged matrix rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Matrix<T> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Matrix<T> {
        Matrix { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn identity(n: usize, one: &T) -> Matrix<T> {
        let zero = one.zero_like();
        Matrix::from_fn(n, n, |i, j| if i == j { one.clone() } else { zero.clone() })
    }

    pub fn diagonal(entries: &[T]) -> Matrix<T> {
        let n = entries.len();
        let zero = entries.first().map(Scalar::zero_like);
        Matrix::from_fn(n, n, |i, j| {
            if i == j {
                entries[i].clone()
            } else {
                zero.clone().expect("nonempty")
            }
        })
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

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.cols.max(1)).map(<[T]>::to_vec).collect()
    }

    pub fn map<U: Scalar>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<U: Scalar>(&self, f: impl FnMut(&T) -> Result<U>) -> Result<Matrix<U>> {
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn transpose(&self) -> Matrix<T> {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = self.get(i, j);
                    if i == j {
                        x.eq_one()
                    } else {
                        x.eq_zero()
                    }
                })
            })
    }

    pub fn mul(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix dimension mismatch");
        let zero = self.data.first().or(rhs.data.first()).map(Scalar::zero_like);
        Matrix::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = zero.clone().expect("nonempty");
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.eq_zero() {
                    continue;
                }
                let b = rhs.get(k, j);
                if !b.eq_zero() {
                    acc = acc.plus(&a.times(b));
                }
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                row.iter()
                    .zip(v)
                    .filter(|(a, b)| !a.eq_zero() && !b.eq_zero())
                    .fold(row[0].zero_like(), |acc, (a, b)| acc.plus(&a.times(b)))
            })
            .collect()
    }

    pub fn scale(&self, c: &T) -> Matrix<T> {
        self.map(|x| x.times(c))
    }

    /// `selfᵀ · g · self`.
    pub fn congruence(&self, g: &Matrix<T>) -> Matrix<T> {
        self.transpose().mul(g).mul(self)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn det(&self) -> T {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = self.data.first().map(Scalar::one_like).expect("nonempty");
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !m.get(r, c).eq_zero()) else {
                return det.zero_like();
            };
            if p != c {
                m.swap_rows(p, c);
                det = det.negated();
            }
            let pivot = m.get(c, c).clone();
            det = det.times(&pivot);
            let inv = pivot.inverse().expect("nonzero pivot");
            for r in c + 1..n {
                let f = m.get(r, c).times(&inv);
                if f.eq_zero() {
                    continue;
                }
                for j in c..n {
                    let v = m.get(r, j).minus(&f.times(m.get(c, j)));
                    m.set(r, j, v);
                }
            }
        }
        det
    }

    /// Reduced row echelon form in place; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for c in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self.get(r, c).eq_zero()) else {
                continue;
            };
            self.swap_rows(p, row);
            let inv = self.get(row, c).inverse().expect("nonzero pivot");
            for j in 0..self.cols {
                let v = self.get(row, j).times(&inv);
                self.set(row, j, v);
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let f = self.get(r, c).clone();
                if f.eq_zero() {
                    continue;
                }
                for j in 0..self.cols {
                    let v = self.get(r, j).minus(&f.times(self.get(row, j)));
                    self.set(r, j, v);
                }
            }
            pivots.push(c);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of `{x : self·x = 0}`, one vector per free column in increasing order.
    pub fn nullspace(&self) -> Vec<Vec<T>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let Some(one) = self.data.first().map(Scalar::one_like) else {
            return Vec::new();
        };
        let zero = one.zero_like();
        (0..self.cols)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut v = vec![zero.clone(); self.cols];
                v[free] = one.clone();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = m.get(r, free).negated();
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<Matrix<T>> {
        if !self.is_square() || self.rows == 0 {
            return None;
        }
        let n = self.rows;
        let one = self.data[0].one_like();
        let id = Matrix::identity(n, &one);
        let mut aug = Matrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else {
                id.get(i, j - n).clone()
            }
        });
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Matrix::from_fn(n, n, |i, j| aug.get(i, n + j).clone()))
    }
}

pub type QMatrix = Matrix<Rational>;

impl QMatrix {
    pub fn from_ints(rows: &[&[i64]]) -> QMatrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| crate::arith::rat(x)).collect())
                .collect(),
        )
        .expect("rectangular")
    }

    pub fn q_identity(n: usize) -> QMatrix {
        Matrix::identity(n, &Rational::one())
    }
}
