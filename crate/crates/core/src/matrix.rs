//! Minimal dense complex matrix used for local operators, materialized global
//! operators and the brute-force oracles.

use std::ops::{Index, IndexMut, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cone, czero, Real, C};

/// Square or rectangular complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![czero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cone();
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, actual: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real entries given row by row.
    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| C::new(T::lit(x), T::zero())))
            .collect();
        Self { rows: N, cols: N, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[C<T>]) {
        for (i, &v) in col.iter().enumerate() {
            self[(i, j)] = v;
        }
    }

    pub fn trace(&self) -> C<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).fold(czero(), |a, b| a + b)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    /// Dense product with i-k-j loop order.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        let oc = other.cols;
        for i in 0..self.rows {
            let out_row = &mut out.data[i * oc..(i + 1) * oc];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let brow = &other.data[k * oc..(k + 1) * oc];
                for (o, &b) in out_row.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C<T>]) -> Result<Vec<C<T>>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, actual: v.len() });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(czero(), |acc, (&a, &b)| acc + a * b))
            .collect())
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        Self::from_fn(rows, cols, |i, j| {
            self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)]
        })
    }

    /// `self^n` by repeated squaring.
    pub fn pow(&self, mut n: u32) -> Self {
        assert!(self.is_square());
        let mut acc = Self::identity(self.rows);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.matmul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.matmul(&base);
            }
        }
        acc
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(&a, &b)| (a - b).norm()).fold(T::zero(), T::max)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Serializable row-major `[re, im]` form.
    pub fn to_pairs(&self) -> MatrixPairs {
        MatrixPairs {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| [z.re.to_f64_lossy(), z.im.to_f64_lossy()]).collect(),
        }
    }

    pub fn from_pairs(rows: usize, cols: usize, pairs: &[[f64; 2]]) -> Result<Self> {
        let data = pairs.iter().map(|p| C::new(T::lit(p[0]), T::lit(p[1]))).collect();
        Self::from_row_major(rows, cols, data)
    }
}

impl<T: Real> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: Self) -> CMatrix<T> {
        self.matmul(rhs)
    }
}

/// JSON wire form of a dense matrix: row-major array of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixPairs {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn m2(a: [[f64; 2]; 2]) -> CMatrix<f64> {
        CMatrix::from_real_rows(a)
    }

    #[test]
    fn kron_block_layout() {
        let a = m2([[1.0, 2.0], [3.0, 4.0]]);
        let b = m2([[0.0, 1.0], [1.0, 0.0]]);
        let k = a.kron(&b);
        assert_eq!(k[(0, 1)], c(1.0, 0.0));
        assert_eq!(k[(1, 2)], c(2.0, 0.0));
        assert_eq!(k[(3, 2)], c(4.0, 0.0));
        assert_eq!(k[(2, 2)], c(0.0, 0.0));
        // tr(A ⊗ B) = tr(A) tr(B)
        assert_eq!(k.trace(), a.trace() * b.trace());
    }

    #[test]
    fn pow_matches_repeated_product() {
        let a = CMatrix::from_fn(3, 3, |i, j| c(i as f64 - j as f64 * 0.5, 0.1 * (i + j) as f64));
        let mut p = CMatrix::identity(3);
        for n in 0..7 {
            assert!(a.pow(n).max_abs_diff(&p) < 1e-12);
            p = p.matmul(&a);
        }
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let a = CMatrix::from_fn(2, 3, |i, j| c(i as f64, j as f64));
        let h = a.adjoint();
        assert_eq!((h.rows(), h.cols()), (3, 2));
        assert_eq!(h[(2, 1)], c(1.0, -2.0));
    }

    #[test]
    fn matvec_rejects_wrong_length() {
        let a = CMatrix::<f64>::identity(2);
        assert!(matches!(a.matvec(&[c(1.0, 0.0)]), Err(Error::DimensionMismatch { .. })));
    }
}
