//! Dense complex matrices and the Hermitian newtype used throughout the crate.
//!
//! Storage is row-major. Dimensions in this crate stay in the low hundreds, so
//! no blocking or SIMD tricks are attempted.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::FamaError;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data. Panics if the length does not match.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data length mismatch");
        Self { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Matrix whose columns are the given vectors (all of equal length).
    pub fn from_columns(columns: &[Vec<C64>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols, |i, j| columns[j][i])
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, rhs: &CMatrix) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &r) in orow.iter_mut().zip(rrow) {
                    *o += a * r;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, x.len(), "matvec dimension mismatch");
        (0..self.rows).map(|i| dot_plain(self.row(i), x)).collect()
    }

    /// `self^H x` without materializing the adjoint.
    pub fn adjoint_matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.rows, x.len(), "adjoint matvec dimension mismatch");
        let mut out = vec![ZERO; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * xi;
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum::<f64>())
    }

    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .map(|z| libm::sqrt(z.norm_sqr()))
            .fold(0.0, f64::max)
    }

    pub fn sub(&self, rhs: &CMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn add(&self, rhs: &CMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Rows `row_idx` and columns `col_idx`, in the given order.
    pub fn select(&self, row_idx: &[usize], col_idx: &[usize]) -> Self {
        Self::from_fn(row_idx.len(), col_idx.len(), |i, j| {
            self[(row_idx[i], col_idx[j])]
        })
    }

    /// Rows `row_idx`, all columns.
    pub fn select_rows(&self, row_idx: &[usize]) -> Self {
        let all: Vec<usize> = (0..self.cols).collect();
        self.select(row_idx, &all)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Hermitian matrix. Construction validates the conjugate symmetry and then
/// symmetrizes exactly, so downstream code may rely on `m[(i,j)] == conj(m[(j,i)])`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(CMatrix);

/// Relative tolerance (against the largest entry) accepted at construction.
pub const HERMITIAN_TOL: f64 = 1e-12;

impl HermitianMatrix {
    pub fn new(m: CMatrix) -> Result<Self, FamaError> {
        if !m.is_square() {
            return Err(FamaError::Dimension {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        if m.rows() == 0 {
            return Err(FamaError::Empty);
        }
        let n = m.rows();
        let scale = m.max_abs();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = m[(i, j)] - m[(j, i)].conj();
                worst = worst.max(libm::sqrt(d.norm_sqr()));
            }
        }
        if worst > HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(FamaError::NotHermitian {
                deviation: worst / scale.max(f64::MIN_POSITIVE),
            });
        }
        Ok(Self::symmetrized(m))
    }

    /// Averages `m` with its adjoint. Caller guarantees the input is close to Hermitian.
    pub(crate) fn symmetrized(mut m: CMatrix) -> Self {
        let n = m.rows();
        for i in 0..n {
            m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                m[(i, j)] = avg;
                m[(j, i)] = avg.conj();
            }
        }
        Self(m)
    }

    pub fn identity(n: usize) -> Self {
        Self(CMatrix::identity(n))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self(CMatrix::from_real_diagonal(diag))
    }

    /// Rank-one outer product `a a^H`.
    pub fn outer(a: &[C64]) -> Self {
        Self::symmetrized(CMatrix::from_fn(a.len(), a.len(), |i, j| a[i] * a[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.0[(i, i)].re).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.0[(i, i)].re).collect()
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        self.0.matvec(x)
    }

    /// Real-valued quadratic form `x^H M x`.
    pub fn quad_form(&self, x: &[C64]) -> f64 {
        dot(x, &self.0.matvec(x)).re
    }

    /// Principal submatrix on `idx` (rows and columns share the index list).
    pub fn principal(&self, idx: &[usize]) -> Self {
        Self(self.0.select(idx, idx))
    }

    /// Principal minor with row and column `l` removed.
    pub fn remove_index(&self, l: usize) -> Self {
        let idx: Vec<usize> = (0..self.dim()).filter(|&i| i != l).collect();
        self.principal(&idx)
    }

    pub fn add_identity(&self, s: f64) -> Self {
        let mut m = self.0.clone();
        for i in 0..self.dim() {
            m[(i, i)] += C64::new(s, 0.0);
        }
        Self(m)
    }

    pub fn add(&self, rhs: &HermitianMatrix) -> Self {
        Self(self.0.add(&rhs.0))
    }

    /// `X^H M X`, symmetrized.
    pub fn congruence(&self, x: &CMatrix) -> Self {
        Self::symmetrized(x.adjoint().matmul(&self.0).matmul(x))
    }
}

impl Index<(usize, usize)> for HermitianMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

/// Conjugating inner product `x^H y`.
pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).fold(ZERO, |acc, (a, b)| acc + a.conj() * b)
}

fn dot_plain(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).fold(ZERO, |acc, (a, b)| acc + a * b)
}

pub fn norm2(x: &[C64]) -> f64 {
    libm::sqrt(x.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

/// Returns `x / ||x||`, or `None` for the zero vector.
pub fn normalized(x: &[C64]) -> Option<Vec<C64>> {
    let n = norm2(x);
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    Some(x.iter().map(|z| z / n).collect())
}

/// Rotates the global phase so the first entry whose magnitude exceeds `1e-8`
/// of the peak magnitude is real and positive.
pub fn canonical_phase(x: &mut [C64]) {
    let peak = x.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    if peak == 0.0 {
        return;
    }
    let thresh = peak * 1e-16;
    if let Some(i) = x.iter().position(|z| z.norm_sqr() > thresh) {
        let mag = libm::sqrt(x[i].norm_sqr());
        let phase = x[i].conj() / mag;
        for z in x.iter_mut() {
            *z *= phase;
        }
        x[i] = C64::new(mag, 0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_rejects_asymmetric() {
        let m = CMatrix::from_row_major(
            2,
            2,
            vec![ONE, C64::new(1.0, 1.0), C64::new(1.0, 1.0), ONE],
        );
        assert!(matches!(
            HermitianMatrix::new(m),
            Err(FamaError::NotHermitian { .. })
        ));
    }

    #[test]
    fn hermitian_symmetrizes_within_tolerance() {
        let m = CMatrix::from_row_major(
            2,
            2,
            vec![
                C64::new(2.0, 1e-14),
                C64::new(1.0, 1.0),
                C64::new(1.0, -1.0 + 1e-13),
                ONE,
            ],
        );
        let h = HermitianMatrix::new(m).unwrap();
        assert_eq!(h[(0, 0)].im, 0.0);
        assert_eq!(h[(0, 1)], h[(1, 0)].conj());
    }

    #[test]
    fn remove_index_drops_row_and_column() {
        let h = HermitianMatrix::from_real_diagonal(&[1.0, 2.0, 3.0]);
        assert_eq!(h.remove_index(1).diagonal(), vec![1.0, 3.0]);
    }

    #[test]
    fn canonical_phase_makes_lead_positive() {
        let mut x = vec![ZERO, C64::new(0.0, -2.0), C64::new(1.0, 0.0)];
        canonical_phase(&mut x);
        assert!((x[1] - C64::new(2.0, 0.0)).norm() < 1e-15);
        assert!((x[2] - C64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn adjoint_matvec_matches_explicit() {
        let m = CMatrix::from_fn(3, 2, |i, j| C64::new(i as f64, j as f64 + 1.0));
        let x = vec![ONE, C64::new(0.0, 1.0), C64::new(2.0, -1.0)];
        let a = m.adjoint().matvec(&x);
        let b = m.adjoint_matvec(&x);
        for (p, q) in a.iter().zip(&b) {
            assert!((p - q).norm() < 1e-14);
        }
    }
}
