//! Small dense matrices, banded LU and eigenvalue routines.
//!
//! The matrices in this crate are at most ~10×10 (one row per species), so a
//! plain row-major `Vec` is enough. The banded solver handles the
//! block-tridiagonal Newton systems of the time stepper.

mod banded;
mod eigen;
mod lu;

pub use banded::BandedMatrix;
pub use eigen::{eigenvalues_general, sym_eigenvalues_jacobi, Complex};
pub use lu::Lu;

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is singular (zero pivot in column {0})")]
    Singular(usize),
    #[error("matrix is near-singular (condition estimate {0:.3e})")]
    NearSingular(f64),
    #[error("eigenvalue iteration did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("non-finite matrix entry at ({0}, {1})")]
    NonFinite(usize, usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data. Panics if the length is wrong.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data has wrong length");
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| T::from_f64(rows[i][j]))
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

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// `(M + Mᵀ) / 2`.
    pub fn sym_part(&self) -> Self {
        let half = T::from_f64(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| half * (self[(i, j)] + self[(j, i)]))
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.cols, x.len(), "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    /// `zᵀ M z`.
    pub fn quad_form(&self, z: &[T]) -> T {
        self.matvec(z)
            .iter()
            .zip(z)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn map<U: Real>(&self, f: impl Fn(T) -> U) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Real parts as an `f64` matrix.
    pub fn values(&self) -> Mat<f64> {
        self.map(|v| v.value())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .map(|v| v.value() * v.value())
            .sum::<f64>()
            .sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].value().abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.value().abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a.value() - b.value()).abs())
            .fold(0.0, f64::max)
    }

    pub fn check_finite(&self) -> Result<(), LinalgError> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self[(i, j)].is_finite() {
                    return Err(LinalgError::NonFinite(i, j));
                }
            }
        }
        Ok(())
    }

    /// Determinant through LU; zero for singular input.
    pub fn det(&self) -> T {
        match Lu::factor(self) {
            Ok(lu) => lu.det(),
            Err(_) => T::zero(),
        }
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Debug> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

/// Smallest eigenvalue of the symmetric part `(M + Mᵀ)/2`.
///
/// Uses the closed form for 2×2 and cyclic Jacobi otherwise.
pub fn sym_eig_min(m: &Mat<f64>) -> Result<f64, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::Dimension(format!(
            "expected square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    m.check_finite()?;
    let s = m.sym_part();
    match s.rows() {
        0 => Ok(f64::INFINITY),
        1 => Ok(s[(0, 0)]),
        2 => {
            let (a, b, d) = (s[(0, 0)], s[(0, 1)], s[(1, 1)]);
            let mean = 0.5 * (a + d);
            let r = (0.25 * (a - d) * (a - d) + b * b).sqrt();
            Ok(mean - r)
        }
        _ => {
            let ev = sym_eigenvalues_jacobi(&s)?;
            Ok(ev.into_iter().fold(f64::INFINITY, f64::min))
        }
    }
}
