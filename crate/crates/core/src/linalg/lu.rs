use super::{LinalgError, Mat};
use crate::scalar::Real;

/// Dense LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: Mat<T>,
    perm: Vec<usize>,
    sign: f64,
}

impl<T: Real> Lu<T> {
    pub fn factor(a: &Mat<T>) -> Result<Self, LinalgError> {
        if !a.is_square() {
            return Err(LinalgError::Dimension(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].value().abs();
            for i in k + 1..n {
                let v = lu[(i, k)].value().abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(LinalgError::Singular(k));
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let l = lu[(i, k)] / pivot;
                lu[(i, k)] = l;
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= l * u;
                }
            }
        }
        Ok(Self { lu, perm, sign })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[(i, j)];
                let xj = x[j];
                x[i] -= l * xj;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[(i, j)];
                let xj = x[j];
                x[i] -= u * xj;
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    /// Solves `A X = B` column by column.
    pub fn solve_mat(&self, b: &Mat<T>) -> Mat<T> {
        let n = self.dim();
        assert_eq!(b.rows(), n);
        let mut out = Mat::zeros(n, b.cols());
        let mut col = vec![T::zero(); n];
        for j in 0..b.cols() {
            for (i, c) in col.iter_mut().enumerate() {
                *c = b[(i, j)];
            }
            let x = self.solve(&col);
            for (i, v) in x.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out
    }

    pub fn inverse(&self) -> Mat<T> {
        self.solve_mat(&Mat::identity(self.dim()))
    }

    pub fn det(&self) -> T {
        let mut d = T::from_f64(self.sign);
        for i in 0..self.dim() {
            d *= self.lu[(i, i)];
        }
        d
    }
}
