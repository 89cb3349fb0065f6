use super::LinalgError;
use crate::scalar::Real;

/// Square band matrix with `kl` sub- and `ku` super-diagonals, factored in
/// place by Gaussian elimination with partial pivoting.
///
/// Row `i` keeps the window of columns `[i - kl, i + kl + ku]`; the extra
/// `kl` columns on the right absorb the fill-in produced by row swaps.
#[derive(Debug, Clone)]
pub struct BandedMatrix<T> {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<T>,
    pivots: Vec<usize>,
    factored: bool,
}

impl<T: Real> BandedMatrix<T> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![T::zero(); n * width],
            pivots: Vec::new(),
            factored: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        // window offset of column j in row i
        let off = j as isize - i as isize + self.kl as isize;
        if off < 0 || off as usize >= self.width {
            None
        } else {
            Some(i * self.width + off as usize)
        }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.slot(i, j).map_or(T::zero(), |s| self.data[s])
    }

    /// Adds `v` at `(i, j)`. Panics if the entry lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        assert!(!self.factored, "matrix already factored");
        let d = j as isize - i as isize;
        assert!(
            d >= -(self.kl as isize) && d <= self.ku as isize,
            "entry ({i}, {j}) outside band"
        );
        let s = self.slot(i, j).expect("inside band");
        self.data[s] += v;
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert!(!self.factored);
        let mut y = vec![T::zero(); self.n];
        for (i, yi) in y.iter_mut().enumerate() {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            for (j, &xj) in x.iter().enumerate().take(hi + 1).skip(lo) {
                *yi += self.get(i, j) * xj;
            }
        }
        y
    }

    // Swaps the active parts (columns >= `from`) of rows `a` and `b`; the
    // multipliers to the left stay put, matching the order `solve` uses.
    fn swap_rows(&mut self, a: usize, b: usize, from: usize) {
        let lo = from;
        let hi = (a.max(b) + self.kl + self.ku).min(self.n - 1);
        for j in lo..=hi {
            let sa = self.slot(a, j);
            let sb = self.slot(b, j);
            let va = sa.map_or(T::zero(), |s| self.data[s]);
            let vb = sb.map_or(T::zero(), |s| self.data[s]);
            match (sa, sb) {
                (Some(x), Some(y)) => {
                    self.data[x] = vb;
                    self.data[y] = va;
                }
                (Some(x), None) => {
                    debug_assert!(va.value() == 0.0);
                    self.data[x] = vb;
                }
                (None, Some(y)) => {
                    debug_assert!(vb.value() == 0.0);
                    self.data[y] = va;
                }
                (None, None) => {}
            }
        }
    }

    pub fn factor(&mut self) -> Result<(), LinalgError> {
        assert!(!self.factored, "matrix already factored");
        let n = self.n;
        self.pivots = vec![0; n];
        for k in 0..n {
            let last = (k + self.kl).min(n - 1);
            let mut p = k;
            let mut best = self.get(k, k).value().abs();
            for i in k + 1..=last {
                let v = self.get(i, k).value().abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(LinalgError::Singular(k));
            }
            self.pivots[k] = p;
            if p != k {
                self.swap_rows(k, p, k);
            }
            let pivot = self.get(k, k);
            let right = (k + self.kl + self.ku).min(n - 1);
            for i in k + 1..=last {
                let si = self.slot(i, k).expect("sub-diagonal inside window");
                let l = self.data[si] / pivot;
                // multiplier overwrites the eliminated entry
                self.data[si] = l;
                if l.value() == 0.0 {
                    continue;
                }
                for j in k + 1..=right {
                    let ukj = self.get(k, j);
                    let s = self.slot(i, j).expect("fill inside window");
                    self.data[s] -= l * ukj;
                }
            }
        }
        self.factored = true;
        Ok(())
    }

    /// Solves `A x = b` using the stored factorization.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        assert!(self.factored, "call factor() first");
        let n = self.n;
        let mut x = b.to_vec();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let last = (k + self.kl).min(n - 1);
            let xk = x[k];
            for (i, xi) in x.iter_mut().enumerate().take(last + 1).skip(k + 1) {
                *xi -= self.get(i, k) * xk;
            }
        }
        for k in (0..n).rev() {
            let right = (k + self.kl + self.ku).min(n - 1);
            let mut s = x[k];
            for (j, &xj) in x.iter().enumerate().take(right + 1).skip(k + 1) {
                s -= self.get(k, j) * xj;
            }
            x[k] = s / self.get(k, k);
        }
        x
    }
}
