//! Small complex linear solvers used by the MMSE detector.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Hermitian positive-definite matrix stored by its lower band:
/// `band[i][d] = A(i, i - d)` for `d = 0..=width`.
#[derive(Debug, Clone)]
pub struct HermitianBand<T> {
    n: usize,
    width: usize,
    band: Vec<Vec<Complex<T>>>,
}

impl<T: Real> HermitianBand<T> {
    pub fn zeros(n: usize, width: usize) -> Self {
        HermitianBand { n, width, band: vec![vec![Complex::new(T::zero(), T::zero()); width + 1]; n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// `A(i, j)` for `i >= j`.
    #[inline]
    pub fn lower(&self, i: usize, j: usize) -> Complex<T> {
        let d = i - j;
        if d > self.width {
            Complex::new(T::zero(), T::zero())
        } else {
            self.band[i][d]
        }
    }

    #[inline]
    pub fn set_lower(&mut self, i: usize, j: usize, v: Complex<T>) {
        self.band[i][i - j] = v;
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        if i >= j {
            self.lower(i, j)
        } else {
            self.lower(j, i).conj()
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<Complex<T>>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect()
    }

    /// Solves `A x = b` by banded Cholesky, `O(n w^2)`.
    pub fn solve(&self, b: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: b.len() });
        }
        let n = self.n;
        let w = self.width;
        let zero = Complex::new(T::zero(), T::zero());
        let max_diag = (0..n).map(|i| self.band[i][0].re.abs()).fold(T::zero(), T::max);
        let tol = T::of_usize(n.max(1)) * T::epsilon() * max_diag;
        let mut fac = HermitianBand::zeros(n, w);
        for j in 0..n {
            let lo_j = j.saturating_sub(w);
            let mut s = self.lower(j, j);
            for k in lo_j..j {
                s = s - fac.lower(j, k) * fac.lower(j, k).conj();
            }
            if !(s.re > tol) || !s.re.is_finite() {
                return Err(Error::SolverFailure);
            }
            let d = s.re.sqrt();
            fac.set_lower(j, j, Complex::new(d, T::zero()));
            for i in j + 1..(j + w + 1).min(n) {
                let lo = i.saturating_sub(w);
                let mut s = self.lower(i, j);
                for k in lo..j {
                    s = s - fac.lower(i, k) * fac.lower(j, k).conj();
                }
                fac.set_lower(i, j, s / d);
            }
        }
        // L y = b
        let mut y = vec![zero; n];
        for i in 0..n {
            let mut s = b[i];
            for k in i.saturating_sub(w)..i {
                s = s - fac.lower(i, k) * y[k];
            }
            y[i] = s / fac.lower(i, i).re;
        }
        // L^H x = y
        let mut x = vec![zero; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..(i + w + 1).min(n) {
                s = s - fac.lower(k, i).conj() * x[k];
            }
            x[i] = s / fac.lower(i, i).re;
        }
        Ok(x)
    }
}

/// Solves a dense square system by Gaussian elimination with partial
/// pivoting.
pub fn dense_solve<T: Real>(
    mut a: Vec<Vec<Complex<T>>>,
    mut b: Vec<Complex<T>>,
) -> Result<Vec<Complex<T>>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: a.len() });
    }
    let scale = a
        .iter()
        .flat_map(|r| r.iter().map(|v| v.norm()))
        .fold(T::zero(), T::max);
    let tol = T::of_usize(n.max(1)) * T::epsilon() * scale;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].norm().partial_cmp(&a[j][col].norm()).unwrap())
            .unwrap();
        if !(a[piv][col].norm() > tol) {
            return Err(Error::SolverFailure);
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let p = a[col][col];
        for row in col + 1..n {
            let f = a[row][col] / p;
            if f.re == T::zero() && f.im == T::zero() {
                continue;
            }
            for k in col..n {
                let v = a[col][k];
                a[row][k] = a[row][k] - f * v;
            }
            let bv = b[col];
            b[row] = b[row] - f * bv;
        }
    }
    let mut x = vec![Complex::new(T::zero(), T::zero()); n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s = s - a[i][k] * x[k];
        }
        x[i] = s / a[i][i];
    }
    Ok(x)
}
