//! Small dense complex linear algebra and a real GMRES.
//!
//! Everything here targets the modest sizes of this crate: Fourier-basis
//! operator matrices of dimension `2N+1` (a few dozen) and matrix-free Krylov
//! solves on grid vectors. No external BLAS/LAPACK.

use crate::{Error, Result, C64};

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CMatrix {
            nrows,
            ncols,
            data: vec![C64::new(0.0, 0.0); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = CMatrix::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.ncols);
        let mut out = vec![C64::new(0.0, 0.0); self.nrows];
        for i in 0..self.nrows {
            let row = &self.data[i * self.ncols..(i + 1) * self.ncols];
            let mut acc = C64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(v.iter()) {
                acc += a * b;
            }
            out[i] = acc;
        }
        out
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.ncols, other.nrows);
        let mut out = CMatrix::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for l in 0..self.ncols {
                let a = self[(i, l)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.ncols {
                    out[(i, j)] += a * other[(l, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a -= b;
        }
        out
    }

    pub fn conj_transpose(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Scale row i by `w[i]` and column j by `v[j]`.
    pub fn scale_rows_cols(&self, w: &[f64], v: &[f64]) -> CMatrix {
        assert_eq!(w.len(), self.nrows);
        assert_eq!(v.len(), self.ncols);
        let mut out = self.clone();
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out[(i, j)] *= w[i] * v[j];
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Spectral norm by power iteration on `A^H A`.
    pub fn spectral_norm(&self) -> f64 {
        if self.data.iter().all(|z| z.norm_sqr() == 0.0) {
            return 0.0;
        }
        let at = self.conj_transpose();
        // deterministic, non-degenerate start vector
        let mut v: Vec<C64> = (0..self.ncols)
            .map(|j| C64::new(1.0 + (j as f64) * 0.127, 0.063 * ((j % 7) as f64)))
            .collect();
        let mut lambda = 0.0f64;
        for _ in 0..600 {
            let w = at.matvec(&self.matvec(&v));
            let norm = vec_norm(&w);
            if norm == 0.0 {
                return 0.0;
            }
            let new_lambda = norm;
            for (x, y) in v.iter_mut().zip(w.iter()) {
                *x = y / norm;
            }
            if (new_lambda - lambda).abs() <= 1e-12 * new_lambda.max(1e-300) {
                lambda = new_lambda;
                break;
            }
            lambda = new_lambda;
        }
        lambda.sqrt()
    }

    /// 2-norm condition estimate via LU: `||A|| * ||A^{-1}||`.
    pub fn cond2(&self) -> Result<f64> {
        let lu = LuFactors::factorize(self)?;
        let norm_a = self.spectral_norm();
        // power iteration on (A^{-1})^H A^{-1} using LU solves
        let n = self.nrows;
        let mut v: Vec<C64> = (0..n)
            .map(|j| C64::new(1.0 - (j as f64) * 0.061, 0.043 * ((j % 5) as f64)))
            .collect();
        let mut lambda = 0.0f64;
        for _ in 0..600 {
            let w = lu.solve(&v)?;
            let w = lu.solve_conj_transpose(&w)?;
            let norm = vec_norm(&w);
            if norm == 0.0 {
                break;
            }
            for (x, y) in v.iter_mut().zip(w.iter()) {
                *x = y / norm;
            }
            if (norm - lambda).abs() <= 1e-12 * norm {
                lambda = norm;
                break;
            }
            lambda = norm;
        }
        Ok(norm_a * lambda.sqrt())
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.ncols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.ncols + j]
    }
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// LU factorization with partial pivoting.
pub struct LuFactors {
    n: usize,
    lu: Vec<C64>,
    piv: Vec<usize>,
}

impl LuFactors {
    pub fn factorize(a: &CMatrix) -> Result<Self> {
        assert_eq!(a.nrows, a.ncols);
        let n = a.nrows;
        let mut lu = a.data.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let mut pivot_row = col;
            let mut best = lu[col * n + col].norm_sqr();
            for r in col + 1..n {
                let mag = lu[r * n + col].norm_sqr();
                if mag > best {
                    best = mag;
                    pivot_row = r;
                }
            }
            if best == 0.0 {
                return Err(Error::SolverFailure {
                    what: "LU factorization of singular matrix".into(),
                    residual: 0.0,
                    iterations: col,
                });
            }
            if pivot_row != col {
                for j in 0..n {
                    lu.swap(col * n + j, pivot_row * n + j);
                }
                piv.swap(col, pivot_row);
            }
            let inv_pivot = C64::new(1.0, 0.0) / lu[col * n + col];
            for r in col + 1..n {
                let factor = lu[r * n + col] * inv_pivot;
                lu[r * n + col] = factor;
                for j in col + 1..n {
                    let upper = lu[col * n + j];
                    lu[r * n + j] -= factor * upper;
                }
            }
        }
        Ok(LuFactors { n, lu, piv })
    }

    /// Solve `A x = b`.
    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut x: Vec<C64> = self.piv.iter().map(|&p| b[p]).collect();
        // forward: L y = Pb
        for i in 1..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[i * n + j] * x[j];
            }
            x[i] = acc;
        }
        // back: U x = y
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.lu[i * n + j] * x[j];
            }
            x[i] = acc / self.lu[i * n + i];
        }
        Ok(x)
    }

    /// Solve `A^H x = b` using the same factors (`A^H = U^H L^H P`).
    pub fn solve_conj_transpose(&self, b: &[C64]) -> Result<Vec<C64>> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        // forward: U^H z = b
        for i in 0..n {
            let mut acc = y[i];
            for j in 0..i {
                acc -= self.lu[j * n + i].conj() * y[j];
            }
            y[i] = acc / self.lu[i * n + i].conj();
        }
        // back: L^H w = z
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in i + 1..n {
                acc -= self.lu[j * n + i].conj() * y[j];
            }
            y[i] = acc;
        }
        // undo pivoting: x = P^T w
        let mut x = vec![C64::new(0.0, 0.0); n];
        for (i, &p) in self.piv.iter().enumerate() {
            x[p] = y[i];
        }
        Ok(x)
    }
}

/// Outcome of a GMRES solve.
#[derive(Debug, Clone)]
pub struct GmresResult {
    pub solution: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Unrestarted GMRES for a real linear operator.
///
/// Complex-linear and real-linear grid operators in this crate are applied
/// through their doubled real form, so one real implementation serves all of
/// them.
pub fn gmres<F>(apply: F, b: &[f64], tol: f64, max_iter: usize) -> GmresResult
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = b.len();
    let b_norm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if b_norm == 0.0 {
        return GmresResult {
            solution: vec![0.0; n],
            residual: 0.0,
            iterations: 0,
            converged: true,
        };
    }
    let m = max_iter.min(n);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    basis.push(b.iter().map(|x| x / b_norm).collect());
    let mut h = vec![vec![0.0f64; m]; m + 1];
    let mut cs = vec![0.0f64; m];
    let mut sn = vec![0.0f64; m];
    let mut g = vec![0.0f64; m + 1];
    g[0] = b_norm;
    let mut iterations = 0;
    let mut residual = b_norm;

    for j in 0..m {
        let mut w = apply(&basis[j]);
        // modified Gram-Schmidt
        for i in 0..=j {
            let hij: f64 = w.iter().zip(basis[i].iter()).map(|(a, b)| a * b).sum();
            h[i][j] = hij;
            for (wk, vk) in w.iter_mut().zip(basis[i].iter()) {
                *wk -= hij * vk;
            }
        }
        let wnorm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        h[j + 1][j] = wnorm;
        // apply accumulated Givens rotations to the new column
        for i in 0..j {
            let tmp = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
            h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
            h[i][j] = tmp;
        }
        let denom = (h[j][j] * h[j][j] + h[j + 1][j] * h[j + 1][j]).sqrt();
        if denom == 0.0 {
            iterations = j + 1;
            break;
        }
        cs[j] = h[j][j] / denom;
        sn[j] = h[j + 1][j] / denom;
        h[j][j] = denom;
        h[j + 1][j] = 0.0;
        g[j + 1] = -sn[j] * g[j];
        g[j] *= cs[j];
        residual = g[j + 1].abs();
        iterations = j + 1;
        if residual <= tol * b_norm || wnorm == 0.0 {
            break;
        }
        for x in w.iter_mut() {
            *x /= wnorm;
        }
        basis.push(w);
    }

    // back-substitute H y = g
    let k = iterations;
    let mut y = vec![0.0f64; k];
    for i in (0..k).rev() {
        let mut acc = g[i];
        for l in i + 1..k {
            acc -= h[i][l] * y[l];
        }
        y[i] = acc / h[i][i];
    }
    let mut x = vec![0.0f64; n];
    for (i, yi) in y.iter().enumerate() {
        for (xk, vk) in x.iter_mut().zip(basis[i].iter()) {
            *xk += yi * vk;
        }
    }
    GmresResult {
        solution: x,
        residual: residual / b_norm,
        iterations: k,
        converged: residual <= tol * b_norm,
    }
}

/// View a complex slice as interleaved real storage `[re..., im...]`.
pub fn complex_to_doubled(v: &[C64]) -> Vec<f64> {
    let n = v.len();
    let mut out = vec![0.0; 2 * n];
    for (i, z) in v.iter().enumerate() {
        out[i] = z.re;
        out[n + i] = z.im;
    }
    out
}

pub fn doubled_to_complex(v: &[f64]) -> Vec<C64> {
    let n = v.len() / 2;
    (0..n).map(|i| C64::new(v[i], v[n + i])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn lu_solves_small_system() {
        let mut a = CMatrix::zeros(3, 3);
        a[(0, 0)] = c(2.0, 1.0);
        a[(0, 1)] = c(-1.0, 0.0);
        a[(0, 2)] = c(0.5, -0.25);
        a[(1, 0)] = c(0.0, 3.0);
        a[(1, 1)] = c(1.0, 1.0);
        a[(1, 2)] = c(-2.0, 0.0);
        a[(2, 0)] = c(1.0, 0.0);
        a[(2, 1)] = c(0.0, -1.0);
        a[(2, 2)] = c(4.0, 2.0);
        let x_true = vec![c(1.0, -2.0), c(0.5, 0.5), c(-1.5, 3.0)];
        let b = a.matvec(&x_true);
        let lu = LuFactors::factorize(&a).unwrap();
        let x = lu.solve(&b).unwrap();
        for (got, want) in x.iter().zip(x_true.iter()) {
            assert!((got - want).norm() < 1e-12);
        }
        // conjugate-transpose solve
        let bh = a.conj_transpose().matvec(&x_true);
        let xh = lu.solve_conj_transpose(&bh).unwrap();
        for (got, want) in xh.iter().zip(x_true.iter()) {
            assert!((got - want).norm() < 1e-12);
        }
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let a = CMatrix::from_diag(&[c(3.0, 0.0), c(0.0, -5.0), c(1.0, 1.0)]);
        assert!((a.spectral_norm() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn cond2_of_diagonal() {
        let a = CMatrix::from_diag(&[c(4.0, 0.0), c(2.0, 0.0), c(0.5, 0.0)]);
        assert!((a.cond2().unwrap() - 8.0).abs() < 1e-8);
    }

    #[test]
    fn gmres_solves_spd_system() {
        // 2x2 block system, symmetric positive definite
        let a = [[4.0, 1.0, 0.0], [1.0, 3.0, -1.0], [0.0, -1.0, 2.0]];
        let apply = |v: &[f64]| -> Vec<f64> {
            (0..3)
                .map(|i| (0..3).map(|j| a[i][j] * v[j]).sum())
                .collect()
        };
        let x_true = [1.0, -2.0, 0.5];
        let b = apply(&x_true);
        let res = gmres(apply, &b, 1e-12, 10);
        assert!(res.converged);
        for (got, want) in res.solution.iter().zip(x_true.iter()) {
            assert!((got - want).abs() < 1e-10);
        }
    }

    #[test]
    fn gmres_zero_rhs_returns_zero() {
        let res = gmres(|v: &[f64]| v.to_vec(), &[0.0, 0.0], 1e-10, 5);
        assert!(res.converged);
        assert_eq!(res.iterations, 0);
        assert!(res.solution.iter().all(|&x| x == 0.0));
    }
}
