//! Uniform square grids and FFT-based discrete convolution.
//!
//! All volume solvers in this crate (Lippmann-Schwinger, D-bar, Beltrami)
//! discretize convolution operators `f -> K * f` on a uniform grid. The
//! convolution is computed exactly (as a discrete sum) by zero-padding to a
//! doubled grid, so no periodization artifacts enter; the only error is the
//! kernel sampling itself.

use crate::C64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Cell- or node-centered uniform grid on `[-half, half]^2`, `n` points per
/// side, row-major index `i * n + j` for coordinates `(x_i, y_j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    pub n: usize,
    pub half: f64,
    /// 0.5 for cell-centered, 0.0 for node-centered (includes the origin).
    pub offset: f64,
}

impl UniformGrid {
    pub fn cell_centered(n: usize, half: f64) -> Self {
        UniformGrid {
            n,
            half,
            offset: 0.5,
        }
    }

    /// Node-centered grid; contains the origin at index `n/2` when `n` is even.
    pub fn node_centered(n: usize, half: f64) -> Self {
        UniformGrid {
            n,
            half,
            offset: 0.0,
        }
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half / self.n as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half + self.step() * (i as f64 + self.offset)
    }

    pub fn point(&self, i: usize, j: usize) -> C64 {
        C64::new(self.coord(i), self.coord(j))
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Sample a scalar function over the grid.
    pub fn sample(&self, f: impl Fn(C64) -> C64) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.n {
            for j in 0..self.n {
                out.push(f(self.point(i, j)));
            }
        }
        out
    }

    /// Midpoint-rule integral `sum f * h^2`.
    pub fn integrate(&self, values: &[C64]) -> C64 {
        let h2 = self.step() * self.step();
        values.iter().sum::<C64>() * h2
    }

    /// Bilinear interpolation of grid values at an interior point.
    pub fn bilinear(&self, values: &[C64], z: C64) -> C64 {
        let h = self.step();
        let fi = (z.re + self.half) / h - self.offset;
        let fj = (z.im + self.half) / h - self.offset;
        let i0 = (fi.floor() as isize).clamp(0, self.n as isize - 2) as usize;
        let j0 = (fj.floor() as isize).clamp(0, self.n as isize - 2) as usize;
        let di = (fi - i0 as f64).clamp(0.0, 1.0);
        let dj = (fj - j0 as f64).clamp(0.0, 1.0);
        let v = |i: usize, j: usize| values[i * self.n + j];
        v(i0, j0) * (1.0 - di) * (1.0 - dj)
            + v(i0 + 1, j0) * di * (1.0 - dj)
            + v(i0, j0 + 1) * (1.0 - di) * dj
            + v(i0 + 1, j0 + 1) * di * dj
    }
}

struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    fn transform(&self, data: &mut [C64], inverse: bool) {
        let n = self.n;
        let plan = if inverse { &self.inverse } else { &self.forward };
        let mut scratch = vec![C64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        // rows
        for row in data.chunks_exact_mut(n) {
            plan.process_with_scratch(row, &mut scratch);
        }
        // columns via transpose
        transpose(data, n);
        for row in data.chunks_exact_mut(n) {
            plan.process_with_scratch(row, &mut scratch);
        }
        transpose(data, n);
    }
}

fn transpose(data: &mut [C64], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// Exact discrete convolution `out[i] = sum_j h^2 K(x_i - x_j) f[j]` on a
/// [`UniformGrid`], via FFT on the zero-padded doubled grid.
pub struct Convolution {
    n: usize,
    kernel_hat: Vec<C64>,
    fft: Fft2,
}

impl Convolution {
    /// `kernel(d)` is evaluated at every pairwise difference `d`; the caller
    /// decides the value at `d = 0` (singular cell).
    pub fn new(grid: &UniformGrid, kernel: impl Fn(C64) -> C64) -> Self {
        let n = grid.n;
        let n2 = 2 * n;
        let h = grid.step();
        let fft = Fft2::new(n2);
        // kernel in wrap-around order: index ii encodes difference
        // di = ii for ii < n, di = ii - 2n for ii >= n
        let mut kernel_hat = vec![C64::new(0.0, 0.0); n2 * n2];
        for ii in 0..n2 {
            let di = if ii < n { ii as f64 } else { ii as f64 - n2 as f64 };
            for jj in 0..n2 {
                let dj = if jj < n { jj as f64 } else { jj as f64 - n2 as f64 };
                kernel_hat[ii * n2 + jj] = kernel(C64::new(di * h, dj * h)) * (h * h);
            }
        }
        fft.transform(&mut kernel_hat, false);
        Convolution { n, kernel_hat, fft }
    }

    pub fn apply(&self, f: &[C64]) -> Vec<C64> {
        let n = self.n;
        let n2 = 2 * n;
        assert_eq!(f.len(), n * n);
        let mut padded = vec![C64::new(0.0, 0.0); n2 * n2];
        for i in 0..n {
            padded[i * n2..i * n2 + n].copy_from_slice(&f[i * n..(i + 1) * n]);
        }
        self.fft.transform(&mut padded, false);
        for (p, k) in padded.iter_mut().zip(self.kernel_hat.iter()) {
            *p *= k;
        }
        self.fft.transform(&mut padded, true);
        let scale = 1.0 / (n2 * n2) as f64;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(padded[i * n2 + j] * scale);
            }
        }
        out
    }
}

/// Mean of `log|x|` over the unit square centered at the origin,
/// `(pi/2 - 3 - log 2)/2`. The cell average of `log|x|` over a cell of side
/// `h` is `log(h) + LOG_CELL_MEAN`; used for the singular-cell value of
/// logarithmic kernels.
pub const LOG_CELL_MEAN: f64 = -1.061_175_426_882_524_3;

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn grid_coordinates() {
        let g = UniformGrid::cell_centered(4, 1.0);
        assert!((g.coord(0) + 0.75).abs() < 1e-15);
        assert!((g.coord(3) - 0.75).abs() < 1e-15);
        let gn = UniformGrid::node_centered(4, 1.0);
        assert!((gn.coord(2) - 0.0).abs() < 1e-15);
    }

    #[test]
    fn convolution_matches_direct_sum() {
        let g = UniformGrid::cell_centered(8, 1.0);
        let kernel = |d: C64| {
            if d.norm() == 0.0 {
                c(0.7, 0.0)
            } else {
                c((-d.norm_sqr()).exp(), 0.3 * d.re)
            }
        };
        let f = g.sample(|z| c(z.re * z.im, (z.re + 0.2 * z.im).cos()));
        let conv = Convolution::new(&g, kernel);
        let fast = conv.apply(&f);
        let h2 = g.step() * g.step();
        for i in 0..g.n {
            for j in 0..g.n {
                let zi = g.point(i, j);
                let mut acc = c(0.0, 0.0);
                for a in 0..g.n {
                    for b in 0..g.n {
                        acc += kernel(zi - g.point(a, b)) * f[a * g.n + b] * h2;
                    }
                }
                let got = fast[i * g.n + j];
                assert!(
                    (got - acc).norm() < 1e-12,
                    "mismatch at ({i},{j}): {got} vs {acc}"
                );
            }
        }
    }

    #[test]
    fn log_cell_mean_matches_quadrature() {
        // midpoint quadrature of log|x| over the unit square
        let m = 2000;
        let h = 1.0 / m as f64;
        let mut acc = 0.0;
        for i in 0..m {
            for j in 0..m {
                let x = -0.5 + (i as f64 + 0.5) * h;
                let y = -0.5 + (j as f64 + 0.5) * h;
                acc += 0.5 * (x * x + y * y).ln();
            }
        }
        acc *= h * h;
        assert!(
            (acc - LOG_CELL_MEAN).abs() < 1e-6,
            "quadrature {acc} vs constant {LOG_CELL_MEAN}"
        );
    }

    #[test]
    fn bilinear_reproduces_linear_fields() {
        let g = UniformGrid::cell_centered(16, 2.0);
        let f = g.sample(|z| c(2.0 * z.re - z.im + 0.5, 0.0));
        for &(x, y) in &[(0.3, -0.7), (1.1, 0.9), (-1.5, 0.2)] {
            let got = g.bilinear(&f, c(x, y));
            let want = 2.0 * x - y + 0.5;
            assert!((got.re - want).abs() < 1e-12);
        }
    }
}
