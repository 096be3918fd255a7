//! Single-layer operator `S_k` on the unit circle.
//!
//! `(S_k f)(x) = int_{|y|=1} G_k(x - y) f(y) ds(y)`. On the circle
//! `|x(t) - x(s)| = 2 |sin((t-s)/2)|`, so the kernel splits exactly into
//!
//! `G_k = -(1/(4 pi)) log(4 sin^2((t-s)/2)) + B(t,s)`,
//!
//! where `B = G_k - G_0` is real-analytic (an entire series in `k(x-y)`).
//! The log part is integrated with the Kussmaul-Martensen quadrature
//! (spectrally accurate for trigonometric densities), the remainder with the
//! trapezoidal rule.

use super::FaddeevKernel;
use crate::boundary::{BoundaryField, SobolevIndex};
use crate::linalg::CMatrix;
use crate::{Error, Result, C64};
use std::f64::consts::PI;

const FOUR_PI: f64 = 4.0 * PI;

/// `S_k` assembled on the Fourier basis `|n| <= order`.
#[derive(Debug, Clone)]
pub struct SingleLayer {
    k: C64,
    order: usize,
    half_nodes: usize,
    matrix: CMatrix,
}

impl SingleLayer {
    /// Assemble with `2m` quadrature nodes (default `m = 128`).
    pub fn assemble(kernel: &FaddeevKernel, order: usize, m: usize) -> Result<Self> {
        if m < 2 * order + 2 {
            return Err(Error::invalid(format!(
                "{m} node pairs cannot resolve Fourier order {order}"
            )));
        }
        let k = kernel.k();
        let nn = 2 * m;
        let nodes: Vec<f64> = (0..nn).map(|i| PI * i as f64 / m as f64).collect();
        let points: Vec<C64> = nodes.iter().map(|&t| C64::from_polar(1.0, t)).collect();

        // Kussmaul-Martensen weights for log(4 sin^2(tau/2)), by difference index
        let mut log_weights = vec![0.0f64; nn];
        for (d, w) in log_weights.iter_mut().enumerate() {
            let tau = PI * d as f64 / m as f64;
            let mut acc = 0.0;
            for j in 1..m {
                acc += (j as f64 * tau).cos() / j as f64;
            }
            *w = -2.0 * PI / m as f64 * acc - PI / (m as f64 * m as f64) * (m as f64 * tau).cos();
        }

        // Nystrom matrix on nodal values; the kernel G_k is real
        let trapz = PI / m as f64;
        let mut nystrom = vec![0.0f64; nn * nn];
        for i in 0..nn {
            for j in 0..nn {
                let w = points[i] - points[j];
                let log_part = -log_weights[(nn + i - j) % nn] / FOUR_PI;
                nystrom[i * nn + j] = log_part + kernel.green_remainder(w) * trapz;
            }
        }

        // conjugate into Fourier space: column n, row m
        let dim = 2 * order + 1;
        let sqrt_2pi = (2.0 * PI).sqrt();
        let mut matrix = CMatrix::zeros(dim, dim);
        let mut column = vec![C64::new(0.0, 0.0); nn];
        for n in -(order as i64)..=(order as i64) {
            for (i, slot) in column.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (j, &t) in nodes.iter().enumerate() {
                    let phi = C64::from_polar(1.0 / sqrt_2pi, n as f64 * t);
                    acc += nystrom[i * nn + j] * phi;
                }
                *slot = acc;
            }
            for mm in -(order as i64)..=(order as i64) {
                let mut coeff = C64::new(0.0, 0.0);
                for (i, &t) in nodes.iter().enumerate() {
                    coeff += column[i] * C64::from_polar(1.0, -(mm as f64) * t);
                }
                coeff *= sqrt_2pi / nn as f64;
                matrix[((mm + order as i64) as usize, (n + order as i64) as usize)] = coeff;
            }
        }
        Ok(SingleLayer {
            k,
            order,
            half_nodes: m,
            matrix,
        })
    }

    pub fn k(&self) -> C64 {
        self.k
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn half_nodes(&self) -> usize {
        self.half_nodes
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Apply to a boundary density given on the truncated Fourier basis.
    pub fn apply(&self, density: &BoundaryField) -> Result<BoundaryField> {
        if density.order() != self.order {
            return Err(Error::invalid(format!(
                "density order {} does not match operator order {}",
                density.order(),
                self.order
            )));
        }
        BoundaryField::new(self.order, self.matrix.matvec(density.coeffs()))
    }

    /// Weighted matrix norm realizing `H^s -> H^{s+1}` on the truncated basis.
    pub fn mapping_norm(&self, s: SobolevIndex) -> f64 {
        let o = self.order as i64;
        let row: Vec<f64> = (-o..=o)
            .map(|n| (1.0 + n.abs() as f64).powf(s.0 + 1.0))
            .collect();
        let col: Vec<f64> = (-o..=o)
            .map(|n| (1.0 + n.abs() as f64).powf(-s.0))
            .collect();
        self.matrix.scale_rows_cols(&row, &col).spectral_norm()
    }

    /// Evaluate the layer potential off the boundary by the trapezoidal rule.
    pub fn potential(&self, density: &BoundaryField, z: C64) -> Result<C64> {
        let kernel = FaddeevKernel::new(self.k);
        let m = self.half_nodes;
        let trapz = PI / m as f64;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..2 * m {
            let t = PI * i as f64 / m as f64;
            let y = C64::from_polar(1.0, t);
            acc += kernel.green(z - y)? * density.eval(t) * trapz;
        }
        Ok(acc)
    }

    /// Radial derivative of the layer potential at `z` off the boundary.
    fn radial_derivative(&self, density: &BoundaryField, z: C64) -> Result<C64> {
        let m = self.half_nodes;
        let trapz = PI / m as f64;
        let dir = z / z.norm();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..2 * m {
            let t = PI * i as f64 / m as f64;
            let y = C64::from_polar(1.0, t);
            let (gx, gy) = super::faddeev_green_grad(self.k, z - y)?;
            acc += (gx * dir.re + gy * dir.im) * density.eval(t) * trapz;
        }
        Ok(acc)
    }

    /// Validation diagnostic for the classical jump relations of the normal
    /// derivative of a single layer: extrapolates the radial derivative to
    /// the circle from both sides and reports the defect of
    /// `(outward limit) - (inward limit) = -density`.
    pub fn gradient_jump_check(
        &self,
        density: &BoundaryField,
        thetas: &[f64],
        delta: f64,
    ) -> Result<JumpCheck> {
        // quadratic Richardson extrapolation from distances delta, delta/2, delta/4
        let too_close = delta / 4.0 < 3.0 * PI / self.half_nodes as f64;
        let extrapolate = |vals: [C64; 3]| -> C64 {
            vals[0] / 3.0 - vals[1] * 2.0 + vals[2] * (8.0 / 3.0)
        };
        let mut outward = Vec::with_capacity(thetas.len());
        let mut inward = Vec::with_capacity(thetas.len());
        let mut defect = 0.0f64;
        for &theta in thetas {
            let dir = C64::from_polar(1.0, theta);
            let out_vals = [
                self.radial_derivative(density, dir * (1.0 + delta))?,
                self.radial_derivative(density, dir * (1.0 + delta / 2.0))?,
                self.radial_derivative(density, dir * (1.0 + delta / 4.0))?,
            ];
            let in_vals = [
                self.radial_derivative(density, dir * (1.0 - delta))?,
                self.radial_derivative(density, dir * (1.0 - delta / 2.0))?,
                self.radial_derivative(density, dir * (1.0 - delta / 4.0))?,
            ];
            let out_lim = extrapolate(out_vals);
            let in_lim = extrapolate(in_vals);
            defect = defect.max((out_lim - in_lim + density.eval(theta)).norm());
            outward.push(out_lim);
            inward.push(in_lim);
        }
        Ok(JumpCheck {
            outward,
            inward,
            jump_defect: defect,
            extrapolation_unreliable: too_close,
        })
    }
}

/// Result of [`SingleLayer::gradient_jump_check`].
#[derive(Debug, Clone)]
pub struct JumpCheck {
    /// Extrapolated exterior limits of the normal derivative.
    pub outward: Vec<C64>,
    /// Extrapolated interior limits.
    pub inward: Vec<C64>,
    /// Max over sample angles of `|outward - inward + density|`.
    pub jump_defect: f64,
    /// Set when the evaluation points are too close to the circle for the
    /// trapezoidal rule at this node count.
    pub extrapolation_unreliable: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn zero_k() -> FaddeevKernel {
        FaddeevKernel::new(c(0.0, 0.0))
    }

    #[test]
    fn log_layer_is_fourier_multiplier() {
        // oracle: classical multiplier 1/(2|n|) for the log kernel, 0 at n=0,
        // cross-checked at 512 quadrature nodes
        let order = 16;
        let sl = SingleLayer::assemble(&zero_k(), order, 256).unwrap();
        for n in -(order as i64)..=(order as i64) {
            for mm in -(order as i64)..=(order as i64) {
                let got = sl.matrix()[((mm + order as i64) as usize, (n + order as i64) as usize)];
                let want = if mm == n && n != 0 {
                    c(1.0 / (2.0 * n.abs() as f64), 0.0)
                } else {
                    c(0.0, 0.0)
                };
                assert!(
                    (got - want).norm() < 1e-12,
                    "entry ({mm},{n}) = {got}, want {want}"
                );
            }
        }
    }

    #[test]
    fn constant_density_log_potential_vanishes_on_circle() {
        let sl = SingleLayer::assemble(&zero_k(), 8, 64).unwrap();
        let f = BoundaryField::basis(8, 0).unwrap();
        let out = sl.apply(&f).unwrap();
        assert!(out.coeffs().iter().all(|z| z.norm() < 1e-13));
    }

    #[test]
    fn entries_cauchy_converge_in_node_count() {
        let kernel = FaddeevKernel::new(c(2.0, 1.0));
        let s32 = SingleLayer::assemble(&kernel, 12, 32).unwrap();
        let s64 = SingleLayer::assemble(&kernel, 12, 64).unwrap();
        let s128 = SingleLayer::assemble(&kernel, 12, 128).unwrap();
        let d1 = s64.matrix().sub(s32.matrix()).frobenius_norm();
        let d2 = s128.matrix().sub(s64.matrix()).frobenius_norm();
        assert!(
            d2 < 1e-10 && d2 <= d1,
            "quadrature not converging: {d1} then {d2}"
        );
    }

    #[test]
    fn mapping_norm_bounded_for_half_negative_s() {
        let kernel = FaddeevKernel::new(c(1.0, 0.5));
        let sl = SingleLayer::assemble(&kernel, 16, 128).unwrap();
        let norm = sl.mapping_norm(SobolevIndex(-0.5));
        assert!(norm.is_finite() && norm > 0.0 && norm < 10.0, "norm {norm}");
    }

    #[test]
    fn zero_density_zero_jump() {
        let sl = SingleLayer::assemble(&zero_k(), 4, 256).unwrap();
        let f = BoundaryField::zero(4);
        let check = sl
            .gradient_jump_check(&f, &[0.0, 1.0, 2.5], 0.2)
            .unwrap();
        assert!(check.jump_defect < 1e-14);
        assert!(!check.extrapolation_unreliable);
    }

    #[test]
    fn jump_limits_match_log_potential_of_phi1() {
        // closed-form oracle: the log potential of phi_1 is phi_1(z) r/2 inside
        // and phi_1(z)/(2 r) outside, so the radial derivative limits are
        // +phi_1/2 (inside) and -phi_1/2 (outside).
        let order = 4;
        let sl = SingleLayer::assemble(&zero_k(), order, 256).unwrap();
        let f = BoundaryField::basis(order, 1).unwrap();
        let thetas = [0.0, 0.7, 1.9, 4.4];
        let check = sl.gradient_jump_check(&f, &thetas, 0.2).unwrap();
        for (i, &theta) in thetas.iter().enumerate() {
            let phi1 = f.eval(theta);
            assert!(
                (check.inward[i] - phi1 * 0.5).norm() < 2e-3,
                "inward limit {} vs {}",
                check.inward[i],
                phi1 * 0.5
            );
            assert!(
                (check.outward[i] + phi1 * 0.5).norm() < 2e-3,
                "outward limit {} vs {}",
                check.outward[i],
                -phi1 * 0.5
            );
        }
        assert!(check.jump_defect < 5e-3);
    }

    #[test]
    fn jump_equals_minus_density_for_nonzero_k() {
        let kernel = FaddeevKernel::new(c(1.0, 0.0));
        let order = 6;
        let sl = SingleLayer::assemble(&kernel, order, 256).unwrap();
        let mut f = BoundaryField::zero(order);
        f.set(0, c(0.8, 0.0)).unwrap();
        f.set(2, c(0.5, -0.3)).unwrap();
        f.set(-2, c(0.5, 0.3)).unwrap();
        let check = sl
            .gradient_jump_check(&f, &[0.3, 1.4, 3.0, 5.2], 0.2)
            .unwrap();
        assert!(check.jump_defect < 5e-3, "defect {}", check.jump_defect);
    }

    #[test]
    fn close_points_flagged() {
        let sl = SingleLayer::assemble(&zero_k(), 2, 16).unwrap();
        let f = BoundaryField::basis(2, 1).unwrap();
        let check = sl.gradient_jump_check(&f, &[0.0], 0.05).unwrap();
        assert!(check.extrapolation_unreliable);
    }

    #[test]
    fn too_few_nodes_is_an_error() {
        let kernel = FaddeevKernel::new(c(1.0, 0.0));
        assert!(SingleLayer::assemble(&kernel, 16, 16).is_err());
    }
}
