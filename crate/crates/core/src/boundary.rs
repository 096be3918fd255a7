//! Fourier calculus on the unit circle.
//!
//! A boundary function is stored by its coefficients on the orthonormal basis
//! `phi_n(theta) = e^{i n theta} / sqrt(2 pi)`, `|n| <= N`. Sobolev norms use
//! the weight `(1+|n|)^{2s}`, and the duality pairing between `H^{1/2}` and
//! `H^{-1/2}` is the bilinear one induced by `int f g ds` (no conjugation),
//! which pairs mode `n` with mode `-n`.

use crate::dnmatrix::{DnMatrix, DnTag};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Sobolev smoothness order `s` in the `H^s` scale on the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevIndex(pub f64);

/// Function on the unit circle as a truncated Fourier series.
///
/// `coeffs[N + n]` is the coefficient of `phi_n`, `n = -N..N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryField {
    coeffs: Vec<C64>,
    order: usize,
}

impl BoundaryField {
    pub fn new(order: usize, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != 2 * order + 1 {
            return Err(Error::invalid(format!(
                "coefficient vector length {} does not match order {} (want {})",
                coeffs.len(),
                order,
                2 * order + 1
            )));
        }
        Ok(BoundaryField { coeffs, order })
    }

    pub fn zero(order: usize) -> Self {
        BoundaryField {
            coeffs: vec![C64::new(0.0, 0.0); 2 * order + 1],
            order,
        }
    }

    /// The basis function `phi_n` as a field of truncation order `order`.
    pub fn basis(order: usize, n: i64) -> Result<Self> {
        let mut f = Self::zero(order);
        f.set(n, C64::new(1.0, 0.0))?;
        Ok(f)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coefficient of `phi_n`; zero outside the stored range.
    pub fn coeff(&self, n: i64) -> C64 {
        let order = self.order as i64;
        if n.abs() > order {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[(n + order) as usize]
        }
    }

    pub fn set(&mut self, n: i64, value: C64) -> Result<()> {
        let order = self.order as i64;
        if n.abs() > order {
            return Err(Error::invalid(format!(
                "mode {n} outside truncation order {order}"
            )));
        }
        self.coeffs[(n + order) as usize] = value;
        Ok(())
    }

    /// Pointwise evaluation of the trigonometric polynomial at angle `theta`.
    pub fn eval(&self, theta: f64) -> C64 {
        let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        let mut acc = C64::new(0.0, 0.0);
        let order = self.order as i64;
        for n in -order..=order {
            let phase = C64::from_polar(1.0, n as f64 * theta);
            acc += self.coeff(n) * phase * norm;
        }
        acc
    }

    /// Whether the coefficients satisfy the real-function symmetry
    /// `b_{-n} = conj(b_n)` within `tol`.
    pub fn is_real_symmetric(&self, tol: f64) -> bool {
        let order = self.order as i64;
        (0..=order).all(|n| (self.coeff(-n) - self.coeff(n).conj()).norm() <= tol)
    }

    /// `H^s` norm: `( sum (1+|n|)^{2s} |b_n|^2 )^{1/2}`.
    pub fn hs_norm(&self, s: SobolevIndex) -> f64 {
        let order = self.order as i64;
        (-order..=order)
            .map(|n| (1.0 + n.abs() as f64).powf(2.0 * s.0) * self.coeff(n).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Finite-rank projection onto modes `|n| <= j`.
    pub fn project(&self, j: usize) -> Result<Self> {
        if j > self.order {
            return Err(Error::invalid(format!(
                "projection order {} exceeds truncation order {}",
                j, self.order
            )));
        }
        let mut out = self.clone();
        let order = self.order as i64;
        for n in -order..=order {
            if n.abs() > j as i64 {
                out.set(n, C64::new(0.0, 0.0)).unwrap();
            }
        }
        Ok(out)
    }

    /// Harmonic extension `u(r, theta) = sum r^{|n|} b_n phi_n(theta)`
    /// evaluated at points of the closed disc given as `(r, theta)`.
    pub fn harmonic_extend(&self, points: &[(f64, f64)]) -> Result<Vec<C64>> {
        for &(r, _) in points {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::invalid(format!(
                    "harmonic extension point has radius {r} outside [0, 1]"
                )));
            }
        }
        let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        let order = self.order as i64;
        Ok(points
            .iter()
            .map(|&(r, theta)| {
                let mut acc = C64::new(0.0, 0.0);
                for n in -order..=order {
                    let b = self.coeff(n);
                    if b.norm_sqr() == 0.0 {
                        continue;
                    }
                    let radial = r.powi(n.unsigned_abs() as i32);
                    acc += b * radial * norm * C64::from_polar(1.0, n as f64 * theta);
                }
                acc
            })
            .collect())
    }

    /// `L^2` norm of the harmonic extension over the subdisc `|x| < rho`,
    /// from the closed-form radial integral of `r^{2|n|}`.
    pub fn harmonic_extension_l2_subdisc(&self, rho: f64) -> f64 {
        let order = self.order as i64;
        (-order..=order)
            .map(|n| {
                let p = 2 * n.unsigned_abs() as i32 + 2;
                self.coeff(n).norm_sqr() * rho.powi(p) / p as f64
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Bilinear pairing `int f g ds = sum_n f_n g_{-n}` (matches the duality
    /// pairing coming from Green's theorem on real functions).
    pub fn pair(&self, other: &BoundaryField) -> C64 {
        let order = self.order.max(other.order) as i64;
        (-order..=order)
            .map(|n| self.coeff(n) * other.coeff(-n))
            .sum()
    }

    /// Serialize as a JSON array of `[re, im]` pairs ordered `n = -N..N`.
    pub fn to_json(&self) -> String {
        let pairs: Vec<[f64; 2]> = self.coeffs.iter().map(|z| [z.re, z.im]).collect();
        serde_json::to_string(&pairs).expect("serializing plain floats cannot fail")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let pairs: Vec<[f64; 2]> = serde_json::from_str(json)?;
        if pairs.len() % 2 == 0 {
            return Err(Error::invalid(
                "coefficient array must have odd length 2N+1".to_string(),
            ));
        }
        let order = (pairs.len() - 1) / 2;
        BoundaryField::new(order, pairs.iter().map(|p| C64::new(p[0], p[1])).collect())
    }
}

/// Dirichlet-to-Neumann map of the unit conductivity: `Lambda_1 phi_n = |n| phi_n`.
pub fn dn_map_identity(order: usize) -> DnMatrix {
    let n = order as i64;
    let diag: Vec<C64> = (-n..=n).map(|m| C64::new(m.abs() as f64, 0.0)).collect();
    DnMatrix::from_diagonal(order, &diag, DnTag::FullMap)
}
