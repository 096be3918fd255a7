//! The Faddeev Green's function `G_k` and its smooth remainder.
//!
//! `G_k(x) = e^{ikx} g_k(x)` with `-Delta G_k = delta`, adapted to the
//! exponential behavior `e^{ikx}`. The evaluation rests on two identities:
//!
//! - scaling: `g_k(x) = g_1(kx)` (verified against direct quadrature of the
//!   defining Fourier integral in the test suite);
//! - closed form: `g_1(v) = e^{-iv}/(2 pi) * Re E_1(-iv)`, where `E_1` is the
//!   exponential integral. The real part is continuous across the branch cut,
//!   so no branch bookkeeping is needed.
//!
//! The smooth remainder `h_1 = g_1 - G_0` (with `G_0 = -log|x|/(2 pi)`) is
//! what enters the log-split Nystrom quadrature; it extends continuously to
//! `h_1(0) = -gamma/(2 pi)`.

pub mod layer;

pub use layer::{JumpCheck, SingleLayer};

use crate::{Error, Result, C64, EULER_GAMMA};
use std::sync::Arc;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
/// Cancellation in the entire-series route stays below ~5 digits here.
const SERIES_RADIUS: f64 = 18.0;

/// `Re Ein(z)` where `Ein(z) = sum_{j>=1} (-1)^{j+1} z^j/(j j!)` is entire.
pub(crate) fn re_ein(z: C64) -> f64 {
    let mut term = C64::new(1.0, 0.0);
    let mut acc = C64::new(0.0, 0.0);
    for j in 1..=220u32 {
        term *= -z / (j as f64);
        let contrib = -term / (j as f64);
        acc += contrib;
        if term.norm() < 1e-18 * acc.norm().max(1.0) && j as f64 > z.norm() {
            break;
        }
    }
    acc.re
}

/// Real part of the exponential integral `E_1(z)`, `z != 0`.
///
/// `Re E_1` is single-valued on the punctured plane (the branch jump of
/// `E_1` across the negative real axis is purely imaginary). Relative
/// accuracy is ~1e-12 for `|z| <= 18` and ~1e-7 in the worst case beyond.
pub fn re_e1(z: C64) -> f64 {
    let r = z.norm();
    assert!(r > 0.0, "E_1 evaluated at 0");
    if r <= SERIES_RADIUS {
        return re_ein(z) - EULER_GAMMA - r.ln();
    }
    if z.re >= 0.0 {
        // E_1(z) = e^{-z} / (z+1 -) 1^2/(z+3 -) 2^2/(z+5 -) ...  (modified Lentz)
        let tiny = 1e-300;
        let mut b = z + 1.0;
        let mut f = b;
        if f.norm() < tiny {
            f = C64::new(tiny, 0.0);
        }
        let mut c = f;
        let mut d = C64::new(0.0, 0.0);
        for j in 1..200 {
            let a = -((j * j) as f64);
            b += 2.0;
            d = b + a * d;
            if d.norm() < tiny {
                d = C64::new(tiny, 0.0);
            }
            c = b + a / c;
            if c.norm() < tiny {
                c = C64::new(tiny, 0.0);
            }
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).norm() < 1e-16 {
                break;
            }
        }
        return ((-z).exp() / f).re;
    }
    // left half plane, |z| > 18: divergent asymptotic series truncated near
    // its smallest term; relative error ~ sqrt(2 pi |z|) e^{-|z|}
    let jmax = (r.floor() as usize).min(40);
    let mut sum = C64::new(1.0, 0.0);
    let mut term = C64::new(1.0, 0.0);
    for j in 1..=jmax {
        term *= -(j as f64) / z;
        sum += term;
    }
    (((-z).exp() / z) * sum).re
}

/// `g_1(v) = e^{-iv} / (2 pi) * Re E_1(-iv)`.
pub fn g1(v: C64) -> Result<C64> {
    if v.norm() == 0.0 {
        return Err(Error::Domain(
            "Faddeev kernel has a logarithmic singularity at 0".into(),
        ));
    }
    let miv = C64::new(v.im, -v.re); // -i v
    Ok((-C64::i() * v).exp() / TWO_PI * re_e1(miv))
}

/// Smooth remainder `h_1(v) = g_1(v) + log|v|/(2 pi)`, with `h_1(0) = -gamma/(2 pi)`.
pub fn h1(v: C64) -> C64 {
    let r = v.norm();
    if r == 0.0 {
        return C64::new(-EULER_GAMMA / TWO_PI, 0.0);
    }
    if r <= SERIES_RADIUS {
        let miv = C64::new(v.im, -v.re);
        let phase = (-C64::i() * v).exp();
        // e^{-iv} (Re Ein - gamma) - (e^{-iv} - 1) log|v|, all cancellation-free
        return (phase * (re_ein(miv) - EULER_GAMMA) - (phase - 1.0) * r.ln()) / TWO_PI;
    }
    g1(v).expect("nonzero argument") + r.ln() / TWO_PI
}

/// `g_k(x)`; `k = 0` delegates to the log kernel `G_0`.
pub fn faddeev_g(k: C64, x: C64) -> Result<C64> {
    if x.norm() == 0.0 {
        return Err(Error::Domain(
            "Faddeev kernel has a logarithmic singularity at x = 0".into(),
        ));
    }
    if k.norm() == 0.0 {
        return Ok(C64::new(-x.norm().ln() / TWO_PI, 0.0));
    }
    g1(k * x)
}

/// `G_k(x) = e^{ikx} g_k(x)`; real-valued for every `k`.
pub fn faddeev_green(k: C64, x: C64) -> Result<C64> {
    if x.norm() == 0.0 {
        return Err(Error::Domain(
            "Faddeev kernel has a logarithmic singularity at x = 0".into(),
        ));
    }
    if k.norm() == 0.0 {
        return Ok(C64::new(-x.norm().ln() / TWO_PI, 0.0));
    }
    let kx = k * x;
    let mikx = C64::new(kx.im, -kx.re);
    Ok(C64::new(re_e1(mikx) / TWO_PI, 0.0))
}

/// Gradient of `G_k` with respect to the two real coordinates of `x`.
pub fn faddeev_green_grad(k: C64, w: C64) -> Result<(f64, f64)> {
    if w.norm() == 0.0 {
        return Err(Error::Domain("gradient singular at 0".into()));
    }
    if k.norm() == 0.0 {
        let s = -1.0 / (TWO_PI * w.norm_sqr());
        return Ok((s * w.re, s * w.im));
    }
    let z = (C64::i() * k * w).exp() / w;
    Ok((-z.re / TWO_PI, z.im / TWO_PI))
}

/// Small-argument limit of `g_k - G_0` at `x = 0`: `-(gamma + log|k|)/(2 pi)`.
pub fn hk_at_zero(k: C64) -> f64 {
    -(EULER_GAMMA + k.norm().ln()) / TWO_PI
}

/// How `g_1` is evaluated by a [`FaddeevKernel`].
#[derive(Debug, Clone)]
pub enum EvalMethod {
    /// Exponential-integral closed form at every call.
    Direct,
    /// Bicubic interpolation in a precomputed polar table of `h_1`.
    Table(Arc<G1Table>),
}

/// Faddeev kernel at a fixed spectral parameter.
#[derive(Debug, Clone)]
pub struct FaddeevKernel {
    k: C64,
    method: EvalMethod,
}

impl FaddeevKernel {
    pub fn new(k: C64) -> Self {
        FaddeevKernel {
            k,
            method: EvalMethod::Direct,
        }
    }

    pub fn with_table(k: C64, table: Arc<G1Table>) -> Self {
        FaddeevKernel {
            k,
            method: EvalMethod::Table(table),
        }
    }

    pub fn k(&self) -> C64 {
        self.k
    }

    pub fn method(&self) -> &EvalMethod {
        &self.method
    }

    /// `g_k(x)` via the scaling reduction.
    pub fn g(&self, x: C64) -> Result<C64> {
        if self.k.norm() == 0.0 || matches!(self.method, EvalMethod::Direct) {
            return faddeev_g(self.k, x);
        }
        if x.norm() == 0.0 {
            return Err(Error::Domain(
                "Faddeev kernel has a logarithmic singularity at x = 0".into(),
            ));
        }
        match &self.method {
            EvalMethod::Table(t) => {
                let v = self.k * x;
                Ok(t.h1(v) - v.norm().ln() / TWO_PI)
            }
            EvalMethod::Direct => unreachable!(),
        }
    }

    /// `G_k(x) = e^{ikx} g_k(x)`.
    pub fn green(&self, x: C64) -> Result<C64> {
        Ok((C64::i() * self.k * x).exp() * self.g(x)?)
    }

    /// Smooth remainder `h_k(w) = g_k(w) - G_0(w)`, continuous at `w = 0`;
    /// identically zero for `k = 0`.
    pub fn h(&self, w: C64) -> C64 {
        if self.k.norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if w.norm() == 0.0 {
            return C64::new(hk_at_zero(self.k), 0.0);
        }
        let log_k = self.k.norm().ln() / TWO_PI;
        match &self.method {
            EvalMethod::Direct => h1(self.k * w) - log_k,
            EvalMethod::Table(t) => t.h1(self.k * w) - log_k,
        }
    }

    /// Real-analytic remainder of the Green's function itself,
    /// `G_k(w) - G_0(w) = (Re Ein(-ikw) - gamma - log|k|)/(2 pi)`.
    ///
    /// Unlike [`FaddeevKernel::h`], this remainder is smooth to all orders on
    /// the diagonal, which is what the spectrally accurate log-split
    /// quadrature of the single layer requires. Always evaluated from the
    /// entire series or the closed form, never interpolated.
    pub fn green_remainder(&self, w: C64) -> f64 {
        let kn = self.k.norm();
        if kn == 0.0 {
            return 0.0;
        }
        if w.norm() == 0.0 {
            return hk_at_zero(self.k);
        }
        let v = self.k * w;
        let miv = C64::new(v.im, -v.re);
        if v.norm() <= SERIES_RADIUS {
            (re_ein(miv) - EULER_GAMMA - kn.ln()) / TWO_PI
        } else {
            (re_e1(miv) + v.norm().ln() - kn.ln()) / TWO_PI
        }
    }
}

/// Precomputed polar table of the smooth remainder `h_1` with bicubic
/// (Catmull-Rom) interpolation on `[1e-4, 8] x [0, 2 pi)`; `h_1` is smooth
/// at the origin, so the radial grid is uniform.
#[derive(Debug)]
pub struct G1Table {
    nr: usize,
    ntheta: usize,
    r_step: f64,
    values: Vec<C64>, // [ir * ntheta + itheta]
}

impl G1Table {
    pub const R_MIN: f64 = 1e-4;
    pub const R_MAX: f64 = 8.0;

    /// Build from the direct evaluator.
    pub fn build(nr: usize, ntheta: usize) -> Self {
        assert!(nr >= 4 && ntheta >= 4);
        let r_step = (Self::R_MAX - Self::R_MIN) / (nr - 1) as f64;
        let mut values = Vec::with_capacity(nr * ntheta);
        for ir in 0..nr {
            let r = Self::R_MIN + ir as f64 * r_step;
            for it in 0..ntheta {
                let theta = TWO_PI * it as f64 / ntheta as f64;
                values.push(h1(C64::from_polar(r, theta)));
            }
        }
        G1Table {
            nr,
            ntheta,
            r_step,
            values,
        }
    }

    /// Interpolated `h_1(v)`; falls back to the direct formula outside the
    /// tabulated annulus.
    pub fn h1(&self, v: C64) -> C64 {
        let r = v.norm();
        if !(Self::R_MIN..=Self::R_MAX).contains(&r) {
            return h1(v);
        }
        let fr = (r - Self::R_MIN) / self.r_step;
        let ir = (fr.floor() as isize).clamp(0, self.nr as isize - 2);
        let tr = fr - ir as f64;
        let mut theta = v.im.atan2(v.re);
        if theta < 0.0 {
            theta += TWO_PI;
        }
        let ft = theta / TWO_PI * self.ntheta as f64;
        let it = ft.floor() as isize;
        let tt = ft - it as f64;

        let sample = |i: isize, j: isize| -> C64 {
            let i = i.clamp(0, self.nr as isize - 1) as usize;
            let j = j.rem_euclid(self.ntheta as isize) as usize;
            self.values[i * self.ntheta + j]
        };
        let catmull = |p: [C64; 4], t: f64| -> C64 {
            let t2 = t * t;
            let t3 = t2 * t;
            0.5 * ((2.0 * p[1])
                + (p[2] - p[0]) * t
                + (2.0 * p[0] - 5.0 * p[1] + 4.0 * p[2] - p[3]) * t2
                + (3.0 * p[1] - 3.0 * p[2] + p[3] - p[0]) * t3)
        };
        // interpolate along theta for four radial neighbors, then along r
        let mut rows = [C64::new(0.0, 0.0); 4];
        for (row, di) in rows.iter_mut().zip(-1isize..=2) {
            let i = ir + di;
            let p = [
                sample(i, it - 1),
                sample(i, it),
                sample(i, it + 1),
                sample(i, it + 2),
            ];
            *row = catmull(p, tt);
        }
        catmull(rows, tr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn re_e1_reference_values() {
        // reference values from an independent special-function library
        let cases = [
            (c(1.0, 1.0), 2.816_244_519_814_326e-4),
            (c(-3.0, 0.5), -9.383_603_509_330_942_7),
            (c(20.0, 5.0), 4.771_137_451_576_533_7e-11),
            (c(0.001, 0.0), 6.331_539_364_136_149),
            (c(-20.0, 5.0), -7.118_369_716_540_402_7e5),
            (c(-15.0, -25.0), -4.194_045_573_255_515e4),
        ];
        for (z, want) in cases {
            let got = re_e1(z);
            assert!(
                (got - want).abs() <= 5e-7 * want.abs().max(1e-10),
                "re_e1({z}) = {got}, want {want}"
            );
        }
        // on the negative real axis Re E_1(-s) = -Ei(s)
        assert!((re_e1(c(-3.0, 0.0)) + 9.933_832_570_625_416).abs() < 1e-9);
    }

    #[test]
    fn g1_reference_values() {
        let cases = [
            (c(0.7, 0.3), c(1.194_043_434_960_900e-2, -1.005_728_911_035_789e-2)),
            (c(0.7, 0.85), c(2.701_600_896_055_909e-2, -2.275_527_043_396_536e-2)),
            (c(3.0, -4.0), c(-2.018_486_555_754_068e-2, -2.877_282_807_646_478e-3)),
            (c(-1.0, 0.0), c(-2.901_396_483_469_0e-2, -4.518_657_295_641_2e-2)),
            (c(0.0, -2.5), c(-9.241_332_784_802_28e-2, 0.0)),
        ];
        for (v, want) in cases {
            let got = g1(v).unwrap();
            assert!(
                (got - want).norm() < 1e-10,
                "g1({v}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn g1_small_argument_matches_log_plus_gamma() {
        // g_1(v) + log|v|/(2 pi) -> -gamma/(2 pi)
        for &(r, ang) in &[(1e-6, 0.4), (1e-7, 2.2), (1e-6, 4.9)] {
            let v = C64::from_polar(r, ang);
            let lim = g1(v).unwrap() + v.norm().ln() / TWO_PI;
            assert!(
                (lim - c(-EULER_GAMMA / TWO_PI, 0.0)).norm() < 1e-5,
                "limit off: {lim}"
            );
        }
    }

    #[test]
    fn h1_is_smooth_bridge_of_g1() {
        for &(re, im) in &[(0.3, -0.2), (1.5, 2.0), (-4.0, 1.0), (19.5, 3.0)] {
            let v = c(re, im);
            let direct = g1(v).unwrap() + v.norm().ln() / TWO_PI;
            assert!((h1(v) - direct).norm() < 1e-9);
        }
        assert!((h1(c(0.0, 0.0)) - c(-EULER_GAMMA / TWO_PI, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn hk_zero_limit() {
        let k = c(2.0, 1.0);
        let x = c(1e-7, 5e-8);
        let got = faddeev_g(k, x).unwrap() + x.norm().ln() / TWO_PI;
        assert!((got.re - hk_at_zero(k)).abs() < 1e-5);
    }

    #[test]
    fn green_is_real_and_conjugation_consistent() {
        let k = c(1.5, -0.7);
        for &(re, im) in &[(0.9, 0.4), (-0.6, 0.8), (0.3, -0.7), (-1.1, -0.2)] {
            let x = c(re, im);
            let green = faddeev_green(k, x).unwrap();
            assert!(green.im.abs() < 1e-12, "G_k should be real, got {green}");
            // internal consistency: G_k(x) = e^{ikx} g_k(x) via the other path
            let via_g = (C64::i() * k * x).exp() * faddeev_g(k, x).unwrap();
            assert!((green - via_g).norm() < 1e-11);
        }
    }

    #[test]
    fn green_gradient_matches_finite_differences() {
        let k = c(2.0, 1.0);
        let h = 1e-6;
        for &(re, im) in &[(0.8, 0.3), (-0.5, -0.9), (0.1, 1.2)] {
            let w = c(re, im);
            let (gx, gy) = faddeev_green_grad(k, w).unwrap();
            let fd_x = (faddeev_green(k, w + h).unwrap().re
                - faddeev_green(k, w - h).unwrap().re)
                / (2.0 * h);
            let fd_y = (faddeev_green(k, w + c(0.0, h)).unwrap().re
                - faddeev_green(k, w - c(0.0, h)).unwrap().re)
                / (2.0 * h);
            assert!((gx - fd_x).abs() < 1e-5, "grad x {gx} vs fd {fd_x}");
            assert!((gy - fd_y).abs() < 1e-5, "grad y {gy} vs fd {fd_y}");
        }
    }

    #[test]
    fn singular_point_is_domain_error() {
        assert!(matches!(
            faddeev_g(c(1.0, 0.0), c(0.0, 0.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn table_matches_direct_evaluation() {
        let table = Arc::new(G1Table::build(400, 512));
        let kernel_t = FaddeevKernel::with_table(c(2.0, 1.0), table);
        let kernel_d = FaddeevKernel::new(c(2.0, 1.0));
        for &(re, im) in &[(0.4, 0.1), (-0.3, 0.55), (0.02, -0.04), (1.2, 1.4)] {
            let x = c(re, im);
            let a = kernel_t.g(x).unwrap();
            let b = kernel_d.g(x).unwrap();
            assert!(
                (a - b).norm() < 3e-5 * (1.0 + b.norm()),
                "table {a} vs direct {b} at {x}"
            );
        }
    }
}
