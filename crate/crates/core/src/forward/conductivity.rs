//! Conductivity phantoms on the unit disc.
//!
//! Every phantom equals 1 outside a radius `r1 < 1` and has positive
//! essential bounds. Analytic kinds carry closed-form derived quantities:
//! the Beltrami coefficient `mu = (1-sigma)/(1+sigma)` for all kinds, and
//! the Schrodinger potential `q = (lap sqrt(sigma))/sqrt(sigma)` for the
//! twice-differentiable kinds (never by numerical differentiation).

use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// The shape family of a phantom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// `sigma == 1` everywhere.
    Unit,
    /// Piecewise-constant radial profile: `values[i]` on the annulus
    /// `radii[i-1] <= r < radii[i]` (with `radii[-1] = 0`), and 1 beyond
    /// `radii.last()`.
    PiecewiseRadial { radii: Vec<f64>, values: Vec<f64> },
    /// `sqrt(sigma)(r) = 1 + amplitude * bump(r / radius)` with the standard
    /// `C^inf` bump `exp(1 - 1/(1 - s^2))` on `s < 1`.
    SmoothRadial { amplitude: f64, radius: f64 },
    /// A piecewise-constant radial profile with each jump replaced by a
    /// `C^inf` ramp of width `1/n`, placed so the smoothed profile increases
    /// pointwise with `n` and never exceeds the base profile.
    SmoothedRadial {
        radii: Vec<f64>,
        values: Vec<f64>,
        n: u32,
    },
    /// Off-center disc inclusion of constant `value`.
    Inclusion {
        center: [f64; 2],
        radius: f64,
        value: f64,
    },
    /// Inclusion with its jump replaced by a `C^inf` ramp of width `1/n`
    /// (same monotone convention as `SmoothedRadial`).
    SmoothedInclusion {
        center: [f64; 2],
        radius: f64,
        value: f64,
        n: u32,
    },
    /// Values sampled on a uniform grid over `[-extent, extent]^2`
    /// (row-major, `side x side`), bilinearly interpolated.
    Grid {
        extent: f64,
        side: usize,
        values: Vec<f64>,
    },
}

/// A positive conductivity on the disc, constant 1 for `|x| >= r1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conductivity {
    #[serde(flatten)]
    profile: Profile,
    r1: f64,
    #[serde(default)]
    ess_inf: f64,
    #[serde(default)]
    ess_sup: f64,
}

/// `C^inf` bump: `exp(1 - 1/(1-s^2))` for `|s| < 1`, else 0; equals 1 at 0.
pub(crate) fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

fn bump_d1(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        let d = 1.0 - s * s;
        bump(s) * (-2.0 * s / (d * d))
    }
}

fn bump_d2(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        let d = 1.0 - s * s;
        let t1 = (2.0 * s / (d * d)).powi(2);
        let t2 = -2.0 / (d * d) - 8.0 * s * s / (d * d * d);
        bump(s) * (t1 + t2)
    }
}

/// `C^inf` monotone step: 0 for `s <= 0`, 1 for `s >= 1`.
pub(crate) fn smoothstep(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    let u = (-1.0 / s).exp();
    let v = (-1.0 / (1.0 - s)).exp();
    u / (u + v)
}

/// (value, first, second derivative) of [`smoothstep`].
fn smoothstep_d2(s: f64) -> (f64, f64, f64) {
    if s <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if s >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let u = (-1.0 / s).exp();
    let v = (-1.0 / (1.0 - s)).exp();
    let up = u / (s * s);
    let upp = u * (1.0 / s.powi(4) - 2.0 / s.powi(3));
    let t = 1.0 - s;
    let vp = -v / (t * t);
    let vpp = v * (1.0 / t.powi(4) - 2.0 / t.powi(3));
    let den = u + v;
    let num = up * v - u * vp;
    let nump = upp * v - u * vpp;
    let denp = up + vp;
    let psi = u / den;
    let psi1 = num / (den * den);
    let psi2 = (nump * den - 2.0 * num * denp) / (den * den * den);
    (psi, psi1, psi2)
}

/// Ramped replacement of the indicator `1_{r < rho}` for a jump of sign
/// `coeff`: stays on the correct side of the indicator and is monotone in `n`.
/// Returns (value, d/dr, d2/dr2).
fn ramp(rho: f64, n: f64, coeff: f64, r: f64) -> (f64, f64, f64) {
    let arg = if coeff >= 0.0 {
        n * (rho - r)
    } else {
        n * (rho - r) + 1.0
    };
    let (p, p1, p2) = smoothstep_d2(arg);
    // chain rule: d(arg)/dr = -n
    (p, -n * p1, n * n * p2)
}

impl Conductivity {
    pub fn new(profile: Profile, r1: f64) -> Result<Self> {
        if !(0.0 < r1 && r1 < 1.0) {
            return Err(Error::invalid(format!("r1 = {r1} must lie in (0,1)")));
        }
        let c = Conductivity {
            profile,
            r1,
            ess_inf: 0.0,
            ess_sup: 0.0,
        };
        c.validate()?.with_bounds()
    }

    fn validate(self) -> Result<Self> {
        match &self.profile {
            Profile::Unit => {}
            Profile::PiecewiseRadial { radii, values }
            | Profile::SmoothedRadial { radii, values, .. } => {
                if radii.is_empty() || radii.len() != values.len() {
                    return Err(Error::invalid(
                        "piecewise radial profile needs matching radii/values",
                    ));
                }
                if !radii.windows(2).all(|w| w[0] < w[1]) {
                    return Err(Error::invalid("interface radii must be increasing"));
                }
                let last = *radii.last().unwrap();
                if last > self.r1 + 1e-12 {
                    return Err(Error::invalid(format!(
                        "outermost interface {last} exceeds r1 = {}",
                        self.r1
                    )));
                }
                if values.iter().any(|&v| v <= 0.0) {
                    return Err(Error::invalid("conductivity values must be positive"));
                }
                if let Profile::SmoothedRadial { n, .. } = &self.profile {
                    self.check_ramp_widths(radii, values, *n)?;
                }
            }
            Profile::SmoothRadial { amplitude, radius } => {
                if *radius <= 0.0 || *radius > self.r1 {
                    return Err(Error::invalid("bump radius must lie in (0, r1]"));
                }
                if 1.0 + amplitude <= 0.0 {
                    return Err(Error::invalid("bump amplitude makes sqrt(sigma) vanish"));
                }
            }
            Profile::Inclusion {
                center,
                radius,
                value,
            }
            | Profile::SmoothedInclusion {
                center,
                radius,
                value,
                ..
            } => {
                let c = (center[0] * center[0] + center[1] * center[1]).sqrt();
                if *radius <= 0.0 || c + radius > self.r1 + 1e-12 {
                    return Err(Error::invalid(
                        "inclusion must lie strictly inside the r1 disc",
                    ));
                }
                if *value <= 0.0 {
                    return Err(Error::invalid("inclusion value must be positive"));
                }
                if let Profile::SmoothedInclusion { n, .. } = &self.profile {
                    let width = 1.0 / *n as f64;
                    let ok = if *value >= 1.0 {
                        width <= *radius
                    } else {
                        c + radius + width <= self.r1 + 1e-12
                    };
                    if !ok {
                        return Err(Error::UnsupportedPhantom(format!(
                            "ramp width 1/{n} does not fit the inclusion geometry"
                        )));
                    }
                }
            }
            Profile::Grid {
                extent,
                side,
                values,
            } => {
                if *side < 2 || values.len() != side * side {
                    return Err(Error::invalid("grid profile needs side^2 values"));
                }
                if *extent < 1.0 {
                    return Err(Error::invalid("grid extent must cover the unit disc"));
                }
                if values.iter().any(|&v| v <= 0.0) {
                    return Err(Error::invalid("conductivity values must be positive"));
                }
            }
        }
        Ok(self)
    }

    fn check_ramp_widths(&self, radii: &[f64], values: &[f64], n: u32) -> Result<()> {
        let width = 1.0 / n as f64;
        for i in 0..radii.len() {
            let inner = values[i];
            let outer = if i + 1 < values.len() { values[i + 1] } else { 1.0 };
            let coeff = inner - outer;
            let ok = if coeff >= 0.0 {
                // ramp occupies [rho - width, rho]
                let prev = if i == 0 { 0.0 } else { radii[i - 1] };
                radii[i] - width >= prev - 1e-12
            } else {
                // ramp occupies [rho, rho + width]
                let next = if i + 1 < radii.len() { radii[i + 1] } else { self.r1 };
                radii[i] + width <= next + 1e-12
            };
            if !ok {
                return Err(Error::UnsupportedPhantom(format!(
                    "ramp width 1/{n} overlaps a neighboring interface"
                )));
            }
        }
        Ok(())
    }

    fn with_bounds(mut self) -> Result<Self> {
        let (lo, hi) = match &self.profile {
            Profile::Unit => (1.0, 1.0),
            Profile::PiecewiseRadial { values, .. }
            | Profile::SmoothedRadial { values, .. } => {
                let lo = values.iter().cloned().fold(1.0f64, f64::min);
                let hi = values.iter().cloned().fold(1.0f64, f64::max);
                (lo, hi)
            }
            Profile::SmoothRadial { amplitude, .. } => {
                let peak = (1.0 + amplitude) * (1.0 + amplitude);
                (peak.min(1.0), peak.max(1.0))
            }
            Profile::Inclusion { value, .. } | Profile::SmoothedInclusion { value, .. } => {
                (value.min(1.0), value.max(1.0))
            }
            Profile::Grid { values, .. } => {
                let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = values.iter().cloned().fold(0.0f64, f64::max);
                (lo.min(1.0), hi.max(1.0))
            }
        };
        self.ess_inf = lo;
        self.ess_sup = hi;
        Ok(self)
    }

    pub fn unit() -> Self {
        Conductivity::new(Profile::Unit, 0.5).expect("unit phantom is valid")
    }

    /// Two-layer phantom: `sigma = value` inside `rho`, 1 outside.
    pub fn two_layer(value: f64, rho: f64) -> Result<Self> {
        Conductivity::new(
            Profile::PiecewiseRadial {
                radii: vec![rho],
                values: vec![value],
            },
            rho,
        )
    }

    /// Smooth radial bump with `sigma(0) = (1 + amplitude)^2`.
    pub fn smooth_bump(amplitude: f64, radius: f64) -> Result<Self> {
        Conductivity::new(Profile::SmoothRadial { amplitude, radius }, radius)
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn ess_inf(&self) -> f64 {
        self.ess_inf
    }

    pub fn ess_sup(&self) -> f64 {
        self.ess_sup
    }

    /// Point evaluation.
    pub fn eval(&self, x: C64) -> f64 {
        let r = x.norm();
        if r >= self.r1 {
            return 1.0;
        }
        match &self.profile {
            Profile::Unit => 1.0,
            Profile::PiecewiseRadial { radii, values } => {
                for (rho, v) in radii.iter().zip(values.iter()) {
                    if r < *rho {
                        return *v;
                    }
                }
                1.0
            }
            Profile::SmoothedRadial { radii, values, n } => {
                let mut acc = 1.0;
                for i in 0..radii.len() {
                    let outer = if i + 1 < values.len() { values[i + 1] } else { 1.0 };
                    let coeff = values[i] - outer;
                    acc += coeff * ramp(radii[i], *n as f64, coeff, r).0;
                }
                acc
            }
            Profile::SmoothRadial { amplitude, radius } => {
                let s = 1.0 + amplitude * bump(r / radius);
                s * s
            }
            Profile::Inclusion {
                center,
                radius,
                value,
            } => {
                let d = (x - C64::new(center[0], center[1])).norm();
                if d < *radius {
                    *value
                } else {
                    1.0
                }
            }
            Profile::SmoothedInclusion {
                center,
                radius,
                value,
                n,
            } => {
                let d = (x - C64::new(center[0], center[1])).norm();
                let coeff = value - 1.0;
                1.0 + coeff * ramp(*radius, *n as f64, coeff, d).0
            }
            Profile::Grid {
                extent,
                side,
                values,
            } => {
                let h = 2.0 * extent / (*side as f64 - 1.0);
                let fi = (x.re + extent) / h;
                let fj = (x.im + extent) / h;
                let i0 = (fi.floor() as isize).clamp(0, *side as isize - 2) as usize;
                let j0 = (fj.floor() as isize).clamp(0, *side as isize - 2) as usize;
                let di = (fi - i0 as f64).clamp(0.0, 1.0);
                let dj = (fj - j0 as f64).clamp(0.0, 1.0);
                let v = |i: usize, j: usize| values[i * side + j];
                v(i0, j0) * (1.0 - di) * (1.0 - dj)
                    + v(i0 + 1, j0) * di * (1.0 - dj)
                    + v(i0, j0 + 1) * (1.0 - di) * dj
                    + v(i0 + 1, j0 + 1) * di * dj
            }
        }
    }

    /// Beltrami coefficient `mu = (1 - sigma)/(1 + sigma)`.
    pub fn beltrami_mu(&self, x: C64) -> f64 {
        let s = self.eval(x);
        (1.0 - s) / (1.0 + s)
    }

    /// Distortion bound `kappa = sup |mu| < 1`.
    pub fn kappa(&self) -> f64 {
        let a = ((1.0 - self.ess_inf) / (1.0 + self.ess_inf)).abs();
        let b = ((1.0 - self.ess_sup) / (1.0 + self.ess_sup)).abs();
        a.max(b)
    }

    /// Whether the closed-form Schrodinger potential is available
    /// (the profile is at least `C^2`).
    pub fn has_schrodinger_q(&self) -> bool {
        matches!(
            self.profile,
            Profile::Unit
                | Profile::SmoothRadial { .. }
                | Profile::SmoothedRadial { .. }
                | Profile::SmoothedInclusion { .. }
        )
    }

    /// `q = (lap sqrt(sigma)) / sqrt(sigma)` from closed-form derivatives;
    /// `None` for kinds that are not `C^2`.
    pub fn schrodinger_q(&self, x: C64) -> Option<f64> {
        // radial helper: given (sigma, sigma', sigma'') at distance d from a
        // center, return q using lap f = f'' + f'/d
        fn q_radial(sigma: f64, s1: f64, s2: f64, d: f64) -> f64 {
            let sq = sigma.sqrt();
            let sq1 = s1 / (2.0 * sq);
            let sq2 = s2 / (2.0 * sq) - s1 * s1 / (4.0 * sq * sq * sq);
            let lap = if d > 1e-12 { sq2 + sq1 / d } else { 2.0 * sq2 };
            lap / sq
        }
        match &self.profile {
            Profile::Unit => Some(0.0),
            Profile::SmoothRadial { amplitude, radius } => {
                let r = x.norm();
                let s = r / radius;
                let sq = 1.0 + amplitude * bump(s);
                let sq1 = amplitude / radius * bump_d1(s);
                let sq2 = amplitude / (radius * radius) * bump_d2(s);
                let lap = if r > 1e-12 { sq2 + sq1 / r } else { 2.0 * sq2 };
                Some(lap / sq)
            }
            Profile::SmoothedRadial { radii, values, n } => {
                let r = x.norm();
                let (mut sig, mut s1, mut s2) = (1.0, 0.0, 0.0);
                for i in 0..radii.len() {
                    let outer = if i + 1 < values.len() { values[i + 1] } else { 1.0 };
                    let coeff = values[i] - outer;
                    let (p, p1, p2) = ramp(radii[i], *n as f64, coeff, r);
                    sig += coeff * p;
                    s1 += coeff * p1;
                    s2 += coeff * p2;
                }
                Some(q_radial(sig, s1, s2, r))
            }
            Profile::SmoothedInclusion {
                center,
                radius,
                value,
                n,
            } => {
                let d = (x - C64::new(center[0], center[1])).norm();
                let coeff = value - 1.0;
                let (p, p1, p2) = ramp(*radius, *n as f64, coeff, d);
                Some(q_radial(1.0 + coeff * p, coeff * p1, coeff * p2, d))
            }
            _ => None,
        }
    }

    /// Parse a phantom description from JSON.
    pub fn from_json(json: &str) -> Result<Self> {
        let raw: Conductivity = serde_json::from_str(json)?;
        Conductivity::new(raw.profile, raw.r1)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializing plain data cannot fail")
    }
}
