//! Analytic DN eigenvalues for piecewise-constant radial conductivities.
//!
//! For mode `n` the solution in each layer is `c r^{|n|} + d r^{-|n|}`;
//! matching continuity of `u` and of the flux `sigma du/dr` across each
//! interface by a 2x2 solve propagates the coefficients outward, and the
//! eigenvalue of the DN map on `phi_n` is `|n| (c - d)/(c + d)` evaluated in
//! the outermost (unit conductivity) layer.

use crate::{Error, Result};

/// Eigenvalue `lambda_n` of `Lambda_sigma` for the profile `values[i]` on
/// `[radii[i-1], radii[i])`, unit conductivity outside `radii.last()`.
pub fn radial_dn_eigenvalue(radii: &[f64], values: &[f64], n: i64) -> Result<f64> {
    if radii.len() != values.len() || radii.is_empty() {
        return Err(Error::invalid("radii/values must match and be nonempty"));
    }
    if !radii.windows(2).all(|w| w[0] < w[1]) || radii[0] <= 0.0 || *radii.last().unwrap() >= 1.0 {
        return Err(Error::invalid("interface radii must increase inside (0,1)"));
    }
    if values.iter().any(|&v| v <= 0.0) {
        return Err(Error::invalid("layer values must be positive"));
    }
    let n = n.unsigned_abs() as i32;
    if n == 0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    // innermost layer: regular solution r^n
    let (mut c, mut d) = (1.0f64, 0.0f64);
    for i in 0..radii.len() {
        let rho = radii[i];
        let s_in = values[i];
        let s_out = if i + 1 < values.len() { values[i + 1] } else { 1.0 };
        let rp = rho.powi(n);
        let rm = rho.powi(-n);
        // continuity: c' rp + d' rm = c rp + d rm
        // flux: s_out (c' rp - d' rm) = s_in (c rp - d rm)   [common n/rho dropped]
        let u = c * rp + d * rm;
        let f = s_in / s_out * (c * rp - d * rm);
        c = 0.5 * (u + f) / rp;
        d = 0.5 * (u - f) / rm;
    }
    Ok(nf * (c - d) / (c + d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_profile_gives_abs_n() {
        for n in -6i64..=6 {
            let lam = radial_dn_eigenvalue(&[0.5], &[1.0], n).unwrap();
            assert!((lam - n.abs() as f64).abs() < 1e-13, "n={n}: {lam}");
        }
    }

    #[test]
    fn mode_zero_is_zero() {
        assert_eq!(radial_dn_eigenvalue(&[0.3, 0.6], &[2.0, 0.5], 0).unwrap(), 0.0);
    }

    #[test]
    fn two_layer_mode_one_matches_hand_solve() {
        // sigma = 2 inside rho = 0.5: matching a r + b/r across the interface
        // by the direct 2x2 solve gives lambda_1 = 13/11
        let lam = radial_dn_eigenvalue(&[0.5], &[2.0], 1).unwrap();
        assert!((lam - 13.0 / 11.0).abs() < 1e-14, "lambda_1 = {lam}");
    }

    #[test]
    fn two_layer_matches_reflection_formula() {
        // lambda_n = n (1 + mu rho^{2n}) / (1 - mu rho^{2n}), mu = (s-1)/(s+1)
        let (s, rho) = (2.0, 0.7);
        let mu = (s - 1.0) / (s + 1.0);
        for n in 1..=12i64 {
            let lam = radial_dn_eigenvalue(&[rho], &[s], n).unwrap();
            let m = mu * rho.powi(2 * n as i32);
            let want = n as f64 * (1.0 + m) / (1.0 - m);
            assert!((lam - want).abs() < 1e-11 * want, "n={n}: {lam} vs {want}");
        }
    }

    #[test]
    fn symmetric_in_n() {
        let lam_p = radial_dn_eigenvalue(&[0.4, 0.7], &[3.0, 0.5], 5).unwrap();
        let lam_m = radial_dn_eigenvalue(&[0.4, 0.7], &[3.0, 0.5], -5).unwrap();
        assert_eq!(lam_p, lam_m);
    }

    #[test]
    fn three_layer_reduces_to_composition() {
        // degenerate middle layer (same value) must equal the two-layer case
        let a = radial_dn_eigenvalue(&[0.3, 0.5], &[2.0, 2.0], 3).unwrap();
        let b = radial_dn_eigenvalue(&[0.5], &[2.0], 3).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(radial_dn_eigenvalue(&[], &[], 1).is_err());
        assert!(radial_dn_eigenvalue(&[0.5, 0.4], &[1.0, 2.0], 1).is_err());
        assert!(radial_dn_eigenvalue(&[0.5], &[-2.0], 1).is_err());
    }
}
