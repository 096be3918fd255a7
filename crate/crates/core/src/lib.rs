//! Numerical toolkit for the two-dimensional inverse conductivity problem on
//! the unit disc.
//!
//! The crate implements the full measurement-to-image chain for
//! conductivities that equal 1 near the boundary:
//!
//! - [`boundary`]: Fourier calculus on the unit circle (Sobolev norms,
//!   projections, harmonic extension, the analytic Dirichlet-to-Neumann map
//!   for unit conductivity);
//! - [`forward`]: conductivity phantoms and finite-element synthesis of
//!   Dirichlet-to-Neumann matrices, plus analytic radial oracles;
//! - [`faddeev`]: the Faddeev Green's function and the single-layer operator
//!   on the circle;
//! - [`bie`]: the boundary integral equation for complex geometric optics
//!   traces and the scattering transform from boundary data;
//! - [`lippmann`]: the direct scattering transform via a Lippmann-Schwinger
//!   solver (cross-validation oracle for smooth conductivities);
//! - [`dbar`]: the D-bar equation in the spectral variable and conductivity
//!   reconstruction from (truncated) scattering data;
//! - [`beltrami`]: quasiconformal CGO solutions of the Beltrami equation and
//!   the associated transform, bridging to the scattering transform;
//! - [`experiments`]: monotone approximation sequences and operator-norm
//!   convergence studies.

pub mod beltrami;
pub mod bie;
pub mod boundary;
pub mod dbar;
pub mod dnmatrix;
pub mod experiments;
pub mod faddeev;
pub mod forward;
pub mod grid;
pub mod lippmann;
pub mod linalg;

mod error;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Euler-Mascheroni constant.
pub(crate) const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
