//! Conductivity phantoms and finite-element synthesis of
//! Dirichlet-to-Neumann matrices on the unit disc.

mod conductivity;
mod fem;
mod mesh;
mod radial;

pub use conductivity::{Conductivity, Profile};
pub use fem::{
    alessandrini_pairing, assemble_dn_map, dn_difference, solve_dirichlet, FemSolution,
};
pub use mesh::{FemMesh, MobiusMap};
pub use radial::radial_dn_eigenvalue;
