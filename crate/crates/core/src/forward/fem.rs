//! P1 finite elements: Dirichlet solves and energy-form DN assembly.
//!
//! DN entries are never computed from boundary flux recovery; every entry is
//! an energy pairing `int sigma grad u_n . grad u_m dx` of two Galerkin
//! solutions (the Alessandrini form), which keeps the quadratic-form error
//! at the `O(h^2)` level.

use super::conductivity::Conductivity;
use super::mesh::FemMesh;
use crate::dnmatrix::{DnMatrix, DnTag};
use crate::{Error, Result, C64};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Sparse symmetric stiffness matrix in CSR form, plus the P1 geometry it
/// was assembled from.
struct Stiffness {
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    /// true for boundary (Dirichlet) nodes
    fixed: Vec<bool>,
    diag: Vec<f64>,
}

impl Stiffness {
    fn assemble(mesh: &FemMesh, sigma: &Conductivity) -> Self {
        let n = mesh.node_count();
        let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::with_capacity(8); n];
        for (tri_idx, tri) in mesh.triangles().iter().enumerate() {
            let p = |v: usize| mesh.nodes()[v];
            let [a, b, c] = [p(tri[0]), p(tri[1]), p(tri[2])];
            let det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
            let area = 0.5 * det;
            // gradients of barycentric coordinates
            let grads = [
                [(b[1] - c[1]) / det, (c[0] - b[0]) / det],
                [(c[1] - a[1]) / det, (a[0] - c[0]) / det],
                [(a[1] - b[1]) / det, (b[0] - a[0]) / det],
            ];
            let coeff = mesh.sigma_at_barycenter(sigma, tri_idx) * area;
            for i in 0..3 {
                for j in 0..3 {
                    let k = coeff * (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]);
                    adjacency[tri[i]].push((tri[j], k));
                }
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        let mut diag = vec![0.0; n];
        for (i, row) in adjacency.iter_mut().enumerate() {
            row.sort_by_key(|e| e.0);
            let mut last = usize::MAX;
            for &(j, v) in row.iter() {
                if j == last {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(j);
                    values.push(v);
                    last = j;
                }
            }
            row_ptr.push(col_idx.len());
            let start = row_ptr[i];
            for idx in start..row_ptr[i + 1] {
                if col_idx[idx] == i {
                    diag[i] = values[idx];
                }
            }
        }
        let mut fixed = vec![false; n];
        for &b in mesh.boundary_nodes() {
            fixed[b] = true;
        }
        Stiffness {
            row_ptr,
            col_idx,
            values,
            fixed,
            diag,
        }
    }

    fn matvec(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..x.len() {
            let mut acc = 0.0;
            for idx in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[idx] * x[self.col_idx[idx]];
            }
            out[i] = acc;
        }
    }

    /// Jacobi-preconditioned CG on the interior block; `rhs` must vanish on
    /// fixed nodes. Returns (solution on interior, relative residual, iters).
    fn solve_interior(&self, rhs: &[f64], tol: f64, max_iter: usize) -> (Vec<f64>, f64, usize) {
        let n = rhs.len();
        let mask = |v: &mut [f64]| {
            for (x, &f) in v.iter_mut().zip(self.fixed.iter()) {
                if f {
                    *x = 0.0;
                }
            }
        };
        let mut x = vec![0.0; n];
        let mut r = rhs.to_vec();
        mask(&mut r);
        let rhs_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rhs_norm == 0.0 {
            return (x, 0.0, 0);
        }
        let precond = |r: &[f64], z: &mut [f64]| {
            for i in 0..r.len() {
                z[i] = if self.fixed[i] || self.diag[i] == 0.0 {
                    0.0
                } else {
                    r[i] / self.diag[i]
                };
            }
        };
        let mut z = vec![0.0; n];
        precond(&r, &mut z);
        let mut p = z.clone();
        let mut rz: f64 = r.iter().zip(z.iter()).map(|(a, b)| a * b).sum();
        let mut ap = vec![0.0; n];
        let mut res_norm = rhs_norm;
        let mut iters = 0;
        for it in 0..max_iter {
            self.matvec(&p, &mut ap);
            mask(&mut ap);
            let pap: f64 = p.iter().zip(ap.iter()).map(|(a, b)| a * b).sum();
            if pap <= 0.0 {
                break;
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            res_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            iters = it + 1;
            if res_norm <= tol * rhs_norm {
                break;
            }
            precond(&r, &mut z);
            let rz_new: f64 = r.iter().zip(z.iter()).map(|(a, b)| a * b).sum();
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        (x, res_norm / rhs_norm, iters)
    }
}

/// A finite-element solution of the Dirichlet problem.
#[derive(Debug, Clone)]
pub struct FemSolution {
    /// Nodal values (boundary nodes carry the Dirichlet data).
    pub values: Vec<C64>,
    /// Relative CG residual of the interior solve (max over re/im parts).
    pub residual: f64,
    pub iterations: usize,
}

impl FemSolution {
    /// `L^2(|x| < rho)` norm of the piecewise gradient.
    pub fn grad_l2_subdisc(&self, mesh: &FemMesh, rho: f64) -> f64 {
        let mut acc = 0.0;
        for (tri_idx, tri) in mesh.triangles().iter().enumerate() {
            if mesh.barycenters()[tri_idx].norm() >= rho {
                continue;
            }
            let p = |v: usize| mesh.nodes()[v];
            let [a, b, c] = [p(tri[0]), p(tri[1]), p(tri[2])];
            let det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
            let area = 0.5 * det;
            let grads = [
                [(b[1] - c[1]) / det, (c[0] - b[0]) / det],
                [(c[1] - a[1]) / det, (a[0] - c[0]) / det],
                [(a[1] - b[1]) / det, (b[0] - a[0]) / det],
            ];
            let mut gx = C64::new(0.0, 0.0);
            let mut gy = C64::new(0.0, 0.0);
            for i in 0..3 {
                gx += self.values[tri[i]] * grads[i][0];
                gy += self.values[tri[i]] * grads[i][1];
            }
            acc += area * (gx.norm_sqr() + gy.norm_sqr());
        }
        acc.sqrt()
    }

    /// `L^2(|x| < rho)` norm of the solution itself (barycenter rule).
    pub fn l2_subdisc(&self, mesh: &FemMesh, rho: f64) -> f64 {
        let mut acc = 0.0;
        for (tri_idx, tri) in mesh.triangles().iter().enumerate() {
            if mesh.barycenters()[tri_idx].norm() >= rho {
                continue;
            }
            let p = |v: usize| mesh.nodes()[v];
            let [a, b, c] = [p(tri[0]), p(tri[1]), p(tri[2])];
            let det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
            let area = 0.5 * det;
            let mean = (self.values[tri[0]] + self.values[tri[1]] + self.values[tri[2]]) / 3.0;
            acc += area * mean.norm_sqr();
        }
        acc.sqrt()
    }
}

const CG_TOL: f64 = 1e-12;
const CG_MAX_ITER: usize = 20_000;

fn solve_with_stiffness(
    stiffness: &Stiffness,
    mesh: &FemMesh,
    boundary_data: &[C64],
) -> Result<FemSolution> {
    let n = mesh.node_count();
    assert_eq!(boundary_data.len(), mesh.boundary_nodes().len());
    let mut lifted = vec![C64::new(0.0, 0.0); n];
    for (slot, &node) in mesh.boundary_nodes().iter().enumerate() {
        lifted[node] = boundary_data[slot];
    }
    // rhs = -K * lifted, restricted to interior
    let mut solution = lifted.clone();
    let mut worst_res = 0.0f64;
    let mut worst_iters = 0;
    for part in 0..2 {
        let take = |z: &C64| if part == 0 { z.re } else { z.im };
        let lifted_part: Vec<f64> = lifted.iter().map(take).collect();
        let mut rhs = vec![0.0; n];
        stiffness.matvec(&lifted_part, &mut rhs);
        for v in rhs.iter_mut() {
            *v = -*v;
        }
        let (interior, res, iters) = stiffness.solve_interior(&rhs, CG_TOL, CG_MAX_ITER);
        if res > 1e-6 {
            return Err(Error::SolverFailure {
                what: "CG on the stiffness system".into(),
                residual: res,
                iterations: iters,
            });
        }
        worst_res = worst_res.max(res);
        worst_iters = worst_iters.max(iters);
        for i in 0..n {
            if !stiffness.fixed[i] {
                if part == 0 {
                    solution[i].re = interior[i];
                } else {
                    solution[i].im = interior[i];
                }
            }
        }
    }
    Ok(FemSolution {
        values: solution,
        residual: worst_res,
        iterations: worst_iters,
    })
}

/// Solve the Dirichlet problem for trigonometric-polynomial boundary data.
pub fn solve_dirichlet(
    sigma: &Conductivity,
    boundary: &crate::boundary::BoundaryField,
    mesh: &FemMesh,
) -> Result<FemSolution> {
    let stiffness = Stiffness::assemble(mesh, sigma);
    let data: Vec<C64> = (0..mesh.n_boundary())
        .map(|i| boundary.eval(mesh.boundary_angle(i)))
        .collect();
    solve_with_stiffness(&stiffness, mesh, &data)
}

/// Boundary data for the Fourier mode `phi_n` at the mesh boundary angles.
fn mode_data(mesh: &FemMesh, n: i64) -> Vec<C64> {
    let norm = 1.0 / (2.0 * PI).sqrt();
    (0..mesh.n_boundary())
        .map(|i| C64::from_polar(norm, n as f64 * mesh.boundary_angle(i)))
        .collect()
}

/// Bilinear energy `u^T K v` (no conjugation).
fn energy(stiffness: &Stiffness, u: &[C64], v: &[C64]) -> C64 {
    let n = u.len();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        let mut row = C64::new(0.0, 0.0);
        for idx in stiffness.row_ptr[i]..stiffness.row_ptr[i + 1] {
            row += v[stiffness.col_idx[idx]] * stiffness.values[idx];
        }
        acc += u[i] * row;
    }
    acc
}

/// Assemble `Lambda_sigma` on modes `|n| <= order` via the energy form.
///
/// Requires at least 8 boundary nodes per wavelength of the highest mode.
pub fn assemble_dn_map(sigma: &Conductivity, order: usize, mesh: &FemMesh) -> Result<DnMatrix> {
    if mesh.n_boundary() < 8 * order.max(1) {
        return Err(Error::MeshResolution(format!(
            "{} boundary nodes cannot resolve order {} (need >= {})",
            mesh.n_boundary(),
            order,
            8 * order
        )));
    }
    let stiffness = Stiffness::assemble(mesh, sigma);
    // solve modes 0..=order concurrently; negative modes by conjugation
    let solutions: Vec<FemSolution> = (0..=order as i64)
        .into_par_iter()
        .map(|n| solve_with_stiffness(&stiffness, mesh, &mode_data(mesh, n)))
        .collect::<Result<_>>()?;
    let dim = 2 * order + 1;
    let o = order as i64;
    let field = |n: i64| -> Vec<C64> {
        let s = &solutions[n.unsigned_abs() as usize];
        if n >= 0 {
            s.values.clone()
        } else {
            s.values.iter().map(|z| z.conj()).collect()
        }
    };
    let fields: Vec<Vec<C64>> = (-o..=o).map(field).collect();
    let mut matrix = crate::linalg::CMatrix::zeros(dim, dim);
    for m in -o..=o {
        let um = &fields[(-m + o) as usize]; // u_{-m}
        for n in -o..=o {
            let un = &fields[(n + o) as usize];
            matrix[((m + o) as usize, (n + o) as usize)] = energy(&stiffness, um, un);
        }
    }
    Ok(DnMatrix::new(order, matrix, DnTag::FullMap))
}

/// `Lambda_sigma - Lambda_1`, both assembled on the same mesh so that the
/// shared discretization error cancels; `sigma == 1` gives the zero matrix
/// exactly.
pub fn dn_difference(sigma: &Conductivity, order: usize, mesh: &FemMesh) -> Result<DnMatrix> {
    let full = assemble_dn_map(sigma, order, mesh)?;
    let unit = assemble_dn_map(&Conductivity::unit(), order, mesh)?;
    Ok(full.sub(&unit))
}

/// Alessandrini pairing `<g, Lambda_sigma f> = int sigma grad u_f . grad v_g`.
pub fn alessandrini_pairing(
    g: &crate::boundary::BoundaryField,
    f: &crate::boundary::BoundaryField,
    sigma: &Conductivity,
    mesh: &FemMesh,
) -> Result<C64> {
    let stiffness = Stiffness::assemble(mesh, sigma);
    let data_f: Vec<C64> = (0..mesh.n_boundary())
        .map(|i| f.eval(mesh.boundary_angle(i)))
        .collect();
    let data_g: Vec<C64> = (0..mesh.n_boundary())
        .map(|i| g.eval(mesh.boundary_angle(i)))
        .collect();
    let uf = solve_with_stiffness(&stiffness, mesh, &data_f)?;
    let vg = solve_with_stiffness(&stiffness, mesh, &data_g)?;
    Ok(energy(&stiffness, &vg.values, &uf.values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::BoundaryField;
    use crate::forward::radial_dn_eigenvalue;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn harmonic_mode_solution_matches_separable_form() {
        // sigma = 1, f = phi_1: u = r e^{i theta}/sqrt(2 pi)
        let mesh = FemMesh::disc(96, &[]).unwrap();
        let sigma = Conductivity::unit();
        let f = BoundaryField::basis(4, 1).unwrap();
        let sol = solve_dirichlet(&sigma, &f, &mesh).unwrap();
        let norm = 1.0 / (2.0 * PI).sqrt();
        let mut worst = 0.0f64;
        for (i, node) in mesh.nodes().iter().enumerate() {
            let want = C64::new(node[0], node[1]) * norm;
            worst = worst.max((sol.values[i] - want).norm());
        }
        assert!(worst < 2e-3, "max nodal error {worst}");
    }

    #[test]
    fn constant_mode_stays_constant() {
        let mesh = FemMesh::disc(64, &[]).unwrap();
        let sigma = Conductivity::two_layer(2.0, 0.5).unwrap();
        let f = BoundaryField::basis(2, 0).unwrap();
        let sol = solve_dirichlet(&sigma, &f, &mesh).unwrap();
        let val = 1.0 / (2.0 * PI).sqrt();
        for v in &sol.values {
            assert!((v - c(val, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn two_layer_mode_solution_matches_radial_oracle() {
        // sigma0 = 2 inside 0.5: u = a r inside, b r + c/r outside (mode 1)
        let mesh = FemMesh::disc(160, &[0.5]).unwrap();
        let sigma = Conductivity::two_layer(2.0, 0.5).unwrap();
        let f = BoundaryField::basis(4, 1).unwrap();
        let sol = solve_dirichlet(&sigma, &f, &mesh).unwrap();
        // interior coefficients from the transfer-matrix hand solve:
        // outside: 1.5 r - 0.125/r, inside: r, both scaled by 1/(u(1)) = 1/1.375
        let norm = 1.0 / (2.0 * PI).sqrt();
        let mut worst = 0.0f64;
        for (i, node) in mesh.nodes().iter().enumerate() {
            let z = C64::new(node[0], node[1]);
            let r = z.norm();
            if r < 1e-9 {
                continue;
            }
            let radial = if r < 0.5 {
                r / 1.375
            } else {
                (1.5 * r - 0.125 / r) / 1.375
            };
            let want = C64::from_polar(radial * norm, z.im.atan2(z.re));
            worst = worst.max((sol.values[i] - want).norm());
        }
        assert!(worst < 2e-3, "max nodal error {worst}");
    }

    #[test]
    fn dn_map_of_unit_sigma_is_diag_abs_n() {
        let mesh = FemMesh::disc(96, &[]).unwrap();
        let dn = assemble_dn_map(&Conductivity::unit(), 6, &mesh).unwrap();
        for n in -6i64..=6 {
            let got = dn.entry(n, n);
            assert!(
                (got - c(n.abs() as f64, 0.0)).norm() < 6e-3 * (1.0 + n.abs() as f64),
                "diagonal {n}: {got}"
            );
        }
        // radial sigma: off-diagonal exactly zero up to solver tolerance
        let mut off = 0.0f64;
        for m in -6i64..=6 {
            for n in -6i64..=6 {
                if m != n {
                    off = off.max(dn.entry(m, n).norm());
                }
            }
        }
        assert!(off < 1e-8, "off-diagonal leakage {off}");
    }

    #[test]
    fn dn_eigenvalues_match_transfer_matrix() {
        let mesh = FemMesh::disc(256, &[0.5]).unwrap();
        let sigma = Conductivity::two_layer(2.0, 0.5).unwrap();
        let dn = assemble_dn_map(&sigma, 8, &mesh).unwrap();
        for n in 1..=8i64 {
            let want = radial_dn_eigenvalue(&[0.5], &[2.0], n).unwrap();
            let got = dn.entry(n, n).re;
            assert!(
                (got - want).abs() < 1.5e-3 * want,
                "lambda_{n}: fem {got} vs oracle {want}"
            );
        }
        // Hermitian within solver tolerance, constants annihilated
        assert!(dn.hermitian_defect() < 1e-9);
        let phi0 = BoundaryField::basis(8, 0).unwrap();
        let img = dn.apply(&phi0).unwrap();
        assert!(img.coeffs().iter().all(|z| z.norm() < 1e-9));
    }

    #[test]
    fn dn_difference_of_unit_sigma_is_exactly_zero() {
        let mesh = FemMesh::disc(64, &[]).unwrap();
        let diff = dn_difference(&Conductivity::unit(), 4, &mesh).unwrap();
        assert_eq!(diff.tag(), DnTag::Difference);
        assert!(diff.matrix().frobenius_norm() < 1e-13);
    }

    #[test]
    fn mesh_resolution_guard() {
        let mesh = FemMesh::disc(32, &[]).unwrap();
        assert!(matches!(
            assemble_dn_map(&Conductivity::unit(), 8, &mesh),
            Err(Error::MeshResolution(_))
        ));
    }

    #[test]
    fn alessandrini_pairing_examples() {
        let mesh = FemMesh::disc(96, &[]).unwrap();
        let sigma = Conductivity::unit();
        // f = g = cos(theta)/sqrt(pi) = (phi_1 + phi_{-1})/sqrt(2): pairing = 1
        let mut f = BoundaryField::zero(4);
        let a = 1.0 / 2.0f64.sqrt();
        f.set(1, c(a, 0.0)).unwrap();
        f.set(-1, c(a, 0.0)).unwrap();
        let got = alessandrini_pairing(&f, &f, &sigma, &mesh).unwrap();
        assert!((got - c(1.0, 0.0)).norm() < 5e-3, "pairing {got}");
        // f = phi_0 pairs to zero with anything
        let phi0 = BoundaryField::basis(4, 0).unwrap();
        let got = alessandrini_pairing(&f, &phi0, &sigma, &mesh).unwrap();
        assert!(got.norm() < 1e-10);
    }

    #[test]
    fn alessandrini_matches_dn_quadratic_form() {
        let mesh = FemMesh::disc(128, &[0.5]).unwrap();
        let sigma = Conductivity::two_layer(2.0, 0.5).unwrap();
        let order = 3;
        let dn = assemble_dn_map(&sigma, order, &mesh).unwrap();
        // random-ish fixed fields
        let mut f = BoundaryField::zero(order);
        let mut g = BoundaryField::zero(order);
        for (i, n) in (-(order as i64)..=order as i64).enumerate() {
            f.set(n, c(0.3 + 0.1 * i as f64, -0.2 + 0.05 * i as f64)).unwrap();
            g.set(n, c(-0.1 + 0.07 * i as f64, 0.15 * i as f64)).unwrap();
        }
        let direct = alessandrini_pairing(&g, &f, &sigma, &mesh).unwrap();
        let matrix = g.pair(&dn.apply(&f).unwrap());
        assert!(
            (direct - matrix).norm() < 1e-6 * (1.0 + matrix.norm()),
            "pairing {direct} vs matrix {matrix}"
        );
    }

    #[test]
    fn inclusion_dn_is_hermitian_and_nontrivial() {
        let sigma = Conductivity::new(
            crate::forward::Profile::Inclusion {
                center: [0.25, 0.0],
                radius: 0.35,
                value: 2.0,
            },
            0.75,
        )
        .unwrap();
        let mesh = FemMesh::for_conductivity(&sigma, 64).unwrap();
        let dn = assemble_dn_map(&sigma, 4, &mesh).unwrap();
        assert!(dn.hermitian_defect() < 1e-8, "defect {}", dn.hermitian_defect());
        // difference from unit map has visible off-diagonal structure
        let unit_mesh_dn = assemble_dn_map(&Conductivity::unit(), 4, &mesh).unwrap();
        let diff = dn.sub(&unit_mesh_dn);
        let mut max_off = 0.0f64;
        for m in -4i64..=4 {
            for n in -4i64..=4 {
                if m != n {
                    max_off = max_off.max(diff.entry(m, n).norm());
                }
            }
        }
        assert!(max_off > 1e-3, "inclusion should couple modes, got {max_off}");
    }
}
