//! Dirichlet-to-Neumann operators on the truncated Fourier basis.
//!
//! The matrix convention is the operator one: column `n` holds the
//! coefficients of `Lambda phi_n`, so `(Lambda f)_m = sum_n L[m,n] f_n`.
//! For real conductivities these matrices are Hermitian.

use crate::boundary::BoundaryField;
use crate::linalg::CMatrix;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Whether a matrix is a full DN map or a difference of two DN maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DnTag {
    FullMap,
    Difference,
}

/// A DN operator (or a difference of two) on modes `|n| <= N`.
#[derive(Debug, Clone, PartialEq)]
pub struct DnMatrix {
    order: usize,
    entries: CMatrix,
    tag: DnTag,
}

impl DnMatrix {
    pub fn new(order: usize, entries: CMatrix, tag: DnTag) -> Self {
        let dim = 2 * order + 1;
        assert_eq!(entries.nrows, dim);
        assert_eq!(entries.ncols, dim);
        DnMatrix {
            order,
            entries,
            tag,
        }
    }

    pub fn zeros(order: usize, tag: DnTag) -> Self {
        Self::new(order, CMatrix::zeros(2 * order + 1, 2 * order + 1), tag)
    }

    pub fn from_diagonal(order: usize, diag: &[C64], tag: DnTag) -> Self {
        assert_eq!(diag.len(), 2 * order + 1);
        Self::new(order, CMatrix::from_diag(diag), tag)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn tag(&self) -> DnTag {
        self.tag
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    /// Entry indexed by output mode `m` and input mode `n`.
    pub fn entry(&self, m: i64, n: i64) -> C64 {
        let o = self.order as i64;
        assert!(m.abs() <= o && n.abs() <= o);
        self.entries[((m + o) as usize, (n + o) as usize)]
    }

    pub fn set_entry(&mut self, m: i64, n: i64, value: C64) {
        let o = self.order as i64;
        self.entries[((m + o) as usize, (n + o) as usize)] = value;
    }

    pub fn apply(&self, f: &BoundaryField) -> Result<BoundaryField> {
        if f.order() != self.order {
            return Err(Error::invalid(format!(
                "field order {} does not match matrix order {}",
                f.order(),
                self.order
            )));
        }
        BoundaryField::new(self.order, self.entries.matvec(f.coeffs()))
    }

    pub fn sub(&self, other: &DnMatrix) -> DnMatrix {
        assert_eq!(self.order, other.order);
        DnMatrix::new(
            self.order,
            self.entries.sub(&other.entries),
            DnTag::Difference,
        )
    }

    /// Largest deviation from Hermitian symmetry `L[m,n] = conj(L[n,m])`.
    pub fn hermitian_defect(&self) -> f64 {
        let dim = 2 * self.order + 1;
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// The `H^{1/2} -> H^{-1/2}` operator norm on the truncated basis:
    /// spectral norm of `W^{-1/2} L W^{-1/2}` with `W = diag(1+|n|)`.
    pub fn operator_norm_h12(&self) -> f64 {
        self.weighted().spectral_norm()
    }

    /// Weighted matrix `W^{-1/2} L W^{-1/2}` realizing the
    /// `H^{1/2} -> H^{-1/2}` norm.
    pub fn weighted(&self) -> CMatrix {
        let o = self.order as i64;
        let w: Vec<f64> = (-o..=o)
            .map(|n| 1.0 / (1.0 + n.abs() as f64).sqrt())
            .collect();
        self.entries.scale_rows_cols(&w, &w)
    }

    /// Weighted norms of `(I - P_j) L` and `L (I - P_j)`.
    pub fn tail_bound(&self, j: usize) -> Result<(f64, f64)> {
        if j > self.order {
            return Err(Error::invalid(format!(
                "tail order {} exceeds truncation order {}",
                j, self.order
            )));
        }
        let o = self.order as i64;
        let dim = 2 * self.order + 1;
        let keep = |m: i64| m.abs() > j as i64;
        let mut left = self.entries.clone();
        let mut right = self.entries.clone();
        for i in 0..dim {
            let mode = i as i64 - o;
            if !keep(mode) {
                for col in 0..dim {
                    left[(i, col)] = C64::new(0.0, 0.0);
                    right[(col, i)] = C64::new(0.0, 0.0);
                }
            }
        }
        let w: Vec<f64> = (-o..=o)
            .map(|n| 1.0 / (1.0 + n.abs() as f64).sqrt())
            .collect();
        Ok((
            left.scale_rows_cols(&w, &w).spectral_norm(),
            right.scale_rows_cols(&w, &w).spectral_norm(),
        ))
    }

    /// Compress to `P_j L P_j` (same truncation order, outer modes zeroed).
    pub fn project(&self, j: usize) -> Result<DnMatrix> {
        if j > self.order {
            return Err(Error::invalid("projection order exceeds truncation"));
        }
        let o = self.order as i64;
        let dim = 2 * self.order + 1;
        let mut entries = self.entries.clone();
        for i in 0..dim {
            for l in 0..dim {
                let (m, n) = (i as i64 - o, l as i64 - o);
                if m.abs() > j as i64 || n.abs() > j as i64 {
                    entries[(i, l)] = C64::new(0.0, 0.0);
                }
            }
        }
        Ok(DnMatrix::new(self.order, entries, self.tag))
    }

    /// JSON representation: `{ order, tag, entries: [[re, im], ...] }` row-major.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Repr<'a> {
            order: usize,
            tag: &'a DnTag,
            entries: Vec<[f64; 2]>,
        }
        serde_json::to_string(&Repr {
            order: self.order,
            tag: &self.tag,
            entries: self.entries.data.iter().map(|z| [z.re, z.im]).collect(),
        })
        .expect("serializing plain floats cannot fail")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Repr {
            order: usize,
            tag: DnTag,
            entries: Vec<[f64; 2]>,
        }
        let repr: Repr = serde_json::from_str(json)?;
        let dim = 2 * repr.order + 1;
        if repr.entries.len() != dim * dim {
            return Err(Error::invalid("entry count does not match order"));
        }
        let data: Vec<C64> = repr.entries.iter().map(|p| C64::new(p[0], p[1])).collect();
        Ok(DnMatrix::new(
            repr.order,
            CMatrix {
                nrows: dim,
                ncols: dim,
                data,
            },
            repr.tag,
        ))
    }

    /// CSV of the diagonal entries: `n,re,im` lines with a header.
    pub fn diagonal_csv(&self) -> String {
        let o = self.order as i64;
        let mut out = String::from("n,re,im\n");
        for n in -o..=o {
            let z = self.entry(n, n);
            out.push_str(&format!("{},{:.17e},{:.17e}\n", n, z.re, z.im));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn weighted_norm_of_identity_dn_map() {
        let d = crate::boundary::dn_map_identity(8);
        // max |n| / (1+|n|) over |n| <= 8
        let want = 8.0 / 9.0;
        assert!((d.operator_norm_h12() - want).abs() < 1e-10);
    }

    #[test]
    fn zero_matrix_norm_and_tails() {
        let z = DnMatrix::zeros(6, DnTag::Difference);
        assert_eq!(z.operator_norm_h12(), 0.0);
        let (a, b) = z.tail_bound(3).unwrap();
        assert_eq!((a, b), (0.0, 0.0));
    }

    #[test]
    fn full_projection_tail_is_zero() {
        let d = crate::boundary::dn_map_identity(5);
        let (a, b) = d.tail_bound(5).unwrap();
        assert!(a == 0.0 && b == 0.0);
    }

    #[test]
    fn apply_diagonal() {
        let d = crate::boundary::dn_map_identity(3);
        let f = BoundaryField::basis(3, 2).unwrap();
        let out = d.apply(&f).unwrap();
        assert!((out.coeff(2) - c(2.0, 0.0)).norm() < 1e-15);
        assert!(out.coeff(1).norm() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let mut d = DnMatrix::zeros(2, DnTag::Difference);
        d.set_entry(1, -2, c(0.25, -0.5));
        d.set_entry(0, 0, c(1.5, 0.0));
        let back = DnMatrix::from_json(&d.to_json()).unwrap();
        assert_eq!(d, back);
    }

    #[test]
    fn diagonal_csv_has_all_modes() {
        let d = crate::boundary::dn_map_identity(2);
        let csv = d.diagonal_csv();
        assert_eq!(csv.lines().count(), 6);
        assert!(csv.lines().nth(1).unwrap().starts_with("-2,"));
    }
}
