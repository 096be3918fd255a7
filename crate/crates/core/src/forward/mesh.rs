//! Polar tensor meshes of the unit disc.
//!
//! The mesh has the same number of nodes on every ring, so it is invariant
//! under rotation by `2 pi / n_boundary`. For radial conductivities this
//! makes the assembled DN matrix exactly diagonal in the Fourier basis
//! (modes couple only mod `n_boundary`), and interface circles that coincide
//! with ring radii are fitted exactly.
//!
//! Off-center circular inclusions are fitted through a disc automorphism: a
//! Mobius transform maps the inclusion boundary to an origin-centered circle,
//! the Dirichlet energy is conformally invariant, and the conductivity is
//! transported by composition.

use super::conductivity::{Conductivity, Profile};
use crate::{Error, Result, C64};
use std::f64::consts::PI;

/// Disc automorphism `T(z) = (e* z - t)/(1 - t e* z)` (rotation `e`, real
/// pull `t`), chosen so a given interior circle maps to one centered at 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMap {
    rotation: C64, // e, |e| = 1
    t: f64,
}

impl MobiusMap {
    /// Identity map.
    pub fn identity() -> Self {
        MobiusMap {
            rotation: C64::new(1.0, 0.0),
            t: 0.0,
        }
    }

    /// Map sending the circle `|z - center| = radius` (inside the unit disc)
    /// to a circle centered at the origin; returns the map and the mapped
    /// radius.
    pub fn centering(center: C64, radius: f64) -> Result<(Self, f64)> {
        let c = center.norm();
        if c + radius >= 1.0 {
            return Err(Error::invalid("circle must lie inside the unit disc"));
        }
        if c < 1e-14 {
            return Ok((Self::identity(), radius));
        }
        let rotation = center / c;
        let u1 = c + radius;
        let u2 = c - radius;
        // t^2 (u1+u2) - 2 t (1 + u1 u2) + (u1+u2) = 0
        let a = u1 + u2;
        let b = 1.0 + u1 * u2;
        let disc = (b * b - a * a).max(0.0).sqrt();
        let t = (b - disc) / a;
        let mapped = ((u1 - t) / (1.0 - t * u1)).abs();
        Ok((MobiusMap { rotation, t }, mapped))
    }

    /// Original coordinates -> mesh coordinates.
    pub fn forward(&self, z: C64) -> C64 {
        let w = self.rotation.conj() * z;
        (w - self.t) / (1.0 - self.t * w)
    }

    /// Mesh coordinates -> original coordinates.
    pub fn inverse(&self, y: C64) -> C64 {
        self.rotation * (y + self.t) / (1.0 + self.t * y)
    }
}

/// Conforming P1 triangulation of the unit disc.
#[derive(Debug, Clone)]
pub struct FemMesh {
    nodes: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    /// Barycenter of each triangle.
    barycenters: Vec<C64>,
    /// Boundary node indices ordered by angle.
    boundary: Vec<usize>,
    n_boundary: usize,
    ring_radii: Vec<f64>,
    h: f64,
    mobius: Option<MobiusMap>,
}

impl FemMesh {
    /// Disc mesh with `n_boundary` nodes per ring and rings fitted to the
    /// given interface radii.
    pub fn disc(n_boundary: usize, interfaces: &[f64]) -> Result<Self> {
        if n_boundary < 16 {
            return Err(Error::invalid("need at least 16 boundary nodes"));
        }
        for &rho in interfaces {
            if !(0.0 < rho && rho < 1.0) {
                return Err(Error::invalid(format!("interface {rho} outside (0,1)")));
            }
        }
        let mut breaks: Vec<f64> = interfaces.to_vec();
        breaks.push(1.0);
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

        let target = 2.0 * PI / n_boundary as f64;
        let mut ring_radii = Vec::new();
        let mut prev = 0.0;
        for &b in &breaks {
            let steps = ((b - prev) / target).ceil().max(1.0) as usize;
            for s in 1..=steps {
                ring_radii.push(prev + (b - prev) * s as f64 / steps as f64);
            }
            prev = b;
        }

        let nb = n_boundary;
        let n_rings = ring_radii.len();
        let mut nodes = Vec::with_capacity(1 + nb * n_rings);
        nodes.push([0.0, 0.0]);
        for &r in &ring_radii {
            for i in 0..nb {
                let th = 2.0 * PI * i as f64 / nb as f64;
                nodes.push([r * th.cos(), r * th.sin()]);
            }
        }
        let idx = |ring: usize, i: usize| 1 + ring * nb + i % nb;

        let mut triangles = Vec::with_capacity(nb * (2 * n_rings - 1));
        for i in 0..nb {
            triangles.push([0, idx(0, i), idx(0, i + 1)]);
        }
        for ring in 0..n_rings - 1 {
            for i in 0..nb {
                let (a, b) = (idx(ring, i), idx(ring, i + 1));
                let (c, d) = (idx(ring + 1, i), idx(ring + 1, i + 1));
                triangles.push([a, c, d]);
                triangles.push([a, d, b]);
            }
        }

        let barycenters = triangles
            .iter()
            .map(|t| {
                let p = |v: usize| C64::new(nodes[v][0], nodes[v][1]);
                (p(t[0]) + p(t[1]) + p(t[2])) / 3.0
            })
            .collect();

        let boundary: Vec<usize> = (0..nb).map(|i| idx(n_rings - 1, i)).collect();
        let max_dr = ring_radii
            .iter()
            .scan(0.0, |prev, &r| {
                let d = r - *prev;
                *prev = r;
                Some(d)
            })
            .fold(0.0f64, f64::max);
        let h = max_dr.max(target);

        Ok(FemMesh {
            nodes,
            triangles,
            barycenters,
            boundary,
            n_boundary: nb,
            ring_radii,
            h,
            mobius: None,
        })
    }

    /// Mesh fitted to the discontinuity interfaces of `sigma`.
    pub fn for_conductivity(sigma: &Conductivity, n_boundary: usize) -> Result<Self> {
        match sigma.profile() {
            Profile::PiecewiseRadial { radii, .. } => Self::disc(n_boundary, radii),
            Profile::Inclusion { center, radius, .. } => {
                let (map, mapped_radius) =
                    MobiusMap::centering(C64::new(center[0], center[1]), *radius)?;
                let mut mesh = Self::disc(n_boundary, &[mapped_radius])?;
                mesh.mobius = Some(map);
                Ok(mesh)
            }
            Profile::SmoothedInclusion { center, radius, .. } => {
                // the ramped profile is smooth; fitting the nominal interface
                // still helps the barycenter quadrature
                let (map, mapped_radius) =
                    MobiusMap::centering(C64::new(center[0], center[1]), *radius)?;
                let mut mesh = Self::disc(n_boundary, &[mapped_radius])?;
                mesh.mobius = Some(map);
                Ok(mesh)
            }
            Profile::SmoothedRadial { radii, .. } => Self::disc(n_boundary, radii),
            _ => Self::disc(n_boundary, &[]),
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn barycenters(&self) -> &[C64] {
        &self.barycenters
    }

    pub fn boundary_nodes(&self) -> &[usize] {
        &self.boundary
    }

    pub fn n_boundary(&self) -> usize {
        self.n_boundary
    }

    pub fn ring_radii(&self) -> &[f64] {
        &self.ring_radii
    }

    /// Largest element diameter scale.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn mobius(&self) -> Option<&MobiusMap> {
        self.mobius.as_ref()
    }

    /// Angle (in the original frame) of the `i`-th boundary node.
    pub fn boundary_angle(&self, i: usize) -> f64 {
        let node = self.nodes[self.boundary[i]];
        let z = C64::new(node[0], node[1]);
        let orig = match &self.mobius {
            Some(map) => map.inverse(z),
            None => z,
        };
        orig.im.atan2(orig.re)
    }

    /// Conductivity value at a triangle barycenter, transported through the
    /// Mobius map when present.
    pub fn sigma_at_barycenter(&self, sigma: &Conductivity, tri: usize) -> f64 {
        let b = self.barycenters[tri];
        match &self.mobius {
            Some(map) => sigma.eval(map.inverse(b)),
            None => sigma.eval(b),
        }
    }
}
