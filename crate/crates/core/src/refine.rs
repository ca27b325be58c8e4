//! 1-to-4 refinement: Loop subdivision and plain midpoint splitting.
//!
//! Refinement is expressed as a stencil matrix `S` of size `(V + E) × V`:
//! old vertices keep their indices, the new vertex on edge `e` gets index
//! `V + e`. Geometry is refined as `S · positions`; the same stencil
//! prolongs per-vertex scalar fields onto the refined mesh.

use std::f64::consts::PI;

use crate::mesh::{MeshError, Point, TriMesh};
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryRule {
    /// Boundary vertices stay put; new boundary points are edge midpoints.
    Fixed,
    /// Cubic B-spline rule along the boundary curve: `(1/8, 3/4, 1/8)`.
    SmoothCurve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Loop(BoundaryRule),
    Midpoint,
}

#[derive(Debug, Clone)]
pub struct Refinement {
    pub mesh: TriMesh,
    pub stencil: SparseMatrix,
}

impl Refinement {
    /// Prolongs a coarse per-vertex field onto the refined mesh.
    pub fn prolong(&self, values: &[f64]) -> Vec<f64> {
        self.stencil.mul_vec(values)
    }
}

/// Refined connectivity: four faces per coarse face, consistently oriented.
pub fn split_faces(mesh: &TriMesh) -> Vec<[usize; 3]> {
    let nv = mesh.num_vertices();
    let mut faces = Vec::with_capacity(4 * mesh.num_faces());
    for (f, fe) in mesh.faces().iter().zip(mesh.face_edges()) {
        let m = fe.map(|e| nv + e.edge);
        faces.push([f[0], m[0], m[2]]);
        faces.push([f[1], m[1], m[0]]);
        faces.push([f[2], m[2], m[1]]);
        faces.push([m[0], m[1], m[2]]);
    }
    faces
}

/// Neighbouring vertices of each vertex, and the boundary neighbours of boundary vertices.
fn neighbourhoods(mesh: &TriMesh) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let mut all = vec![Vec::new(); mesh.num_vertices()];
    let mut boundary = vec![Vec::new(); mesh.num_vertices()];
    for (e, &[a, b]) in mesh.edges().iter().enumerate() {
        all[a].push(b);
        all[b].push(a);
        if mesh.boundary_edges()[e] {
            boundary[a].push(b);
            boundary[b].push(a);
        }
    }
    (all, boundary)
}

/// Loop's original vertex weight for valence `n`.
pub fn loop_beta(n: usize) -> f64 {
    let n_f = n as f64;
    let c = 3.0 / 8.0 + 0.25 * (2.0 * PI / n_f).cos();
    (5.0 / 8.0 - c * c) / n_f
}

pub fn stencil(mesh: &TriMesh, scheme: Scheme) -> SparseMatrix {
    let nv = mesh.num_vertices();
    let ne = mesh.num_edges();
    let mut triplets = Vec::with_capacity(nv * 7 + ne * 4);

    match scheme {
        Scheme::Midpoint => {
            for v in 0..nv {
                triplets.push((v, v, 1.0));
            }
        }
        Scheme::Loop(rule) => {
            let (nbrs, bnbrs) = neighbourhoods(mesh);
            for v in 0..nv {
                if mesh.boundary_vertices()[v] {
                    match rule {
                        BoundaryRule::SmoothCurve if bnbrs[v].len() == 2 => {
                            triplets.push((v, v, 0.75));
                            triplets.push((v, bnbrs[v][0], 0.125));
                            triplets.push((v, bnbrs[v][1], 0.125));
                        }
                        // corners of non-manifold boundaries are kept in place
                        _ => triplets.push((v, v, 1.0)),
                    }
                } else {
                    let n = nbrs[v].len();
                    let beta = loop_beta(n);
                    triplets.push((v, v, 1.0 - n as f64 * beta));
                    for &u in &nbrs[v] {
                        triplets.push((v, u, beta));
                    }
                }
            }
        }
    }

    for (e, &[a, b]) in mesh.edges().iter().enumerate() {
        let row = nv + e;
        let interior = !mesh.boundary_edges()[e];
        if matches!(scheme, Scheme::Loop(_)) && interior {
            let ef = mesh.edge_faces()[e];
            let opposite = |f: usize| {
                let tri = mesh.faces()[f];
                *tri.iter().find(|&&v| v != a && v != b).expect("triangle has an opposite vertex")
            };
            let (c, d) = (opposite(ef[0].unwrap()), opposite(ef[1].unwrap()));
            triplets.extend_from_slice(&[(row, a, 0.375), (row, b, 0.375), (row, c, 0.125), (row, d, 0.125)]);
        } else {
            triplets.extend_from_slice(&[(row, a, 0.5), (row, b, 0.5)]);
        }
    }
    SparseMatrix::from_triplets(nv + ne, nv, triplets)
}

/// Applies one refinement step to `mesh`.
pub fn subdivide(mesh: &TriMesh, scheme: Scheme) -> Result<Refinement, MeshError> {
    let s = stencil(mesh, scheme);
    let coords: [Vec<f64>; 3] = std::array::from_fn(|axis| s.mul_vec(&mesh.coordinate(axis)));
    let vertices = (0..s.nrows()).map(|i| Point::new(coords[0][i], coords[1][i], coords[2][i])).collect();
    let refined = TriMesh::new(vertices, split_faces(mesh))?;
    Ok(Refinement { mesh: refined, stencil: s })
}

pub fn loop_subdivide(mesh: &TriMesh, rule: BoundaryRule) -> Result<TriMesh, MeshError> {
    Ok(subdivide(mesh, Scheme::Loop(rule))?.mesh)
}

pub fn midpoint_subdivide(mesh: &TriMesh) -> Result<TriMesh, MeshError> {
    Ok(subdivide(mesh, Scheme::Midpoint)?.mesh)
}
