//! Indexed triangle meshes with globally oriented edges.
//!
//! Every undirected edge is stored once, oriented from its lower vertex index
//! to its higher one. Each face records, for its three local edges, the global
//! edge index and whether the face traverses that edge along (`+1`) or against
//! (`-1`) the global orientation. Local edge `c` of face `[v0, v1, v2]` runs
//! from `v[c]` to `v[(c + 1) % 3]`.

use std::collections::HashMap;

use nalgebra::Vector3;
use thiserror::Error;

pub type Point = Vector3<f64>;

/// Relative tolerance for rejecting degenerate faces, measured against the
/// squared mean edge length of the mesh.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("InvalidIndex: face {face} references vertex {vertex} but the mesh has {count} vertices")]
    InvalidIndex { face: usize, vertex: usize, count: usize },
    #[error("InvalidIndex: face {face} repeats vertex {vertex}")]
    RepeatedVertex { face: usize, vertex: usize },
    #[error("NonManifoldEdge: edge ({0}, {1}) is shared by more than two faces")]
    NonManifoldEdge(usize, usize),
    #[error("InconsistentOrientation: edge ({0}, {1}) is traversed in the same direction by both incident faces")]
    InconsistentOrientation(usize, usize),
    #[error("DegenerateFace: face {face} has double area {double_area:e}")]
    DegenerateFace { face: usize, double_area: f64 },
    #[error("EmptyMesh: at least one face is required")]
    EmptyMesh,
}

/// One local edge of a face: the global edge it maps to and the traversal sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaceEdge {
    pub edge: usize,
    pub sign: i8,
}

impl FaceEdge {
    #[inline]
    pub fn signf(&self) -> f64 {
        f64::from(self.sign)
    }
}

#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<Point>,
    faces: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    face_edges: Vec<[FaceEdge; 3]>,
    edge_faces: Vec<[Option<usize>; 2]>,
    boundary_vertices: Vec<bool>,
    boundary_edges: Vec<bool>,
}

impl TriMesh {
    /// Builds the mesh connectivity and validates manifoldness, consistent
    /// orientation and non-degeneracy of every face.
    pub fn new(vertices: Vec<Point>, faces: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        let mesh = Self::from_topology(vertices, faces)?;
        mesh.check_degenerate()?;
        Ok(mesh)
    }

    /// Same as [`TriMesh::new`] but skips the positional degeneracy check.
    /// Used for intrinsic meshes whose geometry comes from edge lengths.
    pub fn from_topology(vertices: Vec<Point>, faces: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        if faces.is_empty() {
            return Err(MeshError::EmptyMesh);
        }
        let n = vertices.len();
        for (fi, f) in faces.iter().enumerate() {
            for &v in f {
                if v >= n {
                    return Err(MeshError::InvalidIndex { face: fi, vertex: v, count: n });
                }
            }
            if f[0] == f[1] || f[1] == f[2] || f[2] == f[0] {
                let vertex = if f[0] == f[1] || f[0] == f[2] { f[0] } else { f[1] };
                return Err(MeshError::RepeatedVertex { face: fi, vertex });
            }
        }

        let mut lookup: HashMap<(usize, usize), usize> = HashMap::with_capacity(faces.len() * 2);
        let mut edges: Vec<[usize; 2]> = Vec::with_capacity(faces.len() * 2);
        let mut edge_faces: Vec<[Option<usize>; 2]> = Vec::with_capacity(faces.len() * 2);
        // Direction in which each edge's first face traversed it, to detect
        // orientation clashes.
        let mut first_sign: Vec<i8> = Vec::with_capacity(faces.len() * 2);
        let mut face_edges = Vec::with_capacity(faces.len());

        for (fi, f) in faces.iter().enumerate() {
            let mut local = [FaceEdge { edge: 0, sign: 1 }; 3];
            for c in 0..3 {
                let (a, b) = (f[c], f[(c + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let sign: i8 = if a < b { 1 } else { -1 };
                let e = match lookup.get(&key) {
                    Some(&e) => {
                        if edge_faces[e][1].is_some() {
                            return Err(MeshError::NonManifoldEdge(key.0, key.1));
                        }
                        if first_sign[e] == sign {
                            return Err(MeshError::InconsistentOrientation(key.0, key.1));
                        }
                        edge_faces[e][1] = Some(fi);
                        e
                    }
                    None => {
                        let e = edges.len();
                        lookup.insert(key, e);
                        edges.push([key.0, key.1]);
                        edge_faces.push([Some(fi), None]);
                        first_sign.push(sign);
                        e
                    }
                };
                local[c] = FaceEdge { edge: e, sign };
            }
            face_edges.push(local);
        }

        let mut boundary_vertices = vec![false; n];
        let boundary_edges: Vec<bool> = edge_faces.iter().map(|ef| ef[1].is_none()).collect();
        for (e, &b) in boundary_edges.iter().enumerate() {
            if b {
                boundary_vertices[edges[e][0]] = true;
                boundary_vertices[edges[e][1]] = true;
            }
        }

        Ok(Self { vertices, faces, edges, face_edges, edge_faces, boundary_vertices, boundary_edges })
    }

    fn check_degenerate(&self) -> Result<(), MeshError> {
        let mean_len = self
            .edges
            .iter()
            .map(|&[a, b]| (self.vertices[b] - self.vertices[a]).norm())
            .sum::<f64>()
            / self.edges.len() as f64;
        let threshold = DEGENERACY_TOLERANCE * mean_len * mean_len;
        for (fi, f) in self.faces.iter().enumerate() {
            let double_area = self.face_double_area(f);
            if !(double_area >= threshold) {
                return Err(MeshError::DegenerateFace { face: fi, double_area });
            }
        }
        Ok(())
    }

    fn face_double_area(&self, f: &[usize; 3]) -> f64 {
        let [a, b, c] = f.map(|v| self.vertices[v]);
        (b - a).cross(&(c - a)).norm()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn face_edges(&self) -> &[[FaceEdge; 3]] {
        &self.face_edges
    }

    /// The one or two faces incident to each edge.
    pub fn edge_faces(&self) -> &[[Option<usize>; 2]] {
        &self.edge_faces
    }

    pub fn boundary_vertices(&self) -> &[bool] {
        &self.boundary_vertices
    }

    pub fn boundary_edges(&self) -> &[bool] {
        &self.boundary_edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_boundary(&self) -> bool {
        self.boundary_edges.iter().any(|&b| b)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_faces() as i64
    }

    /// Returns a copy with new vertex positions and identical connectivity.
    pub fn with_positions(&self, vertices: Vec<Point>) -> Result<Self, MeshError> {
        assert_eq!(vertices.len(), self.vertices.len(), "vertex count must not change");
        let mesh = Self { vertices, ..self.clone() };
        mesh.check_degenerate()?;
        Ok(mesh)
    }

    /// Mean edge length `h`.
    pub fn mean_edge_length(&self) -> f64 {
        self.edges
            .iter()
            .map(|&[a, b]| (self.vertices[b] - self.vertices[a]).norm())
            .sum::<f64>()
            / self.edges.len() as f64
    }

    /// Vertex positions as three coordinate columns.
    pub fn coordinate(&self, axis: usize) -> Vec<f64> {
        self.vertices.iter().map(|p| p[axis]).collect()
    }
}
