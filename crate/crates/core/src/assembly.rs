//! Crouzeix–Raviart one-form (CROF) matrices and the scalar P1 operators.
//!
//! Every edge `e` carries two one-form degrees of freedom: `e∥` (index `2e`)
//! and `e⊥` (index `2e + 1`). The parallel form pairs to one with the full
//! edge vector (oriented low → high vertex index); the perpendicular form pairs
//! to one with that vector rotated a quarter turn counterclockwise within the
//! face. Each matrix is a sum of per-face blocks. Inside face `T_ijk`, with
//! `e = i→j` and `f = k→i`, the blocks are:
//!
//! ```text
//! L[e∥,e∥] = L[e⊥,e⊥] = 2/A            M[e∥,e∥] = M[e⊥,e⊥] = A/(6 l_ij²)
//! L[e∥,f∥] = L[e⊥,f⊥] = (2/A) cos²θ_i
//! L[e⊥,f∥] = -L[e∥,f⊥] = 2 cosθ_i / (l_ij l_ki)
//!
//! D[e∥,i] = -A/(6 l_ij²)   D[e∥,j] = A/(6 l_ij²)   D[e∥,k] = 0
//! D[e⊥,i] = -l_jk cosθ_j / (6 l_ij)   D[e⊥,j] = -l_ki cosθ_i / (6 l_ij)   D[e⊥,k] = 1/6
//! ```
//!
//! where `A` is the double area. A face that traverses an edge against its
//! global orientation flips the sign of that edge's basis, so cross-edge
//! entries pick up the product of the two traversal signs and `D` rows pick up
//! the edge's sign.

use rayon::prelude::*;

use crate::geometry::GeometryCache;
use crate::mesh::TriMesh;
use crate::sparse::SparseMatrix;

/// Maps each edge to its parallel and perpendicular one-form DOF.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofMap {
    num_edges: usize,
}

impl DofMap {
    pub fn new(mesh: &TriMesh) -> Self {
        Self { num_edges: mesh.num_edges() }
    }

    #[inline]
    pub fn parallel(&self, edge: usize) -> usize {
        2 * edge
    }

    #[inline]
    pub fn perpendicular(&self, edge: usize) -> usize {
        2 * edge + 1
    }

    /// Total number of one-form DOFs, twice the edge count.
    pub fn len(&self) -> usize {
        2 * self.num_edges
    }

    pub fn is_empty(&self) -> bool {
        self.num_edges == 0
    }
}

pub(crate) type Triplets = Vec<(usize, usize, f64)>;

/// Runs `local` for every face (in parallel) and concatenates the results in
/// face order, so the reduction is independent of scheduling.
pub(crate) fn face_loop<F>(num_faces: usize, local: F) -> Triplets
where
    F: Fn(usize, &mut Triplets) + Sync,
{
    let blocks: Vec<Triplets> = (0..num_faces)
        .into_par_iter()
        .map(|f| {
            let mut out = Vec::with_capacity(24);
            local(f, &mut out);
            out
        })
        .collect();
    blocks.into_iter().flatten().collect()
}

/// Per-face data shared by the one-form assemblers, in local-edge order.
pub(crate) struct FaceFrame {
    pub verts: [usize; 3],
    pub edges: [usize; 3],
    pub signs: [f64; 3],
    pub lengths: [f64; 3],
    pub angles: [f64; 3],
    pub double_area: f64,
}

impl FaceFrame {
    pub fn new(mesh: &TriMesh, geom: &GeometryCache, f: usize) -> Self {
        let fe = mesh.face_edges()[f];
        Self {
            verts: mesh.faces()[f],
            edges: fe.map(|e| e.edge),
            signs: fe.map(|e| e.signf()),
            lengths: geom.face_lengths(mesh, f),
            angles: geom.corner_angles[f],
            double_area: geom.double_areas[f],
        }
    }
}

/// Pushes a symmetric cross-edge block between edge `e` and edge `f` meeting
/// at a corner: `same` goes to (∥,∥) and (⊥,⊥); `twist` goes to (e⊥, f∥) and
/// `-twist` to (e∥, f⊥).
pub(crate) fn push_cross_block(out: &mut Triplets, dofs: &DofMap, e: usize, f: usize, same: f64, twist: f64) {
    let (ep, en) = (dofs.parallel(e), dofs.perpendicular(e));
    let (fp, fn_) = (dofs.parallel(f), dofs.perpendicular(f));
    out.extend_from_slice(&[
        (ep, fp, same),
        (fp, ep, same),
        (en, fn_, same),
        (fn_, en, same),
        (en, fp, twist),
        (fp, en, twist),
        (ep, fn_, -twist),
        (fn_, ep, -twist),
    ]);
}

/// Covariant Dirichlet matrix of the CROF space (m × m).
pub fn assemble_l(mesh: &TriMesh, geom: &GeometryCache, dofs: &DofMap) -> SparseMatrix {
    let triplets = face_loop(mesh.num_faces(), |f, out| {
        let fr = FaceFrame::new(mesh, geom, f);
        let a = fr.double_area;
        for c in 0..3 {
            let diag = 2.0 / a;
            let e = fr.edges[c];
            out.push((dofs.parallel(e), dofs.parallel(e), diag));
            out.push((dofs.perpendicular(e), dofs.perpendicular(e), diag));
        }
        for c in 0..3 {
            // corner c: e = c -> c+1 (outgoing), f = c+2 -> c (incoming)
            let prev = (c + 2) % 3;
            let sign = fr.signs[c] * fr.signs[prev];
            let cos = fr.angles[c].cos();
            let same = sign * 2.0 / a * cos * cos;
            let twist = sign * 2.0 * cos / (fr.lengths[c] * fr.lengths[prev]);
            push_cross_block(out, dofs, fr.edges[c], fr.edges[prev], same, twist);
        }
    });
    SparseMatrix::from_triplets(dofs.len(), dofs.len(), triplets)
}

/// Diagonal of the CROF mass matrix; identical for `e∥` and `e⊥`.
pub fn mass_diagonal(mesh: &TriMesh, geom: &GeometryCache, dofs: &DofMap) -> Vec<f64> {
    let mut diag = vec![0.0; dofs.len()];
    for f in 0..mesh.num_faces() {
        let fr = FaceFrame::new(mesh, geom, f);
        for c in 0..3 {
            let l = fr.lengths[c];
            let v = fr.double_area / (6.0 * l * l);
            diag[dofs.parallel(fr.edges[c])] += v;
            diag[dofs.perpendicular(fr.edges[c])] += v;
        }
    }
    diag
}

/// CROF mass matrix (m × m), diagonal.
pub fn assemble_m(mesh: &TriMesh, geom: &GeometryCache, dofs: &DofMap) -> SparseMatrix {
    SparseMatrix::from_diagonal(&mass_diagonal(mesh, geom, dofs))
}

/// Differential matrix (m × n): row `e∥`/`e⊥`, column vertex, entry `∫ η_e · dφ_v`.
///
/// The perpendicular entries of a face satisfy `D[e⊥,i] + D[e⊥,j] + D[e⊥,k] = 0`
/// exactly in real arithmetic. They are rounded to a common dyadic grid (48
/// bits below the largest magnitude) and the `k` entry is formed as the exact
/// negated sum, so `D·1` vanishes bit-for-bit in any summation order.
pub fn assemble_d(mesh: &TriMesh, geom: &GeometryCache, dofs: &DofMap) -> SparseMatrix {
    let perp_raw: Vec<[[f64; 2]; 3]> = (0..mesh.num_faces())
        .into_par_iter()
        .map(|f| {
            let fr = FaceFrame::new(mesh, geom, f);
            std::array::from_fn(|c| {
                let (j, k) = ((c + 1) % 3, (c + 2) % 3);
                let (l_ij, l_jk, l_ki) = (fr.lengths[c], fr.lengths[j], fr.lengths[k]);
                [l_jk * fr.angles[j].cos() / (6.0 * l_ij), l_ki * fr.angles[c].cos() / (6.0 * l_ij)]
            })
        })
        .collect();
    let largest = perp_raw.iter().flatten().flatten().fold(1.0f64 / 6.0, |m, v| m.max(v.abs()));
    let quantum = dyadic_quantum(largest);

    let triplets = face_loop(mesh.num_faces(), |f, out| {
        let fr = FaceFrame::new(mesh, geom, f);
        for c in 0..3 {
            let (i, j, k) = (fr.verts[c], fr.verts[(c + 1) % 3], fr.verts[(c + 2) % 3]);
            let s = fr.signs[c];
            let l = fr.lengths[c];
            let par = fr.double_area / (6.0 * l * l);
            let e = fr.edges[c];
            out.push((dofs.parallel(e), i, -s * par));
            out.push((dofs.parallel(e), j, s * par));
            let a = snap(perp_raw[f][c][0], quantum);
            let b = snap(perp_raw[f][c][1], quantum);
            let p = dofs.perpendicular(e);
            out.push((p, i, -s * a));
            out.push((p, j, -s * b));
            out.push((p, k, s * (a + b)));
        }
    });
    SparseMatrix::from_triplets(dofs.len(), mesh.num_vertices(), triplets)
}

fn dyadic_quantum(largest: f64) -> f64 {
    2f64.powi(largest.log2().ceil() as i32 - 48)
}

#[inline]
fn snap(x: f64, quantum: f64) -> f64 {
    (x / quantum).round() * quantum
}

/// Barycentric lumped vertex masses: a third of the incident face areas.
pub fn vertex_masses(mesh: &TriMesh, geom: &GeometryCache) -> Vec<f64> {
    let mut mass = vec![0.0; mesh.num_vertices()];
    for (f, tri) in mesh.faces().iter().enumerate() {
        let third = geom.double_areas[f] / 6.0;
        for &v in tri {
            mass[v] += third;
        }
    }
    mass
}

/// Lumped vertex mass matrix (n × n), diagonal.
pub fn assemble_b(mesh: &TriMesh, geom: &GeometryCache) -> SparseMatrix {
    SparseMatrix::from_diagonal(&vertex_masses(mesh, geom))
}

/// Cotangent Laplacian (n × n), positive semi-definite sign convention.
pub fn assemble_cotan(mesh: &TriMesh, geom: &GeometryCache) -> SparseMatrix {
    let triplets = face_loop(mesh.num_faces(), |f, out| {
        let tri = mesh.faces()[f];
        let lengths = geom.face_lengths(mesh, f);
        let a = geom.double_areas[f];
        for c in 0..3 {
            // the angle at corner c faces local edge c+1
            let (out_l, inc_l, opp_l) = (lengths[c], lengths[(c + 2) % 3], lengths[(c + 1) % 3]);
            let cot = 0.5 * (out_l * out_l + inc_l * inc_l - opp_l * opp_l) / a;
            let w = 0.5 * cot;
            let (p, q) = (tri[(c + 1) % 3], tri[(c + 2) % 3]);
            out.extend_from_slice(&[(p, q, -w), (q, p, -w), (p, p, w), (q, q, w)]);
        }
    });
    SparseMatrix::from_triplets(mesh.num_vertices(), mesh.num_vertices(), triplets)
}
