//! Angle defects and the curvature correction matrix `K`.
//!
//! Each vertex distributes its defect over the incident faces by tip angle:
//! face `f` receives the share `θ_v^f / s_v`. Inside face `T_ijk`, with
//! `w_v = θ_v κ_v / s_v`, `e = i→j` and `f = k→i`:
//!
//! ```text
//! K[e∥,e∥] = K[e⊥,e⊥] = (w_i + w_j + w_k) / l_ij²
//! K[e∥,f∥] = K[e⊥,f⊥] = cosθ_i (w_j + w_k - w_i) / (l_ij l_ki)
//! K[e⊥,f∥] = -K[e∥,f⊥] = sinθ_i (w_j + w_k - w_i) / (l_ij l_ki)
//! ```

use std::f64::consts::PI;

use crate::assembly::{face_loop, push_cross_block, DofMap, FaceFrame};
use crate::geometry::GeometryCache;
use crate::mesh::TriMesh;
use crate::sparse::SparseMatrix;

/// Defects this small are roundoff on a flat vertex and are set to zero.
pub const FLAT_DEFECT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct AngleDefects {
    /// Integrated Gaussian curvature per vertex; zero on the boundary.
    pub kappa: Vec<f64>,
    /// Sum of incident corner angles per vertex, boundary vertices included.
    pub angle_sums: Vec<f64>,
}

impl AngleDefects {
    pub fn total(&self) -> f64 {
        self.kappa.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.kappa.iter().fold(0.0f64, |m, k| m.max(k.abs()))
    }
}

pub fn angle_defects(mesh: &TriMesh, geom: &GeometryCache) -> AngleDefects {
    let kappa = geom
        .angle_sums
        .iter()
        .zip(mesh.boundary_vertices())
        .map(|(&s, &on_boundary)| {
            let k = if on_boundary { 0.0 } else { 2.0 * PI - s };
            if k.abs() <= FLAT_DEFECT_TOLERANCE {
                0.0
            } else {
                k
            }
        })
        .collect();
    AngleDefects { kappa, angle_sums: geom.angle_sums.clone() }
}

/// Curvature correction matrix (m × m).
pub fn assemble_k(mesh: &TriMesh, geom: &GeometryCache, defects: &AngleDefects, dofs: &DofMap) -> SparseMatrix {
    let triplets = face_loop(mesh.num_faces(), |f, out| {
        let fr = FaceFrame::new(mesh, geom, f);
        let w: [f64; 3] = std::array::from_fn(|c| {
            let v = fr.verts[c];
            let kappa = defects.kappa[v];
            if kappa == 0.0 {
                0.0
            } else {
                fr.angles[c] * kappa / defects.angle_sums[v]
            }
        });
        if w.iter().all(|&x| x == 0.0) {
            return;
        }
        let total = w[0] + w[1] + w[2];
        for c in 0..3 {
            let l = fr.lengths[c];
            let e = fr.edges[c];
            let diag = total / (l * l);
            out.push((dofs.parallel(e), dofs.parallel(e), diag));
            out.push((dofs.perpendicular(e), dofs.perpendicular(e), diag));
        }
        for c in 0..3 {
            let prev = (c + 2) % 3;
            let bracket = w[(c + 1) % 3] + w[prev] - w[c];
            let scale = fr.signs[c] * fr.signs[prev] * bracket / (fr.lengths[c] * fr.lengths[prev]);
            let theta = fr.angles[c];
            push_cross_block(out, dofs, fr.edges[c], fr.edges[prev], scale * theta.cos(), scale * theta.sin());
        }
    });
    SparseMatrix::from_triplets(dofs.len(), dofs.len(), triplets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use approx::assert_relative_eq;

    fn defects_of(m: &TriMesh) -> AngleDefects {
        angle_defects(m, &GeometryCache::new(m))
    }

    #[test]
    fn platonic_defects() {
        let t = defects_of(&shapes::regular_tetrahedron());
        for &k in &t.kappa {
            assert_relative_eq!(k, PI, epsilon = 1e-13);
        }
        let i = defects_of(&shapes::icosahedron());
        for &k in &i.kappa {
            assert_relative_eq!(k, PI / 3.0, epsilon = 1e-13);
        }
        assert_relative_eq!(i.total(), 4.0 * PI, epsilon = 1e-12);
    }

    #[test]
    fn flat_meshes_have_zero_k() {
        for m in [shapes::flat_disk(6, 0.3, 8), shapes::jittered_square(7, 0.4, 2)] {
            let g = GeometryCache::new(&m);
            let d = angle_defects(&m, &g);
            assert!(d.kappa.iter().all(|&k| k == 0.0));
            assert_eq!(assemble_k(&m, &g, &d, &DofMap::new(&m)).nnz(), 0);
        }
    }

    #[test]
    fn boundary_defect_is_ignored() {
        // a cone fan with its apex on the boundary: drop one face
        let fan = shapes::cone_fan();
        let faces = fan.faces()[..5].to_vec();
        let m = TriMesh::new(fan.vertices().to_vec(), faces).unwrap();
        let g = GeometryCache::new(&m);
        let d = angle_defects(&m, &g);
        assert!(d.kappa.iter().all(|&k| k == 0.0));
        assert_eq!(assemble_k(&m, &g, &d, &DofMap::new(&m)).nnz(), 0);
    }

    #[test]
    fn tip_angle_weights_partition_unity() {
        let m = shapes::perturbed_sphere(2, 0.2, 5);
        let g = GeometryCache::new(&m);
        let mut sums = vec![0.0; m.num_vertices()];
        for (f, tri) in m.faces().iter().enumerate() {
            for c in 0..3 {
                sums[tri[c]] += g.corner_angles[f][c] / g.angle_sums[tri[c]];
            }
        }
        for s in sums {
            assert_relative_eq!(s, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn k_is_symmetric() {
        let m = shapes::perturbed_sphere(2, 0.25, 1);
        let g = GeometryCache::new(&m);
        let k = assemble_k(&m, &g, &angle_defects(&m, &g), &DofMap::new(&m));
        assert!(k.is_symmetric());
    }

    #[test]
    fn gauss_bonnet_on_torus() {
        let m = shapes::torus(2.0, 0.6, 30, 14);
        assert!(defects_of(&m).total().abs() < 1e-9);
    }
}
