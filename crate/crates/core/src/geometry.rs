//! Intrinsic per-face and per-vertex quantities consumed by the assemblers.
//!
//! Corner `c` of face `[v0, v1, v2]` sits at `v[c]`; local edge `c` runs from
//! `v[c]` to `v[c + 1]`, so corner `c` is the tail of local edge `c` and the
//! tip of local edge `c + 2`.

use crate::mesh::{MeshError, TriMesh};

#[derive(Debug, Clone)]
pub struct GeometryCache {
    /// Length of each global edge.
    pub edge_lengths: Vec<f64>,
    /// Corner angles (radians) per face, indexed by corner.
    pub corner_angles: Vec<[f64; 3]>,
    /// Twice the area of each face.
    pub double_areas: Vec<f64>,
    /// Sum of incident corner angles per vertex.
    pub angle_sums: Vec<f64>,
    /// Average edge length.
    pub mean_edge_length: f64,
}

impl GeometryCache {
    /// Computes the cache from the embedded vertex positions.
    pub fn new(mesh: &TriMesh) -> Self {
        let verts = mesh.vertices();
        let edge_lengths: Vec<f64> =
            mesh.edges().iter().map(|&[a, b]| (verts[b] - verts[a]).norm()).collect();
        let mut corner_angles = Vec::with_capacity(mesh.num_faces());
        let mut double_areas = Vec::with_capacity(mesh.num_faces());
        for f in mesh.faces() {
            let p = f.map(|v| verts[v]);
            double_areas.push((p[1] - p[0]).cross(&(p[2] - p[0])).norm());
            let mut angles = [0.0; 3];
            for (c, angle) in angles.iter_mut().enumerate() {
                let out = p[(c + 1) % 3] - p[c];
                let inc = p[(c + 2) % 3] - p[c];
                *angle = out.cross(&inc).norm().atan2(out.dot(&inc));
            }
            corner_angles.push(angles);
        }
        Self::finish(mesh, edge_lengths, corner_angles, double_areas)
    }

    /// Builds the cache from prescribed edge lengths alone, for meshes whose
    /// metric is not induced by the stored positions (e.g. flat tori).
    pub fn from_edge_lengths(mesh: &TriMesh, edge_lengths: Vec<f64>) -> Result<Self, MeshError> {
        assert_eq!(edge_lengths.len(), mesh.num_edges());
        let mut corner_angles = Vec::with_capacity(mesh.num_faces());
        let mut double_areas = Vec::with_capacity(mesh.num_faces());
        for (fi, fe) in mesh.face_edges().iter().enumerate() {
            let l = fe.map(|e| edge_lengths[e.edge]);
            let double_area = 2.0 * heron_area(l[0], l[1], l[2]);
            let mean = (l[0] + l[1] + l[2]) / 3.0;
            if !(double_area >= crate::mesh::DEGENERACY_TOLERANCE * mean * mean) {
                return Err(MeshError::DegenerateFace { face: fi, double_area });
            }
            let mut angles = [0.0; 3];
            for (c, angle) in angles.iter_mut().enumerate() {
                let out = l[c];
                let inc = l[(c + 2) % 3];
                let opp = l[(c + 1) % 3];
                *angle = double_area.atan2(0.5 * (out * out + inc * inc - opp * opp));
            }
            corner_angles.push(angles);
            double_areas.push(double_area);
        }
        Ok(Self::finish(mesh, edge_lengths, corner_angles, double_areas))
    }

    fn finish(
        mesh: &TriMesh,
        edge_lengths: Vec<f64>,
        corner_angles: Vec<[f64; 3]>,
        double_areas: Vec<f64>,
    ) -> Self {
        let mut angle_sums = vec![0.0; mesh.num_vertices()];
        for (f, angles) in mesh.faces().iter().zip(&corner_angles) {
            for c in 0..3 {
                angle_sums[f[c]] += angles[c];
            }
        }
        let mean_edge_length = edge_lengths.iter().sum::<f64>() / edge_lengths.len() as f64;
        Self { edge_lengths, corner_angles, double_areas, angle_sums, mean_edge_length }
    }

    /// Lengths of the three local edges of face `f` (local edge `c` runs from corner `c` to `c + 1`).
    #[inline]
    pub fn face_lengths(&self, mesh: &TriMesh, f: usize) -> [f64; 3] {
        mesh.face_edges()[f].map(|e| self.edge_lengths[e.edge])
    }

    pub fn total_area(&self) -> f64 {
        0.5 * self.double_areas.iter().sum::<f64>()
    }
}

/// Numerically stable Heron formula (Kahan).
pub fn heron_area(a: f64, b: f64, c: f64) -> f64 {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = s;
    let prod = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    0.25 * prod.max(0.0).sqrt()
}

/// Circumradius over inradius for every face.
#[derive(Debug, Clone)]
pub struct Regularity {
    pub ratios: Vec<f64>,
    pub max: f64,
    pub min: f64,
}

/// `R / r` for a triangle with side lengths `a, b, c`; equals 2 only for equilateral triangles.
pub fn circum_in_ratio(a: f64, b: f64, c: f64) -> f64 {
    let area = heron_area(a, b, c);
    let circumradius = a * b * c / (4.0 * area);
    let inradius = area / (0.5 * (a + b + c));
    circumradius / inradius
}

pub fn triangle_regularity(mesh: &TriMesh, geom: &GeometryCache) -> Regularity {
    let ratios: Vec<f64> = (0..mesh.num_faces())
        .map(|f| {
            let [a, b, c] = geom.face_lengths(mesh, f);
            circum_in_ratio(a, b, c)
        })
        .collect();
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    Regularity { ratios, max, min }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Point;
    use crate::shapes;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn tri(p: [[f64; 3]; 3]) -> TriMesh {
        TriMesh::new(p.iter().map(|q| Point::new(q[0], q[1], q[2])).collect(), vec![[0, 1, 2]]).unwrap()
    }

    #[test]
    fn equilateral_triangle() {
        let m = tri([[0., 0., 0.], [1., 0., 0.], [0.5, 3f64.sqrt() / 2., 0.]]);
        let g = GeometryCache::new(&m);
        for &a in &g.corner_angles[0] {
            assert_relative_eq!(a, PI / 3., epsilon = 1e-14);
        }
        assert_relative_eq!(g.double_areas[0], 0.8660254037844386, epsilon = 1e-15);
    }

    #[test]
    fn right_triangle() {
        let m = tri([[0., 0., 0.], [1., 0., 0.], [0., 1., 0.]]);
        let g = GeometryCache::new(&m);
        assert_relative_eq!(g.corner_angles[0][0], PI / 2., epsilon = 1e-15);
        assert_relative_eq!(g.corner_angles[0][1], PI / 4., epsilon = 1e-15);
        assert_relative_eq!(g.corner_angles[0][2], PI / 4., epsilon = 1e-15);
        assert_relative_eq!(g.double_areas[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn tetrahedron_angle_sum() {
        let m = shapes::regular_tetrahedron();
        let g = GeometryCache::new(&m);
        for &s in &g.angle_sums {
            assert_relative_eq!(s, PI, epsilon = 1e-14);
        }
    }

    #[test]
    fn angles_sum_to_pi_and_area_matches_heron() {
        let m = shapes::perturbed_sphere(2, 0.2, 3);
        let g = GeometryCache::new(&m);
        for f in 0..m.num_faces() {
            let s: f64 = g.corner_angles[f].iter().sum();
            assert!((s - PI).abs() < 1e-9);
            let [a, b, c] = g.face_lengths(&m, f);
            let heron = 2.0 * heron_area(a, b, c);
            assert!((heron - g.double_areas[f]).abs() <= 1e-9 * g.double_areas[f]);
        }
    }

    #[test]
    fn intrinsic_route_matches_embedded_route() {
        let m = shapes::perturbed_sphere(1, 0.1, 11);
        let g = GeometryCache::new(&m);
        let h = GeometryCache::from_edge_lengths(&m, g.edge_lengths.clone()).unwrap();
        for f in 0..m.num_faces() {
            assert_relative_eq!(g.double_areas[f], h.double_areas[f], max_relative = 1e-12);
            for c in 0..3 {
                assert_relative_eq!(g.corner_angles[f][c], h.corner_angles[f][c], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn regularity_ratios() {
        assert_relative_eq!(circum_in_ratio(1., 1., 1.), 2.0, epsilon = 1e-14);
        // Legs of length one: R = sqrt(2)/2, r = 1 - sqrt(2)/2, so R/r = 1 + sqrt(2).
        assert_relative_eq!(circum_in_ratio(1., 1., 2f64.sqrt()), 1.0 + 2f64.sqrt(), epsilon = 1e-13);
        let m = tri([[0., 0., 0.], [1., 0., 0.], [0., 1., 0.]]);
        let r = triangle_regularity(&m, &GeometryCache::new(&m));
        assert_relative_eq!(r.max, 2.414213562373095, epsilon = 1e-13);
    }

    #[test]
    fn regularity_at_least_two() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let a: f64 = rng.random_range(0.1..1.0);
            let b: f64 = rng.random_range(0.1..1.0);
            let c: f64 = rng.random_range((a - b).abs() + 1e-3..a + b - 1e-3);
            assert!(circum_in_ratio(a, b, c) >= 2.0 - 1e-12);
        }
    }
}
