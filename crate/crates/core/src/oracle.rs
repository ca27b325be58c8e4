//! Brute-force quadrature of the defining CROF integrals on a flat pair of
//! triangles, built from explicit basis functions and sharing no code with
//! the closed-form assemblers.
//!
//! Edge `e` with global vector `t_e` (low → high index) and scalar
//! Crouzeix–Raviart function `b_e = 1 − 2 φ_opp` carries the one-forms
//! `b_e t_e / l²` and `b_e J t_e / l²`, `J` the counterclockwise quarter turn.

use nalgebra::{Matrix2, Vector2};

use crate::quadrature::TriangleRule;

/// Two counterclockwise triangles in the plane sharing one edge.
#[derive(Debug, Clone)]
pub struct FlatPair {
    pub points: Vec<Vector2<f64>>,
    pub faces: [[usize; 3]; 2],
}

/// Dense blocks over the pair's edges (DOF `2e` parallel, `2e + 1`
/// perpendicular, edges sorted by vertex pair) and vertices.
#[derive(Debug, Clone)]
pub struct PairMatrices {
    pub edges: Vec<[usize; 2]>,
    pub l: Vec<Vec<f64>>,
    pub m: Vec<Vec<f64>>,
    pub d: Vec<Vec<f64>>,
}

struct Barycentric {
    /// Rows are the gradients of the three barycentric coordinates.
    grads: [Vector2<f64>; 3],
    area: f64,
}

fn barycentric(p: [Vector2<f64>; 3]) -> Barycentric {
    let m = Matrix2::from_columns(&[p[1] - p[0], p[2] - p[0]]);
    let inv = m.try_inverse().expect("non-degenerate triangle");
    // λ1, λ2 are the rows of the inverse; λ0 = 1 − λ1 − λ2
    let g1 = Vector2::new(inv[(0, 0)], inv[(0, 1)]);
    let g2 = Vector2::new(inv[(1, 0)], inv[(1, 1)]);
    Barycentric { grads: [-g1 - g2, g1, g2], area: 0.5 * m.determinant() }
}

pub fn quadrature_oracle_flat_pair(pair: &FlatPair, rule: &TriangleRule) -> PairMatrices {
    let mut edges: Vec<[usize; 2]> = pair
        .faces
        .iter()
        .flat_map(|f| (0..3).map(move |c| [f[c].min(f[(c + 1) % 3]), f[c].max(f[(c + 1) % 3])]))
        .collect();
    edges.sort();
    edges.dedup();
    let ndof = 2 * edges.len();
    let nv = pair.points.len();
    let mut l = vec![vec![0.0; ndof]; ndof];
    let mut m = vec![vec![0.0; ndof]; ndof];
    let mut d = vec![vec![0.0; nv]; ndof];

    let forms: Vec<[Vector2<f64>; 2]> = edges
        .iter()
        .map(|&[a, b]| {
            let t = pair.points[b] - pair.points[a];
            let len2 = t.norm_squared();
            [t / len2, Vector2::new(-t.y, t.x) / len2]
        })
        .collect();

    for face in &pair.faces {
        let bary = barycentric(face.map(|v| pair.points[v]));
        // local basis: (global DOF, one-form, corner whose φ enters b_e)
        let mut local = Vec::new();
        for (e, &[a, b]) in edges.iter().enumerate() {
            if face.contains(&a) && face.contains(&b) {
                let opposite = (0..3).find(|&c| face[c] != a && face[c] != b).unwrap();
                local.push((2 * e, forms[e][0], opposite));
                local.push((2 * e + 1, forms[e][1], opposite));
            }
        }
        let cr = |corner: usize, lam: [f64; 3]| 1.0 - 2.0 * lam[corner];
        let cr_grad = |corner: usize| -2.0 * bary.grads[corner];

        for &(i, wi, ci) in &local {
            for &(j, wj, cj) in &local {
                // ∇(b ω) = ω ⊗ ∇b for a constant ω
                l[i][j] += rule.integrate(bary.area, |_| wi.dot(&wj) * cr_grad(ci).dot(&cr_grad(cj)));
                m[i][j] += rule.integrate(bary.area, |lam| wi.dot(&wj) * cr(ci, lam) * cr(cj, lam));
            }
            for (c, &v) in face.iter().enumerate() {
                d[i][v] += rule.integrate(bary.area, |lam| cr(ci, lam) * wi.dot(&bary.grads[c]));
            }
        }
    }
    PairMatrices { edges, l, m, d }
}

/// Value of the CROF field with coefficients `w` at barycentric point `lam`
/// of face `f`, as an ambient vector (for embedded, possibly curved meshes).
pub fn crof_field_at(mesh: &crate::mesh::TriMesh, w: &[f64], f: usize, lam: [f64; 3]) -> nalgebra::Vector3<f64> {
    let tri = mesh.faces()[f];
    let p = tri.map(|v| mesh.vertices()[v]);
    let normal = (p[1] - p[0]).cross(&(p[2] - p[0])).normalize();
    let mut out = nalgebra::Vector3::zeros();
    for (c, fe) in mesh.face_edges()[f].iter().enumerate() {
        let [a, b] = mesh.edges()[fe.edge];
        let t = mesh.vertices()[b] - mesh.vertices()[a];
        let len2 = t.norm_squared();
        // edge c is opposite corner c + 2
        let cr = 1.0 - 2.0 * lam[(c + 2) % 3];
        out += cr * (w[2 * fe.edge] * t + w[2 * fe.edge + 1] * normal.cross(&t)) / len2;
    }
    out
}
