#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use curved_hessian::assembly::{assemble_d, assemble_l, assemble_m, DofMap};
use curved_hessian::oracle::{quadrature_oracle_flat_pair, FlatPair};
use curved_hessian::quadrature::TriangleRule;
use curved_hessian::{GeometryCache, Point, SparseMatrix, TriMesh};

pub fn b_inner(masses: &[f64], a: &[f64], b: &[f64]) -> f64 {
    masses.iter().zip(a.iter().zip(b)).map(|(m, (x, y))| m * x * y).sum()
}

fn min_angle(p: [Vector2<f64>; 3]) -> f64 {
    (0..3)
        .map(|c| {
            let (a, b) = (p[(c + 1) % 3] - p[c], p[(c + 2) % 3] - p[c]);
            (a.dot(&b) / (a.norm() * b.norm())).acos()
        })
        .fold(PI, f64::min)
}

/// Random flat pair with both triangles counterclockwise, minimum angle above
/// ten degrees and a random vertex labelling (so global edge directions vary).
pub fn random_pair(rng: &mut ChaCha8Rng) -> FlatPair {
    loop {
        let mut p: Vec<Vector2<f64>> = (0..4).map(|_| Vector2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect();
        let cross = |a: Vector2<f64>, b: Vector2<f64>, c: Vector2<f64>| (b - a).perp(&(c - a));
        // vertex 2 left of 0→1, vertex 3 right of it
        if cross(p[0], p[1], p[2]) < 0.0 {
            p.swap(0, 1);
        }
        if cross(p[0], p[1], p[2]) <= 0.0 || cross(p[0], p[1], p[3]) >= 0.0 {
            continue;
        }
        if min_angle([p[0], p[1], p[2]]) < 10f64.to_radians() || min_angle([p[1], p[0], p[3]]) < 10f64.to_radians() {
            continue;
        }
        let mut label: Vec<usize> = (0..4).collect();
        for i in (1..4).rev() {
            label.swap(i, rng.random_range(0..=i));
        }
        let mut points = vec![Vector2::zeros(); 4];
        for (old, &new) in label.iter().enumerate() {
            points[new] = p[old];
        }
        return FlatPair { points, faces: [[label[0], label[1], label[2]], [label[1], label[0], label[3]]] };
    }
}

/// Largest entrywise discrepancy of `closed` against `oracle`, relative to the
/// oracle entry or, for entries that vanish, to `1e-5 ‖oracle‖_max`.
pub fn relative_discrepancy(closed: &DMatrix<f64>, oracle: &DMatrix<f64>) -> f64 {
    let floor = 1e-5 * oracle.amax();
    closed.iter().zip(oracle.iter()).map(|(a, b)| (a - b).abs() / b.abs().max(floor)).fold(0.0, f64::max)
}

/// Worst relative discrepancy over `L`, `M`, `D` between the closed forms and
/// degree-4 quadrature on one pair.
pub fn pair_discrepancy(pair: &FlatPair) -> f64 {
    let mesh = TriMesh::new(pair.points.iter().map(|p| Point::new(p.x, p.y, 0.0)).collect(), pair.faces.to_vec()).unwrap();
    let geom = GeometryCache::new(&mesh);
    let dofs = DofMap::new(&mesh);
    let oracle = quadrature_oracle_flat_pair(pair, &TriangleRule::degree4());
    // oracle edge index of every mesh edge
    let to_oracle: Vec<usize> = mesh.edges().iter().map(|e| oracle.edges.iter().position(|o| o == e).unwrap()).collect();
    let dof = |d: usize| 2 * to_oracle[d / 2] + d % 2;
    let n = 2 * mesh.num_edges();
    let permute_square = |m: &SparseMatrix| {
        let mut out = DMatrix::zeros(n, n);
        for (r, c, v) in m.triplets() {
            out[(dof(r), dof(c))] = v;
        }
        out
    };
    let l = permute_square(&assemble_l(&mesh, &geom, &dofs));
    let m = permute_square(&assemble_m(&mesh, &geom, &dofs));
    let mut d = DMatrix::zeros(n, 4);
    for (r, c, v) in assemble_d(&mesh, &geom, &dofs).triplets() {
        d[(dof(r), c)] = v;
    }
    let dense = |rows: &Vec<Vec<f64>>| DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
    relative_discrepancy(&l, &dense(&oracle.l))
        .max(relative_discrepancy(&m, &dense(&oracle.m)))
        .max(relative_discrepancy(&d, &dense(&oracle.d)))
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Curvature matrix of the cone fan written out by hand. Every face is
/// `(apex, a, b)` with unit spokes, tip angle π/4, base angles 3π/8 and a rim
/// edge of length `2 sin(π/8)`. Only the apex carries curvature (π/2 spread
/// over an angle sum of 3π/2), so each face gets the weight `w = π/12` at the
/// apex and zero at the rim.
pub fn cone_fan_k(mesh: &TriMesh) -> DMatrix<f64> {
    let n = 2 * mesh.num_edges();
    let w = PI / 12.0;
    let rim = 2.0 * (PI / 8.0).sin();
    let (tip, base) = (PI / 4.0, 3.0 * PI / 8.0);
    let edge = |a: usize, b: usize| mesh.edges().iter().position(|e| *e == [a.min(b), a.max(b)]).unwrap();
    // +1 when the local direction a→b agrees with the global low→high direction
    let sign = |a: usize, b: usize| if a < b { 1.0 } else { -1.0 };
    let mut k = DMatrix::zeros(n, n);
    let cross = |k: &mut DMatrix<f64>, (e, se): (usize, f64), (f, sf): (usize, f64), same: f64, twist: f64| {
        let s = se * sf;
        for (r, c, v) in [
            (2 * e, 2 * f, s * same),
            (2 * e + 1, 2 * f + 1, s * same),
            (2 * e + 1, 2 * f, s * twist),
            (2 * e, 2 * f + 1, -s * twist),
        ] {
            k[(r, c)] += v;
            k[(c, r)] += v;
        }
    };
    for face in mesh.faces() {
        let [apex, a, b] = *face;
        assert_eq!(apex, 0);
        let (spoke_a, spoke_b, rim_ab) = (edge(apex, a), edge(b, apex), edge(a, b));
        for d in [2 * spoke_a, 2 * spoke_a + 1, 2 * spoke_b, 2 * spoke_b + 1] {
            k[(d, d)] += w;
        }
        for d in [2 * rim_ab, 2 * rim_ab + 1] {
            k[(d, d)] += w / (rim * rim);
        }
        // corner at the apex: e = apex→a, f = b→apex, bracket 0 + 0 - w
        cross(&mut k, (spoke_a, sign(apex, a)), (spoke_b, sign(b, apex)), -w * tip.cos(), -w * tip.sin());
        // corner at a: e = a→b, f = apex→a, bracket 0 + w - 0
        cross(&mut k, (rim_ab, sign(a, b)), (spoke_a, sign(apex, a)), w * base.cos() / rim, w * base.sin() / rim);
        // corner at b: e = b→apex, f = a→b, bracket w + 0 - 0
        cross(&mut k, (spoke_b, sign(b, apex)), (rim_ab, sign(a, b)), w * base.cos() / rim, w * base.sin() / rim);
    }
    k
}

pub fn to_dense(m: &SparseMatrix) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for (r, c, v) in m.triplets() {
        out[(r, c)] += v;
    }
    out
}
