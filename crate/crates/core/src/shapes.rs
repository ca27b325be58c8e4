//! Procedural test meshes: platonic solids, icospheres, flat disks, annuli,
//! grids, tori and a cone fan.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::GeometryCache;
use crate::mesh::{Point, TriMesh};
use crate::refine;

fn build(vertices: Vec<Point>, faces: Vec<[usize; 3]>) -> TriMesh {
    TriMesh::new(vertices, faces).expect("generated mesh is valid")
}

/// Flips faces of a star-shaped closed surface so their normals point away from the origin.
fn orient_outward(vertices: &[Point], faces: &mut [[usize; 3]]) {
    for f in faces.iter_mut() {
        let [a, b, c] = f.map(|v| vertices[v]);
        if (b - a).cross(&(c - a)).dot(&(a + b + c)) < 0.0 {
            f.swap(1, 2);
        }
    }
}

/// Regular tetrahedron with unit edge length, centred at the origin.
pub fn regular_tetrahedron() -> TriMesh {
    let s = 1.0 / (2.0 * 2f64.sqrt());
    let vertices: Vec<Point> = [[1., 1., 1.], [1., -1., -1.], [-1., 1., -1.], [-1., -1., 1.]]
        .iter()
        .map(|p| Point::new(p[0], p[1], p[2]) * s)
        .collect();
    let mut faces = vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
    orient_outward(&vertices, &mut faces);
    build(vertices, faces)
}

/// Icosahedron inscribed in the unit sphere.
pub fn icosahedron() -> TriMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1., t, 0.],
        [1., t, 0.],
        [-1., -t, 0.],
        [1., -t, 0.],
        [0., -1., t],
        [0., 1., t],
        [0., -1., -t],
        [0., 1., -t],
        [t, 0., -1.],
        [t, 0., 1.],
        [-t, 0., -1.],
        [-t, 0., 1.],
    ];
    let vertices: Vec<Point> = raw.iter().map(|p| Point::new(p[0], p[1], p[2]).normalize()).collect();
    let mut faces = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    orient_outward(&vertices, &mut faces);
    build(vertices, faces)
}

/// Unit icosphere: `level` midpoint splits of the icosahedron, projecting the
/// vertices back onto the sphere after every split.
pub fn icosphere(level: usize) -> TriMesh {
    let mut mesh = icosahedron();
    for _ in 0..level {
        let split = refine::midpoint_subdivide(&mesh).expect("split of valid mesh");
        let projected = split.vertices().iter().map(|p| p.normalize()).collect();
        mesh = split.with_positions(projected).expect("projection keeps faces valid");
    }
    mesh
}

/// Icosphere with every vertex radius scaled by `1 + amount * U(-1, 1)`.
pub fn perturbed_sphere(level: usize, amount: f64, seed: u64) -> TriMesh {
    let base = icosphere(level);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let verts = base.vertices().iter().map(|p| p * (1.0 + amount * rng.random_range(-1.0..1.0))).collect();
    base.with_positions(verts).expect("moderate radial noise keeps faces valid")
}

/// Icosphere stretched onto the ellipsoid with the given semi-axes.
pub fn ellipsoid(level: usize, semi_axes: [f64; 3]) -> TriMesh {
    let base = icosphere(level);
    let verts = base
        .vertices()
        .iter()
        .map(|p| Point::new(p.x * semi_axes[0], p.y * semi_axes[1], p.z * semi_axes[2]))
        .collect();
    base.with_positions(verts).expect("scaling keeps faces valid")
}

/// Connects two concentric rings of vertices, walking both by polar angle.
/// Rings are `(vertex, angle)` lists sorted by increasing angle.
fn stitch_rings(inner: &[(usize, f64)], outer: &[(usize, f64)], faces: &mut Vec<[usize; 3]>) {
    let angle = |ring: &[(usize, f64)], k: usize| {
        let n = ring.len();
        ring[k % n].1 + 2.0 * PI * (k / n) as f64
    };
    let (ni, no) = (inner.len(), outer.len());
    let (mut i, mut o) = (0, 0);
    while i < ni || o < no {
        let advance_outer = if i == ni {
            true
        } else if o == no {
            false
        } else {
            angle(outer, o + 1) <= angle(inner, i + 1)
        };
        if advance_outer {
            faces.push([inner[i % ni].0, outer[o % no].0, outer[(o + 1) % no].0]);
            o += 1;
        } else {
            faces.push([inner[i % ni].0, outer[o % no].0, inner[(i + 1) % ni].0]);
            i += 1;
        }
    }
}

/// Flat unit disk in the `z = 0` plane: a centre vertex plus `rings` concentric
/// rings, ring `k` carrying `6k` vertices. Interior vertices are displaced by up
/// to `jitter` times the ring spacing.
pub fn flat_disk(rings: usize, jitter: f64, seed: u64) -> TriMesh {
    assert!(rings >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1.0 / rings as f64;
    let mut vertices = vec![Point::zeros()];
    let mut faces = Vec::new();
    let mut prev: Vec<(usize, f64)> = vec![];
    for k in 1..=rings {
        let n = 6 * k;
        let r = k as f64 * h;
        let ring: Vec<(usize, f64)> = (0..n)
            .map(|j| {
                let a = 2.0 * PI * j as f64 / n as f64;
                let mut p = Point::new(r * a.cos(), r * a.sin(), 0.0);
                if k < rings && jitter > 0.0 {
                    p.x += jitter * h * rng.random_range(-0.5..0.5);
                    p.y += jitter * h * rng.random_range(-0.5..0.5);
                }
                vertices.push(p);
                (vertices.len() - 1, a)
            })
            .collect();
        if k == 1 {
            for j in 0..n {
                faces.push([0, ring[j].0, ring[(j + 1) % n].0]);
            }
        } else {
            stitch_rings(&prev, &ring, &mut faces);
        }
        prev = ring;
    }
    build(vertices, faces)
}

/// Flat annulus between radii `inner` and `outer` with `rings + 1` circles of
/// `around` vertices; odd circles are rotated by half a step.
pub fn annulus(inner: f64, outer: f64, rings: usize, around: usize) -> TriMesh {
    let mut vertices = Vec::new();
    let mut circles: Vec<Vec<(usize, f64)>> = Vec::new();
    for k in 0..=rings {
        let r = inner + (outer - inner) * k as f64 / rings as f64;
        let offset = if k % 2 == 1 { PI / around as f64 } else { 0.0 };
        let circle = (0..around)
            .map(|j| {
                let a = offset + 2.0 * PI * j as f64 / around as f64;
                vertices.push(Point::new(r * a.cos(), r * a.sin(), 0.0));
                (vertices.len() - 1, a)
            })
            .collect();
        circles.push(circle);
    }
    let mut faces = Vec::new();
    for k in 0..rings {
        stitch_rings(&circles[k], &circles[k + 1], &mut faces);
    }
    build(vertices, faces)
}

/// `nx × ny` square cells of side `h` starting at the origin, each split along
/// the same diagonal. Vertex `(i, j)` has index `j * (nx + 1) + i`.
pub fn grid(nx: usize, ny: usize, h: f64) -> TriMesh {
    rect_grid(nx, ny, [0.0, 0.0], [h * nx as f64, h * ny as f64], |_, _| 0.0)
}

/// Structured grid over `[lo, hi]` lifted to the graph `z = height(x, y)`.
pub fn rect_grid(nx: usize, ny: usize, lo: [f64; 2], hi: [f64; 2], height: impl Fn(f64, f64) -> f64) -> TriMesh {
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            let x = lo[0] + (hi[0] - lo[0]) * i as f64 / nx as f64;
            let y = lo[1] + (hi[1] - lo[1]) * j as f64 / ny as f64;
            vertices.push(Point::new(x, y, height(x, y)));
        }
    }
    let idx = |i: usize, j: usize| j * (nx + 1) + i;
    let mut faces = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    build(vertices, faces)
}

/// Irregular triangulation of the unit square: interior vertices jittered by up
/// to `jitter` times the spacing and each cell split along a random diagonal.
pub fn jittered_square(n: usize, jitter: f64, seed: u64) -> TriMesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1.0 / n as f64;
    let mut vertices = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            let mut p = Point::new(i as f64 * h, j as f64 * h, 0.0);
            if i > 0 && i < n && j > 0 && j < n {
                p.x += jitter * h * rng.random_range(-0.5..0.5);
                p.y += jitter * h * rng.random_range(-0.5..0.5);
            }
            vertices.push(p);
        }
    }
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let mut faces = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            if rng.random_bool(0.5) {
                faces.push([a, b, c]);
                faces.push([a, c, d]);
            } else {
                faces.push([a, b, d]);
                faces.push([b, c, d]);
            }
        }
    }
    build(vertices, faces)
}

fn torus_faces(n_major: usize, n_minor: usize) -> Vec<[usize; 3]> {
    let idx = |i: usize, j: usize| (j % n_minor) * n_major + (i % n_major);
    let mut faces = Vec::with_capacity(2 * n_major * n_minor);
    for j in 0..n_minor {
        for i in 0..n_major {
            faces.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            faces.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    faces
}

fn torus_vertices(major: f64, minor: f64, n_major: usize, n_minor: usize) -> Vec<Point> {
    let mut vertices = Vec::with_capacity(n_major * n_minor);
    for j in 0..n_minor {
        let phi = 2.0 * PI * j as f64 / n_minor as f64;
        for i in 0..n_major {
            let theta = 2.0 * PI * i as f64 / n_major as f64;
            let r = major + minor * phi.cos();
            vertices.push(Point::new(r * theta.cos(), r * theta.sin(), minor * phi.sin()));
        }
    }
    vertices
}

/// Torus of revolution with outward-facing triangles.
pub fn torus(major: f64, minor: f64, n_major: usize, n_minor: usize) -> TriMesh {
    build(torus_vertices(major, minor, n_major, n_minor), torus_faces(n_major, n_minor))
}

/// Intrinsically flat torus: the torus connectivity with edge lengths taken
/// from a periodic planar grid of cell size `hx × hy`. The returned positions
/// (a torus of revolution) carry no metric meaning.
pub fn flat_torus(n_major: usize, n_minor: usize, hx: f64, hy: f64) -> (TriMesh, GeometryCache) {
    let mesh = torus(2.0, 0.7, n_major, n_minor);
    let lengths = mesh
        .edges()
        .iter()
        .map(|&[a, b]| {
            let (ia, ja) = (a % n_major, a / n_major);
            let (ib, jb) = (b % n_major, b / n_major);
            let di = periodic_step(ia, ib, n_major);
            let dj = periodic_step(ja, jb, n_minor);
            ((di as f64 * hx).powi(2) + (dj as f64 * hy).powi(2)).sqrt()
        })
        .collect();
    let geom = GeometryCache::from_edge_lengths(&mesh, lengths).expect("flat grid cells are non-degenerate");
    (mesh, geom)
}

fn periodic_step(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(n - d)
}

/// Closed fan of six triangles around an apex, each with legs of unit length
/// and a tip angle of π/4; the apex carries an angle defect of π/2.
pub fn cone_fan() -> TriMesh {
    let tip = PI / 4.0;
    // rim points on a circle of radius r at height -z, consecutive ones
    // subtending `tip` at the apex
    let r2 = (1.0 - tip.cos()) / (1.0 - (PI / 3.0).cos());
    let r = r2.sqrt();
    let z = (1.0 - r2).sqrt();
    let mut vertices = vec![Point::zeros()];
    for m in 0..6 {
        let a = 2.0 * PI * m as f64 / 6.0;
        vertices.push(Point::new(r * a.cos(), r * a.sin(), -z));
    }
    let faces = (0..6).map(|m| [0, 1 + m, 1 + (m + 1) % 6]).collect();
    build(vertices, faces)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signed_volume(m: &TriMesh) -> f64 {
        m.faces()
            .iter()
            .map(|f| {
                let [a, b, c] = f.map(|v| m.vertices()[v]);
                a.dot(&b.cross(&c)) / 6.0
            })
            .sum()
    }

    #[test]
    fn closed_shapes_are_outward() {
        for m in [regular_tetrahedron(), icosahedron(), icosphere(2), torus(2.0, 0.5, 24, 12)] {
            assert!(signed_volume(&m) > 0.0);
            assert!(!m.has_boundary());
        }
        assert_eq!(torus(2.0, 0.5, 24, 12).euler_characteristic(), 0);
    }

    #[test]
    fn icosphere_counts() {
        assert_eq!(icosphere(0).num_vertices(), 12);
        assert_eq!(icosphere(2).num_vertices(), 162);
        assert_eq!(icosphere(3).num_vertices(), 642);
    }

    #[test]
    fn flat_meshes_face_up() {
        let cases = [
            (flat_disk(5, 0.3, 1), 1),
            (annulus(0.5, 1.0, 3, 24), 0),
            (jittered_square(8, 0.4, 3), 1),
            (grid(3, 2, 0.5), 1),
        ];
        for (m, chi) in cases {
            for f in m.faces() {
                let [a, b, c] = f.map(|v| m.vertices()[v]);
                assert!((b - a).cross(&(c - a)).z > 0.0);
            }
            assert_eq!(m.euler_characteristic(), chi);
        }
        assert_eq!(flat_disk(25, 0.0, 0).num_vertices(), 1951);
    }

    #[test]
    fn cone_fan_geometry() {
        let m = cone_fan();
        let g = GeometryCache::new(&m);
        assert!((g.angle_sums[0] - 1.5 * PI).abs() < 1e-13);
        for l in g.edge_lengths.iter().zip(m.edges()).filter(|(_, e)| e[0] == 0).map(|(l, _)| l) {
            assert!((l - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn flat_torus_has_flat_angle_sums() {
        let (_, g) = flat_torus(12, 8, 0.3, 0.25);
        for s in g.angle_sums {
            assert!((s - 2.0 * PI).abs() < 1e-12);
        }
    }
}
