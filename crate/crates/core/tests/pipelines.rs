mod common;

use std::fs;

use tempfile::TempDir;

use curved_hessian::convergence::{self, ForwardProblem, RefinementStrategy};
use curved_hessian::io::{self, FieldExport, FieldFormat, MeshFormat};
use curved_hessian::solve::{self, Constraints};
use curved_hessian::{shapes, EnergyKind, EnergyOperator, TriMesh};

#[test]
fn field_files_round_trip() {
    let dir = TempDir::new().unwrap();
    let mesh = shapes::perturbed_sphere(1, 0.2, 3);
    let values: Vec<f64> = mesh.vertices().iter().map(|p| (3.0 * p.x).exp() / 7.0 - p.y * 1e-9).collect();
    let export = FieldExport::new(&mesh).with_column("u", values.clone()).unwrap();

    let csv = dir.path().join("u.csv");
    io::save_field(&export, &csv, FieldFormat::Csv).unwrap();
    let table = io::load_field(&csv).unwrap();
    assert_eq!(table.positions, mesh.vertices());
    assert_eq!(table.column("u").unwrap(), values.as_slice());

    let ply = dir.path().join("u.ply");
    io::save_field(&export, &ply, FieldFormat::Ply).unwrap();
    let reread = io::read_mesh(&ply).unwrap();
    assert_eq!(reread.vertices(), mesh.vertices());
    assert_eq!(reread.faces(), mesh.faces());
}

#[test]
fn mesh_formats_agree() {
    let dir = TempDir::new().unwrap();
    let mesh = shapes::icosahedron();
    let mut obj = String::new();
    let mut off = format!("OFF\n{} {} 0\n", mesh.num_vertices(), mesh.num_faces());
    for p in mesh.vertices() {
        obj += &format!("v {:e} {:e} {:e}\n", p.x, p.y, p.z);
        off += &format!("{:e} {:e} {:e}\n", p.x, p.y, p.z);
    }
    for f in mesh.faces() {
        obj += &format!("f {}/1 {}/1 {}/1\n", f[0] + 1, f[1] + 1, f[2] + 1);
        off += &format!("3 {} {} {}\n", f[0], f[1], f[2]);
    }
    fs::write(dir.path().join("m.obj"), obj).unwrap();
    fs::write(dir.path().join("m.off"), off).unwrap();
    for name in ["m.obj", "m.off"] {
        let m = io::read_mesh(dir.path().join(name)).unwrap();
        assert_eq!(m.vertices(), mesh.vertices());
        assert_eq!(m.faces(), mesh.faces());
    }
    assert!(MeshFormat::from_path(&dir.path().join("m.stl")).is_err());
}

#[test]
fn operators_round_trip_through_matrix_market() {
    let dir = TempDir::new().unwrap();
    let op = EnergyOperator::curved_hessian(&shapes::perturbed_sphere(2, 0.1, 8));
    let crof = op.crof.as_ref().unwrap();
    for (name, m) in [("q", &op.q), ("d", &crof.d), ("k", &crof.k)] {
        let path = dir.path().join(format!("{name}.mtx"));
        io::save_matrix(m, &path).unwrap();
        assert_eq!(&io::load_matrix(&path).unwrap(), m, "{name}");
    }
}

#[test]
fn constraints_file_drives_interpolation() {
    let dir = TempDir::new().unwrap();
    let mesh = shapes::flat_disk(6, 0.3, 2);
    let path = dir.path().join("c.csv");
    fs::write(&path, "vertex,value\n0,1.0\n# ring two\n10,0.5\n30,-0.25\n50,2.0\n").unwrap();
    let constraints = Constraints::new(io::load_constraints(&path).unwrap(), mesh.num_vertices()).unwrap();
    for kind in [EnergyKind::CurvedHessian, EnergyKind::SquaredLaplacian] {
        let u = solve::min_with_fixed(&EnergyOperator::build(&mesh, kind), &constraints).unwrap();
        for &(v, x) in constraints.entries() {
            assert_eq!(u[v], x);
        }
    }
}

fn centroid(mesh: &TriMesh, masses: &[f64]) -> [f64; 3] {
    let total: f64 = masses.iter().sum();
    std::array::from_fn(|axis| mesh.coordinate(axis).iter().zip(masses).map(|(x, m)| x * m).sum::<f64>() / total)
}

#[test]
fn fairing_flow_rounds_a_bumpy_sphere() {
    let mesh = shapes::perturbed_sphere(3, 0.08, 13);
    let masses = EnergyOperator::curved_hessian(&mesh).masses();
    let before = centroid(&mesh, &masses);
    let result = solve::fairing_flow(&mesh, EnergyKind::CurvedHessian, 1e3, 3).unwrap();
    assert_eq!(result.defects.len(), 4);
    // curvature per unit area evens out
    let spread = |mesh: &TriMesh, kappa: &[f64]| {
        let masses = EnergyOperator::curved_hessian(mesh).masses();
        let density: Vec<f64> = kappa.iter().zip(&masses).map(|(k, m)| k / m).collect();
        let mean = density.iter().sum::<f64>() / density.len() as f64;
        (density.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / density.len() as f64).sqrt()
    };
    let first = spread(&mesh, &result.defects[0].kappa);
    let last = spread(&result.mesh, &result.defects[3].kappa);
    assert!(last < 0.5 * first, "{first} -> {last}");
    // Gauss-Bonnet holds throughout; the first step keeps the weighted centroid
    for d in &result.defects {
        assert!((d.total() - 4.0 * std::f64::consts::PI).abs() < 1e-10);
    }
    let one = solve::fairing_flow(&mesh, EnergyKind::CurvedHessian, 1e3, 1).unwrap();
    let after = centroid(&one.mesh, &masses);
    for axis in 0..3 {
        assert!((after[axis] - before[axis]).abs() < 1e-8);
    }
}

#[test]
fn irregular_refinement_is_reported_not_asserted() {
    let problem = ForwardProblem::new("x^2", "x^2").unwrap();
    let strategy = RefinementStrategy::Jittered { amount: 0.8, seed: 4 };
    let (record, _) = convergence::forward_energy_error(&problem, 4, strategy, EnergyKind::CurvedHessian).unwrap();
    assert_eq!(record.levels.len(), 4);
    assert!(record.slope.is_finite());
    assert!(record.strategy.starts_with("jittered"));
}

#[test]
fn both_energies_refine_on_the_sphere() {
    let sphere = convergence::EigenProblem::unit_sphere();
    for kind in [EnergyKind::CurvedHessian, EnergyKind::SquaredLaplacian] {
        let record = convergence::eigenvalue_error(&sphere, 1, 3, RefinementStrategy::Midpoint, kind).unwrap();
        assert!(record.is_monotone_decreasing(), "{kind:?}: {:?}", record.errors());
    }
}
