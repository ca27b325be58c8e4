use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use curved_hessian::io::{load_field, load_matrix};
use curved_hessian::{shapes, TriMesh};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_curved-hessian"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_obj(mesh: &TriMesh, path: &Path) {
    let mut s = String::new();
    for p in mesh.vertices() {
        writeln!(s, "v {:.17e} {:.17e} {:.17e}", p.x, p.y, p.z).unwrap();
    }
    for f in mesh.faces() {
        writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1).unwrap();
    }
    fs::write(path, s).unwrap();
}

fn setup(mesh: &TriMesh) -> (TempDir, PathBuf) {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("mesh.obj");
    write_obj(mesh, &path);
    (dir, path)
}

/// Value printed after `key` on the first line containing it.
fn printed(out: &str, key: &str) -> f64 {
    let line = out.lines().find(|l| l.contains(key)).unwrap_or_else(|| panic!("no '{key}' in\n{out}"));
    let rest = &line[line.find(key).unwrap() + key.len()..];
    rest.split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn assemble_tetrahedron_writes_six_matrices() {
    let (dir, mesh) = setup(&shapes::regular_tetrahedron());
    let o = run(dir.path(), &["assemble", "--mesh", mesh.to_str().unwrap(), "--energy", "curved-hessian", "--out-dir", "m"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut names: Vec<String> = fs::read_dir(dir.path().join("m")).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names, ["B.mtx", "D.mtx", "K.mtx", "L.mtx", "M.mtx", "Q.mtx"]);
    let q = load_matrix(dir.path().join("m/Q.mtx")).unwrap();
    assert_eq!((q.nrows(), q.ncols()), (4, 4));
    assert!(stdout(&o).contains("Q: 4x4"));
}

#[test]
fn flat_grid_has_empty_curvature_matrix() {
    let (dir, mesh) = setup(&shapes::grid(4, 3, 0.5));
    let o = run(dir.path(), &["assemble", "--mesh", mesh.to_str().unwrap(), "--out-dir", "m"]);
    assert!(o.status.success());
    let k = load_matrix(dir.path().join("m/K.mtx")).unwrap();
    assert_eq!(k.nnz(), 0);
    assert!(k.nrows() > 0);
}

#[test]
fn non_manifold_input_exits_with_code_one() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.obj");
    fs::write(&path, "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 -1 0\nv 1 1 1\nf 1 2 3\nf 2 1 4\nf 1 2 5\n").unwrap();
    let o = run(dir.path(), &["assemble", "--mesh", path.to_str().unwrap(), "--out-dir", "m"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("NonManifoldEdge"));
}

#[test]
fn interpolation_reproduces_linear_data() {
    let m = shapes::jittered_square(8, 0.3, 3);
    let (dir, mesh) = setup(&m);
    let f = |v: usize| {
        let p = m.vertices()[v];
        0.5 + 2.0 * p.x - 1.5 * p.y
    };
    let rows: String = [0, 40, 75].iter().map(|&v| format!("{v},{:.17e}\n", f(v))).collect();
    fs::write(dir.path().join("c.csv"), format!("vertex,value\n{rows}")).unwrap();
    let o = run(dir.path(), &["interpolate", "--mesh", mesh.to_str().unwrap(), "--constraints", "c.csv", "--out", "u"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("u.ply").exists());
    let table = load_field(dir.path().join("u.csv")).unwrap();
    let u = table.column("value").unwrap();
    let dev = (0..m.num_vertices()).map(|v| (u[v] - f(v)).abs()).fold(0.0, f64::max);
    assert!(dev <= 1e-8, "max deviation {dev}");
}

#[test]
fn two_constraints_exit_with_code_two() {
    let (dir, mesh) = setup(&shapes::jittered_square(6, 0.2, 1));
    fs::write(dir.path().join("c.csv"), "0,1.0\n10,2.0\n").unwrap();
    let o = run(dir.path(), &["interpolate", "--mesh", mesh.to_str().unwrap(), "--constraints", "c.csv", "--out", "u"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("InsufficientConstraints"));
}

#[test]
fn energies_give_different_interpolants() {
    let (dir, mesh) = setup(&shapes::annulus(0.4, 1.0, 4, 16));
    fs::write(dir.path().join("c.csv"), "0,1.0\n7,-1.0\n20,0.5\n33,2.0\n").unwrap();
    let mut fields = Vec::new();
    for energy in ["curved-hessian", "squared-laplacian"] {
        let o = run(dir.path(), &["interpolate", "--mesh", mesh.to_str().unwrap(), "--constraints", "c.csv", "--energy", energy, "--out", energy]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        fields.push(load_field(dir.path().join(format!("{energy}.csv"))).unwrap().column("value").unwrap().to_vec());
    }
    let diff = fields[0].iter().zip(&fields[1]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(diff > 1e-3, "{diff}");
}

#[test]
fn smoothing_with_huge_alpha_keeps_data() {
    let (dir, mesh) = setup(&shapes::perturbed_sphere(2, 0.05, 4));
    let o = run(dir.path(), &["smooth", "--mesh", mesh.to_str().unwrap(), "--alpha", "1e8", "--out", "s"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(printed(&stdout(&o), "max diff") < 1e-3);
}

#[test]
fn flat_disk_has_three_zero_eigenvalues() {
    let (dir, mesh) = setup(&shapes::flat_disk(8, 0.2, 5));
    let o = run(dir.path(), &["eigs", "--mesh", mesh.to_str().unwrap(), "-k", "6", "--out", "e.csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let scale = printed(&out, "scale");
    assert_eq!(printed(&out, "kernel dimension"), 3.0);
    let csv = fs::read_to_string(dir.path().join("e.csv")).unwrap();
    let values: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(values.len(), 6);
    assert!(values[..3].iter().all(|v| v.abs() < 1e-8 * scale));
    assert!(values[3] > 1e-8 * scale);
}

#[test]
fn forward_convergence_slope() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["converge", "--problem", "forward", "--surface", "monge:x^2", "--levels", "4", "--out", "r.csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(printed(&stdout(&o), "slope") >= 0.8);
    let csv = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("level,h,num_vertices,error"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn curvature_and_flow() {
    let (dir, mesh) = setup(&shapes::icosahedron());
    let o = run(dir.path(), &["curvature", "--mesh", mesh.to_str().unwrap(), "--out", "k"]);
    assert!(o.status.success());
    assert!((printed(&stdout(&o), "total curvature") - 4.0 * std::f64::consts::PI).abs() < 1e-12);

    let (dir, mesh) = setup(&shapes::perturbed_sphere(2, 0.1, 9));
    let o = run(dir.path(), &["flow", "--mesh", mesh.to_str().unwrap(), "--alpha", "1e4", "--steps", "2", "--out", "f"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = load_field(dir.path().join("f.csv")).unwrap();
    assert_eq!(table.positions.len(), 162);
    assert!(table.column("kappa").is_some());
}

#[test]
fn outputs_are_deterministic() {
    let (dir, mesh) = setup(&shapes::perturbed_sphere(2, 0.1, 2));
    fs::write(dir.path().join("c.csv"), "0,1\n5,2\n9,3\n30,-1\n").unwrap();
    for out in ["a", "b"] {
        let o = run(dir.path(), &["interpolate", "--mesh", mesh.to_str().unwrap(), "--constraints", "c.csv", "--out", out]);
        assert!(o.status.success());
        let o = run(dir.path(), &["assemble", "--mesh", mesh.to_str().unwrap(), "--out-dir", &format!("{out}_m")]);
        assert!(o.status.success());
    }
    assert_eq!(fs::read(dir.path().join("a.ply")).unwrap(), fs::read(dir.path().join("b.ply")).unwrap());
    for name in ["L", "M", "D", "K", "B", "Q"] {
        let read = |d: &str| fs::read(dir.path().join(format!("{d}/{name}.mtx"))).unwrap();
        assert_eq!(read("a_m"), read("b_m"), "{name}");
    }
}

#[test]
fn bad_arguments_exit_with_code_one() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(dir.path(), &["eigs", "--mesh", "missing.obj"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["smooth", "--alpha"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["converge", "--problem", "forward", "--surface", "sphere:1"]).status.code(), Some(1));
}
