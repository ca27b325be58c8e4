//! Refinement studies: forward energies on Monge patches, eigenvalues on
//! analytic surfaces and self-convergence of interpolation problems.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::energy::{EnergyKind, EnergyOperator};
use crate::mesh::{MeshError, Point, TriMesh};
use crate::monge::{smooth_energy_monge, PolynomialField};
use crate::quadrature::TriangleRule;
use crate::refine::{self, BoundaryRule, Refinement, Scheme};
use crate::shapes;
use crate::solve::{self, Constraints, SolveError};
use crate::sparse::SparseMatrix;
use crate::surface::{project_to_surface, MongePatch, SmoothSurface, SurfaceError};

#[derive(Debug, Error)]
pub enum ConvergenceError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("reference quadrature disagrees: degree 4 gives {deg4}, degree 7 gives {deg7}")]
    Quadrature { deg4: f64, deg7: f64 },
    #[error("{0}")]
    Setup(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RefinementStrategy {
    Loop(BoundaryRule),
    Midpoint,
    /// Midpoint split with new vertices slid along their edge by up to
    /// `amount` times the half-length; triangle regularity is not maintained.
    Jittered { amount: f64, seed: u64 },
}

impl RefinementStrategy {
    pub fn name(&self) -> String {
        match self {
            RefinementStrategy::Loop(BoundaryRule::Fixed) => "loop-fixed-boundary".into(),
            RefinementStrategy::Loop(BoundaryRule::SmoothCurve) => "loop-smooth-boundary".into(),
            RefinementStrategy::Midpoint => "midpoint".into(),
            RefinementStrategy::Jittered { amount, seed } => format!("jittered-{amount}-seed{seed}"),
        }
    }

    fn apply(&self, mesh: &TriMesh, step: usize) -> Result<Refinement, MeshError> {
        match *self {
            RefinementStrategy::Loop(rule) => refine::subdivide(mesh, Scheme::Loop(rule)),
            RefinementStrategy::Midpoint => refine::subdivide(mesh, Scheme::Midpoint),
            RefinementStrategy::Jittered { amount, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(step as u64));
                let nv = mesh.num_vertices();
                let triplets: Vec<(usize, usize, f64)> = (0..nv)
                    .map(|v| (v, v, 1.0))
                    .chain(mesh.edges().iter().enumerate().flat_map(|(e, &[a, b])| {
                        let s = 0.5 + 0.5 * amount * rng.random_range(-1.0..1.0);
                        [(nv + e, a, 1.0 - s), (nv + e, b, s)]
                    }))
                    .collect();
                let stencil = SparseMatrix::from_triplets(nv + mesh.num_edges(), nv, triplets);
                let coords: [Vec<f64>; 3] = std::array::from_fn(|axis| stencil.mul_vec(&mesh.coordinate(axis)));
                let vertices = (0..stencil.nrows()).map(|i| Point::new(coords[0][i], coords[1][i], coords[2][i])).collect();
                let refined = TriMesh::new(vertices, refine::split_faces(mesh))?;
                Ok(Refinement { mesh: refined, stencil })
            }
        }
    }
}

/// Refines `base` `count` times, projecting onto `surface` after every step.
/// Entry `i` is the mesh after `i` steps with the stencil that produced it.
pub fn refinement_sequence(
    base: &TriMesh,
    strategy: RefinementStrategy,
    surface: Option<&SmoothSurface>,
    count: usize,
) -> Result<Vec<(TriMesh, Option<SparseMatrix>)>, ConvergenceError> {
    let mut base = base.clone();
    if let Some(s) = surface {
        base = project_to_surface(&base, s)?;
    }
    let mut out = vec![(base, None)];
    for step in 1..=count {
        let r = strategy.apply(&out[step - 1].0, step)?;
        let mesh = match surface {
            Some(s) => project_to_surface(&r.mesh, s)?,
            None => r.mesh,
        };
        out.push((mesh, Some(r.stencil)));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// `√((u−u*)ᵀB(u−u*))` against the finest level.
    L2SelfConvergence,
    /// `|E_h − E| / E` against the smooth energy.
    RelativeEnergy,
    /// Largest relative eigenvalue error over the tracked indices.
    RelativeEigenvalue,
}

impl ErrorKind {
    pub fn name(&self) -> &'static str {
        match self {
            ErrorKind::L2SelfConvergence => "l2-self-convergence",
            ErrorKind::RelativeEnergy => "relative-energy",
            ErrorKind::RelativeEigenvalue => "relative-eigenvalue",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelResult {
    pub level: usize,
    pub num_vertices: usize,
    /// Mean edge length.
    pub h: f64,
    pub error: f64,
    /// Tracked eigenvalues, for spectral studies.
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceRecord {
    pub problem: String,
    pub strategy: String,
    pub energy: EnergyKind,
    pub error_kind: ErrorKind,
    pub levels: Vec<LevelResult>,
    /// Least-squares slope of `log(error)` against `log(h)`.
    pub slope: f64,
}

impl ConvergenceRecord {
    fn new(
        problem: String,
        strategy: RefinementStrategy,
        energy: EnergyKind,
        error_kind: ErrorKind,
        levels: Vec<LevelResult>,
    ) -> Result<Self, ConvergenceError> {
        if levels.windows(2).any(|w| w[1].h >= w[0].h) {
            return Err(ConvergenceError::Setup("mean edge length must decrease with every level".into()));
        }
        let points: Vec<(f64, f64)> = levels.iter().map(|l| (l.h, l.error)).collect();
        let slope = fit_log_slope(&points);
        Ok(Self { problem, strategy: strategy.name(), energy, error_kind, levels, slope })
    }

    pub fn errors(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.error).collect()
    }

    pub fn is_monotone_decreasing(&self) -> bool {
        self.levels.windows(2).all(|w| w[1].error < w[0].error)
    }

    /// CSV with one row per level: `level,h,num_vertices,error`.
    pub fn write_csv(&self, out: impl Write) -> Result<(), ConvergenceError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["level", "h", "num_vertices", "error"]).map_err(csv_error)?;
        for l in &self.levels {
            w.write_record([l.level.to_string(), format!("{:.16e}", l.h), l.num_vertices.to_string(), format!("{:.16e}", l.error)])
                .map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<(), ConvergenceError> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

fn csv_error(e: csv::Error) -> ConvergenceError {
    ConvergenceError::Io(std::io::Error::other(e))
}

/// Least-squares slope of `log y` against `log x`; NaN for fewer than two points.
pub fn fit_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return f64::NAN;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Smooth reference energy with its two quadrature evaluations.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceEnergy {
    pub deg4: f64,
    pub deg7: f64,
}

impl ReferenceEnergy {
    pub fn relative_disagreement(&self) -> f64 {
        ((self.deg4 - self.deg7) / self.deg7).abs()
    }
}

/// Forward problem: discrete energy of `f` sampled on refined meshes of a
/// Monge patch over a rectangle, against the smooth energy.
#[derive(Debug, Clone)]
pub struct ForwardProblem {
    pub patch: MongePatch,
    pub field: PolynomialField,
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    /// Cells per side of the coarsest structured grid.
    pub coarse_cells: usize,
    /// Cells per side of the parameter triangulation used for the reference quadrature.
    pub quadrature_cells: usize,
}

impl ForwardProblem {
    pub fn new(z: &str, f: &str) -> Result<Self, ConvergenceError> {
        let parse = |s: &str| s.parse().map_err(|e: String| ConvergenceError::Setup(e));
        Ok(Self {
            patch: MongePatch::new(parse(z)?),
            field: PolynomialField::new(parse(f)?),
            lo: [-1.0, -1.0],
            hi: [1.0, 1.0],
            coarse_cells: 4,
            quadrature_cells: 64,
        })
    }

    pub fn reference_energy(&self) -> ReferenceEnergy {
        let n = self.quadrature_cells;
        let domain = shapes::rect_grid(n, n, self.lo, self.hi, |_, _| 0.0);
        ReferenceEnergy {
            deg4: smooth_energy_monge(&self.patch, &self.field, &domain, &TriangleRule::degree4()),
            deg7: smooth_energy_monge(&self.patch, &self.field, &domain, &TriangleRule::degree7()),
        }
    }

    pub fn coarse_mesh(&self) -> TriMesh {
        let n = self.coarse_cells;
        shapes::rect_grid(n, n, self.lo, self.hi, |x, y| self.patch.z.eval(x, y))
    }
}

/// Records levels `0..levels` (the coarse grid and `levels − 1` refinements).
pub fn forward_energy_error(
    problem: &ForwardProblem,
    levels: usize,
    strategy: RefinementStrategy,
    kind: EnergyKind,
) -> Result<(ConvergenceRecord, ReferenceEnergy), ConvergenceError> {
    let reference = problem.reference_energy();
    if reference.relative_disagreement() > 1e-8 {
        return Err(ConvergenceError::Quadrature { deg4: reference.deg4, deg7: reference.deg7 });
    }
    let exact = reference.deg4;
    let surface = SmoothSurface::Monge(problem.patch.clone());
    let meshes = refinement_sequence(&problem.coarse_mesh(), strategy, Some(&surface), levels.saturating_sub(1))?;
    let results = meshes
        .iter()
        .enumerate()
        .map(|(level, (mesh, _))| {
            let op = EnergyOperator::build(mesh, kind);
            let f: Vec<f64> = mesh.vertices().iter().map(|p| problem.field.f.eval(p.x, p.y)).collect();
            let e = op.energy(&f).expect("field has one value per vertex");
            LevelResult {
                level,
                num_vertices: mesh.num_vertices(),
                h: mesh.mean_edge_length(),
                error: ((e - exact) / exact).abs(),
                eigenvalues: vec![],
            }
        })
        .collect();
    let name = format!("forward z = {}, f = {}", problem.patch.z, problem.field.f);
    Ok((ConvergenceRecord::new(name, strategy, kind, ErrorKind::RelativeEnergy, results)?, reference))
}

/// Spectral problem: eigenvalues `indices` (zero-based, ascending) of `(Q, B)`
/// against a known value on refinements of `base` projected to `surface`.
#[derive(Debug, Clone)]
pub struct EigenProblem {
    pub surface: SmoothSurface,
    pub base: TriMesh,
    pub indices: std::ops::Range<usize>,
    pub exact: f64,
}

impl EigenProblem {
    /// First nonzero biharmonic eigenvalue `(l(l+1))² = 4` on the unit sphere,
    /// tracked over its three-dimensional eigenspace.
    pub fn unit_sphere() -> Self {
        Self { surface: SmoothSurface::unit_sphere(), base: shapes::icosahedron(), indices: 1..4, exact: 4.0 }
    }
}

/// Records refinement levels `first..=last` of the problem's base mesh.
pub fn eigenvalue_error(
    problem: &EigenProblem,
    first: usize,
    last: usize,
    strategy: RefinementStrategy,
    kind: EnergyKind,
) -> Result<ConvergenceRecord, ConvergenceError> {
    let meshes = refinement_sequence(&problem.base, strategy, Some(&problem.surface), last)?;
    let k = problem.indices.end;
    let mut results = Vec::new();
    for (level, (mesh, _)) in meshes.iter().enumerate().skip(first) {
        let op = EnergyOperator::build(mesh, kind);
        let eig = solve::smallest_eigs(&op, k)?;
        let tracked = eig.values[problem.indices.clone()].to_vec();
        let error = tracked.iter().map(|v| ((v - problem.exact) / problem.exact).abs()).fold(0.0, f64::max);
        results.push(LevelResult {
            level,
            num_vertices: mesh.num_vertices(),
            h: mesh.mean_edge_length(),
            error,
            eigenvalues: tracked,
        });
    }
    let name = format!("eigenvalues {:?} on {} (exact {})", problem.indices, problem.surface, problem.exact);
    ConvergenceRecord::new(name, strategy, kind, ErrorKind::RelativeEigenvalue, results)
}

/// Interpolation with values fixed at coarse vertices (whose indices survive
/// refinement), solved on levels `0..=levels`. Each coarse solution is
/// prolonged to the finest level through the refinement stencils and compared
/// in the finest lumped mass norm.
pub fn bvp_self_convergence(
    coarse: &TriMesh,
    constraints: &Constraints,
    levels: usize,
    strategy: RefinementStrategy,
    surface: Option<&SmoothSurface>,
    kind: EnergyKind,
) -> Result<ConvergenceRecord, ConvergenceError> {
    if levels < 2 {
        return Err(ConvergenceError::Setup("self-convergence needs at least two levels below the finest".into()));
    }
    let meshes = refinement_sequence(coarse, strategy, surface, levels)?;
    let finest = &meshes[levels].0;
    let finest_op = EnergyOperator::build(finest, kind);
    let masses = finest_op.masses();
    let reference = solve::min_with_fixed(&finest_op, constraints)?;

    let mut results = Vec::new();
    for (level, (mesh, _)) in meshes.iter().enumerate().take(levels) {
        let op = EnergyOperator::build(mesh, kind);
        let mut u = solve::min_with_fixed(&op, constraints)?;
        for (_, stencil) in &meshes[level + 1..] {
            u = stencil.as_ref().expect("refined levels carry a stencil").mul_vec(&u);
        }
        results.push(LevelResult {
            level,
            num_vertices: mesh.num_vertices(),
            h: mesh.mean_edge_length(),
            error: solve::l2_distance(&masses, &u, &reference),
            eigenvalues: vec![],
        });
    }
    let name = format!("interpolation self-convergence, {} constraints", constraints.len());
    ConvergenceRecord::new(name, strategy, kind, ErrorKind::L2SelfConvergence, results)
}
