//! Constrained minimization, smoothing, fairing flow and the generalized
//! eigensolver for `(Q, B)`.

mod eigen;

pub use eigen::{smallest_eigs, smallest_eigs_with, EigenMethod, EigenResult};

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Llt;
use faer::sparse::linalg::LltError;
use faer::{Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::curvature::{self, AngleDefects};
use crate::energy::{DimensionMismatch, EnergyKind, EnergyOperator};
use crate::geometry::GeometryCache;
use crate::mesh::{MeshError, Point, TriMesh};
use crate::sparse::SparseMatrix;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("InsufficientConstraints: {0}")]
    InsufficientConstraints(String),
    #[error("SolveFailure: {0}")]
    SolveFailure(String),
    #[error("NoConvergence: {0}")]
    NoConvergence(String),
    #[error("InvalidConstraint: {0}")]
    InvalidConstraint(String),
    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    DimensionMismatch(#[from] DimensionMismatch),
    #[error("flow step {step}: {source}")]
    Flow { step: usize, source: MeshError },
}

/// Reduced systems whose smallest generalized Rayleigh quotient falls below
/// this fraction of `‖Q‖_max / ‖B‖_max` are treated as singular.
pub const SINGULARITY_TOLERANCE: f64 = 1e-11;

/// Fixed per-vertex values.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraints {
    entries: Vec<(usize, f64)>,
}

impl Constraints {
    /// Validates that indices are unique and below `num_vertices`.
    pub fn new(entries: Vec<(usize, f64)>, num_vertices: usize) -> Result<Self, SolveError> {
        let mut seen = vec![false; num_vertices];
        for &(v, value) in &entries {
            if v >= num_vertices {
                return Err(SolveError::InvalidConstraint(format!("vertex {v} out of range (n = {num_vertices})")));
            }
            if seen[v] {
                return Err(SolveError::InvalidConstraint(format!("vertex {v} constrained twice")));
            }
            if !value.is_finite() {
                return Err(SolveError::InvalidConstraint(format!("vertex {v} has non-finite value")));
            }
            seen[v] = true;
        }
        Ok(Self { entries })
    }

    /// Samples `f` at the given vertices.
    pub fn sample(mesh: &TriMesh, vertices: &[usize], f: impl Fn(&Point) -> f64) -> Result<Self, SolveError> {
        let entries = vertices.iter().map(|&v| (v, mesh.vertices().get(v).map_or(f64::NAN, &f))).collect();
        Self::new(entries, mesh.num_vertices())
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Sparse Cholesky factor of a symmetric positive definite matrix.
pub struct SpdFactor {
    n: usize,
    llt: Llt<usize, f64>,
}

impl SpdFactor {
    pub fn new(a: &SparseMatrix) -> Result<Self, LltError> {
        let llt = a.to_faer().sp_cholesky(Side::Lower)?;
        Ok(Self { n: a.nrows(), llt })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = Mat::from_fn(self.n, 1, |i, _| rhs[i]);
        self.llt.solve_in_place(x.as_mut());
        (0..self.n).map(|i| x[(i, 0)]).collect()
    }

    /// Solves for every column of `rhs` in place.
    pub fn solve_mat(&self, rhs: &mut Mat<f64>) {
        self.llt.solve_in_place(rhs.as_mut());
    }
}

fn factor_error(e: LltError) -> SolveError {
    SolveError::SolveFailure(e.to_string())
}

fn check_len(expected: usize, got: usize) -> Result<(), SolveError> {
    if expected != got {
        return Err(DimensionMismatch { expected, got }.into());
    }
    Ok(())
}

/// Minimizes `½ uᵀ Q u` subject to the fixed values, eliminating the
/// constrained variables and solving `Q_ff u_f = -Q_fc u_c`.
pub fn min_with_fixed(op: &EnergyOperator, constraints: &Constraints) -> Result<Vec<f64>, SolveError> {
    let n = op.num_vertices();
    let mut u = vec![0.0; n];
    let mut fixed = vec![false; n];
    for &(v, value) in constraints.entries() {
        if v >= n {
            return Err(SolveError::InvalidConstraint(format!("vertex {v} out of range (n = {n})")));
        }
        u[v] = value;
        fixed[v] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&v| !fixed[v]).collect();
    if free.is_empty() {
        return Ok(u);
    }
    let known: Vec<usize> = (0..n).filter(|&v| fixed[v]).collect();
    let q_ff = op.q.submatrix(&free, &free);
    let u_c: Vec<f64> = known.iter().map(|&v| u[v]).collect();
    let rhs: Vec<f64> = op.q.submatrix(&free, &known).mul_vec(&u_c).iter().map(|x| -x).collect();

    let insufficient = || {
        SolveError::InsufficientConstraints(format!(
            "{} fixed values leave part of the {} null space free",
            constraints.len(),
            op.kind.name()
        ))
    };
    let factor = match SpdFactor::new(&q_ff) {
        Ok(f) => f,
        Err(LltError::Numeric(_)) => return Err(insufficient()),
        Err(e) => return Err(factor_error(e)),
    };
    let masses = op.masses();
    let b_f: Vec<f64> = free.iter().map(|&v| masses[v]).collect();
    if smallest_rayleigh_quotient(&factor, &q_ff, &b_f) <= SINGULARITY_TOLERANCE * op.scale() {
        return Err(insufficient());
    }
    let u_f = factor.solve(&rhs);
    if u_f.iter().any(|x| !x.is_finite()) {
        return Err(SolveError::SolveFailure("non-finite solution".into()));
    }
    for (&v, x) in free.iter().zip(u_f) {
        u[v] = x;
    }
    Ok(u)
}

/// Upper bound on the smallest eigenvalue of `(A, diag(b))` from a few steps
/// of inverse iteration; sharp when that eigenvalue is well separated.
fn smallest_rayleigh_quotient(factor: &SpdFactor, a: &SparseMatrix, b: &[f64]) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut x: Vec<f64> = (0..b.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut quotient = f64::INFINITY;
    for _ in 0..8 {
        let bx: Vec<f64> = x.iter().zip(b).map(|(x, b)| x * b).collect();
        x = factor.solve(&bx);
        let norm = x.iter().zip(b).map(|(x, b)| x * x * b).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return 0.0;
        }
        x.iter_mut().for_each(|v| *v /= norm);
        quotient = a.quadratic_form(&x);
    }
    quotient
}

/// Helmholtz-type smoothing: solves `(Q + αB) u = αB f`.
pub fn smooth(op: &EnergyOperator, f: &[f64], alpha: f64) -> Result<Vec<f64>, SolveError> {
    check_len(op.num_vertices(), f.len())?;
    let factor = smoothing_factor(op, alpha)?;
    Ok(factor.solve(&weighted_rhs(op, f, alpha)))
}

fn smoothing_factor(op: &EnergyOperator, alpha: f64) -> Result<SpdFactor, SolveError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(SolveError::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    SpdFactor::new(&op.q.add_scaled(1.0, &op.b, alpha)).map_err(factor_error)
}

fn weighted_rhs(op: &EnergyOperator, f: &[f64], alpha: f64) -> Vec<f64> {
    op.masses().iter().zip(f).map(|(m, f)| alpha * m * f).collect()
}

#[derive(Debug, Clone)]
pub struct FlowResult {
    pub mesh: TriMesh,
    /// Angle defects of the input mesh followed by those after each step.
    pub defects: Vec<AngleDefects>,
}

/// Repeated smoothing of the vertex coordinates. The operator is rebuilt on
/// the current surface before every step.
pub fn fairing_flow(mesh: &TriMesh, kind: EnergyKind, alpha: f64, steps: usize) -> Result<FlowResult, SolveError> {
    if steps == 0 {
        return Err(SolveError::InvalidParameter("steps must be at least 1".into()));
    }
    let mut current = mesh.clone();
    let mut defects = vec![curvature::angle_defects(&current, &GeometryCache::new(&current))];
    for step in 1..=steps {
        let op = EnergyOperator::build(&current, kind);
        let factor = smoothing_factor(&op, alpha)?;
        let coords: Vec<Vec<f64>> =
            (0..3).map(|axis| factor.solve(&weighted_rhs(&op, &current.coordinate(axis), alpha))).collect();
        let positions = (0..current.num_vertices()).map(|i| Point::new(coords[0][i], coords[1][i], coords[2][i])).collect();
        current = current.with_positions(positions).map_err(|source| SolveError::Flow { step, source })?;
        defects.push(curvature::angle_defects(&current, &GeometryCache::new(&current)));
    }
    Ok(FlowResult { mesh: current, defects })
}

/// `√((u − v)ᵀ B (u − v))`.
pub fn l2_distance(masses: &[f64], u: &[f64], v: &[f64]) -> f64 {
    masses.iter().zip(u.iter().zip(v)).map(|(m, (a, b))| m * (a - b) * (a - b)).sum::<f64>().sqrt()
}
