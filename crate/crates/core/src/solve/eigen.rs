use faer::{Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{SolveError, SpdFactor};
use crate::energy::EnergyOperator;
use crate::sparse::SparseMatrix;

/// Largest problem solved by dense diagonalization under [`EigenMethod::Auto`].
pub const DENSE_LIMIT: usize = 3000;

const MAX_ITERATIONS: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMethod {
    /// Dense up to [`DENSE_LIMIT`] unknowns, shift-invert above.
    Auto,
    Dense,
    /// Block subspace iteration on `(Q − σB)⁻¹ B` with Rayleigh–Ritz.
    ShiftInvert,
}

/// Smallest eigenpairs of `Q x = μ B x`, ascending and B-orthonormal.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    /// `‖Q‖_max / ‖B‖_max`; eigenvalues below `1e-8 · scale` count as zero.
    pub scale: f64,
}

impl EigenResult {
    /// Number of eigenvalues below `1e-8 · scale`.
    pub fn kernel_dimension(&self) -> usize {
        self.values.iter().filter(|&&v| v < 1e-8 * self.scale).count()
    }

    /// `‖Q x − μ B x‖₂ / ‖x‖₂` for each pair.
    pub fn residuals(&self, q: &SparseMatrix, b: &SparseMatrix) -> Vec<f64> {
        self.values
            .iter()
            .zip(&self.vectors)
            .map(|(&mu, x)| {
                let qx = q.mul_vec(x);
                let bx = b.mul_vec(x);
                let r = qx.iter().zip(&bx).map(|(a, b)| (a - mu * b).powi(2)).sum::<f64>().sqrt();
                r / x.iter().map(|v| v * v).sum::<f64>().sqrt()
            })
            .collect()
    }
}

pub fn smallest_eigs(op: &EnergyOperator, k: usize) -> Result<EigenResult, SolveError> {
    smallest_eigs_with(op, k, EigenMethod::Auto)
}

pub fn smallest_eigs_with(op: &EnergyOperator, k: usize, method: EigenMethod) -> Result<EigenResult, SolveError> {
    let n = op.num_vertices();
    if k == 0 || k > n {
        return Err(SolveError::InvalidParameter(format!("k = {k} must lie in 1..={n}")));
    }
    let masses = op.masses();
    let scale = op.scale();
    let dense = match method {
        EigenMethod::Auto => n <= DENSE_LIMIT,
        EigenMethod::Dense => true,
        EigenMethod::ShiftInvert => false,
    };
    let (values, vectors) = if dense || k + 1 >= n {
        dense_eigs(&op.q, &masses, k)?
    } else {
        shift_invert(&op.q, &op.b, &masses, k, scale)?
    };
    Ok(EigenResult { values, vectors, scale })
}

fn dense_eigs(q: &SparseMatrix, masses: &[f64], k: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>), SolveError> {
    let inv_sqrt: Vec<f64> = masses.iter().map(|m| 1.0 / m.sqrt()).collect();
    let c = q.scale_rows(&inv_sqrt).scale_cols(&inv_sqrt).to_dense();
    let evd = c.self_adjoint_eigen(Side::Lower).map_err(|e| SolveError::NoConvergence(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let values = (0..k).map(|j| s[j]).collect();
    let vectors = (0..k).map(|j| (0..masses.len()).map(|i| u[(i, j)] * inv_sqrt[i]).collect()).collect();
    Ok((values, vectors))
}

/// `Xᵀ A Y` for tall dense blocks.
fn block_product(x: &Mat<f64>, ay: &Mat<f64>) -> Mat<f64> {
    x.transpose() * ay
}

fn sparse_times(a: &SparseMatrix, x: &Mat<f64>) -> Mat<f64> {
    let n = a.nrows();
    let mut out = Mat::<f64>::zeros(n, x.ncols());
    for j in 0..x.ncols() {
        let col: Vec<f64> = (0..x.nrows()).map(|i| x[(i, j)]).collect();
        for (i, v) in a.mul_vec(&col).into_iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    out
}

fn symmetric_eig(a: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>), SolveError> {
    let sym = Mat::from_fn(a.nrows(), a.ncols(), |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let evd = sym.self_adjoint_eigen(Side::Lower).map_err(|e| SolveError::NoConvergence(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    Ok(((0..a.nrows()).map(|i| s[i]).collect(), evd.U().to_owned()))
}

/// Returns a B-orthonormal basis of the column span of `y`, dropping
/// directions lost to roundoff; `None` if fewer than `min_rank` survive.
/// Columns are normalized first so that their very different magnitudes
/// under shift-invert do not swamp the Gram matrix.
fn b_orthonormalize(y: &Mat<f64>, masses: &[f64], min_rank: usize) -> Option<Mat<f64>> {
    let (n, p) = (y.nrows(), y.ncols());
    let norms: Vec<f64> = (0..p).map(|j| (0..n).map(|i| masses[i] * y[(i, j)] * y[(i, j)]).sum::<f64>().sqrt()).collect();
    let y = Mat::from_fn(n, p, |i, j| if norms[j] > 0.0 { y[(i, j)] / norms[j] } else { 0.0 });
    let by = Mat::from_fn(n, p, |i, j| masses[i] * y[(i, j)]);
    let (g_vals, g_vecs) = symmetric_eig(&block_product(&y, &by)).ok()?;
    let g_max = g_vals.iter().fold(0.0f64, |m, v| m.max(*v));
    let keep: Vec<usize> = (0..p).filter(|&j| g_vals[j] > 1e-12 * g_max).collect();
    if keep.len() < min_rank {
        return None;
    }
    let basis = Mat::from_fn(p, keep.len(), |i, c| g_vecs[(i, keep[c])] / g_vals[keep[c]].sqrt());
    Some(&y * &basis)
}

fn shift_invert(
    q: &SparseMatrix,
    b: &SparseMatrix,
    masses: &[f64],
    k: usize,
    scale: f64,
) -> Result<(Vec<f64>, Vec<Vec<f64>>), SolveError> {
    let n = masses.len();
    let p = (2 * k).max(k + 8).min(n);
    let sigma = -1e-8 * scale;
    let factor = SpdFactor::new(&q.add_scaled(1.0, b, -sigma)).map_err(|e| SolveError::SolveFailure(e.to_string()))?;
    let tolerance = 1e-8 * q.max_abs();

    let mut rng = ChaCha8Rng::seed_from_u64(0xe16e);
    let mut x = Mat::from_fn(n, p, |_, _| rng.random_range(-1.0..1.0));
    for _ in 0..MAX_ITERATIONS {
        let mut y = Mat::from_fn(n, p, |i, j| masses[i] * x[(i, j)]);
        factor.solve_mat(&mut y);

        let Some(z) = b_orthonormalize(&y, masses, k).and_then(|z| b_orthonormalize(&z, masses, k)) else {
            return Err(SolveError::NoConvergence("iteration block collapsed".into()));
        };

        let (theta, w) = symmetric_eig(&block_product(&z, &sparse_times(q, &z)))?;
        x = &z * &w;

        let values: Vec<f64> = theta[..k].to_vec();
        let vectors: Vec<Vec<f64>> = (0..k).map(|j| (0..n).map(|i| x[(i, j)]).collect()).collect();
        let converged = values.iter().zip(&vectors).all(|(&mu, v)| {
            let qv = q.mul_vec(v);
            let r = qv.iter().zip(v.iter().zip(masses)).map(|(a, (x, m))| (a - mu * m * x).powi(2)).sum::<f64>().sqrt();
            r <= tolerance * v.iter().map(|t| t * t).sum::<f64>().sqrt()
        });
        if converged {
            return Ok((values, vectors));
        }
        if x.ncols() < p {
            // refill directions dropped above with fresh random ones
            let filled = Mat::from_fn(n, p, |i, j| if j < x.ncols() { x[(i, j)] } else { rng.random_range(-1.0..1.0) });
            x = filled;
        }
    }
    Err(SolveError::NoConvergence(format!("{MAX_ITERATIONS} subspace iterations")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::EnergyKind;
    use crate::shapes;

    fn b_inner(masses: &[f64], a: &[f64], b: &[f64]) -> f64 {
        masses.iter().zip(a.iter().zip(b)).map(|(m, (x, y))| m * x * y).sum()
    }

    #[test]
    fn shift_invert_matches_dense() {
        let m = shapes::perturbed_sphere(2, 0.1, 6);
        for kind in [EnergyKind::CurvedHessian, EnergyKind::SquaredLaplacian] {
            let op = EnergyOperator::build(&m, kind);
            let dense = smallest_eigs_with(&op, 8, EigenMethod::Dense).unwrap();
            let iter = smallest_eigs_with(&op, 8, EigenMethod::ShiftInvert).unwrap();
            assert_eq!(dense.kernel_dimension(), 1);
            assert_eq!(iter.kernel_dimension(), 1);
            for j in 1..8 {
                let (a, b) = (dense.values[j], iter.values[j]);
                assert!((a - b).abs() <= 1e-9 * a.abs(), "{kind:?} {j}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn eigenvectors_are_b_orthonormal_with_small_residuals() {
        let m = shapes::perturbed_sphere(2, 0.1, 2);
        let op = EnergyOperator::curved_hessian(&m);
        let masses = op.masses();
        for method in [EigenMethod::Dense, EigenMethod::ShiftInvert] {
            let r = smallest_eigs_with(&op, 6, method).unwrap();
            for i in 0..6 {
                for j in 0..6 {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((b_inner(&masses, &r.vectors[i], &r.vectors[j]) - expect).abs() < 1e-8);
                }
            }
            for res in r.residuals(&op.q, &op.b) {
                assert!(res <= 1e-8 * op.q.max_abs());
            }
        }
    }

    #[test]
    fn rejects_bad_k() {
        let op = EnergyOperator::curved_hessian(&shapes::icosahedron());
        assert!(smallest_eigs(&op, 0).is_err());
        assert!(smallest_eigs(&op, 13).is_err());
        assert_eq!(smallest_eigs(&op, 12).unwrap().values.len(), 12);
    }
}
