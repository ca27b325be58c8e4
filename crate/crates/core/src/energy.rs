//! Quadratic smoothness energies `½ uᵀ Q u` on per-vertex fields.

use thiserror::Error;

use crate::assembly::{self, DofMap};
use crate::curvature::{self, AngleDefects};
use crate::geometry::GeometryCache;
use crate::mesh::TriMesh;
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyKind {
    /// `Dᵀ M⁻¹ (L + K) M⁻¹ D` in the CROF space.
    CurvedHessian,
    /// `L_cotᵀ B⁻¹ L_cot` with lumped vertex mass.
    SquaredLaplacian,
}

impl EnergyKind {
    pub fn name(&self) -> &'static str {
        match self {
            EnergyKind::CurvedHessian => "curved-hessian",
            EnergyKind::SquaredLaplacian => "squared-laplacian",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("DimensionMismatch: expected {expected} values, got {got}")]
pub struct DimensionMismatch {
    pub expected: usize,
    pub got: usize,
}

/// The CROF factors of the curved Hessian energy.
#[derive(Debug, Clone)]
pub struct CrofParts {
    pub dofs: DofMap,
    pub l: SparseMatrix,
    pub m: SparseMatrix,
    pub d: SparseMatrix,
    pub k: SparseMatrix,
    pub defects: AngleDefects,
}

#[derive(Debug, Clone)]
pub struct EnergyOperator {
    pub kind: EnergyKind,
    pub q: SparseMatrix,
    pub b: SparseMatrix,
    /// Present for the curved Hessian.
    pub crof: Option<CrofParts>,
    /// Present for the squared Laplacian.
    pub cotan: Option<SparseMatrix>,
}

impl EnergyOperator {
    pub fn build(mesh: &TriMesh, kind: EnergyKind) -> Self {
        Self::with_geometry(mesh, &GeometryCache::new(mesh), kind)
    }

    pub fn curved_hessian(mesh: &TriMesh) -> Self {
        Self::build(mesh, EnergyKind::CurvedHessian)
    }

    pub fn squared_laplacian(mesh: &TriMesh) -> Self {
        Self::build(mesh, EnergyKind::SquaredLaplacian)
    }

    /// Builds the operator from an explicit metric, e.g. prescribed edge lengths.
    pub fn with_geometry(mesh: &TriMesh, geom: &GeometryCache, kind: EnergyKind) -> Self {
        match kind {
            EnergyKind::CurvedHessian => Self::crof(mesh, geom, true),
            EnergyKind::SquaredLaplacian => {
                let b = assembly::assemble_b(mesh, geom);
                let lc = assembly::assemble_cotan(mesh, geom);
                let inv: Vec<f64> = b.diagonal().iter().map(|m| 1.0 / m).collect();
                let q = lc.transpose().mul(&lc.scale_rows(&inv)).symmetrize();
                Self { kind, q, b, crof: None, cotan: Some(lc) }
            }
        }
    }

    /// CROF pipeline; `with_curvature = false` drops `K` (the flat Hessian of the same space).
    pub fn crof(mesh: &TriMesh, geom: &GeometryCache, with_curvature: bool) -> Self {
        let dofs = DofMap::new(mesh);
        let l = assembly::assemble_l(mesh, geom, &dofs);
        let mass = assembly::mass_diagonal(mesh, geom, &dofs);
        let d = assembly::assemble_d(mesh, geom, &dofs);
        let defects = curvature::angle_defects(mesh, geom);
        let k = if with_curvature {
            curvature::assemble_k(mesh, geom, &defects, &dofs)
        } else {
            SparseMatrix::zeros(dofs.len(), dofs.len())
        };
        let inv: Vec<f64> = mass.iter().map(|m| 1.0 / m).collect();
        let w = d.scale_rows(&inv);
        let q = w.transpose().mul(&l.add(&k).mul(&w)).symmetrize();
        let b = assembly::assemble_b(mesh, geom);
        let m = SparseMatrix::from_diagonal(&mass);
        Self { kind: EnergyKind::CurvedHessian, q, b, crof: Some(CrofParts { dofs, l, m, d, k, defects }), cotan: None }
    }

    pub fn num_vertices(&self) -> usize {
        self.q.nrows()
    }

    /// Lumped vertex masses.
    pub fn masses(&self) -> Vec<f64> {
        self.b.diagonal()
    }

    /// `‖Q‖_max / ‖B‖_max`, the natural eigenvalue scale of the pencil `(Q, B)`.
    pub fn scale(&self) -> f64 {
        self.q.max_abs() / self.b.max_abs()
    }

    /// `½ uᵀ Q u`.
    pub fn energy(&self, u: &[f64]) -> Result<f64, DimensionMismatch> {
        let n = self.num_vertices();
        if u.len() != n {
            return Err(DimensionMismatch { expected: n, got: u.len() });
        }
        Ok(0.5 * self.q.quadratic_form(u))
    }
}
