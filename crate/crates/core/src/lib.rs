//! Curved Hessian smoothness energy on triangle meshes.
//!
//! The energy `½∫ (∇du):(∇du) + κ|du|²` is discretized with Crouzeix–Raviart
//! one-forms: every edge carries a parallel and a perpendicular one-form, and
//! the energy of a per-vertex field `u` reduces to `½ uᵀ Q u` with
//! `Q = Dᵀ M⁻¹ (L + K) M⁻¹ D`.

pub mod assembly;
pub mod convergence;
pub mod curvature;
pub mod energy;
pub mod geometry;
pub mod io;
pub mod mesh;
pub mod monge;
pub mod oracle;
pub mod quadrature;
pub mod refine;
pub mod shapes;
pub mod solve;
pub mod sparse;
pub mod surface;

pub use energy::{EnergyKind, EnergyOperator};
pub use geometry::GeometryCache;
pub use mesh::{MeshError, Point, TriMesh};
pub use sparse::SparseMatrix;
