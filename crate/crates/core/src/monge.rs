//! Exact curved Hessian energy of a polynomial field on a Monge patch
//! `(x, y, z(x, y))`, integrated over a triangulated parameter domain.
//!
//! With `W² = 1 + z_x² + z_y²`, the metric is `g = I + ∇z ∇zᵀ`, its inverse
//! `I − ∇z ∇zᵀ / W²`, and the Christoffel symbols are `Γᶜ_ab = z_ab z_c / W²`.
//! The integrand is `|Hess f|²_g + κ |df|²_g` against the area element `W`.

use crate::mesh::TriMesh;
use crate::quadrature::TriangleRule;
use crate::surface::{MongePatch, Polynomial};

/// A scalar field in parameter coordinates with its partials up to order two.
#[derive(Debug, Clone)]
pub struct PolynomialField {
    pub f: Polynomial,
    pub fx: Polynomial,
    pub fy: Polynomial,
    pub fxx: Polynomial,
    pub fxy: Polynomial,
    pub fyy: Polynomial,
}

impl PolynomialField {
    pub fn new(f: Polynomial) -> Self {
        let (fx, fy) = (f.dx(), f.dy());
        Self { fxx: fx.dx(), fxy: fx.dy(), fyy: fy.dy(), fx, fy, f }
    }
}

/// Pointwise integrand, area element included.
pub fn energy_density(patch: &MongePatch, field: &PolynomialField, x: f64, y: f64) -> f64 {
    let z = [patch.zx.eval(x, y), patch.zy.eval(x, y)];
    let zh = [[patch.zxx.eval(x, y), patch.zxy.eval(x, y)], [patch.zxy.eval(x, y), patch.zyy.eval(x, y)]];
    let df = [field.fx.eval(x, y), field.fy.eval(x, y)];
    let fh = [[field.fxx.eval(x, y), field.fxy.eval(x, y)], [field.fxy.eval(x, y), field.fyy.eval(x, y)]];

    let w2 = 1.0 + z[0] * z[0] + z[1] * z[1];
    let ginv: [[f64; 2]; 2] = std::array::from_fn(|a| std::array::from_fn(|b| f64::from(u8::from(a == b)) - z[a] * z[b] / w2));
    let zdf = (z[0] * df[0] + z[1] * df[1]) / w2;
    let hess: [[f64; 2]; 2] = std::array::from_fn(|a| std::array::from_fn(|b| fh[a][b] - zh[a][b] * zdf));

    // |H|² = tr(G⁻¹ H G⁻¹ H)
    let mut gh = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            gh[a][b] = ginv[a][0] * hess[0][b] + ginv[a][1] * hess[1][b];
        }
    }
    let hess_sq = gh[0][0] * gh[0][0] + gh[0][1] * gh[1][0] + gh[1][0] * gh[0][1] + gh[1][1] * gh[1][1];
    let grad_sq: f64 = (0..2).flat_map(|a| (0..2).map(move |b| (a, b))).map(|(a, b)| df[a] * ginv[a][b] * df[b]).sum();
    let kappa = (zh[0][0] * zh[1][1] - zh[0][1] * zh[0][1]) / (w2 * w2);
    (hess_sq + kappa * grad_sq) * w2.sqrt()
}

/// `½ ∫ |Hess f|² + κ|df|²` over the parameter triangles of `domain` (its x, y
/// coordinates are used; z is ignored).
pub fn smooth_energy_monge(patch: &MongePatch, field: &PolynomialField, domain: &TriMesh, rule: &TriangleRule) -> f64 {
    let verts = domain.vertices();
    let total: f64 = domain
        .faces()
        .iter()
        .map(|f| {
            let [a, b, c] = f.map(|v| verts[v]);
            let area = 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)).abs();
            rule.integrate(area, |l| {
                let x = l[0] * a.x + l[1] * b.x + l[2] * c.x;
                let y = l[0] * a.y + l[1] * b.y + l[2] * c.y;
                energy_density(patch, field, x, y)
            })
        })
        .sum();
    0.5 * total
}
