//! Analytic smooth surfaces used as refinement targets and reference geometry.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::mesh::{MeshError, Point, TriMesh};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("ProjectionDiverged: closest-point iteration failed for {0:?}")]
    ProjectionDiverged([f64; 3]),
    #[error("invalid surface spec '{spec}': {reason}")]
    InvalidSpec { spec: String, reason: String },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Polynomial in `x, y` of total degree at most 4.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    /// `(coefficient, power of x, power of y)`, like terms merged.
    terms: Vec<(f64, u32, u32)>,
}

pub const MAX_DEGREE: u32 = 4;

impl Polynomial {
    pub fn new(terms: impl IntoIterator<Item = (f64, u32, u32)>) -> Self {
        let mut merged: Vec<(f64, u32, u32)> = Vec::new();
        for (c, px, py) in terms {
            match merged.iter_mut().find(|t| t.1 == px && t.2 == py) {
                Some(t) => t.0 += c,
                None => merged.push((c, px, py)),
            }
        }
        merged.retain(|t| t.0 != 0.0);
        merged.sort_by_key(|t| (t.1 + t.2, t.1));
        Self { terms: merged }
    }

    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn terms(&self) -> &[(f64, u32, u32)] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.1 + t.2).max().unwrap_or(0)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms.iter().map(|&(c, px, py)| c * x.powi(px as i32) * y.powi(py as i32)).sum()
    }

    pub fn dx(&self) -> Self {
        Self::new(self.terms.iter().filter(|t| t.1 > 0).map(|&(c, px, py)| (c * px as f64, px - 1, py)))
    }

    pub fn dy(&self) -> Self {
        Self::new(self.terms.iter().filter(|t| t.2 > 0).map(|&(c, px, py)| (c * py as f64, px, py - 1)))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, &(c, px, py)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (name, p) in [("x", px), ("y", py)] {
                match p {
                    0 => {}
                    1 => write!(f, "*{name}")?,
                    _ => write!(f, "*{name}^{p}")?,
                }
            }
        }
        Ok(())
    }
}

impl FromStr for Polynomial {
    type Err = String;

    /// Parses sums of monomials such as `x^2`, `0.5*x^2 - 2*x*y + y^4 + 1`.
    fn from_str(s: &str) -> Result<Self, String> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err("empty polynomial".into());
        }
        let mut terms = Vec::new();
        let mut rest = compact.as_str();
        let mut sign = 1.0;
        loop {
            if let Some(r) = rest.strip_prefix('+') {
                rest = r;
            } else if let Some(r) = rest.strip_prefix('-') {
                sign = -sign;
                rest = r;
                continue;
            }
            // a term ends at the next + or - that is not part of an exponent
            let bytes = rest.as_bytes();
            let mut end = bytes.len();
            for i in 1..bytes.len() {
                let prev = bytes[i - 1];
                if (bytes[i] == b'+' || bytes[i] == b'-') && prev != b'e' && prev != b'E' && prev != b'^' {
                    end = i;
                    break;
                }
            }
            let (term, tail) = rest.split_at(end);
            terms.push(parse_term(term, sign)?);
            if tail.is_empty() {
                break;
            }
            rest = tail;
            sign = 1.0;
        }
        let p = Polynomial::new(terms);
        if p.degree() > MAX_DEGREE {
            return Err(format!("degree {} exceeds {MAX_DEGREE}", p.degree()));
        }
        Ok(p)
    }
}

fn parse_term(term: &str, sign: f64) -> Result<(f64, u32, u32), String> {
    if term.is_empty() {
        return Err("empty term".into());
    }
    let (mut coef, mut px, mut py) = (sign, 0, 0);
    for factor in term.split('*') {
        let (base, power) = match factor.split_once('^') {
            Some((b, p)) => (b, p.parse::<u32>().map_err(|_| format!("bad exponent in '{factor}'"))?),
            None => (factor, 1),
        };
        match base {
            "x" => px += power,
            "y" => py += power,
            num => {
                let v: f64 = num.parse().map_err(|_| format!("unknown factor '{factor}'"))?;
                coef *= v.powi(power as i32);
            }
        }
    }
    Ok((coef, px, py))
}

/// Height function `z(x, y)` with its first and second partials.
#[derive(Debug, Clone, PartialEq)]
pub struct MongePatch {
    pub z: Polynomial,
    pub zx: Polynomial,
    pub zy: Polynomial,
    pub zxx: Polynomial,
    pub zxy: Polynomial,
    pub zyy: Polynomial,
}

impl MongePatch {
    pub fn new(z: Polynomial) -> Self {
        let (zx, zy) = (z.dx(), z.dy());
        Self { zxx: zx.dx(), zxy: zx.dy(), zyy: zy.dy(), zx, zy, z }
    }

    /// Gaussian curvature `(z_xx z_yy − z_xy²) / (1 + z_x² + z_y²)²`.
    pub fn gaussian_curvature(&self, x: f64, y: f64) -> f64 {
        let w2 = 1.0 + self.zx.eval(x, y).powi(2) + self.zy.eval(x, y).powi(2);
        (self.zxx.eval(x, y) * self.zyy.eval(x, y) - self.zxy.eval(x, y).powi(2)) / (w2 * w2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SmoothSurface {
    Sphere { center: Point, radius: f64 },
    /// Axis-aligned, centred at the origin.
    Ellipsoid { semi_axes: [f64; 3] },
    Monge(MongePatch),
}

const PROJECTION_TOLERANCE: f64 = 1e-12;

impl SmoothSurface {
    pub fn unit_sphere() -> Self {
        SmoothSurface::Sphere { center: Point::zeros(), radius: 1.0 }
    }

    pub fn monge(z: Polynomial) -> Self {
        SmoothSurface::Monge(MongePatch::new(z))
    }

    /// Closest point on the surface; for Monge patches the point above or below `p`.
    pub fn project(&self, p: &Point) -> Result<Point, SurfaceError> {
        match self {
            SmoothSurface::Sphere { center, radius } => {
                let d = p - center;
                let n = d.norm();
                if n == 0.0 {
                    return Err(SurfaceError::ProjectionDiverged([p.x, p.y, p.z]));
                }
                Ok(center + d * (radius / n))
            }
            SmoothSurface::Ellipsoid { semi_axes } => closest_point_on_ellipsoid(semi_axes, p),
            SmoothSurface::Monge(patch) => Ok(Point::new(p.x, p.y, patch.z.eval(p.x, p.y))),
        }
    }

    /// Distance-like residual of the implicit equation; zero on the surface.
    pub fn residual(&self, p: &Point) -> f64 {
        match self {
            SmoothSurface::Sphere { center, radius } => ((p - center).norm() - radius).abs(),
            SmoothSurface::Ellipsoid { semi_axes } => {
                let s: f64 = (0..3).map(|i| (p[i] / semi_axes[i]).powi(2)).sum();
                (s.sqrt() - 1.0).abs() * semi_axes.iter().cloned().fold(0.0, f64::min)
            }
            SmoothSurface::Monge(patch) => (p.z - patch.z.eval(p.x, p.y)).abs(),
        }
    }
}

impl fmt::Display for SmoothSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmoothSurface::Sphere { radius, .. } => write!(f, "sphere:{radius}"),
            SmoothSurface::Ellipsoid { semi_axes: [a, b, c] } => write!(f, "ellipsoid:{a},{b},{c}"),
            SmoothSurface::Monge(p) => write!(f, "monge:{}", p.z),
        }
    }
}

impl FromStr for SmoothSurface {
    type Err = SurfaceError;

    /// `sphere:<radius>`, `ellipsoid:<a>,<b>,<c>` or `monge:<polynomial>`.
    fn from_str(spec: &str) -> Result<Self, SurfaceError> {
        let invalid = |reason: String| SurfaceError::InvalidSpec { spec: spec.to_string(), reason };
        let (kind, args) = spec.split_once(':').ok_or_else(|| invalid("expected <kind>:<parameters>".into()))?;
        let positive = |s: &str| -> Result<f64, SurfaceError> {
            match s.trim().parse::<f64>() {
                Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
                _ => Err(invalid(format!("'{s}' is not a positive number"))),
            }
        };
        match kind.trim() {
            "sphere" => Ok(SmoothSurface::Sphere { center: Point::zeros(), radius: positive(args)? }),
            "ellipsoid" => {
                let v: Vec<f64> = args.split(',').map(positive).collect::<Result<_, _>>()?;
                let semi_axes: [f64; 3] = v.try_into().map_err(|_| invalid("expected three semi-axes".into()))?;
                Ok(SmoothSurface::Ellipsoid { semi_axes })
            }
            "monge" => Ok(SmoothSurface::monge(args.parse().map_err(invalid)?)),
            other => Err(invalid(format!("unknown surface kind '{other}'"))),
        }
    }
}

/// Solves for the Lagrange parameter `t` of `q_i = a_i² p_i / (a_i² + t)` by
/// Newton's method started left of the root, where the secular function is
/// convex and decreasing so the iterates increase monotonically.
fn closest_point_on_ellipsoid(a: &[f64; 3], p: &Point) -> Result<Point, SurfaceError> {
    let diverged = || SurfaceError::ProjectionDiverged([p.x, p.y, p.z]);
    let active: Vec<usize> = (0..3).filter(|&i| p[i] != 0.0).collect();
    let Some(&first) = active.iter().min_by(|&&i, &&j| a[i].total_cmp(&a[j])) else {
        return Err(diverged());
    };
    let secular = |t: f64| {
        let mut f = -1.0;
        let mut df = 0.0;
        for &i in &active {
            let r = a[i] * p[i] / (a[i] * a[i] + t);
            f += r * r;
            df -= 2.0 * r * r / (a[i] * a[i] + t);
        }
        (f, df)
    };
    // at this t the term of the shortest active axis alone equals one
    let mut t = a[first] * p[first].abs() - a[first] * a[first];
    for _ in 0..200 {
        let (f, df) = secular(t);
        let step = f / df;
        t -= step;
        if !t.is_finite() {
            return Err(diverged());
        }
        if step.abs() <= PROJECTION_TOLERANCE * (1.0 + t.abs()) {
            let q = Point::from_fn(|i, _| a[i] * a[i] * p[i] / (a[i] * a[i] + t));
            return Ok(q);
        }
    }
    Err(diverged())
}

/// Moves every vertex onto the surface.
pub fn project_to_surface(mesh: &TriMesh, surface: &SmoothSurface) -> Result<TriMesh, SurfaceError> {
    let positions = mesh.vertices().iter().map(|p| surface.project(p)).collect::<Result<Vec<_>, _>>()?;
    Ok(mesh.with_positions(positions)?)
}
