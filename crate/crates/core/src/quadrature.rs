//! Quadrature rules on triangles in barycentric form.

/// Points in barycentric coordinates with weights that sum to one; an
/// integral is `area · Σ wᵢ f(pᵢ)`.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl TriangleRule {
    /// Symmetric six-point rule, exact for polynomials of degree 4.
    pub fn degree4() -> Self {
        const A1: f64 = 0.445_948_490_915_964_89;
        const W1: f64 = 0.223_381_589_678_011_47;
        const A2: f64 = 0.091_576_213_509_770_743;
        const W2: f64 = 0.109_951_743_655_321_87;
        let mut points = Vec::with_capacity(6);
        let mut weights = Vec::with_capacity(6);
        for (a, w) in [(A1, W1), (A2, W2)] {
            let b = 1.0 - 2.0 * a;
            points.extend_from_slice(&[[a, a, b], [a, b, a], [b, a, a]]);
            weights.extend_from_slice(&[w, w, w]);
        }
        Self { points, weights }
    }

    /// Collapsed Gauss–Legendre product rule with `n × n` points, exact for
    /// polynomials of degree `2n − 2`.
    pub fn collapsed_gauss(n: usize) -> Self {
        let (nodes, gl_weights) = gauss_legendre_unit(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for (s, ws) in nodes.iter().zip(&gl_weights) {
            for (t, wt) in nodes.iter().zip(&gl_weights) {
                let l1 = *s;
                let l2 = (1.0 - s) * t;
                points.push([1.0 - l1 - l2, l1, l2]);
                // the reference triangle has area 1/2
                weights.push(2.0 * ws * wt * (1.0 - s));
            }
        }
        Self { points, weights }
    }

    /// Collapsed rule exact through degree 8, used to cross-check [`Self::degree4`].
    pub fn degree7() -> Self {
        Self::collapsed_gauss(5)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `∫_T f` over a triangle of the given area, `f` taking barycentric coordinates.
    pub fn integrate(&self, area: f64, mut f: impl FnMut([f64; 3]) -> f64) -> f64 {
        area * self.points.iter().zip(&self.weights).map(|(p, w)| w * f(*p)).sum::<f64>()
    }
}

/// Gauss–Legendre nodes and weights mapped to `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        nodes.push(0.5 * (1.0 - x));
        weights.push(1.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

/// `P_n(x)` and its derivative by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
