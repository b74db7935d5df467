//! Quadrature over triangle/disk intersections.

use std::sync::OnceLock;

use crate::geometry::{orient, ClipPiece, Vec2};

/// Maximum bisection depth per piece.
pub const MAX_DEPTH: u32 = 12;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for k in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p2) / (k + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Radial rule of a wedge slice. The radial direction is never subdivided, so
/// it gets the higher order.
fn radial_gl() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// Angular rule of a wedge panel; adaptivity acts in this direction.
fn angular_gl() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(8))
}

/// Degree-5 seven-point rule: barycentric points and weights summing to 1.
const DUNAVANT5: [([f64; 3], f64); 7] = [
    ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.225),
    ([0.059715871789770, 0.470142064105115, 0.470142064105115], 0.132394152788506),
    ([0.470142064105115, 0.059715871789770, 0.470142064105115], 0.132394152788506),
    ([0.470142064105115, 0.470142064105115, 0.059715871789770], 0.132394152788506),
    ([0.797426985353087, 0.101286507323456, 0.101286507323456], 0.125939180544827),
    ([0.101286507323456, 0.797426985353087, 0.101286507323456], 0.125939180544827),
    ([0.101286507323456, 0.101286507323456, 0.797426985353087], 0.125939180544827),
];

/// Integral over a triangle, signed by orientation.
pub fn triangle_rule(f: &dyn Fn(Vec2) -> f64, [a, b, c]: [Vec2; 3]) -> f64 {
    let area = 0.5 * orient(a, b, c);
    let s: f64 = DUNAVANT5.iter().map(|&([l0, l1, l2], w)| w * f(a * l0 + b * l1 + c * l2)).sum();
    area * s
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// Absolute error indicator.
    pub error: f64,
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, o: Estimate) -> Estimate {
        Estimate { value: self.value + o.value, error: self.error + o.error }
    }
}

fn triangle_adaptive(f: &dyn Fn(Vec2) -> f64, t: [Vec2; 3], whole: f64, tol: f64, depth: u32) -> Estimate {
    let [a, b, c] = t;
    let (ab, bc, ca) = (a.lerp(b, 0.5), b.lerp(c, 0.5), c.lerp(a, 0.5));
    let kids = [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]];
    let parts = kids.map(|k| triangle_rule(f, k));
    let sum: f64 = parts.iter().sum();
    let diff = (sum - whole).abs();
    if diff <= tol || depth == 0 {
        return Estimate { value: sum, error: diff };
    }
    kids.iter()
        .zip(parts)
        .map(|(&k, w)| triangle_adaptive(f, k, w, 0.25 * tol, depth - 1))
        .fold(Estimate::default(), |acc, e| acc + e)
}

/// Polar wedge integral `∫_{θ0}^{θ1} ∫_0^{R(θ)} f ρ dρ dθ`, with `ρ = r·sin φ`
/// so that integrands with a `√(r² - ρ²)` factor stay smooth.
fn wedge_slice(f: &dyn Fn(Vec2) -> f64, center: Vec2, radius: f64, line: Option<(f64, f64)>, theta: f64) -> f64 {
    let (x, w) = radial_gl();
    let rmax = ClipPiece::wedge_extent(radius, line, theta);
    let pmax = (rmax / radius).clamp(0.0, 1.0).asin();
    let dir = Vec2::from_angle(theta);
    let half = 0.5 * pmax;
    x.iter()
        .zip(w)
        .map(|(&xi, &wi)| {
            let phi = half * (xi + 1.0);
            let (s, c) = phi.sin_cos();
            let rho = radius * s;
            wi * f(center + dir * rho) * radius * radius * s * c
        })
        .sum::<f64>()
        * half
}

fn wedge_rule(f: &dyn Fn(Vec2) -> f64, center: Vec2, radius: f64, line: Option<(f64, f64)>, t0: f64, t1: f64) -> f64 {
    let (x, w) = angular_gl();
    let half = 0.5 * (t1 - t0);
    x.iter()
        .zip(w)
        .map(|(&xi, &wi)| wi * wedge_slice(f, center, radius, line, t0 + half * (xi + 1.0)))
        .sum::<f64>()
        * half
}

#[allow(clippy::too_many_arguments)]
fn wedge_adaptive(
    f: &dyn Fn(Vec2) -> f64,
    center: Vec2,
    radius: f64,
    line: Option<(f64, f64)>,
    t0: f64,
    t1: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Estimate {
    let tm = 0.5 * (t0 + t1);
    let l = wedge_rule(f, center, radius, line, t0, tm);
    let r = wedge_rule(f, center, radius, line, tm, t1);
    let diff = (l + r - whole).abs();
    if diff <= tol || depth == 0 {
        return Estimate { value: l + r, error: diff };
    }
    wedge_adaptive(f, center, radius, line, t0, tm, l, 0.5 * tol, depth - 1)
        + wedge_adaptive(f, center, radius, line, tm, t1, r, 0.5 * tol, depth - 1)
}

/// Single-rule estimate of a piece, for tolerance allocation.
pub fn piece_rule(f: &dyn Fn(Vec2) -> f64, piece: &ClipPiece) -> f64 {
    match *piece {
        ClipPiece::Triangle(t) => triangle_rule(f, t),
        ClipPiece::Wedge { center, radius, theta0, theta1, line, sign } => {
            sign * wedge_rule(f, center, radius, line, theta0, theta1)
        }
    }
}

/// Adaptive integral of `f` over one piece to absolute tolerance `tol`.
pub fn piece_adaptive(f: &dyn Fn(Vec2) -> f64, piece: &ClipPiece, tol: f64) -> Estimate {
    match *piece {
        ClipPiece::Triangle(t) => triangle_adaptive(f, t, triangle_rule(f, t), tol, MAX_DEPTH),
        ClipPiece::Wedge { center, radius, theta0, theta1, line, sign } => {
            let whole = wedge_rule(f, center, radius, line, theta0, theta1);
            let e = wedge_adaptive(f, center, radius, line, theta0, theta1, whole, tol, MAX_DEPTH);
            Estimate { value: sign * e.value, error: e.error }
        }
    }
}
