//! Mass of a harmonic polynomial over the pieces of a disk/triangle clip,
//! without adaptivity: sectors in closed form, triangles by a collapsed
//! Gauss rule of sufficient degree.

use std::sync::OnceLock;

use nalgebra::Complex;

use super::quad::gauss_legendre;
use crate::fields::HarmonicPolynomial;
use crate::geometry::{orient, ClipPiece, Vec2};

/// `∫_{t0}^{t1} e^{imθ} dθ`.
fn exp_integral(m: i64, t0: f64, t1: f64) -> Complex<f64> {
    if m == 0 {
        return Complex::new(t1 - t0, 0.0);
    }
    let mf = m as f64;
    let e1 = Complex::new(0.0, mf * t1).exp();
    let e0 = Complex::new(0.0, mf * t0).exp();
    (e1 - e0) / Complex::new(0.0, mf)
}

/// `∫_{θ0}^{θ1} ∫_0^r h² ρ dρ dθ` with `h = Re Σ b_k ρ^k e^{ikθ}`.
///
/// `Re(x)Re(y) = ½Re(x y) + ½Re(x ȳ)` turns each product into single exponentials.
fn sector(b: &[Complex<f64>], r: f64, t0: f64, t1: f64) -> f64 {
    let mut s = 0.0;
    for (k, bk) in b.iter().enumerate() {
        for (l, bl) in b.iter().enumerate() {
            let radial = r.powi((k + l + 2) as i32) / (k + l + 2) as f64;
            let plus = (bk * bl * exp_integral((k + l) as i64, t0, t1)).re;
            let minus = (bk * bl.conj() * exp_integral(k as i64 - l as i64, t0, t1)).re;
            s += 0.5 * radial * (plus + minus);
        }
    }
    s
}

/// Largest cached collapsed-rule order; degree 40 polynomials stay exact.
pub(crate) const MAX_NODES: usize = 42;

/// Signed integral of `h²` over a triangle by the collapsed Gauss rule with
/// `n` points per direction, exact for polynomials of degree `2n - 2`.
fn triangle(p: &HarmonicPolynomial, [a, b, c]: [Vec2; 3], n: usize) -> f64 {
    static RULES: OnceLock<Vec<(Vec<f64>, Vec<f64>)>> = OnceLock::new();
    let rules = RULES.get_or_init(|| (0..=MAX_NODES).map(gauss_legendre).collect());
    let (x, w) = &rules[n.min(MAX_NODES)];
    let area2 = orient(a, b, c);
    let mut s = 0.0;
    for i in 0..n {
        let u = 0.5 * (x[i] + 1.0);
        for j in 0..n {
            let v = 0.5 * (x[j] + 1.0);
            // (u, v) ↦ a + u(b - a) + uv(c - b), Jacobian u·|2·area|
            let q = a + (b - a) * u + (c - b) * (u * v);
            let h = p.eval(q);
            s += 0.25 * w[i] * w[j] * u * h * h;
        }
    }
    s * area2
}

/// `∫ h²` over signed clip pieces of the disk `B(center, radius)`.
pub(crate) fn harmonic_mass(p: &HarmonicPolynomial, pieces: &[ClipPiece], center: Vec2) -> f64 {
    let b = p.expand_about(center);
    let n = p.re.len() + 2;
    pieces
        .iter()
        .map(|piece| match *piece {
            ClipPiece::Triangle(t) => triangle(p, t, n),
            ClipPiece::Wedge { line: None, radius, theta0, theta1, sign, .. } => sign * sector(&b, radius, theta0, theta1),
            ClipPiece::Wedge { center: c, radius, theta0, theta1, line, sign } => {
                let at = |t: f64| c + Vec2::from_angle(t) * ClipPiece::wedge_extent(radius, line, t);
                sign * triangle(p, [c, at(theta0), at(theta1)], n)
            }
        })
        .sum()
}
