//! Mass `H_h(x, r) = ∫_{B(x,r)∩Ω} h²`, the doubling index
//! `N_h(x, r) = ln(H_h(x, 2r) / H_h(x, r))`, its maximum over a cube, and the
//! chain of balls joining a boundary point to the maximizer of an eigenfunction.

mod chain;
mod exact;
pub mod quad;

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

pub use chain::{chain_of_balls, chain_of_balls_with_net, r8_net, vertex_maximizer, ChainReport};

use crate::error::{Error, Result};
use crate::fields::{Region, ScalarField};
use crate::geometry::{clip_cell, Aabb, Ball, ClipPiece, Cube, Vec2};
use crate::meshing::barycentric;
use quad::{piece_adaptive, piece_rule, Estimate};

/// Target relative accuracy of [`mass`].
pub const MASS_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassEstimate {
    pub value: f64,
    /// Relative error indicator.
    pub error: f64,
    /// Whether `error ≤ MASS_TOL` was reached within the subdivision budget.
    pub converged: bool,
}

/// A cell of the integration cover with its own evaluation of `h` (or of the
/// fiber-weighted `u²` for extensions).
struct Cell<'a> {
    tri: [Vec2; 3],
    f: Box<dyn Fn(Vec2) -> f64 + Sync + 'a>,
}

fn fem_cells(f: &crate::fields::FemField, center: Vec2, radius: f64) -> Vec<usize> {
    let bb = Aabb::around(center, radius);
    (0..f.mesh.num_triangles())
        .filter(|&t| Aabb::from_points(f.mesh.corners(t)).intersects(&bb))
        .collect()
}

/// Builds the integration cells for `g(h(x))` where `g` maps the value of the
/// planar base field at `x` (and `x` itself) to the integrand.
fn build_cells<'a>(
    base: &'a ScalarField,
    region: &Region,
    center: Vec2,
    radius: f64,
    g: impl Fn(f64, Vec2) -> f64 + Sync + Copy + 'a,
) -> Vec<Cell<'a>> {
    match base.as_fem() {
        Some(fem) => fem_cells(fem, center, radius)
            .into_iter()
            .map(|t| {
                let tri = fem.mesh.corners(t);
                let ids = fem.mesh.triangles[t];
                let v = ids.map(|i| fem.values[i]);
                let f = move |p: Vec2| {
                    let l = barycentric(tri, p);
                    g(l[0] * v[0] + l[1] * v[1] + l[2] * v[2], p)
                };
                Cell { tri, f: Box::new(f) }
            })
            .collect(),
        None => region
            .cover(center, radius)
            .into_iter()
            .map(|tri| {
                let f = move |p: Vec2| g(base.eval(&[p.x, p.y]).unwrap_or(0.0), p);
                Cell { tri, f: Box::new(f) }
            })
            .collect(),
    }
}

/// `H_h(ball) = ∫_{ball ∩ Ω} h²`.
///
/// Planar fields (including extensions of 1D fields on a strip) are integrated
/// over the pieces of `cover ∩ ball` by adaptive quadrature; harmonic
/// polynomials exactly, piece by piece. For the extension
/// `u(x)e^{√λ t}` of a planar field and a 3D ball `((x0, t0), r)` the
/// `t`-integral is done in closed form, leaving
/// `∫_{B(x0,r)∩Ω} u² e^{2√λ t0} sinh(2√λ s(x))/√λ dx`, `s(x) = √(r² - |x - x0|²)`.
pub fn mass(field: &ScalarField, ball: &Ball, region: &Region) -> Result<MassEstimate> {
    let c = ball.center2();
    let r = ball.radius;
    if let (2, ScalarField::Harmonic(p)) = (ball.dim, field) {
        if p.re.len() <= exact::MAX_NODES - 2 {
            let pieces: Vec<ClipPiece> = region.cover(c, r).into_iter().flat_map(|t| clip_cell(t, c, r).pieces).collect();
            if pieces.is_empty() {
                return Err(Error::EmptyIntersection("ball misses the domain".into()));
            }
            let value = exact::harmonic_mass(p, &pieces, c).max(0.0);
            return Ok(MassEstimate { value, error: 1e-12, converged: true });
        }
    }
    let cells = match (ball.dim, field.dim()) {
        (2, 2) => build_cells(field, region, c, r, |v, _| v * v),
        (3, 3) => {
            let (inner, lambda) = field.as_extension().expect("3D fields are extensions");
            let s = lambda.sqrt();
            let t0 = ball.center[2];
            let scale = (2.0 * s * t0).exp() / s;
            build_cells(inner, region, c, r, move |v, p| {
                let h = (r * r - (p - c).norm2()).max(0.0).sqrt();
                v * v * scale * (2.0 * s * h).sinh()
            })
        }
        (bd, fd) => return Err(Error::Precondition(format!("mass of a {fd}D field over a {bd}D ball"))),
    };
    let planar = ball.dim == 2;
    let pieces: Vec<(usize, ClipPiece)> = cells
        .iter()
        .enumerate()
        .flat_map(|(i, cell)| {
            clip_cell(cell.tri, c, r).pieces.into_iter().map(move |p| (i, if planar { chord_to_triangle(p) } else { p }))
        })
        .collect();
    if pieces.is_empty() {
        return Err(Error::EmptyIntersection("ball misses the domain".into()));
    }
    let coarse: Vec<f64> = pieces.par_iter().map(|(i, p)| piece_rule(&*cells[*i].f, p)).collect();
    let total: f64 = coarse.iter().sum();
    let weight: f64 = coarse.iter().map(|v| v.abs()).sum();
    let floor = 1e-300 * r.powi(ball.dim as i32);
    let est: Vec<Estimate> = pieces
        .par_iter()
        .zip(&coarse)
        .map(|((i, p), v)| {
            let share = if weight > 0.0 { v.abs() / weight } else { 1.0 / coarse.len() as f64 };
            let tol = (0.1 * MASS_TOL * total.abs() * share).max(floor);
            piece_adaptive(&*cells[*i].f, p, tol)
        })
        .collect();
    let sum = est.iter().fold(Estimate::default(), |a, &b| a + b);
    let value = sum.value.max(0.0);
    let error = if value > 0.0 { sum.error / value } else { 0.0 };
    Ok(MassEstimate { value, error, converged: error <= MASS_TOL })
}

/// A wedge bounded by a chord is the triangle spanned by the center and the
/// chord. Smooth planar integrands converge faster on the triangle; the polar
/// form is kept for the fiber weight, which is singular on the sphere.
fn chord_to_triangle(p: ClipPiece) -> ClipPiece {
    match p {
        ClipPiece::Wedge { center, radius, theta0, theta1, line: line @ Some(_), sign } => {
            let at = |t: f64| center + Vec2::from_angle(t) * ClipPiece::wedge_extent(radius, line, t);
            let (a, b) = (at(theta0), at(theta1));
            ClipPiece::Triangle(if sign > 0.0 { [center, a, b] } else { [center, b, a] })
        }
        other => other,
    }
}

/// A ball of the field's dimension.
pub fn ball_for(field: &ScalarField, center: &[f64], r: f64) -> Ball {
    match field.dim() {
        3 => Ball::new3([center[0], center[1], center.get(2).copied().unwrap_or(0.0)], r),
        _ => Ball::new2(Vec2::new(center[0], center[1]), r),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoublingValue {
    pub n: f64,
    pub h_r: f64,
    pub h_2r: f64,
    /// Absolute error indicator of `n`.
    pub error: f64,
}

/// `N_h(x, r) = ln(H(x, 2r) / H(x, r))`.
pub fn doubling_index(field: &ScalarField, center: &[f64], r: f64, region: &Region) -> Result<DoublingValue> {
    if !(r > 0.0) {
        return Err(Error::Precondition(format!("radius must be positive, got {r}")));
    }
    let (a, b) = rayon::join(
        || mass(field, &ball_for(field, center, r), region),
        || mass(field, &ball_for(field, center, 2.0 * r), region),
    );
    let (a, b) = (a?, b?);
    let dim = field.dim().max(2) as i32;
    if a.value < 1e-300 * r.powi(dim) {
        return Err(Error::Underflow(a.value));
    }
    Ok(DoublingValue { n: (b.value / a.value).ln(), h_r: a.value, h_2r: b.value, error: a.error + b.error })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxDoubling {
    pub value: f64,
    pub center: Vec2,
    pub radius: f64,
    pub error: f64,
}

/// Centers per side and radii in the grid stage of [`max_doubling`].
pub const MAX_DOUBLING_GRID: (usize, usize) = (17, 9);

/// `N*_h(Q) = sup { N_h(x, r) : x ∈ Q ∩ closure(Ω), r ∈ [ℓ/2, ℓ] }`, `ℓ = diam Q`.
///
/// Grid search followed by three rounds of compass ascent. For extensions the
/// center is taken at `t = 0`, which loses nothing since `N` does not depend on `t`.
pub fn max_doubling(field: &ScalarField, cube: &Cube, region: &Region) -> Result<MaxDoubling> {
    let ell = cube.diameter();
    let (nc, nr) = MAX_DOUBLING_GRID;
    let admissible = |p: Vec2| cube.contains(p) && region.in_closure(p);
    let centers: Vec<Vec2> = (0..nc * nc)
        .map(|k| {
            let (i, j) = (k % nc, k / nc);
            let u = -0.5 + i as f64 / (nc - 1) as f64;
            let v = -0.5 + j as f64 / (nc - 1) as f64;
            cube.to_world(Vec2::new(u * cube.side, v * cube.side))
        })
        .filter(|&p| region.in_closure(p))
        .collect();
    if centers.is_empty() {
        return Err(Error::EmptyIntersection("cube misses the domain".into()));
    }
    let radii: Vec<f64> = (0..nr).map(|k| 0.5 * ell * (1.0 + k as f64 / (nr - 1) as f64)).collect();
    let eval = |p: Vec2, r: f64| -> Option<DoublingValue> {
        let c = [p.x, p.y, 0.0];
        doubling_index(field, &c, r, region).ok()
    };
    let grid: Vec<(Vec2, f64, DoublingValue)> = centers
        .par_iter()
        .flat_map_iter(|&p| radii.iter().map(move |&r| (p, r)))
        .filter_map(|(p, r)| eval(p, r).map(|v| (p, r, v)))
        .collect();
    let mut best = grid
        .into_iter()
        .reduce(|a, b| if b.2.n > a.2.n { b } else { a })
        .ok_or(Error::Underflow(0.0))?;
    let mut hx = cube.side / (nc - 1) as f64;
    let mut hr = 0.5 * ell / (nr - 1) as f64;
    for _ in 0..3 {
        hx *= 0.5;
        hr *= 0.5;
        loop {
            let (p, r) = (best.0, best.1);
            let moves = [
                (Vec2::new(hx, 0.0), 0.0),
                (Vec2::new(-hx, 0.0), 0.0),
                (Vec2::new(0.0, hx), 0.0),
                (Vec2::new(0.0, -hx), 0.0),
                (Vec2::ZERO, hr),
                (Vec2::ZERO, -hr),
            ];
            let trials: Vec<(Vec2, f64, DoublingValue)> = moves
                .par_iter()
                .filter_map(|&(dp, dr)| {
                    let (q, s) = (p + cube_dir(cube, dp), r + dr);
                    if !admissible(q) || s < 0.5 * ell || s > ell {
                        return None;
                    }
                    eval(q, s).map(|v| (q, s, v))
                })
                .collect();
            match trials.into_iter().reduce(|a, b| if b.2.n > a.2.n { b } else { a }) {
                Some(t) if t.2.n > best.2.n + 1e-12 => best = t,
                _ => break,
            }
        }
    }
    Ok(MaxDoubling { value: best.2.n, center: best.0, radius: best.1, error: best.2.error })
}

fn cube_dir(cube: &Cube, d: Vec2) -> Vec2 {
    d.rotate(cube.angle)
}

/// `N` at geometrically spaced radii.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublingReport {
    pub center: [f64; 3],
    pub radii: Vec<f64>,
    pub h_values: Vec<f64>,
    pub n_values: Vec<f64>,
    pub quad_error: Vec<f64>,
}

pub fn doubling_profile(
    field: &ScalarField,
    center: &[f64],
    r_min: f64,
    r_max: f64,
    steps: usize,
    region: &Region,
) -> Result<DoublingReport> {
    if !(r_min > 0.0 && r_max > r_min) || steps == 0 {
        return Err(Error::Precondition(format!("bad radius range [{r_min}, {r_max}] with {steps} steps")));
    }
    let radii: Vec<f64> = if steps == 1 {
        vec![r_min]
    } else {
        (0..steps).map(|k| r_min * (r_max / r_min).powf(k as f64 / (steps - 1) as f64)).collect()
    };
    let vals: Vec<DoublingValue> =
        radii.par_iter().map(|&r| doubling_index(field, center, r, region)).collect::<Result<_>>()?;
    let mut c = [0.0; 3];
    c[..center.len().min(3)].copy_from_slice(&center[..center.len().min(3)]);
    Ok(DoublingReport {
        center: c,
        h_values: vals.iter().map(|v| v.h_r).collect(),
        n_values: vals.iter().map(|v| v.n).collect(),
        quad_error: vals.iter().map(|v| v.error).collect(),
        radii,
    })
}

impl DoublingReport {
    /// CSV with columns `center_x, center_y, center_t, r, H, N, err`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["center_x", "center_y", "center_t", "r", "H", "N", "err"])?;
        for i in 0..self.radii.len() {
            w.write_record(&[
                fmt(self.center[0]),
                fmt(self.center[1]),
                fmt(self.center[2]),
                fmt(self.radii[i]),
                fmt(self.h_values[i]),
                fmt(self.n_values[i]),
                fmt(self.quad_error[i]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv is utf-8"))
    }
}

/// Shortest round-trip float formatting.
pub(crate) fn fmt(x: f64) -> String {
    format!("{x:?}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_extension, HarmonicPolynomial};
    use crate::geometry::{LipschitzPatch, PolygonDomain};
    use crate::sampling::rng;
    use rand::Rng;
    use std::f64::consts::{LN_2, PI};

    fn half_plane() -> Region {
        Region::Patch(LipschitzPatch::flat(1.0, 0.1).unwrap())
    }

    #[test]
    fn constant_field_area() {
        let f = ScalarField::constant(1.0);
        let m = mass(&f, &Ball::new2(Vec2::new(0.3, -0.2), 0.7), &Region::Plane).unwrap();
        assert!((m.value - PI * 0.49).abs() < 1e-12 * PI, "{}", m.value);
        let n = doubling_index(&f, &[0.0, 0.0], 0.2, &Region::Plane).unwrap();
        assert!((n.n - 2.0 * LN_2).abs() < 1e-10);
    }

    #[test]
    fn linear_field_on_half_plane() {
        let f = ScalarField::Harmonic(HarmonicPolynomial::im_power(1));
        let r: f64 = 0.3;
        let m = mass(&f, &Ball::new2(Vec2::ZERO, r), &half_plane()).unwrap();
        let exact = PI * r.powi(4) / 8.0;
        assert!((m.value - exact).abs() < 1e-6 * exact, "{} vs {exact}", m.value);
        let n = doubling_index(&f, &[0.0, 0.0], 0.1, &half_plane()).unwrap();
        assert!((n.n - 16f64.ln()).abs() < 1e-5);
    }

    #[test]
    fn homogeneous_harmonics() {
        for k in 1..=6 {
            let f = ScalarField::Harmonic(HarmonicPolynomial::re_power(k));
            let r: f64 = 0.8;
            let m = mass(&f, &Ball::new2(Vec2::ZERO, r), &Region::Plane).unwrap();
            let exact = PI * r.powi(2 * k as i32 + 2) / (2 * k + 2) as f64;
            assert!((m.value - exact).abs() < 1e-6 * exact, "k={k}: {} vs {exact}", m.value);
        }
    }

    #[test]
    fn polygon_region_matches_plane_for_interior_ball() {
        let f = ScalarField::Rectangle { m: 2, n: 3, a: 1.0, b: 1.0 };
        let sq = Region::polygon(PolygonDomain::unit_square()).unwrap();
        let b = Ball::new2(Vec2::new(0.45, 0.55), 0.3);
        let a = mass(&f, &b, &sq).unwrap().value;
        let p = mass(&f, &b, &Region::Plane).unwrap().value;
        assert!((a - p).abs() < 1e-6 * p);
        // a ball sticking out of the square only sees Ω
        let big = mass(&f, &Ball::new2(Vec2::new(0.5, 0.5), 1.0), &sq).unwrap().value;
        assert!((big - 0.25).abs() < 1e-6, "{big}");
    }

    #[test]
    fn extension_mass_is_t_equivariant() {
        let u = ScalarField::Rectangle { m: 1, n: 2, a: 1.0, b: 1.0 };
        let lam = 5.0 * PI * PI;
        let h = make_extension(u, lam).unwrap();
        let sq = Region::polygon(PolygonDomain::unit_square()).unwrap();
        let n0 = doubling_index(&h, &[0.3, 0.6, 0.0], 0.1, &sq).unwrap().n;
        let n1 = doubling_index(&h, &[0.3, 0.6, 0.7], 0.1, &sq).unwrap().n;
        assert!((n0 - n1).abs() < 1e-6 * n0.abs());
        let m0 = mass(&h, &Ball::new3([0.3, 0.6, 0.0], 0.1), &sq).unwrap().value;
        let m1 = mass(&h, &Ball::new3([0.3, 0.6, 0.5], 0.1), &sq).unwrap().value;
        assert!((m1 / m0 - (lam.sqrt()).exp()).abs() < 1e-6 * m1 / m0);
    }

    #[test]
    fn strip_mass_matches_fiber_reduction() {
        // 2D extension of sin(3πx): integrate t in closed form per x
        let u = ScalarField::Sine { m: 3, length: 1.0 };
        let lam = 9.0 * PI * PI;
        let h = make_extension(u.clone(), lam).unwrap();
        let strip = Region::Strip { a: 0.0, b: 1.0 };
        let (x0, t0, r) = (0.1, 0.05, 0.3);
        let got = mass(&h, &Ball::new2(Vec2::new(x0, t0), r), &strip).unwrap().value;
        let s = lam.sqrt();
        let (xg, wg) = quad::gauss_legendre(16);
        let (a, b) = (0.0f64.max(x0 - r), x0 + r);
        // substitution x = x0 + r sin φ keeps the √ factor smooth
        let (pa, pb) = (((a - x0) / r).clamp(-1.0, 1.0).asin(), ((b - x0) / r).clamp(-1.0, 1.0).asin());
        let mut oracle = 0.0;
        let panels = 64;
        for k in 0..panels {
            let (lo, hi) = (pa + (pb - pa) * k as f64 / panels as f64, pa + (pb - pa) * (k + 1) as f64 / panels as f64);
            for (xi, wi) in xg.iter().zip(&wg) {
                let phi = 0.5 * (lo + hi) + 0.5 * (hi - lo) * xi;
                let x = x0 + r * phi.sin();
                let half = r * phi.cos();
                let fiber = (2.0 * s * t0).exp() * (2.0 * s * half).sinh() / s;
                oracle += 0.5 * (hi - lo) * wi * u.eval(&[x]).unwrap().powi(2) * fiber * r * phi.cos();
            }
        }
        assert!((got - oracle).abs() < 1e-6 * oracle, "{got} vs {oracle}");
    }

    #[test]
    fn fiber_mass_agrees_with_monte_carlo() {
        let u = ScalarField::Rectangle { m: 2, n: 1, a: 1.0, b: 1.0 };
        let lam = 5.0 * PI * PI;
        let h = make_extension(u, lam).unwrap();
        let sq = Region::polygon(PolygonDomain::unit_square()).unwrap();
        let c = [0.2, 0.5, 0.1];
        let r = 0.3;
        let exact = mass(&h, &Ball::new3(c, r), &sq).unwrap().value;
        let mut g = rng(7);
        let n = 200_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let p = [c[0] + r * g.gen_range(-1.0..1.0), c[1] + r * g.gen_range(-1.0..1.0), c[2] + r * g.gen_range(-1.0..1.0)];
            let inside = (0..3).map(|i| (p[i] - c[i]).powi(2)).sum::<f64>() < r * r
                && p[0] > 0.0
                && p[0] < 1.0
                && p[1] > 0.0
                && p[1] < 1.0;
            let v = if inside { h.eval(&p).unwrap().powi(2) } else { 0.0 };
            s += v;
            s2 += v * v;
        }
        let vol = 8.0 * r * r * r;
        let mean = s / n as f64;
        let se = ((s2 / n as f64 - mean * mean) / n as f64).sqrt() * vol;
        assert!((mean * vol - exact).abs() < 3.0 * se, "{} vs {exact} ± {se}", mean * vol);
    }

    #[test]
    fn fem_mass_of_constant_nodal_values() {
        let domain = PolygonDomain::unit_square();
        let mesh = std::sync::Arc::new(crate::meshing::triangulate(&domain, 0.1).unwrap());
        let ones = vec![1.0; mesh.num_vertices()];
        let f = ScalarField::Fem(crate::fields::FemField::new(mesh, ones, None));
        let sq = Region::polygon(domain).unwrap();
        let m = mass(&f, &Ball::new2(Vec2::new(0.5, 0.5), 0.3), &sq).unwrap().value;
        assert!((m - PI * 0.09).abs() < 1e-9, "{m}");
        let corner = mass(&f, &Ball::new2(Vec2::ZERO, 0.3), &sq).unwrap().value;
        assert!((corner - PI * 0.09 / 4.0).abs() < 1e-9, "{corner}");
    }

    #[test]
    fn profile_of_homogeneous_field_is_flat() {
        let f = ScalarField::Harmonic(HarmonicPolynomial::re_power(3));
        let rep = doubling_profile(&f, &[0.0, 0.0], 0.05, 0.4, 6, &Region::Plane).unwrap();
        for n in &rep.n_values {
            assert!((n - 8.0 * LN_2).abs() < 1e-4);
        }
        let csv = rep.to_csv_string().unwrap();
        assert!(csv.starts_with("center_x,center_y,center_t,r,H,N,err"));
        assert_eq!(csv.lines().count(), 7);
    }

    #[test]
    fn zero_field_underflows() {
        let f = ScalarField::constant(0.0);
        assert!(matches!(doubling_index(&f, &[0.0, 0.0], 0.1, &Region::Plane), Err(Error::Underflow(_))));
    }

    #[test]
    fn max_doubling_of_linear_field() {
        let f = ScalarField::Harmonic(HarmonicPolynomial::im_power(1));
        let cube = Cube::new(Vec2::ZERO, 0.1, 0.0);
        let m = max_doubling(&f, &cube, &half_plane()).unwrap();
        assert!((m.value - 16f64.ln()).abs() < 0.02 * 16f64.ln(), "{}", m.value);
        let at_center = doubling_index(&f, &[0.0, 0.0], 0.75 * cube.diameter(), &half_plane()).unwrap().n;
        assert!(m.value >= at_center - 1e-9);
    }
}
