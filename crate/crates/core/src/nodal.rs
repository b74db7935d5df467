//! Nodal sets: zero-level extraction by marching triangles and their measure in balls.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{FemField, Region, ScalarField};
use crate::geometry::{Aabb, Ball, PolygonDomain, Vec2};

/// Points on the 1D sampling grid of [`zeros_1d`].
pub const ZERO_GRID: usize = 10_000;

/// A piecewise-linear approximation of `Z(u) ∩ Ω`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodalSet {
    pub segments: Vec<[Vec2; 2]>,
    pub total_length: f64,
    pub resolution: f64,
}

impl NodalSet {
    fn from_segments(segments: Vec<[Vec2; 2]>, resolution: f64) -> Self {
        let total_length = segments.iter().map(|s| s[0].dist(s[1])).fold(0.0, |a, b| a + b);
        Self { segments, total_length, resolution }
    }

    /// Length of the set inside the open disk `B(center, r)`.
    pub fn length_in_ball(&self, center: Vec2, r: f64) -> f64 {
        self.segments
            .iter()
            .filter_map(|s| chord(s, center, r))
            .map(|(s0, s1, _)| s1 - s0)
            .sum()
    }

    /// Area of `(Z × ℝ) ∩ B³((center, t), r)`, independent of `t`.
    pub fn cylinder_area_in_ball(&self, center: Vec2, r: f64) -> f64 {
        self.segments
            .iter()
            .filter_map(|s| chord(s, center, r))
            .map(|(s0, s1, rho)| {
                // ∫ 2√(ρ² - σ²) dσ
                let f = |x: f64| x * (rho * rho - x * x).max(0.0).sqrt() + rho * rho * (x / rho).clamp(-1.0, 1.0).asin();
                f(s1) - f(s0)
            })
            .sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// A standalone SVG drawing of the segments over optional outline loops.
    pub fn to_svg(&self, outline: &[Vec<Vec2>]) -> String {
        let pts = self.segments.iter().flatten().chain(outline.iter().flatten()).copied();
        let bb = Aabb::from_points(pts);
        let (w, h) = if bb.width().is_finite() { (bb.width().max(1e-9), bb.height().max(1e-9)) } else { (1.0, 1.0) };
        let pad = 0.03 * w.max(h);
        let sx = 600.0 / (w + 2.0 * pad);
        let px = |p: Vec2| ((p.x - bb.min.x + pad) * sx, (bb.max.y - p.y + pad) * sx);
        let mut svg = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\">\n",
            (w + 2.0 * pad) * sx,
            (h + 2.0 * pad) * sx
        );
        for lp in outline {
            let d: Vec<String> = lp.iter().map(|&p| px(p)).map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            svg += &format!("<polygon points=\"{}\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n", d.join(" "));
        }
        svg += "<g stroke=\"#c0392b\" stroke-width=\"1.2\">\n";
        for s in &self.segments {
            let ((x0, y0), (x1, y1)) = (px(s[0]), px(s[1]));
            svg += &format!("<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x1:.2}\" y2=\"{y1:.2}\"/>\n");
        }
        svg += "</g>\n</svg>\n";
        svg
    }
}

/// `(σ0, σ1, ρ)`: the part of a segment inside the disk, as offsets along the
/// segment from the foot of the perpendicular, with `ρ` the half chord.
fn chord(s: &[Vec2; 2], c: Vec2, r: f64) -> Option<(f64, f64, f64)> {
    let len = s[0].dist(s[1]);
    if len == 0.0 {
        return None;
    }
    let e = (s[1] - s[0]) * (1.0 / len);
    let foot = (c - s[0]).dot(e);
    let d = (c - s[0]).cross(e).abs();
    let rho2 = r * r - d * d;
    if rho2 <= 0.0 {
        return None;
    }
    let rho = rho2.sqrt();
    let s0 = (-foot).max(-rho);
    let s1 = (len - foot).min(rho);
    (s1 > s0).then_some((s0, s1, rho))
}

/// Zero set of a planar field on a bounded region, or of a FEM field on its mesh.
pub fn extract_nodal(field: &ScalarField, region: &Region, resolution: f64) -> Result<NodalSet> {
    if let ScalarField::Fem(f) = field {
        return Ok(extract_fem(f, region, None));
    }
    let window = region
        .bounds()
        .ok_or_else(|| Error::Precondition("nodal extraction on an unbounded region needs a window".into()))?;
    extract_nodal_in(field, region, window, resolution)
}

/// Zero set of a planar field inside `window ∩ Ω`.
///
/// Analytic fields are sampled on a uniform grid of spacing at most
/// `resolution`; FEM fields use their own mesh and ignore `resolution`.
pub fn extract_nodal_in(field: &ScalarField, region: &Region, window: Aabb, resolution: f64) -> Result<NodalSet> {
    if field.dim() != 2 {
        return Err(Error::Precondition(format!("nodal extraction needs a planar field, got dimension {}", field.dim())));
    }
    if let ScalarField::Fem(f) = field {
        return Ok(extract_fem(f, region, Some(window)));
    }
    let diam = window.diameter();
    if !(resolution > 0.0) || resolution > diam / 8.0 {
        return Err(Error::TooCoarse { resolution, diameter: diam });
    }
    let nx = (window.width() / resolution).ceil().max(1.0) as usize;
    let ny = (window.height() / resolution).ceil().max(1.0) as usize;
    let (dx, dy) = (window.width() / nx as f64, window.height() / ny as f64);
    let at = |i: usize, j: usize| Vec2::new(window.min.x + dx * i as f64, window.min.y + dy * j as f64);
    let values: Vec<f64> = (0..(nx + 1) * (ny + 1))
        .into_par_iter()
        .map(|k| field.eval2(at(k % (nx + 1), k / (nx + 1))).unwrap_or(f64::NAN))
        .collect();
    let scale = values.iter().filter(|v| v.is_finite()).fold(0.0f64, |m, v| m.max(v.abs()));
    let eps = 1e-14 * scale.max(f64::MIN_POSITIVE);
    // grid points on ∂Ω carrying a rounding-level value are Dirichlet zeros
    let on_tol = 1e-9 * diam;
    let dirichlet: Vec<bool> = (0..values.len())
        .into_par_iter()
        .map(|k| {
            values[k].abs() <= 1e-10 * scale && region.distance_to_boundary(at(k % (nx + 1), k / (nx + 1))) <= on_tol
        })
        .collect();
    let band = 0.02 * dx.max(dy);
    let min_len = 1e-12 * diam;
    let segments: Vec<[Vec2; 2]> = (0..ny)
        .into_par_iter()
        .flat_map_iter(|j| {
            let mut out = Vec::new();
            for i in 0..nx {
                let idx = |a: usize, b: usize| b * (nx + 1) + a;
                let quads = [[(i, j), (i + 1, j), (i + 1, j + 1)], [(i, j), (i + 1, j + 1), (i, j + 1)]];
                for tri in quads {
                    let p = tri.map(|(a, b)| at(a, b));
                    let d = tri.map(|(a, b)| dirichlet[idx(a, b)]);
                    let v = tri.map(|(a, b)| if dirichlet[idx(a, b)] { 0.0 } else { values[idx(a, b)] });
                    if v.iter().any(|x| !x.is_finite()) {
                        continue;
                    }
                    if let Some(seg) = march(p, v, d, eps) {
                        clip_into(&mut out, seg, region, band, min_len);
                    }
                }
            }
            out
        })
        .collect();
    Ok(NodalSet::from_segments(segments, dx.max(dy)))
}

fn extract_fem(f: &FemField, region: &Region, window: Option<Aabb>) -> NodalSet {
    let mesh = &f.mesh;
    let scale = f.max_abs();
    let eps = 1e-14 * scale.max(f64::MIN_POSITIVE);
    let diam = mesh.bbox().diameter();
    let band = 1e-9 * diam;
    let segments: Vec<[Vec2; 2]> = (0..mesh.num_triangles())
        .into_par_iter()
        .flat_map_iter(|t| {
            let mut out = Vec::new();
            let p = mesh.corners(t);
            if window.is_some_and(|w| !Aabb::from_points(p).intersects(&w)) {
                return out;
            }
            let ids = mesh.triangles[t];
            let v = ids.map(|i| f.values[i]);
            let bnd = ids.map(|i| mesh.boundary_vertex[i]);
            if let Some(seg) = march(p, v, bnd, eps) {
                clip_into(&mut out, seg, region, band, 1e-12 * diam);
            }
            out
        })
        .collect();
    NodalSet::from_segments(segments, mesh.h_max)
}

/// Zero segment of the linear interpolant on one triangle.
///
/// A zero at a Dirichlet vertex is kept only as the start of a segment into
/// the triangle; other exact zeros are nudged to `+eps`.
fn march(p: [Vec2; 3], mut v: [f64; 3], dirichlet: [bool; 3], eps: f64) -> Option<[Vec2; 2]> {
    let on_bnd: Vec<usize> = (0..3).filter(|&i| dirichlet[i] && v[i] == 0.0).collect();
    let crossing = |i: usize, j: usize, v: &[f64; 3]| p[i] + (p[j] - p[i]) * (v[i] / (v[i] - v[j]));
    match on_bnd.len() {
        0 => {}
        1 => {
            let b = on_bnd[0];
            let (i, j) = ((b + 1) % 3, (b + 2) % 3);
            return (v[i] * v[j] < 0.0).then(|| [p[b], crossing(i, j, &v)]);
        }
        _ => return None,
    }
    for x in &mut v {
        if *x == 0.0 {
            *x = eps;
        }
    }
    let mut pts = Vec::with_capacity(2);
    for (i, j) in [(0, 1), (1, 2), (2, 0)] {
        if (v[i] < 0.0) != (v[j] < 0.0) {
            pts.push(crossing(i, j, &v));
        }
    }
    (pts.len() == 2).then(|| [pts[0], pts[1]])
}

/// Pushes the parts of `seg` inside Ω at distance at least `band` from ∂Ω.
fn clip_into(out: &mut Vec<[Vec2; 2]>, seg: [Vec2; 2], region: &Region, band: f64, min_len: f64) {
    let [a, b] = seg;
    for (t0, t1) in region.clip_segment(a, b) {
        let (p, q) = (a.lerp(b, t0), a.lerp(b, t1));
        for (s0, s1) in away_from_boundary(p, q, region, band) {
            let (x, y) = (p.lerp(q, s0), p.lerp(q, s1));
            if x.dist(y) > min_len {
                out.push([x, y]);
            }
        }
    }
}

fn away_from_boundary(p: Vec2, q: Vec2, region: &Region, band: f64) -> Vec<(f64, f64)> {
    if matches!(region, Region::Plane) {
        return vec![(0.0, 1.0)];
    }
    let len = p.dist(q);
    let g = |t: f64| region.distance_to_boundary(p.lerp(q, t)) - band;
    let (g0, g1) = (g(0.0), g(1.0));
    // distance is 1-Lipschitz
    if g0.min(g1) >= 0.5 * len {
        return vec![(0.0, 1.0)];
    }
    let n = 8;
    let ts: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let gs: Vec<f64> = ts.iter().map(|&t| g(t)).collect();
    let mut cuts = vec![0.0];
    for k in 0..n {
        if (gs[k] >= 0.0) != (gs[k + 1] >= 0.0) {
            let (mut lo, mut hi) = (ts[k], ts[k + 1]);
            let lo_pos = gs[k] >= 0.0;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if (g(mid) >= 0.0) == lo_pos {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            cuts.push(0.5 * (lo + hi));
        }
    }
    cuts.push(1.0);
    cuts.windows(2).filter(|w| w[1] > w[0] && g(0.5 * (w[0] + w[1])) >= 0.0).map(|w| (w[0], w[1])).collect()
}

/// Interior zeros of `f` on `(a, b)`: sign changes on a grid of
/// [`ZERO_GRID`] intervals refined by bisection to `1e-12·(b - a)`.
pub fn zeros_1d(f: impl Fn(f64) -> f64, a: f64, b: f64) -> Vec<f64> {
    let n = ZERO_GRID;
    let len = b - a;
    let xs: Vec<f64> = (0..=n).map(|i| a + len * i as f64 / n as f64).collect();
    let vs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut roots = Vec::new();
    for i in 0..n {
        if vs[i] == 0.0 {
            roots.push(xs[i]);
            continue;
        }
        if vs[i + 1] == 0.0 || (vs[i] < 0.0) == (vs[i + 1] < 0.0) {
            continue;
        }
        let (mut lo, mut hi) = (xs[i], xs[i + 1]);
        let neg_lo = vs[i] < 0.0;
        while hi - lo > 1e-12 * len {
            let mid = 0.5 * (lo + hi);
            let fm = f(mid);
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if (fm < 0.0) == neg_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    if vs[n] == 0.0 {
        roots.push(b);
    }
    let tol = 1e-9 * len;
    roots.retain(|&x| x > a + tol && x < b - tol);
    roots
}

/// Number of zeros of a 1D field in the open interval `(a, b)`.
pub fn count_zeros_1d(field: &ScalarField, a: f64, b: f64) -> Result<usize> {
    if field.dim() != 1 {
        return Err(Error::Precondition("count_zeros_1d needs a 1D field".into()));
    }
    if !(b > a) {
        return Err(Error::Precondition(format!("empty interval ({a}, {b})")));
    }
    Ok(zeros_1d(|x| field.eval(&[x]).unwrap_or(f64::NAN), a, b).len())
}

/// `H^{d-1}(Z(field) ∩ B ∩ Ω)` for planar fields and for extensions of 1D
/// and planar fields, whose zero sets are cylinders over the inner zero set.
pub fn nodal_measure(field: &ScalarField, ball: &Ball, region: &Region, resolution: f64) -> Result<f64> {
    let c = ball.center2();
    let r = ball.radius;
    let res = resolution.min(r / 20.0);
    let window = Aabb::around(c, r);
    match field.as_extension() {
        None => {
            let ns = extract_nodal_in(field, region, window, res)?;
            Ok(ns.length_in_ball(c, r))
        }
        Some((inner, _)) if inner.dim() == 1 => {
            let (lo, hi) = match region {
                Region::Strip { a, b } => (a.max(c.x - r), b.min(c.x + r)),
                Region::Plane => (c.x - r, c.x + r),
                _ => return Err(Error::Precondition("a 1D extension lives on a strip".into())),
            };
            if hi <= lo {
                return Ok(0.0);
            }
            let zs = zeros_1d(|x| inner.eval(&[x]).unwrap_or(f64::NAN), lo, hi);
            Ok(zs.iter().map(|x| 2.0 * (r * r - (x - c.x).powi(2)).max(0.0).sqrt()).sum())
        }
        Some((inner, _)) => {
            let ns = extract_nodal_in(inner, region, window, res)?;
            Ok(ns.cylinder_area_in_ball(c, r))
        }
    }
}

/// Outline loops for SVG output.
pub fn outline(domain: &PolygonDomain) -> Vec<Vec<Vec2>> {
    domain.loops().to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::HarmonicPolynomial;
    use crate::spectral::bessel::bessel_zero;
    use std::f64::consts::PI;

    fn square() -> Region {
        Region::polygon(PolygonDomain::unit_square()).unwrap()
    }

    #[test]
    fn rectangle_mode_length() {
        let f = ScalarField::Rectangle { m: 3, n: 2, a: 1.0, b: 1.0 };
        let coarse = extract_nodal(&f, &square(), 0.005).unwrap().total_length;
        let fine = extract_nodal(&f, &square(), 0.0025).unwrap().total_length;
        assert!((coarse - 3.0).abs() < 0.015, "{coarse}");
        // saddle artifacts shrink with the grid
        assert!((fine - 3.0).abs() < 0.75 * (coarse - 3.0).abs(), "{fine}");
    }

    #[test]
    fn ground_state_has_empty_interior_nodal_set() {
        let f = ScalarField::Rectangle { m: 1, n: 1, a: 1.0, b: 1.0 };
        let ns = extract_nodal(&f, &square(), 0.01).unwrap();
        assert!(ns.total_length < 1e-6, "{}", ns.total_length);
    }

    #[test]
    fn disk_nodal_circle() {
        let alpha = bessel_zero(0, 2);
        let f = ScalarField::Disk { k: 0, j: 2, alpha };
        let region = Region::Disk { center: Vec2::ZERO, radius: 1.0 };
        let ns = extract_nodal(&f, &region, 0.005).unwrap();
        let exact = 2.0 * PI * bessel_zero(0, 1) / alpha;
        assert!((ns.total_length - exact).abs() < 0.005 * exact, "{} vs {exact}", ns.total_length);
    }

    #[test]
    fn harmonic_lines_through_origin() {
        let f = ScalarField::Harmonic(HarmonicPolynomial::re_power(2));
        let m = nodal_measure(&f, &Ball::new2(Vec2::ZERO, 1.0), &Region::Plane, 0.01).unwrap();
        assert!((m - 4.0).abs() < 1e-3, "{m}");
    }

    #[test]
    fn cylinder_area_of_a_line() {
        // a plane through the center of a unit ball cuts a unit disk
        let ns = NodalSet::from_segments(vec![[Vec2::new(-2.0, 0.0), Vec2::new(2.0, 0.0)]], 0.1);
        assert!((ns.cylinder_area_in_ball(Vec2::ZERO, 1.0) - PI).abs() < 1e-12);
        assert!((ns.length_in_ball(Vec2::new(0.0, 0.6), 1.0) - 1.6).abs() < 1e-12);
    }

    #[test]
    fn extension_of_planar_field() {
        let u = ScalarField::Rectangle { m: 2, n: 1, a: 1.0, b: 1.0 };
        let h = crate::fields::make_extension(u, 5.0 * PI * PI).unwrap();
        let ball = Ball::new3([0.5, 0.5, 0.3], 0.2);
        let m = nodal_measure(&h, &ball, &square(), 0.01).unwrap();
        assert!((m - PI * 0.04).abs() < 1e-6, "{m}");
    }

    #[test]
    fn extension_of_sine() {
        let u = ScalarField::Sine { m: 3, length: 1.0 };
        let h = crate::fields::make_extension(u, 9.0 * PI * PI).unwrap();
        let ball = Ball::new2(Vec2::new(0.5, 0.0), 0.3);
        let m = nodal_measure(&h, &ball, &Region::Strip { a: 0.0, b: 1.0 }, 0.01).unwrap();
        let d = 0.5 - 1.0 / 3.0;
        let exact = 2.0 * 2.0 * (0.09f64 - d * d).sqrt();
        assert!((m - exact).abs() < 1e-9, "{m} vs {exact}");
    }

    #[test]
    fn sine_zero_counts() {
        for m in 1..=7 {
            let f = ScalarField::Sine { m, length: 1.0 };
            assert_eq!(count_zeros_1d(&f, 0.0, 1.0).unwrap(), m as usize - 1);
        }
    }

    #[test]
    fn too_coarse_is_rejected() {
        let f = ScalarField::Rectangle { m: 1, n: 2, a: 1.0, b: 1.0 };
        assert!(matches!(extract_nodal(&f, &square(), 0.5), Err(Error::TooCoarse { .. })));
    }

    #[test]
    fn fem_nodal_line_of_second_mode() {
        let domain = PolygonDomain::unit_square();
        let sp = crate::spectral::Spectrum::for_domain(&domain, 0.04, 3).unwrap();
        let region = Region::polygon(domain).unwrap();
        // modes 2 and 3 are degenerate; their nodal lines cross the square
        let ns = extract_nodal(&sp.field(1), &region, 0.04).unwrap();
        assert!(ns.total_length > 0.95 && ns.total_length < 1.5, "{}", ns.total_length);
        let json = ns.to_json().unwrap();
        assert!(json.contains("total_length"));
        assert!(ns.to_svg(&outline(&PolygonDomain::unit_square())).starts_with("<svg"));
    }
}
