//! Scalar fields with a common evaluation contract, the regions they live on,
//! and supremum estimation on balls.

mod harmonic;
mod spec;
mod sup;

use std::f64::consts::PI;
use std::sync::Arc;

pub use harmonic::HarmonicPolynomial;
pub use spec::parse_field_spec;
pub use sup::{holder_boundary_check, sup_on_ball, HolderFit, SupEstimate, SUP_BASE_SAMPLES};

use crate::error::{Error, Result};
use crate::geometry::{LipschitzPatch, Location, PolygonDomain, Vec2};
use crate::meshing::{Locator, TriangleMesh};
use crate::spectral::bessel::{bessel_j, bessel_j_prime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Fem,
    Rectangle,
    Disk,
    HarmonicPoly,
    Sine,
    Extension,
}

/// A piecewise-linear field on a mesh.
#[derive(Debug, Clone)]
pub struct FemField {
    pub mesh: Arc<TriangleMesh>,
    pub locator: Arc<Locator>,
    /// One value per mesh vertex, zero on Dirichlet vertices.
    pub values: Arc<Vec<f64>>,
    pub lambda: Option<f64>,
}

impl FemField {
    pub fn new(mesh: Arc<TriangleMesh>, values: Vec<f64>, lambda: Option<f64>) -> Self {
        assert_eq!(values.len(), mesh.num_vertices(), "one value per vertex");
        let locator = Arc::new(Locator::new(&mesh));
        Self { mesh, locator, values: Arc::new(values), lambda }
    }

    /// Same mesh, different values.
    pub fn with_values(&self, values: Vec<f64>, lambda: Option<f64>) -> Self {
        assert_eq!(values.len(), self.mesh.num_vertices());
        Self { mesh: self.mesh.clone(), locator: self.locator.clone(), values: Arc::new(values), lambda }
    }

    pub fn eval(&self, p: Vec2) -> Option<f64> {
        let (t, bc) = self.locator.locate(&self.mesh, p)?;
        let [a, b, c] = self.mesh.triangles[t];
        Some(bc[0] * self.values[a] + bc[1] * self.values[b] + bc[2] * self.values[c])
    }

    /// Constant gradient of triangle `t`.
    pub fn triangle_gradient(&self, t: usize) -> Vec2 {
        let [ia, ib, ic] = self.mesh.triangles[t];
        let [a, b, c] = self.mesh.corners(t);
        let two_area = crate::geometry::orient(a, b, c);
        let (ua, ub, uc) = (self.values[ia], self.values[ib], self.values[ic]);
        let gx = (ua * (b.y - c.y) + ub * (c.y - a.y) + uc * (a.y - b.y)) / two_area;
        let gy = (ua * (c.x - b.x) + ub * (a.x - c.x) + uc * (b.x - a.x)) / two_area;
        Vec2::new(gx, gy)
    }

    pub fn grad(&self, p: Vec2) -> Option<Vec2> {
        let (t, _) = self.locator.locate(&self.mesh, p)?;
        Some(self.triangle_gradient(t))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// A scalar field on ℝ^d, `d ∈ {1, 2, 3}`.
#[derive(Debug, Clone)]
pub enum ScalarField {
    Harmonic(HarmonicPolynomial),
    /// `sin(mπx/a)·sin(nπy/b)` on `(0,a)×(0,b)`.
    Rectangle { m: u32, n: u32, a: f64, b: f64 },
    /// `J_k(α·r)·cos(kθ)` on the unit disk, `α = j_{k,j}`.
    Disk { k: u32, j: u32, alpha: f64 },
    /// `sin(mπx/length)` on `(0, length)`.
    Sine { m: u32, length: f64 },
    Fem(FemField),
    /// `u(x)·e^{√λ·t}`, one dimension above `inner`.
    Extension { inner: Box<ScalarField>, lambda: f64 },
}

impl ScalarField {
    pub fn constant(c: f64) -> Self {
        ScalarField::Harmonic(HarmonicPolynomial::constant(c))
    }

    pub fn kind(&self) -> FieldKind {
        match self {
            ScalarField::Harmonic(_) => FieldKind::HarmonicPoly,
            ScalarField::Rectangle { .. } => FieldKind::Rectangle,
            ScalarField::Disk { .. } => FieldKind::Disk,
            ScalarField::Sine { .. } => FieldKind::Sine,
            ScalarField::Fem(_) => FieldKind::Fem,
            ScalarField::Extension { .. } => FieldKind::Extension,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ScalarField::Sine { .. } => 1,
            ScalarField::Extension { inner, .. } => inner.dim() + 1,
            _ => 2,
        }
    }

    /// Dirichlet eigenvalue of the field, where it is one.
    pub fn eigenvalue(&self) -> Option<f64> {
        match self {
            ScalarField::Rectangle { m, n, a, b } => {
                Some(PI * PI * ((*m as f64 / a).powi(2) + (*n as f64 / b).powi(2)))
            }
            ScalarField::Disk { alpha, .. } => Some(alpha * alpha),
            ScalarField::Sine { m, length } => Some((*m as f64 * PI / length).powi(2)),
            ScalarField::Fem(f) => f.lambda,
            _ => None,
        }
    }

    /// Value at `p`; `None` outside the set where the field is defined
    /// (a FEM field off its mesh).
    pub fn eval(&self, p: &[f64]) -> Option<f64> {
        match self {
            ScalarField::Harmonic(h) => Some(h.eval(Vec2::new(p[0], p[1]))),
            ScalarField::Rectangle { m, n, a, b } => {
                Some((*m as f64 * PI * p[0] / a).sin() * (*n as f64 * PI * p[1] / b).sin())
            }
            ScalarField::Disk { k, alpha, .. } => {
                let r = p[0].hypot(p[1]);
                let th = p[1].atan2(p[0]);
                Some(bessel_j(*k, alpha * r) * (*k as f64 * th).cos())
            }
            ScalarField::Sine { m, length } => Some((*m as f64 * PI * p[0] / length).sin()),
            ScalarField::Fem(f) => f.eval(Vec2::new(p[0], p[1])),
            ScalarField::Extension { inner, lambda } => {
                let d = inner.dim();
                Some(inner.eval(p)? * (lambda.sqrt() * p[d]).exp())
            }
        }
    }

    /// Gradient at `p`; unused components are zero.
    pub fn grad(&self, p: &[f64]) -> Option<[f64; 3]> {
        match self {
            ScalarField::Harmonic(h) => {
                let g = h.eval_grad(Vec2::new(p[0], p[1])).1;
                Some([g.x, g.y, 0.0])
            }
            ScalarField::Rectangle { m, n, a, b } => {
                let (kx, ky) = (*m as f64 * PI / a, *n as f64 * PI / b);
                let (sx, cx) = (kx * p[0]).sin_cos();
                let (sy, cy) = (ky * p[1]).sin_cos();
                Some([kx * cx * sy, ky * sx * cy, 0.0])
            }
            ScalarField::Disk { k, alpha, .. } => {
                let r = p[0].hypot(p[1]);
                if r == 0.0 {
                    let g = if *k == 1 { 0.5 * alpha } else { 0.0 };
                    return Some([g, 0.0, 0.0]);
                }
                let th = p[1].atan2(p[0]);
                let kf = *k as f64;
                let dr = alpha * bessel_j_prime(*k, alpha * r) * (kf * th).cos();
                let dth = -kf * bessel_j(*k, alpha * r) * (kf * th).sin() / r;
                let (s, c) = th.sin_cos();
                Some([dr * c - dth * s, dr * s + dth * c, 0.0])
            }
            ScalarField::Sine { m, length } => {
                let w = *m as f64 * PI / length;
                Some([w * (w * p[0]).cos(), 0.0, 0.0])
            }
            ScalarField::Fem(f) => {
                let g = f.grad(Vec2::new(p[0], p[1]))?;
                Some([g.x, g.y, 0.0])
            }
            ScalarField::Extension { inner, lambda } => {
                let d = inner.dim();
                let s = lambda.sqrt();
                let e = (s * p[d]).exp();
                let mut g = inner.grad(p)?;
                for gi in g.iter_mut().take(d) {
                    *gi *= e;
                }
                g[d] = s * inner.eval(p)? * e;
                Some(g)
            }
        }
    }

    /// Convenience for planar fields.
    pub fn eval2(&self, p: Vec2) -> Option<f64> {
        self.eval(&[p.x, p.y])
    }

    /// `(inner, λ)` for an extension.
    pub fn as_extension(&self) -> Option<(&ScalarField, f64)> {
        match self {
            ScalarField::Extension { inner, lambda } => Some((inner, *lambda)),
            _ => None,
        }
    }

    pub fn as_fem(&self) -> Option<&FemField> {
        match self {
            ScalarField::Fem(f) => Some(f),
            _ => None,
        }
    }
}

/// `h(x, t) = u(x)·e^{√λ·t}`.
pub fn make_extension(u: ScalarField, lambda: f64) -> Result<ScalarField> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Precondition(format!("extension needs λ > 0, got {lambda}")));
    }
    if u.dim() > 2 {
        return Err(Error::Precondition("only 1D and 2D fields can be extended".into()));
    }
    Ok(ScalarField::Extension { inner: Box::new(u), lambda })
}

/// The set Ω a planar field is considered on.
#[derive(Debug, Clone)]
pub enum Region {
    Plane,
    /// The epigraph of the chart graph, extended linearly beyond the chart.
    Patch(LipschitzPatch),
    Polygon(Arc<PolygonRegion>),
    /// `(a, b) × ℝ`, the cylinder over a 1D interval.
    Strip { a: f64, b: f64 },
    /// An open round disk.
    Disk { center: Vec2, radius: f64 },
}

#[derive(Debug, Clone)]
pub struct PolygonRegion {
    pub domain: PolygonDomain,
    cover: Vec<[Vec2; 3]>,
}

impl Region {
    /// The domain an analytic field is an eigenfunction of, or the plane for
    /// harmonic polynomials. FEM fields use the polygon bounded by their mesh.
    pub fn natural_for(field: &ScalarField) -> Result<Self> {
        match field {
            ScalarField::Harmonic(_) => Ok(Region::Plane),
            ScalarField::Rectangle { a, b, .. } => Region::polygon(PolygonDomain::rectangle(*a, *b)?),
            ScalarField::Disk { .. } => Ok(Region::Disk { center: Vec2::ZERO, radius: 1.0 }),
            ScalarField::Sine { length, .. } => Ok(Region::Strip { a: 0.0, b: *length }),
            ScalarField::Fem(f) => Region::polygon(f.mesh.boundary_domain()?),
            ScalarField::Extension { inner, .. } => Region::natural_for(inner),
        }
    }

    pub fn polygon(domain: PolygonDomain) -> Result<Self> {
        let cover = crate::meshing::polygon_cover(&domain)?;
        Ok(Region::Polygon(Arc::new(PolygonRegion { domain, cover })))
    }

    pub fn location(&self, p: Vec2) -> Location {
        match self {
            Region::Plane => Location::Inside,
            Region::Patch(patch) => patch.epigraph_location(p),
            Region::Polygon(pr) => pr.domain.contains(p),
            Region::Strip { a, b } => {
                let tol = 1e-12 * (b - a);
                if p.x < a - tol || p.x > b + tol {
                    Location::Outside
                } else if p.x <= a + tol || p.x >= b - tol {
                    Location::Boundary
                } else {
                    Location::Inside
                }
            }
            Region::Disk { center, radius } => {
                let d = p.dist(*center) - radius;
                let tol = 1e-12 * radius;
                if d > tol {
                    Location::Outside
                } else if d >= -tol {
                    Location::Boundary
                } else {
                    Location::Inside
                }
            }
        }
    }

    pub fn in_closure(&self, p: Vec2) -> bool {
        self.location(p).in_closure()
    }

    /// Counter-clockwise triangles with disjoint interiors whose union contains
    /// `Ω ∩ B(center, radius)` and lies in the closure of Ω.
    pub fn cover(&self, center: Vec2, radius: f64) -> Vec<[Vec2; 3]> {
        match self {
            Region::Plane => {
                let r = 4.0 * radius;
                let v = [0.5, 7.0 / 6.0, 11.0 / 6.0].map(|a: f64| center + Vec2::from_angle(a * PI) * r);
                vec![v]
            }
            Region::Patch(patch) => {
                let l = patch.to_local(center);
                let r = radius * (1.0 + 1e-9);
                patch.epigraph_triangles(l.x - r, l.x + r, l.y + r)
            }
            Region::Polygon(pr) => {
                let bb = crate::geometry::Aabb::around(center, radius);
                pr.cover
                    .iter()
                    .filter(|t| crate::geometry::Aabb::from_points(t.iter().copied()).intersects(&bb))
                    .copied()
                    .collect()
            }
            Region::Strip { a, b } => {
                let x0 = a.max(center.x - radius);
                let x1 = b.min(center.x + radius);
                if x1 <= x0 {
                    return Vec::new();
                }
                let (y0, y1) = (center.y - radius, center.y + radius);
                let (p, q, r, s) = (Vec2::new(x0, y0), Vec2::new(x1, y0), Vec2::new(x1, y1), Vec2::new(x0, y1));
                vec![[p, q, r], [p, r, s]]
            }
            Region::Disk { center: c, radius: rd } => {
                // inscribed polygon; misses a sliver of relative area ~1e-4
                let n = 1024;
                let bb = crate::geometry::Aabb::around(center, radius);
                (0..n)
                    .map(|i| {
                        let a0 = 2.0 * PI * i as f64 / n as f64;
                        let a1 = 2.0 * PI * (i + 1) as f64 / n as f64;
                        [*c, *c + Vec2::from_angle(a0) * *rd, *c + Vec2::from_angle(a1) * *rd]
                    })
                    .filter(|t| crate::geometry::Aabb::from_points(t.iter().copied()).intersects(&bb))
                    .collect()
            }
        }
    }

    /// Bounding box of Ω, if bounded.
    pub fn bounds(&self) -> Option<crate::geometry::Aabb> {
        match self {
            Region::Polygon(pr) => Some(pr.domain.bbox()),
            Region::Disk { center, radius } => Some(crate::geometry::Aabb::around(*center, *radius)),
            _ => None,
        }
    }

    /// Distance from `p` to ∂Ω.
    pub fn distance_to_boundary(&self, p: Vec2) -> f64 {
        match self {
            Region::Plane => f64::INFINITY,
            Region::Patch(patch) => {
                let l = patch.to_local(p);
                let d = patch.distance_to_graph(p);
                if l.x.abs() > patch.radius() {
                    // the linear extension beyond the chart; vertical gap bounds the distance
                    d.min((l.y - patch.graph(l.x)).abs())
                } else {
                    d
                }
            }
            Region::Polygon(pr) => pr.domain.distance_to_boundary(p),
            Region::Strip { a, b } => (p.x - a).abs().min((b - p.x).abs()),
            Region::Disk { center, radius } => (p.dist(*center) - radius).abs(),
        }
    }

    /// Parameter intervals `[t0, t1] ⊂ [0, 1]` on which `a + t(b - a)` lies in Ω.
    pub fn clip_segment(&self, a: Vec2, b: Vec2) -> Vec<(f64, f64)> {
        let d = b - a;
        let interval = |lo: f64, hi: f64| {
            let (lo, hi) = (lo.max(0.0), hi.min(1.0));
            if hi > lo {
                vec![(lo, hi)]
            } else {
                Vec::new()
            }
        };
        match self {
            Region::Plane => vec![(0.0, 1.0)],
            Region::Polygon(pr) => pr.domain.clip_segment(a, b),
            Region::Strip { a: xa, b: xb } => {
                if d.x.abs() < 1e-300 {
                    return if a.x > *xa && a.x < *xb { vec![(0.0, 1.0)] } else { Vec::new() };
                }
                let (t0, t1) = ((xa - a.x) / d.x, (xb - a.x) / d.x);
                interval(t0.min(t1), t0.max(t1))
            }
            Region::Disk { center, radius } => {
                let w = a - *center;
                let (qa, qb, qc) = (d.norm2(), 2.0 * w.dot(d), w.norm2() - radius * radius);
                if qa == 0.0 {
                    return if qc < 0.0 { vec![(0.0, 1.0)] } else { Vec::new() };
                }
                let disc = qb * qb - 4.0 * qa * qc;
                if disc <= 0.0 {
                    return Vec::new();
                }
                let s = disc.sqrt();
                interval((-qb - s) / (2.0 * qa), (-qb + s) / (2.0 * qa))
            }
            Region::Patch(patch) => {
                // height above the graph is piecewise linear in t between chart breakpoints
                let (la, lb) = (patch.to_local(a), patch.to_local(b));
                let mut ts = vec![0.0, 1.0];
                let dx = lb.x - la.x;
                if dx.abs() > 1e-300 {
                    for i in 0..=patch.intervals() {
                        let t = (patch.abscissa(i) - la.x) / dx;
                        if t > 0.0 && t < 1.0 {
                            ts.push(t);
                        }
                    }
                }
                ts.sort_by(|x, y| x.total_cmp(y));
                let h = |t: f64| {
                    let l = la.lerp(lb, t);
                    l.y - patch.graph(l.x)
                };
                let mut cuts = Vec::new();
                for w in ts.windows(2) {
                    let (h0, h1) = (h(w[0]), h(w[1]));
                    cuts.push(w[0]);
                    if (h0 < 0.0) != (h1 < 0.0) && h0 != h1 {
                        cuts.push(w[0] + (w[1] - w[0]) * h0 / (h0 - h1));
                    }
                }
                cuts.push(1.0);
                let mut out: Vec<(f64, f64)> = Vec::new();
                for w in cuts.windows(2) {
                    if w[1] <= w[0] || h(0.5 * (w[0] + w[1])) <= 0.0 {
                        continue;
                    }
                    match out.last_mut() {
                        Some(last) if last.1 == w[0] => last.1 = w[1],
                        _ => out.push((w[0], w[1])),
                    }
                }
                out
            }
        }
    }

    /// A length scale for tolerances.
    pub fn scale(&self) -> f64 {
        match self {
            Region::Plane => 1.0,
            Region::Patch(p) => p.radius(),
            Region::Polygon(pr) => pr.domain.diameter(),
            Region::Strip { a, b } => b - a,
            Region::Disk { radius, .. } => 2.0 * radius,
        }
    }
}
