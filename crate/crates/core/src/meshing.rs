//! Conforming triangle meshes of polygon domains.
//!
//! Triangulation is a constrained Delaunay triangulation seeded with an
//! equilateral lattice and refined to an angle floor; `refine` is uniform red
//! refinement.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use spade::{AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation};

use crate::error::{Error, Result};
use crate::geometry::{orient, Aabb, PolygonDomain, Vec2};

/// Smallest interior angle accepted by `validate`, in degrees.
pub const MIN_ANGLE_DEG: f64 = 20.0;

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<Vec2>,
    /// Counter-clockwise vertex index triples.
    pub triangles: Vec<[usize; 3]>,
    pub boundary_vertex: Vec<bool>,
    /// Longest edge.
    pub h_max: f64,
}

#[derive(Serialize, Deserialize)]
struct MeshFile {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<u8>,
}

impl TriangleMesh {
    /// Builds a mesh, computing `h_max` from the edges.
    pub fn new(vertices: Vec<Vec2>, triangles: Vec<[usize; 3]>, boundary_vertex: Vec<bool>) -> Self {
        let mut m = Self { vertices, triangles, boundary_vertex, h_max: 0.0 };
        m.h_max = m.edge_lengths().fold(0.0, f64::max);
        m
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn corners(&self, t: usize) -> [Vec2; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        0.5 * orient(a, b, c)
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    fn edge_lengths(&self) -> impl Iterator<Item = f64> + '_ {
        self.triangles.iter().flat_map(move |t| {
            (0..3).map(move |i| self.vertices[t[i]].dist(self.vertices[t[(i + 1) % 3]]))
        })
    }

    pub fn min_edge(&self) -> f64 {
        self.edge_lengths().fold(f64::INFINITY, f64::min)
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle_deg(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| min_angle(self.corners(t)))
            .fold(f64::INFINITY, f64::min)
            .to_degrees()
    }

    /// Undirected edges with the number of triangles using each one.
    pub fn edge_counts(&self) -> HashMap<(usize, usize), usize> {
        let mut counts = HashMap::with_capacity(3 * self.triangles.len());
        for t in &self.triangles {
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        counts
    }

    /// The polygon bounded by the mesh: hull edges chained into loops, with
    /// vertices interior to straight runs dropped. The loop of largest area
    /// comes first.
    pub fn boundary_domain(&self) -> Result<PolygonDomain> {
        let counts = self.edge_counts();
        let mut next: HashMap<usize, usize> = HashMap::new();
        for t in &self.triangles {
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                if counts[&(a.min(b), a.max(b))] == 1 && next.insert(a, b).is_some() {
                    return Err(Error::Meshing(format!("vertex {a} starts two hull edges")));
                }
            }
        }
        let mut starts: Vec<usize> = next.keys().copied().collect();
        starts.sort_unstable();
        let mut seen = vec![false; self.vertices.len()];
        let mut loops: Vec<Vec<Vec2>> = Vec::new();
        for s in starts {
            if seen[s] {
                continue;
            }
            let mut ring = Vec::new();
            let mut v = s;
            while !seen[v] {
                seen[v] = true;
                ring.push(self.vertices[v]);
                v = *next.get(&v).ok_or_else(|| Error::Meshing("open hull chain".into()))?;
            }
            let tol = 1e-9 * self.h_max * self.h_max;
            let n = ring.len();
            let kept: Vec<Vec2> = (0..n)
                .filter(|&i| orient(ring[(i + n - 1) % n], ring[i], ring[(i + 1) % n]).abs() > tol)
                .map(|i| ring[i])
                .collect();
            loops.push(kept);
        }
        let area = |l: &Vec<Vec2>| (0..l.len()).map(|i| l[i].cross(l[(i + 1) % l.len()])).sum::<f64>();
        loops.sort_by(|a, b| area(b).total_cmp(&area(a)));
        if loops.is_empty() {
            return Err(Error::Meshing("mesh has no boundary".into()));
        }
        let outer = loops.remove(0);
        PolygonDomain::new(outer, loops)
    }

    /// Checks conformity, orientation and the angle floor.
    pub fn validate(&self) -> Result<()> {
        for (i, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= self.vertices.len()) {
                return Err(Error::Meshing(format!("triangle {i} references a missing vertex")));
            }
            if self.triangle_area(i) <= 0.0 {
                return Err(Error::DegenerateTriangle { index: i });
            }
        }
        let counts = self.edge_counts();
        for (&(a, b), &c) in &counts {
            if c > 2 {
                return Err(Error::Meshing(format!("edge ({a}, {b}) is shared by {c} triangles")));
            }
            if c == 1 && !(self.boundary_vertex[a] && self.boundary_vertex[b]) {
                return Err(Error::Meshing(format!("edge ({a}, {b}) is on the hull but not on the boundary")));
            }
        }
        let angle = self.min_angle_deg();
        if angle < MIN_ANGLE_DEG {
            return Err(Error::Meshing(format!("minimum angle {angle:.2}° is below {MIN_ANGLE_DEG}°")));
        }
        Ok(())
    }

    pub fn bbox(&self) -> Aabb {
        Aabb::from_points(self.vertices.iter().copied())
    }

    pub fn to_json(&self) -> Result<String> {
        let f = MeshFile {
            vertices: self.vertices.iter().map(|v| [v.x, v.y]).collect(),
            triangles: self.triangles.clone(),
            boundary: self.boundary_vertex.iter().map(|&b| u8::from(b)).collect(),
        };
        Ok(serde_json::to_string(&f)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: MeshFile = serde_json::from_str(s)?;
        if f.boundary.len() != f.vertices.len() {
            return Err(Error::Schema { what: "mesh".into(), detail: "boundary flags and vertices differ in length".into() });
        }
        let m = Self::new(
            f.vertices.into_iter().map(|[x, y]| Vec2::new(x, y)).collect(),
            f.triangles,
            f.boundary.into_iter().map(|b| b != 0).collect(),
        );
        if m.triangles.iter().flatten().any(|&v| v >= m.vertices.len()) {
            return Err(Error::Schema { what: "mesh".into(), detail: "triangle index out of range".into() });
        }
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

fn min_angle([a, b, c]: [Vec2; 3]) -> f64 {
    let ang = |p: Vec2, q: Vec2, r: Vec2| {
        let (u, v) = (q - p, r - p);
        u.cross(v).abs().atan2(u.dot(v))
    };
    ang(a, b, c).min(ang(b, c, a)).min(ang(c, a, b))
}

/// Triangulates `domain` with target edge length `h`.
///
/// Triangles touching a reentrant vertex are graded down to about `h/4`.
pub fn triangulate(domain: &PolygonDomain, h: f64) -> Result<TriangleMesh> {
    let diam = domain.diameter();
    if !(h > 0.0 && h < 0.25 * diam) {
        return Err(Error::Precondition(format!("target size {h} must lie in (0, diameter/4 = {})", 0.25 * diam)));
    }
    let reentrant = domain.reentrant_vertices();
    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> = ConstrainedDelaunayTriangulation::new();
    let insert = |cdt: &mut ConstrainedDelaunayTriangulation<Point2<f64>>, p: Vec2| {
        cdt.insert(Point2::new(p.x, p.y)).map_err(|e| Error::Meshing(format!("insertion of ({}, {}) failed: {e:?}", p.x, p.y)))
    };

    for lp in domain.loops() {
        let n = lp.len();
        let mut handles = Vec::new();
        for i in 0..n {
            let (a, b) = (lp[i], lp[(i + 1) % n]);
            for p in edge_points(a, b, h, &reentrant) {
                handles.push(insert(&mut cdt, p)?);
            }
        }
        for i in 0..handles.len() {
            let (u, v) = (handles[i], handles[(i + 1) % handles.len()]);
            if u == v {
                continue;
            }
            if !cdt.can_add_constraint(u, v) {
                return Err(Error::Meshing("boundary loops intersect".into()));
            }
            cdt.add_constraint(u, v);
        }
    }

    // graded rings around reentrant corners
    for &c in &reentrant {
        for rho in [0.25 * h, 0.5 * h] {
            let count = ((2.0 * std::f64::consts::PI * rho) / (0.5 * rho + 0.25 * h)).ceil() as usize;
            for k in 0..count {
                let p = c + Vec2::from_angle(2.0 * std::f64::consts::PI * k as f64 / count as f64) * rho;
                if domain.is_inside(p) && domain.distance_to_boundary(p) > 0.2 * rho {
                    insert(&mut cdt, p)?;
                }
            }
        }
    }

    // equilateral lattice away from the boundary
    let bb = domain.bbox();
    let dy = h * 3f64.sqrt() / 2.0;
    let rows = (bb.height() / dy).ceil() as usize + 1;
    let cols = (bb.width() / h).ceil() as usize + 2;
    for j in 0..rows {
        let y = bb.min.y + j as f64 * dy;
        let shift = if j % 2 == 1 { 0.5 * h } else { 0.0 };
        for i in 0..cols {
            let p = Vec2::new(bb.min.x - 0.5 * h + shift + i as f64 * h, y);
            if !domain.is_inside(p) || domain.distance_to_boundary(p) < 0.4 * h {
                continue;
            }
            if reentrant.iter().any(|c| c.dist(p) < 0.75 * h) {
                continue;
            }
            insert(&mut cdt, p)?;
        }
    }

    let max_area = 0.5 * h * h;
    let mut guard = 0;
    loop {
        let params = RefinementParameters::<f64>::new()
            .with_angle_limit(AngleLimit::from_deg(25.0))
            .with_max_allowed_area(max_area)
            .exclude_outer_faces(true)
            .with_max_additional_vertices(50 * cdt.num_vertices() + 1000);
        let result = cdt.refine(params);
        if !result.refinement_complete {
            return Err(Error::Meshing("refinement did not complete".into()));
        }
        let mesh = extract(&cdt, domain, &result.excluded_faces)?;
        let long: Vec<Vec2> = long_edge_midpoints(&mesh, 1.5 * h);
        if long.is_empty() {
            mesh.validate()?;
            return Ok(mesh);
        }
        guard += 1;
        if guard > 20 {
            return Err(Error::Meshing(format!("could not reach h_max ≤ 1.5·{h}")));
        }
        for p in long {
            insert(&mut cdt, p)?;
        }
    }
}

/// Points along `[a, b)` spaced at most `h`, graded near reentrant vertices.
fn edge_points(a: Vec2, b: Vec2, h: f64, reentrant: &[Vec2]) -> Vec<Vec2> {
    let len = a.dist(b);
    let near_a = reentrant.iter().any(|c| c.dist(a) == 0.0);
    let near_b = reentrant.iter().any(|c| c.dist(b) == 0.0);
    let mut ts = vec![0.0];
    let (mut lo, mut hi) = (0.0, len);
    if near_a && len > 2.0 * h {
        ts.push(0.25 * h / len);
        ts.push(0.5 * h / len);
        lo = 0.5 * h;
    }
    let mut tail = Vec::new();
    if near_b && len > 2.0 * h {
        tail.push(1.0 - 0.5 * h / len);
        tail.push(1.0 - 0.25 * h / len);
        hi = len - 0.5 * h;
    }
    let span = hi - lo;
    let n = (span / h).ceil().max(1.0) as usize;
    for k in 1..n {
        ts.push((lo + span * k as f64 / n as f64) / len);
    }
    ts.extend(tail);
    ts.into_iter().map(|t| a.lerp(b, t)).collect()
}

fn extract(
    cdt: &ConstrainedDelaunayTriangulation<Point2<f64>>,
    domain: &PolygonDomain,
    excluded: &[spade::handles::FixedFaceHandle<spade::handles::InnerTag>],
) -> Result<TriangleMesh> {
    let excluded: std::collections::HashSet<_> = excluded.iter().copied().collect();
    let mut remap: HashMap<usize, usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for face in cdt.inner_faces() {
        if excluded.contains(&face.fix()) {
            continue;
        }
        let vs = face.vertices();
        let pts = vs.map(|v| Vec2::new(v.position().x, v.position().y));
        let centroid = (pts[0] + pts[1] + pts[2]) * (1.0 / 3.0);
        if !domain.is_inside(centroid) {
            continue;
        }
        let mut tri = [0usize; 3];
        for (k, v) in vs.iter().enumerate() {
            let idx = v.fix().index();
            let next = vertices.len();
            tri[k] = *remap.entry(idx).or_insert_with(|| {
                vertices.push(pts[k]);
                next
            });
        }
        if orient(pts[0], pts[1], pts[2]) < 0.0 {
            tri.swap(1, 2);
        }
        triangles.push(tri);
    }
    if triangles.is_empty() {
        return Err(Error::Meshing("no triangles inside the domain".into()));
    }
    let tol = 1e-10 * domain.diameter();
    let boundary = vertices.iter().map(|&p| domain.distance_to_boundary(p) <= tol).collect();
    Ok(TriangleMesh::new(vertices, triangles, boundary))
}

fn long_edge_midpoints(mesh: &TriangleMesh, limit: f64) -> Vec<Vec2> {
    let mut out: Vec<Vec2> = mesh
        .edge_counts()
        .keys()
        .filter(|&&(a, b)| mesh.vertices[a].dist(mesh.vertices[b]) > limit)
        .map(|&(a, b)| mesh.vertices[a].lerp(mesh.vertices[b], 0.5))
        .collect();
    out.sort_by(|p, q| p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)));
    out
}

/// A constrained triangulation of the polygon itself, without Steiner points.
pub fn polygon_cover(domain: &PolygonDomain) -> Result<Vec<[Vec2; 3]>> {
    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> = ConstrainedDelaunayTriangulation::new();
    for lp in domain.loops() {
        let hs = lp
            .iter()
            .map(|p| cdt.insert(Point2::new(p.x, p.y)).map_err(|e| Error::Meshing(format!("{e:?}"))))
            .collect::<Result<Vec<_>>>()?;
        for i in 0..hs.len() {
            let (u, v) = (hs[i], hs[(i + 1) % hs.len()]);
            if !cdt.can_add_constraint(u, v) {
                return Err(Error::Meshing("boundary loops intersect".into()));
            }
            cdt.add_constraint(u, v);
        }
    }
    let mut out = Vec::new();
    for face in cdt.inner_faces() {
        let mut pts = face.vertices().map(|v| Vec2::new(v.position().x, v.position().y));
        if !domain.is_inside((pts[0] + pts[1] + pts[2]) * (1.0 / 3.0)) {
            continue;
        }
        if orient(pts[0], pts[1], pts[2]) < 0.0 {
            pts.swap(1, 2);
        }
        out.push(pts);
    }
    Ok(out)
}

/// Uniform red refinement: every triangle splits into four similar children.
///
/// Polygon edges are straight, so midpoints of boundary edges already lie on the boundary.
pub fn refine(mesh: &TriangleMesh) -> TriangleMesh {
    let counts = mesh.edge_counts();
    let mut vertices = mesh.vertices.clone();
    let mut boundary = mesh.boundary_vertex.clone();
    let mut mid: HashMap<(usize, usize), usize> = HashMap::with_capacity(counts.len());
    let mut keys: Vec<(usize, usize)> = counts.keys().copied().collect();
    keys.sort_unstable();
    for key in keys {
        let (a, b) = key;
        mid.insert(key, vertices.len());
        vertices.push(mesh.vertices[a].lerp(mesh.vertices[b], 0.5));
        boundary.push(counts[&key] == 1);
    }
    let m = |a: usize, b: usize| mid[&(a.min(b), a.max(b))];
    let mut triangles = Vec::with_capacity(4 * mesh.triangles.len());
    for &[a, b, c] in &mesh.triangles {
        let (ab, bc, ca) = (m(a, b), m(b, c), m(c, a));
        triangles.push([a, ab, ca]);
        triangles.push([ab, b, bc]);
        triangles.push([ca, bc, c]);
        triangles.push([ab, bc, ca]);
    }
    TriangleMesh::new(vertices, triangles, boundary)
}

/// Bucket grid for point location in a mesh.
#[derive(Debug, Clone)]
pub struct Locator {
    bbox: Aabb,
    nx: usize,
    ny: usize,
    cell: f64,
    buckets: Vec<Vec<u32>>,
}

impl Locator {
    pub fn new(mesh: &TriangleMesh) -> Self {
        let bbox = mesh.bbox();
        let n = (mesh.triangles.len() as f64).sqrt().ceil().max(1.0);
        let cell = (bbox.width().max(bbox.height()) / n).max(f64::MIN_POSITIVE);
        let nx = (bbox.width() / cell).floor() as usize + 1;
        let ny = (bbox.height() / cell).floor() as usize + 1;
        let mut buckets = vec![Vec::new(); nx * ny];
        for t in 0..mesh.triangles.len() {
            let tb = Aabb::from_points(mesh.corners(t).into_iter());
            let (i0, j0) = Self::cell_of(bbox, cell, nx, ny, tb.min);
            let (i1, j1) = Self::cell_of(bbox, cell, nx, ny, tb.max);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    buckets[j * nx + i].push(t as u32);
                }
            }
        }
        Self { bbox, nx, ny, cell, buckets }
    }

    fn cell_of(bbox: Aabb, cell: f64, nx: usize, ny: usize, p: Vec2) -> (usize, usize) {
        let i = ((p.x - bbox.min.x) / cell).floor().clamp(0.0, (nx - 1) as f64) as usize;
        let j = ((p.y - bbox.min.y) / cell).floor().clamp(0.0, (ny - 1) as f64) as usize;
        (i, j)
    }

    /// Triangle containing `p` with its barycentric coordinates, allowing a
    /// relative slack of `1e-12` on the triangle edges.
    pub fn locate(&self, mesh: &TriangleMesh, p: Vec2) -> Option<(usize, [f64; 3])> {
        let slack = 1e-12 * self.cell;
        if p.x < self.bbox.min.x - slack || p.x > self.bbox.max.x + slack || p.y < self.bbox.min.y - slack || p.y > self.bbox.max.y + slack {
            return None;
        }
        let (i, j) = Self::cell_of(self.bbox, self.cell, self.nx, self.ny, p);
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &t in &self.buckets[j * self.nx + i] {
            let t = t as usize;
            let bc = barycentric(mesh.corners(t), p);
            let worst = bc[0].min(bc[1]).min(bc[2]);
            if worst >= 0.0 {
                return Some((t, bc));
            }
            if best.map_or(true, |(_, _, w)| worst > w) {
                best = Some((t, bc, worst));
            }
        }
        match best {
            Some((t, bc, w)) if w > -1e-12 => Some((t, bc)),
            _ => None,
        }
    }
}

pub fn barycentric([a, b, c]: [Vec2; 3], p: Vec2) -> [f64; 3] {
    let area = orient(a, b, c);
    let l0 = orient(p, b, c) / area;
    let l1 = orient(a, p, c) / area;
    [l0, l1, 1.0 - l0 - l1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_domain_recovers_polygon() {
        let l = PolygonDomain::l_shape();
        let m = triangulate(&l, 0.1).unwrap();
        let d = m.boundary_domain().unwrap();
        assert_eq!(d.loops().len(), 1);
        assert_eq!(d.outer().len(), 6);
        assert!((d.area() - 0.75).abs() < 1e-12);
        for v in l.outer() {
            assert!(d.outer().iter().any(|w| w.dist(*v) < 1e-12));
        }
    }

    #[test]
    fn coarse_square_conserves_area() {
        let m = triangulate(&PolygonDomain::unit_square(), 0.2).unwrap();
        assert!(m.num_triangles() >= 8);
        assert!((m.area() - 1.0).abs() < 1e-12);
        assert!(m.h_max <= 0.3);
    }

    #[test]
    fn rejects_large_target() {
        assert!(triangulate(&PolygonDomain::unit_square(), 0.5).is_err());
    }

    #[test]
    fn fine_square_vertex_count() {
        let m = triangulate(&PolygonDomain::unit_square(), 0.02).unwrap();
        assert!((2000..=8000).contains(&m.num_vertices()), "{}", m.num_vertices());
        assert!(m.min_angle_deg() >= MIN_ANGLE_DEG);
        assert!(m.h_max <= 0.03);
    }

    #[test]
    fn l_shape_area_and_corners() {
        let d = PolygonDomain::l_shape();
        let m = triangulate(&d, 0.05).unwrap();
        assert!((m.area() - 0.75).abs() < 1e-10);
        for v in d.vertices() {
            assert!(m.vertices.iter().any(|p| p.dist(v) < 1e-14));
        }
        // graded corner
        let c = Vec2::new(0.5, 0.5);
        let near = m
            .triangles
            .iter()
            .enumerate()
            .filter(|(_, t)| t.iter().any(|&v| m.vertices[v].dist(c) < 1e-14))
            .map(|(i, _)| m.corners(i).iter().map(|p| p.dist(c)).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        assert!(near < 0.5 * 0.05, "{near}");
    }

    #[test]
    fn boundary_flags_are_on_boundary() {
        let d = PolygonDomain::regular_polygon(12, 1.0).unwrap();
        let m = triangulate(&d, 0.1).unwrap();
        for (p, &b) in m.vertices.iter().zip(&m.boundary_vertex) {
            assert_eq!(b, d.distance_to_boundary(*p) < 1e-10, "{p:?}");
        }
    }

    #[test]
    fn red_refinement() {
        let m = triangulate(&PolygonDomain::unit_square(), 0.2).unwrap();
        let r = refine(&m);
        assert_eq!(r.num_triangles(), 4 * m.num_triangles());
        assert!((r.area() - 1.0).abs() < 1e-12);
        assert!((r.min_angle_deg() - m.min_angle_deg()).abs() < 1e-9);
        assert!(r.validate().is_ok());
        assert!((r.h_max - 0.5 * m.h_max).abs() < 1e-12);
        for (i, v) in m.vertices.iter().enumerate() {
            assert_eq!(r.vertices[i], *v);
        }
    }

    #[test]
    fn cover_tiles_polygon() {
        let d = PolygonDomain::l_shape();
        let tris = polygon_cover(&d).unwrap();
        let area: f64 = tris.iter().map(|t| 0.5 * orient(t[0], t[1], t[2])).sum();
        assert!((area - 0.75).abs() < 1e-14);
        assert_eq!(tris.len(), 4);
    }

    #[test]
    fn json_round_trip() {
        let m = triangulate(&PolygonDomain::unit_square(), 0.2).unwrap();
        let back = TriangleMesh::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn locator_finds_points() {
        let m = triangulate(&PolygonDomain::l_shape(), 0.1).unwrap();
        let loc = Locator::new(&m);
        let (t, bc) = loc.locate(&m, Vec2::new(0.25, 0.75)).unwrap();
        let [a, b, c] = m.corners(t);
        let p = a * bc[0] + b * bc[1] + c * bc[2];
        assert!(p.dist(Vec2::new(0.25, 0.75)) < 1e-14);
        assert!(loc.locate(&m, Vec2::new(0.75, 0.75)).is_none());
        assert!(loc.locate(&m, Vec2::new(1.0, 0.0)).is_some());
    }
}
