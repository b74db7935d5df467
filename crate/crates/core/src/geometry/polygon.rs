use super::patch::{LipschitzPatch, DEFAULT_GRAPH_INTERVALS};
use super::point::{orient, point_segment_distance, Aabb, Vec2};
use super::Location;
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// A polygonal domain with certified local Lipschitz data.
///
/// `loops[0]` is the counter-clockwise outer boundary, any further loops are
/// clockwise holes. Every boundary point has a chart of radius `r0` whose
/// graph is `tau_global`-Lipschitz.
#[derive(Debug, Clone)]
pub struct PolygonDomain {
    loops: Vec<Vec<Vec2>>,
    patches: Vec<LipschitzPatch>,
    tau_global: f64,
    r0: f64,
    bbox: Aabb,
}

impl PolygonDomain {
    /// Validates the loops and derives `r0`, the representative charts and `tau_global`.
    pub fn new(outer: Vec<Vec2>, holes: Vec<Vec<Vec2>>) -> Result<Self> {
        let mut loops = vec![outer];
        loops.extend(holes);
        validate_loops(&loops)?;
        let bbox = Aabb::from_points(loops[0].iter().copied());
        let mut dom = Self { loops, patches: Vec::new(), tau_global: 0.0, r0: 0.0, bbox };
        dom.r0 = dom.natural_r0();
        dom.patches = dom.representative_patches(dom.r0)?;
        dom.tau_global = dom.patches.iter().map(|p| p.lipschitz_estimate()).fold(0.0, f64::max);
        Ok(dom)
    }

    /// Builds a domain from explicit charts, as read from a domain file.
    pub fn with_patches(loops: Vec<Vec<Vec2>>, patches: Vec<LipschitzPatch>, r0: f64) -> Result<Self> {
        validate_loops(&loops)?;
        if !(r0 > 0.0) {
            return Err(Error::InvalidPolygon(format!("r0 must be positive, got {r0}")));
        }
        let bbox = Aabb::from_points(loops[0].iter().copied());
        let tau_global = patches.iter().map(|p| p.tau()).fold(0.0, f64::max);
        let mut dom = Self { loops, patches, tau_global, r0, bbox };
        if dom.patches.is_empty() {
            dom.patches = dom.representative_patches(r0)?;
            dom.tau_global = dom.patches.iter().map(|p| p.lipschitz_estimate()).fold(0.0, f64::max);
        }
        Ok(dom)
    }

    pub fn rectangle(a: f64, b: f64) -> Result<Self> {
        Self::new(
            vec![Vec2::new(0.0, 0.0), Vec2::new(a, 0.0), Vec2::new(a, b), Vec2::new(0.0, b)],
            vec![],
        )
    }

    pub fn unit_square() -> Self {
        Self::rectangle(1.0, 1.0).expect("unit square is valid")
    }

    /// Unit square minus its upper-right quarter.
    pub fn l_shape() -> Self {
        Self::new(
            vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(1.0, 0.5),
                Vec2::new(0.5, 0.5),
                Vec2::new(0.5, 1.0),
                Vec2::new(0.0, 1.0),
            ],
            vec![],
        )
        .expect("L-shape is valid")
    }

    /// Regular `n`-gon inscribed in the circle of radius `radius` about the origin.
    pub fn regular_polygon(n: usize, radius: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidPolygon("need at least 3 vertices".into()));
        }
        let pts = (0..n).map(|i| Vec2::from_angle(2.0 * PI * i as f64 / n as f64) * radius).collect();
        Self::new(pts, vec![])
    }

    pub fn loops(&self) -> &[Vec<Vec2>] {
        &self.loops
    }

    pub fn outer(&self) -> &[Vec2] {
        &self.loops[0]
    }

    pub fn patches(&self) -> &[LipschitzPatch] {
        &self.patches
    }

    pub fn tau_global(&self) -> f64 {
        self.tau_global
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn bbox(&self) -> Aabb {
        self.bbox
    }

    pub fn diameter(&self) -> f64 {
        let v = &self.loops[0];
        let mut d: f64 = 0.0;
        for (i, a) in v.iter().enumerate() {
            for b in &v[i + 1..] {
                d = d.max(a.dist(*b));
            }
        }
        d
    }

    pub fn area(&self) -> f64 {
        self.loops.iter().map(|l| signed_area(l)).sum()
    }

    /// All boundary edges, loop by loop.
    pub fn edges(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        self.loops
            .iter()
            .flat_map(|l| (0..l.len()).map(move |i| (l[i], l[(i + 1) % l.len()])))
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vec2> + '_ {
        self.loops.iter().flatten().copied()
    }

    pub fn boundary_tolerance(&self) -> f64 {
        1e-12 * self.bbox.diameter()
    }

    pub fn distance_to_boundary(&self, p: Vec2) -> f64 {
        self.edges()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Crossing-number classification with a boundary band of `1e-12·diameter`.
    pub fn contains(&self, p: Vec2) -> Location {
        if self.distance_to_boundary(p) <= self.boundary_tolerance() {
            return Location::Boundary;
        }
        if self.crossing_parity(p) {
            Location::Inside
        } else {
            Location::Outside
        }
    }

    pub fn is_inside(&self, p: Vec2) -> bool {
        self.contains(p) == Location::Inside
    }

    fn crossing_parity(&self, p: Vec2) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if x > p.x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Parameter intervals `[t0, t1] ⊂ [0, 1]` on which the segment `a + t(b - a)` lies in Ω.
    pub fn clip_segment(&self, a: Vec2, b: Vec2) -> Vec<(f64, f64)> {
        let mut ts = vec![0.0, 1.0];
        let d = b - a;
        for (p, q) in self.edges() {
            let e = q - p;
            let den = d.cross(e);
            if den.abs() < 1e-300 {
                continue;
            }
            let w = p - a;
            let t = w.cross(e) / den;
            let s = w.cross(d) / den;
            if (0.0..=1.0).contains(&t) && (-1e-12..=1.0 + 1e-12).contains(&s) {
                ts.push(t);
            }
        }
        ts.sort_by(|x, y| x.total_cmp(y));
        ts.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
        let mut out: Vec<(f64, f64)> = Vec::new();
        for w in ts.windows(2) {
            if w[1] - w[0] <= 0.0 {
                continue;
            }
            let mid = a + d * (0.5 * (w[0] + w[1]));
            if self.crossing_parity(mid) {
                match out.last_mut() {
                    Some(last) if (last.1 - w[0]).abs() < 1e-15 => last.1 = w[1],
                    _ => out.push((w[0], w[1])),
                }
            }
        }
        out
    }

    /// True when the open segment `(a, b)` lies inside Ω.
    pub fn segment_inside(&self, a: Vec2, b: Vec2) -> bool {
        let iv = self.clip_segment(a, b);
        iv.len() == 1 && iv[0].0 <= 1e-12 && iv[0].1 >= 1.0 - 1e-12 && {
            // a segment running along an edge has inside-parity midpoints but touches ∂Ω
            let n = 8;
            (1..n).all(|i| self.is_inside(a.lerp(b, i as f64 / n as f64)))
        }
    }

    /// Vertices whose interior angle exceeds π.
    pub fn reentrant_vertices(&self) -> Vec<Vec2> {
        let mut out = Vec::new();
        for l in &self.loops {
            let n = l.len();
            for i in 0..n {
                let (p, v, q) = (l[(i + n - 1) % n], l[i], l[(i + 1) % n]);
                if orient(p, v, q) < 0.0 {
                    out.push(v);
                }
            }
        }
        out
    }

    /// Inward bisector and interior angle at vertex `i` of loop `li`.
    fn vertex_frame(&self, li: usize, i: usize) -> (Vec2, f64) {
        let l = &self.loops[li];
        let n = l.len();
        let (p, v, q) = (l[(i + n - 1) % n], l[i], l[(i + 1) % n]);
        let to_prev = (p - v).normalized();
        let to_next = (q - v).normalized();
        // interior lies to the left of the directed boundary, i.e. counter-clockwise from to_next
        let mut interior = to_prev.cross(to_next).atan2(to_prev.dot(to_next));
        // angle measured counter-clockwise from to_next to to_prev
        interior = (-interior).rem_euclid(2.0 * PI);
        let bis = to_next.rotate(0.5 * interior);
        (bis, interior)
    }

    fn natural_r0(&self) -> f64 {
        let mut best = f64::INFINITY;
        let edges: Vec<(Vec2, Vec2)> = self.edges().collect();
        let mut offset = 0;
        for l in &self.loops {
            let n = l.len();
            for i in 0..n {
                let v = l[i];
                let prev_edge = offset + (i + n - 1) % n;
                let next_edge = offset + i;
                best = best.min(v.dist(l[(i + 1) % n]));
                for (k, (a, b)) in edges.iter().enumerate() {
                    if k != prev_edge && k != next_edge {
                        best = best.min(point_segment_distance(v, *a, *b));
                    }
                }
            }
            offset += n;
        }
        0.5 * best
    }

    /// Chart of radius `radius` centered at the boundary point `x`. The frame is the
    /// inward bisector of the nearest vertex when one lies inside the ball, else the
    /// inward normal of the edge through `x`.
    pub fn patch_at(&self, x: Vec2, radius: f64) -> Result<LipschitzPatch> {
        let mut nearest: Option<(usize, usize, f64)> = None;
        for (li, l) in self.loops.iter().enumerate() {
            for (i, v) in l.iter().enumerate() {
                let d = v.dist(x);
                if d < radius * (1.0 - 1e-9) && nearest.map_or(true, |(_, _, dn)| d < dn) {
                    nearest = Some((li, i, d));
                }
            }
        }
        let normal = match nearest {
            Some((li, i, _)) => self.vertex_frame(li, i).0,
            None => {
                let (a, b) = self
                    .edges()
                    .min_by(|e, f| {
                        point_segment_distance(x, e.0, e.1).total_cmp(&point_segment_distance(x, f.0, f.1))
                    })
                    .ok_or_else(|| Error::InvalidPolygon("no edges".into()))?;
                (b - a).normalized().perp()
            }
        };
        if self.distance_to_boundary(x) > 1e-9 * self.bbox.diameter() {
            return Err(Error::Precondition("chart center must lie on the boundary".into()));
        }
        let angle = normal.y.atan2(normal.x) - 0.5 * PI;
        let tangent = Vec2::new(1.0, 0.0).rotate(angle);
        let m = DEFAULT_GRAPH_INTERVALS;
        let mut samples = vec![0.0; m + 1];
        let mid = m / 2;
        for dir in [1isize, -1] {
            let mut prev = 0.0;
            let mut i = mid as isize;
            loop {
                let y = -radius + 2.0 * radius * i as f64 / m as f64;
                let base = x + tangent * y;
                let mut best: Option<f64> = None;
                for (a, b) in self.edges() {
                    let e = b - a;
                    let den = normal.cross(e);
                    if den.abs() < 1e-300 {
                        continue;
                    }
                    let w = a - base;
                    let t = w.cross(e) / den;
                    let s = w.cross(normal) / den;
                    if (-1e-12..=1.0 + 1e-12).contains(&s) && best.map_or(true, |bt| (t - prev).abs() < (bt - prev).abs()) {
                        best = Some(t);
                    }
                }
                let t = best.unwrap_or(prev);
                samples[i as usize] = if i as usize == mid { 0.0 } else { t };
                prev = t;
                i += dir;
                if i < 0 || i > m as isize {
                    break;
                }
            }
        }
        let est = samples.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max) / (2.0 * radius / m as f64);
        LipschitzPatch::new(x, radius, angle, est.max(1e-6) * (1.0 + 1e-9), samples)
    }

    fn representative_patches(&self, r0: f64) -> Result<Vec<LipschitzPatch>> {
        let mut out = Vec::new();
        for l in &self.loops {
            let n = l.len();
            for i in 0..n {
                out.push(self.patch_at(l[i], r0)?);
                out.push(self.patch_at(l[i].lerp(l[(i + 1) % n], 0.5), r0)?);
            }
        }
        Ok(out)
    }

    /// Checks that charts of radius `r0` at `per_edge` points along every edge are
    /// Lipschitz with constant at most `tau_global`.
    pub fn check_chart_coverage(&self, per_edge: usize) -> Result<()> {
        for (a, b) in self.edges().collect::<Vec<_>>() {
            for k in 0..per_edge {
                let x = a.lerp(b, (k as f64 + 0.5) / per_edge as f64);
                let p = self.patch_at(x, self.r0)?;
                if p.lipschitz_estimate() > self.tau_global * (1.0 + 1e-6) + 1e-9 {
                    return Err(Error::Hypothesis(format!(
                        "chart at ({:.4}, {:.4}) has Lipschitz constant {:.4} > {:.4}",
                        x.x,
                        x.y,
                        p.lipschitz_estimate(),
                        self.tau_global
                    )));
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn signed_area(l: &[Vec2]) -> f64 {
    let n = l.len();
    0.5 * (0..n).map(|i| l[i].cross(l[(i + 1) % n])).sum::<f64>()
}

fn segments_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |p: Vec2, q: Vec2, r: Vec2, o: f64| {
        o == 0.0 && r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    on(c, d, a, d1) || on(c, d, b, d2) || on(a, b, c, d3) || on(a, b, d, d4)
}

fn validate_loops(loops: &[Vec<Vec2>]) -> Result<()> {
    if loops.is_empty() {
        return Err(Error::InvalidPolygon("no outer loop".into()));
    }
    let bbox = Aabb::from_points(loops[0].iter().copied());
    let tol = 1e-12 * bbox.diameter().max(1e-300);
    let all: Vec<Vec2> = loops.iter().flatten().copied().collect();
    if all.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidPolygon("non-finite vertex".into()));
    }
    for (li, l) in loops.iter().enumerate() {
        if l.len() < 3 {
            return Err(Error::InvalidPolygon(format!("loop {li} has fewer than 3 vertices")));
        }
        let a = signed_area(l);
        if li == 0 && a <= 0.0 {
            return Err(Error::InvalidPolygon("outer loop must be counter-clockwise".into()));
        }
        if li > 0 && a >= 0.0 {
            return Err(Error::InvalidPolygon(format!("hole {li} must be clockwise")));
        }
    }
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            if all[i].dist(all[j]) <= tol {
                return Err(Error::InvalidPolygon(format!("repeated vertex at ({}, {})", all[i].x, all[i].y)));
            }
        }
    }
    let mut edges = Vec::new();
    for (li, l) in loops.iter().enumerate() {
        let n = l.len();
        for i in 0..n {
            edges.push((li, i, n, l[i], l[(i + 1) % n]));
        }
    }
    for (x, e) in edges.iter().enumerate() {
        for f in &edges[x + 1..] {
            let adjacent = e.0 == f.0 && ((e.1 + 1) % e.2 == f.1 || (f.1 + 1) % f.2 == e.1);
            if adjacent {
                continue;
            }
            if segments_intersect(e.3, e.4, f.3, f.4) {
                return Err(Error::InvalidPolygon(format!(
                    "edges {} of loop {} and {} of loop {} intersect",
                    e.1, e.0, f.1, f.0
                )));
            }
        }
    }
    if loops.len() > 1 {
        let outer = PolygonDomain {
            loops: vec![loops[0].clone()],
            patches: vec![],
            tau_global: 0.0,
            r0: 0.0,
            bbox,
        };
        for h in &loops[1..] {
            if h.iter().any(|p| outer.contains(*p) != Location::Inside) {
                return Err(Error::InvalidPolygon("hole not strictly inside the outer loop".into()));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_classification() {
        let sq = PolygonDomain::unit_square();
        assert_eq!(sq.contains(Vec2::new(0.5, 0.5)), Location::Inside);
        assert_eq!(sq.contains(Vec2::new(0.5, 0.0)), Location::Boundary);
        assert_eq!(sq.contains(Vec2::new(1.5, 0.5)), Location::Outside);
    }

    #[test]
    fn rejects_bad_loops() {
        let cw = vec![Vec2::new(0.0, 0.0), Vec2::new(0.0, 1.0), Vec2::new(1.0, 1.0), Vec2::new(1.0, 0.0)];
        assert!(PolygonDomain::new(cw, vec![]).is_err());
        let bowtie = vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)];
        assert!(PolygonDomain::new(bowtie, vec![]).is_err());
        let repeated = vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)];
        assert!(PolygonDomain::new(repeated, vec![]).is_err());
    }

    #[test]
    fn hole_handling() {
        let outer = vec![Vec2::new(0.0, 0.0), Vec2::new(4.0, 0.0), Vec2::new(4.0, 4.0), Vec2::new(0.0, 4.0)];
        let hole = vec![Vec2::new(1.0, 1.0), Vec2::new(1.0, 2.0), Vec2::new(2.0, 2.0), Vec2::new(2.0, 1.0)];
        let d = PolygonDomain::new(outer, vec![hole]).unwrap();
        assert!((d.area() - 15.0).abs() < 1e-12);
        assert_eq!(d.contains(Vec2::new(1.5, 1.5)), Location::Outside);
        assert_eq!(d.contains(Vec2::new(3.0, 3.0)), Location::Inside);
    }

    #[test]
    fn natural_radius_and_tau() {
        let sq = PolygonDomain::unit_square();
        assert!((sq.r0() - 0.5).abs() < 1e-12);
        assert!((sq.tau_global() - 1.0).abs() < 1e-6);
        sq.check_chart_coverage(7).unwrap();
        let l = PolygonDomain::l_shape();
        assert!((l.r0() - 0.25).abs() < 1e-12);
        assert_eq!(l.reentrant_vertices(), vec![Vec2::new(0.5, 0.5)]);
    }

    #[test]
    fn obtuse_polygon_has_small_tau() {
        let d = PolygonDomain::regular_polygon(64, 1.0).unwrap();
        // interior angle π - 2π/64, chart slope tan(π/64)
        assert!((d.tau_global() - (PI / 64.0).tan()).abs() < 1e-6);
    }

    #[test]
    fn segment_clipping() {
        let l = PolygonDomain::l_shape();
        let iv = l.clip_segment(Vec2::new(0.25, 0.75), Vec2::new(0.75, 0.75));
        assert_eq!(iv.len(), 1);
        assert!((iv[0].1 - 0.5).abs() < 1e-12);
        assert!(!l.segment_inside(Vec2::new(0.25, 0.75), Vec2::new(0.75, 0.25)));
        assert!(l.segment_inside(Vec2::new(0.25, 0.75), Vec2::new(0.25, 0.25)));
    }
}
