use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::FemField;
use crate::geometry::{Aabb, Ball, PolygonDomain, Vec2};

/// The chain `B_j = B(y_j, r/2)` from a start point to the maximizer of `|u|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub r: f64,
    pub balls: Vec<Ball>,
    /// The `r/8`-net `S`.
    pub net: Vec<Vec2>,
    /// The polygonal path γ.
    pub path: Vec<Vec2>,
    /// Number of steps `J`.
    pub steps: usize,
}

impl ChainReport {
    pub fn centers(&self) -> Vec<Vec2> {
        self.balls.iter().map(Ball::center2).collect()
    }

    /// Checks `|y_j - y_{j+1}| < r/4`, `B_{j+1} ⊂ (3/2)B_j` and `J ≤ |S| + 2`.
    pub fn validate(&self) -> Result<()> {
        let ys = self.centers();
        for (j, w) in ys.windows(2).enumerate() {
            let d = w[0].dist(w[1]);
            if !(d < self.r / 4.0) {
                return Err(Error::Path(format!("centers {j} and {} are {d} apart", j + 1)));
            }
            let outer = self.balls[j].scaled(1.5);
            if !outer.contains_ball(&self.balls[j + 1]) {
                return Err(Error::Path(format!("ball {} is not inside 3/2 of ball {j}", j + 1)));
            }
        }
        if self.steps > self.net.len() + 2 {
            return Err(Error::Path(format!("{} steps for a net of {} points", self.steps, self.net.len())));
        }
        Ok(())
    }
}

/// Vertex of largest `|u|`, the first one on ties.
pub fn vertex_maximizer(f: &FemField) -> Vec2 {
    let mut best = 0;
    for (i, v) in f.values.iter().enumerate() {
        if v.abs() > f.values[best].abs() {
            best = i;
        }
    }
    f.mesh.vertices[best]
}

/// Greedy `r/8`-net of the closure of Ω.
///
/// Candidates lie on a grid of spacing `δ = r/64` plus boundary samples at the
/// same spacing, visited in a seeded random order; a candidate joins the net
/// when it is at least `r/8 - δ` from every net point. Every point of the
/// closure is within `δ` of a candidate, so the result is an `r/8`-net.
pub fn r8_net(domain: &PolygonDomain, r: f64) -> Vec<Vec2> {
    let delta = r / 64.0;
    let bb: Aabb = domain.bbox();
    let nx = (bb.width() / delta).ceil() as usize;
    let ny = (bb.height() / delta).ceil() as usize;
    let mut cand: Vec<Vec2> = domain.vertices().collect();
    for (a, b) in domain.edges() {
        let m = (a.dist(b) / delta).ceil() as usize;
        for k in 1..m {
            cand.push(a.lerp(b, k as f64 / m as f64));
        }
    }
    for j in 0..=ny {
        for i in 0..=nx {
            let p = Vec2::new(bb.min.x + delta * i as f64, bb.min.y + delta * j as f64);
            if domain.contains(p).in_closure() {
                cand.push(p);
            }
        }
    }
    cand.shuffle(&mut crate::sampling::rng(0x5eed));
    let sep = r / 8.0 - delta;
    let (bx, by) = ((bb.width() / sep).ceil() as usize + 1, (bb.height() / sep).ceil() as usize + 1);
    let bucket = |p: Vec2| {
        let i = (((p.x - bb.min.x) / sep).floor().max(0.0) as usize).min(bx - 1);
        let j = (((p.y - bb.min.y) / sep).floor().max(0.0) as usize).min(by - 1);
        (i, j)
    };
    let mut grid: Vec<Vec<usize>> = vec![Vec::new(); bx * by];
    let mut out: Vec<Vec2> = Vec::new();
    for p in cand {
        let (i, j) = bucket(p);
        let near = (i.saturating_sub(1)..=(i + 1).min(bx - 1))
            .flat_map(|a| (j.saturating_sub(1)..=(j + 1).min(by - 1)).map(move |b| b * bx + a))
            .any(|k| grid[k].iter().any(|&q| out[q].dist(p) < sep));
        if !near {
            grid[j * bx + i].push(out.len());
            out.push(p);
        }
    }
    out
}

/// A point moved into Ω along the inward angle bisector at a vertex.
fn inset(domain: &PolygonDomain, eps: f64) -> Vec<Vec2> {
    let mut out = Vec::new();
    for lp in domain.loops() {
        let n = lp.len();
        for i in 0..n {
            let (prev, v, next) = (lp[(i + n - 1) % n], lp[i], lp[(i + 1) % n]);
            let bis = ((prev - v).normalized() + (next - v).normalized()).normalized();
            for cand in [v + bis * eps, v - bis * eps] {
                if domain.is_inside(cand) {
                    out.push(cand);
                    break;
                }
            }
        }
    }
    out
}

#[derive(PartialEq)]
struct Node(f64, usize);
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Node {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

/// A polyline from `a` to `b` whose interior stays in Ω: the straight segment
/// when possible, else a shortest path through vertices pushed slightly inside.
fn path(domain: &PolygonDomain, a: Vec2, b: Vec2, eps: f64) -> Result<Vec<Vec2>> {
    let visible = |p: Vec2, q: Vec2| p == q || domain.segment_inside(p, q);
    if visible(a, b) {
        return Ok(vec![a, b]);
    }
    let mut nodes = vec![a, b];
    nodes.extend(inset(domain, eps));
    let n = nodes.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    dist[0] = 0.0;
    let mut heap = BinaryHeap::from([Node(0.0, 0)]);
    while let Some(Node(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        if u == 1 {
            break;
        }
        for v in 0..n {
            if v == u {
                continue;
            }
            let nd = d + nodes[u].dist(nodes[v]);
            if nd < dist[v] && visible(nodes[u], nodes[v]) {
                dist[v] = nd;
                prev[v] = u;
                heap.push(Node(nd, v));
            }
        }
    }
    if !dist[1].is_finite() {
        return Err(Error::Path("start and target are not connected inside the domain".into()));
    }
    let mut out = vec![b];
    let mut k = 1;
    while k != 0 {
        k = prev[k];
        out.push(nodes[k]);
    }
    out.reverse();
    Ok(out)
}

/// `sup { s : |γ(s) - y| ≤ ρ }` on an arclength-parametrized polyline, with the
/// point itself.
fn last_within(poly: &[Vec2], cum: &[f64], y: Vec2, rho: f64) -> (f64, Vec2) {
    let total = *cum.last().unwrap();
    let mut best = (0.0, poly[0]);
    for k in 0..poly.len() - 1 {
        let (p, q) = (poly[k], poly[k + 1]);
        let len = cum[k + 1] - cum[k];
        if len == 0.0 {
            continue;
        }
        let d = q - p;
        let w = p - y;
        let (qa, qb, qc) = (d.norm2(), 2.0 * w.dot(d), w.norm2() - rho * rho);
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            continue;
        }
        let t_hi = (-qb + disc.sqrt()) / (2.0 * qa);
        let t_lo = (-qb - disc.sqrt()) / (2.0 * qa);
        if t_hi < 0.0 || t_lo > 1.0 {
            continue;
        }
        let t = t_hi.min(1.0);
        let s = if k + 2 == poly.len() && t >= 1.0 { 1.0 } else { (cum[k] + t * len) / total };
        if s >= best.0 {
            best = (s, p.lerp(q, t));
        }
    }
    best
}

/// The chain of balls of radius `r/2` from `start` to `target`.
///
/// `s_j` is the last path parameter within `r/8` of `y_j`; if it is the end of
/// the path the chain closes at `target`, otherwise `y_{j+1}` is the net point
/// nearest to `γ(s_j)`.
pub fn chain_of_balls(domain: &PolygonDomain, start: Vec2, target: Vec2, r: f64) -> Result<ChainReport> {
    if !(r > 0.0) {
        return Err(Error::Precondition(format!("radius must be positive, got {r}")));
    }
    chain_of_balls_with_net(domain, &r8_net(domain, r), start, target, r)
}

/// [`chain_of_balls`] with a precomputed [`r8_net`] for the same `r`.
pub fn chain_of_balls_with_net(
    domain: &PolygonDomain,
    net: &[Vec2],
    start: Vec2,
    target: Vec2,
    r: f64,
) -> Result<ChainReport> {
    if !(r > 0.0) || net.is_empty() {
        return Err(Error::Precondition(format!("need a positive radius and a nonempty net, got r = {r}")));
    }
    for (name, p) in [("start", start), ("target", target)] {
        if !domain.contains(p).in_closure() {
            return Err(Error::Precondition(format!("{name} point {p:?} is outside the domain")));
        }
    }
    let poly = path(domain, start, target, r / 64.0)?;
    let mut cum = vec![0.0];
    for w in poly.windows(2) {
        cum.push(cum.last().unwrap() + w[0].dist(w[1]));
    }
    let total = *cum.last().unwrap();
    let mut ys = vec![start];
    loop {
        if ys.len() > net.len() + 3 {
            return Err(Error::Path(format!("chain exceeded {} balls", net.len() + 3)));
        }
        let y = *ys.last().unwrap();
        let (s, g) = if total == 0.0 { (1.0, target) } else { last_within(&poly, &cum, y, r / 8.0) };
        if s >= 1.0 {
            ys.push(target);
            break;
        }
        let nearest = net
            .iter()
            .copied()
            .min_by(|a, b| a.dist(g).total_cmp(&b.dist(g)))
            .expect("net is nonempty");
        if !(nearest.dist(g) < r / 8.0) {
            return Err(Error::Path(format!("no net point within r/8 of γ(s) = {g:?}")));
        }
        ys.push(nearest);
    }
    let report = ChainReport {
        r,
        steps: ys.len() - 1,
        balls: ys.iter().map(|&y| Ball::new2(y, r / 2.0)).collect(),
        net: net.to_vec(),
        path: poly,
    };
    report.validate()?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_chain_at_maximizer() {
        let d = PolygonDomain::unit_square();
        let c = Vec2::new(0.5, 0.5);
        let rep = chain_of_balls(&d, c, c, 0.1).unwrap();
        assert_eq!(rep.steps, 1);
        assert_eq!(rep.balls.len(), 2);
    }

    #[test]
    fn square_chain_from_boundary_midpoint() {
        let d = PolygonDomain::unit_square();
        let rep = chain_of_balls(&d, Vec2::new(0.5, 0.0), Vec2::new(0.5, 0.5), 0.1).unwrap();
        assert!(rep.steps <= rep.net.len() + 2);
        // packing bound area/(π(r/16)²)
        assert!((rep.net.len() as f64) <= 1.0 / (std::f64::consts::PI * (0.1f64 / 16.0).powi(2)), "{}", rep.net.len());
        rep.validate().unwrap();
        // net covers the closure
        for k in 0..200 {
            let p = Vec2::new((k as f64 * 0.618).fract(), (k as f64 * 0.414).fract());
            assert!(rep.net.iter().any(|q| q.dist(p) < 0.1 / 8.0));
        }
    }

    #[test]
    fn l_shape_path_bends_at_the_corner() {
        let d = PolygonDomain::l_shape();
        let bb = d.bbox();
        // two points whose straight connection leaves the domain
        let reentrant = d.reentrant_vertices()[0];
        let a = Vec2::new(bb.min.x + 0.05 * bb.width(), bb.max.y - 0.05 * bb.height());
        let b = Vec2::new(bb.max.x - 0.05 * bb.width(), bb.min.y + 0.05 * bb.height());
        if d.segment_inside(a, b) {
            return;
        }
        let rep = chain_of_balls(&d, a, b, 0.1).unwrap();
        assert!(rep.path.len() >= 3);
        assert!(rep.path.iter().any(|p| p.dist(reentrant) < 0.01));
        for w in rep.path.windows(2) {
            assert!(d.segment_inside(w[0], w[1]));
        }
    }
}
