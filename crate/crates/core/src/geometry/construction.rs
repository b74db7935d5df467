use super::patch::LipschitzPatch;
use super::point::{point_segment_distance, Vec2};
use super::Cube;
use crate::error::{Error, Result};

/// Fixed lower bound `c` in `dist(p, ∂Ω) > c·s(p)` for inner cubes.
pub const INNER_CUBE_DISTANCE_CONSTANT: f64 = 0.1;

/// A boundary cube `Q` split into `2^k` boundary cubes centered on `∂Ω`
/// and the inner cubes stacked above them, column by column.
#[derive(Debug, Clone, serde::Serialize)]
pub struct StandardConstruction {
    pub cube: Cube,
    pub k: u32,
    pub boundary_cubes: Vec<Cube>,
    /// Inner cubes, grouped by column in the same order as `boundary_cubes`.
    pub inner_cubes: Vec<Vec<Cube>>,
    /// Largest `|f(a) - height|` over the bisected boundary-cube centers.
    pub bisection_residual: f64,
}

impl StandardConstruction {
    pub fn small_side(&self) -> f64 {
        self.cube.side / f64::from(1u32 << self.k)
    }

    pub fn all_inner(&self) -> impl Iterator<Item = &Cube> {
        self.inner_cubes.iter().flatten()
    }

    /// True when `p` lies in some boundary or inner cube.
    pub fn covers(&self, p: Vec2) -> bool {
        self.boundary_cubes.iter().chain(self.all_inner()).any(|c| c.contains(p))
    }
}

/// Planar standard construction for the chart `patch` and a cube `Q` centered
/// on the boundary with sides along the chart frame.
pub fn standard_construction(patch: &LipschitzPatch, cube: Cube, k: u32) -> Result<StandardConstruction> {
    if k < 3 {
        return Err(Error::Precondition(format!("k must be at least 3, got {k}")));
    }
    if k > 12 {
        return Err(Error::Precondition(format!("k = {k} is unreasonably large")));
    }
    let tau_max = 1.0 / (16.0 * 2f64.sqrt());
    if patch.tau() >= tau_max {
        return Err(Error::Precondition(format!("tau {} must be below 1/(16·√2) ≈ {tau_max:.5}", patch.tau())));
    }
    if ((cube.angle - patch.angle()) / std::f64::consts::TAU).fract().abs() > 1e-12 {
        return Err(Error::Precondition("cube sides must be parallel to the chart frame".into()));
    }
    let s = cube.side;
    let tol = 1e-9 * s;
    if patch.height_above_graph(cube.center).abs() > tol {
        return Err(Error::Precondition("cube center must lie on the boundary".into()));
    }
    if cube.corners().iter().any(|c| c.dist(patch.center()) >= patch.radius()) {
        return Err(Error::Precondition("cube must lie inside the chart ball".into()));
    }
    let ql = patch.to_local(cube.center);
    let (left, right) = (ql.x - 0.5 * s, ql.x + 0.5 * s);
    let (bottom, top) = (ql.y - 0.5 * s, ql.y + 0.5 * s);

    // ∂Ω ∩ Q must sit in the middle slab |x'' - x_Q''| < s/4
    let mut xs: Vec<f64> = (0..patch.samples().len())
        .map(|i| patch.abscissa(i))
        .filter(|a| *a > left && *a < right)
        .collect();
    xs.push(left);
    xs.push(right);
    let worst = xs.iter().map(|a| (patch.graph(*a) - ql.y).abs()).fold(0.0, f64::max);
    if worst >= 0.25 * s {
        return Err(Error::Hypothesis(format!(
            "boundary leaves the middle slab of Q (deviation {worst:.3e} ≥ s/4)"
        )));
    }

    let n = 1usize << k;
    let sw = s / n as f64;
    let mut boundary_cubes = Vec::with_capacity(n);
    let mut inner_cubes = Vec::with_capacity(n);
    let mut residual: f64 = 0.0;
    for i in 0..n {
        let a = left + (i as f64 + 0.5) * sw;
        let height = bisect_boundary(patch, a, bottom, top);
        residual = residual.max((patch.graph(a) - height).abs());
        let qc = patch.to_world(Vec2::new(a, height));
        boundary_cubes.push(Cube::new(qc, sw, cube.angle));

        let mut column = Vec::new();
        let mut base = height + 0.5 * sw;
        while base < top - 1e-12 * s {
            let lo = if base + sw > top { top - sw } else { base };
            column.push(Cube::new(patch.to_world(Vec2::new(a, lo + 0.5 * sw)), sw, cube.angle));
            base = lo + sw;
        }
        if column.len() > n {
            return Err(Error::Hypothesis(format!("column {i} needs {} > 2^k inner cubes", column.len())));
        }
        inner_cubes.push(column);
    }

    let sc = StandardConstruction { cube, k, boundary_cubes, inner_cubes, bisection_residual: residual };
    for p in sc.all_inner() {
        let d = cube_graph_distance(patch, p);
        if d <= INNER_CUBE_DISTANCE_CONSTANT * p.side {
            return Err(Error::Hypothesis(format!(
                "inner cube at ({:.4}, {:.4}) is only {d:.3e} from the boundary",
                p.center.x, p.center.y
            )));
        }
    }
    Ok(sc)
}

/// Height of the boundary above abscissa `a`, by bisection on the epigraph test.
fn bisect_boundary(patch: &LipschitzPatch, a: f64, mut lo: f64, mut hi: f64) -> f64 {
    let above = |t: f64| patch.height_above_graph(patch.to_world(Vec2::new(a, t))) > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if above(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * (1.0 + hi.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Distance between a cube and the chart graph polyline.
fn cube_graph_distance(patch: &LipschitzPatch, cube: &Cube) -> f64 {
    let corners = cube.corners();
    let verts: Vec<Vec2> = patch.graph_vertices().collect();
    let mut d = f64::INFINITY;
    for w in verts.windows(2) {
        if cube.contains(w[0]) || cube.contains(w[1]) {
            return 0.0;
        }
        for i in 0..4 {
            let (a, b) = (corners[i], corners[(i + 1) % 4]);
            d = d
                .min(point_segment_distance(a, w[0], w[1]))
                .min(point_segment_distance(w[0], a, b))
                .min(point_segment_distance(w[1], a, b));
            if super::point::orient(a, b, w[0]) * super::point::orient(a, b, w[1]) < 0.0
                && super::point::orient(w[0], w[1], a) * super::point::orient(w[0], w[1], b) < 0.0
            {
                return 0.0;
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_patch_layout() {
        let p = LipschitzPatch::flat(2.0, 0.01).unwrap();
        let sc = standard_construction(&p, Cube::new(Vec2::ZERO, 1.0, 0.0), 3).unwrap();
        assert_eq!(sc.boundary_cubes.len(), 8);
        assert_eq!(sc.inner_cubes.len(), 8);
        for (i, q) in sc.boundary_cubes.iter().enumerate() {
            assert!((q.side - 0.125).abs() < 1e-15);
            assert!(q.center.y.abs() < 1e-12);
            assert!((q.center.x - (-0.5 + 0.125 * (i as f64 + 0.5))).abs() < 1e-12);
        }
        // above each boundary square: [0.0625, 0.5] needs four squares, the last one flush with the top
        for col in &sc.inner_cubes {
            assert_eq!(col.len(), 4);
            assert!((col.last().unwrap().center.y - (0.5 - 0.0625)).abs() < 1e-12);
        }
    }

    #[test]
    fn sloped_line_centers() {
        let p = LipschitzPatch::line(2.0, 0.03).unwrap();
        let sc = standard_construction(&p, Cube::new(Vec2::ZERO, 1.0, 0.0), 3).unwrap();
        for q in &sc.boundary_cubes {
            assert!((q.center.y - 0.03 * q.center.x).abs() < 1e-10);
        }
        assert!(sc.bisection_residual < 1e-10);
    }

    #[test]
    fn rejects_large_tau() {
        let p = LipschitzPatch::line(2.0, 0.1).unwrap();
        assert!(standard_construction(&p, Cube::new(Vec2::ZERO, 1.0, 0.0), 3).is_err());
    }

    #[test]
    fn rejects_cube_off_boundary() {
        let p = LipschitzPatch::flat(2.0, 0.01).unwrap();
        assert!(standard_construction(&p, Cube::new(Vec2::new(0.0, 0.2), 1.0, 0.0), 3).is_err());
    }
}
