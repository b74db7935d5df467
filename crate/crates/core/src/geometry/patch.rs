use super::point::Vec2;
use super::Location;
use crate::error::{Error, Result};

/// Default number of graph intervals `M`.
pub const DEFAULT_GRAPH_INTERVALS: usize = 512;

/// A boundary chart: inside `B(center, radius)` the domain is the region above
/// the graph of a piecewise-linear function, expressed in a rotated frame.
///
/// Local coordinates `(y', y'')` map to world coordinates through
/// `center + R(angle)·(y', y'')`, so the local second axis `e_d` is the
/// inward direction of the chart.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzPatch {
    center: Vec2,
    radius: f64,
    angle: f64,
    tau: f64,
    samples: Vec<f64>,
}

impl LipschitzPatch {
    /// Builds a patch from graph values at `samples.len()` equally spaced
    /// abscissae covering `[-radius, radius]`.
    pub fn new(center: Vec2, radius: f64, angle: f64, tau: f64, samples: Vec<f64>) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidPatch(format!("radius must be positive, got {radius}")));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidPatch(format!("tau must be positive, got {tau}")));
        }
        if samples.len() < 2 {
            return Err(Error::InvalidPatch("need at least two graph samples".into()));
        }
        if samples.iter().any(|v| !v.is_finite()) || !center.is_finite() || !angle.is_finite() {
            return Err(Error::InvalidPatch("non-finite patch data".into()));
        }
        let patch = Self { center, radius, angle, tau, samples };
        let f0 = patch.graph(0.0);
        if f0.abs() > 1e-12 * radius {
            return Err(Error::InvalidPatch(format!("graph must pass through the center, f(0) = {f0:e}")));
        }
        let est = patch.lipschitz_estimate();
        if est > tau * (1.0 + 1e-12) {
            return Err(Error::InvalidPatch(format!("measured Lipschitz constant {est} exceeds declared {tau}")));
        }
        Ok(patch)
    }

    /// Samples `f` on the default grid.
    pub fn from_fn(center: Vec2, radius: f64, angle: f64, tau: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn_with(center, radius, angle, tau, DEFAULT_GRAPH_INTERVALS, f)
    }

    pub fn from_fn_with(
        center: Vec2,
        radius: f64,
        angle: f64,
        tau: f64,
        intervals: usize,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let m = intervals.max(1);
        let samples = (0..=m).map(|i| f(-radius + 2.0 * radius * i as f64 / m as f64)).collect();
        Self::new(center, radius, angle, tau, samples)
    }

    /// The half-plane `{y > 0}` seen through a ball of radius `radius` at the origin.
    pub fn flat(radius: f64, tau: f64) -> Result<Self> {
        Self::from_fn(Vec2::ZERO, radius, 0.0, tau, |_| 0.0)
    }

    pub fn line(radius: f64, slope: f64) -> Result<Self> {
        Self::from_fn(Vec2::ZERO, radius, 0.0, slope.abs().max(1e-3), |y| slope * y)
    }

    /// `f(y') = slope·|y'|`; a negative slope gives a reentrant corner.
    pub fn wedge(radius: f64, slope: f64) -> Result<Self> {
        Self::from_fn(Vec2::ZERO, radius, 0.0, slope.abs().max(1e-3), |y| slope * y.abs())
    }

    pub fn center(&self) -> Vec2 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn intervals(&self) -> usize {
        self.samples.len() - 1
    }

    fn step(&self) -> f64 {
        2.0 * self.radius / self.intervals() as f64
    }

    /// Abscissa of sample `i`.
    pub fn abscissa(&self, i: usize) -> f64 {
        -self.radius + self.step() * i as f64
    }

    /// Inward unit vector: the image of the local second axis.
    pub fn normal(&self) -> Vec2 {
        Vec2::new(0.0, 1.0).rotate(self.angle)
    }

    pub fn tangent(&self) -> Vec2 {
        Vec2::new(1.0, 0.0).rotate(self.angle)
    }

    pub fn to_world(&self, local: Vec2) -> Vec2 {
        self.center + local.rotate(self.angle)
    }

    pub fn to_local(&self, world: Vec2) -> Vec2 {
        (world - self.center).rotate(-self.angle)
    }

    /// The graph function, linearly extended beyond `[-radius, radius]`.
    pub fn graph(&self, y: f64) -> f64 {
        let m = self.intervals();
        let h = self.step();
        let s = (y + self.radius) / h;
        let i = if s <= 0.0 {
            0
        } else if s >= m as f64 {
            m - 1
        } else {
            (s.floor() as usize).min(m - 1)
        };
        let t = s - i as f64;
        self.samples[i] + (self.samples[i + 1] - self.samples[i]) * t
    }

    /// Largest consecutive-sample slope.
    pub fn lipschitz_estimate(&self) -> f64 {
        let h = self.step();
        self.samples
            .windows(2)
            .map(|w| (w[1] - w[0]).abs() / h)
            .fold(0.0, f64::max)
    }

    /// Signed height of a world point above the graph, in local units.
    pub fn height_above_graph(&self, world: Vec2) -> f64 {
        let l = self.to_local(world);
        l.y - self.graph(l.x)
    }

    /// Classification against `Ω ∩ B(center, radius)`.
    pub fn contains(&self, pt: Vec2) -> Location {
        let tol = 1e-12 * 2.0 * self.radius;
        let d = pt.dist(self.center);
        if d > self.radius + tol {
            return Location::Outside;
        }
        let h = self.height_above_graph(pt);
        if h < -tol {
            Location::Outside
        } else if h <= tol || d >= self.radius - tol {
            Location::Boundary
        } else {
            Location::Inside
        }
    }

    /// Classification against the full epigraph (no ball restriction).
    pub fn epigraph_location(&self, pt: Vec2) -> Location {
        let tol = 1e-12 * 2.0 * self.radius;
        let h = self.height_above_graph(pt);
        if h.abs() <= tol {
            Location::Boundary
        } else if h > 0.0 {
            Location::Inside
        } else {
            Location::Outside
        }
    }

    /// Graph vertices in world coordinates.
    pub fn graph_vertices(&self) -> impl Iterator<Item = Vec2> + '_ {
        (0..self.samples.len()).map(move |i| self.to_world(Vec2::new(self.abscissa(i), self.samples[i])))
    }

    /// Distance from a world point to the graph polyline over `[-radius, radius]`.
    pub fn distance_to_graph(&self, world: Vec2) -> f64 {
        let verts: Vec<Vec2> = self.graph_vertices().collect();
        verts
            .windows(2)
            .map(|w| super::point::point_segment_distance(world, w[0], w[1]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Rescaling about the center by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.center,
            self.radius * c,
            self.angle,
            self.tau,
            self.samples.iter().map(|v| v * c).collect(),
        )
    }

    /// Ω ∩ window as a list of counter-clockwise world triangles, where the window is
    /// the local-frame rectangle `[y0, y1] × [.., top]`.
    pub(crate) fn epigraph_triangles(&self, y0: f64, y1: f64, top: f64) -> Vec<[Vec2; 3]> {
        let mut xs = vec![y0];
        let h = self.step();
        for i in 1..self.samples.len() - 1 {
            let a = self.abscissa(i);
            // only kinks of the graph need a cell boundary
            let s0 = (self.samples[i] - self.samples[i - 1]) / h;
            let s1 = (self.samples[i + 1] - self.samples[i]) / h;
            if a > y0 && a < y1 && (s1 - s0).abs() > 1e-12 * (1.0 + s0.abs()) {
                xs.push(a);
            }
        }
        xs.push(y1);
        let mut tris = Vec::with_capacity(2 * xs.len());
        for w in xs.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (self.graph(a), self.graph(b));
            let (ta, tb) = (top.max(fa), top.max(fb));
            let p = [Vec2::new(a, fa), Vec2::new(b, fb), Vec2::new(b, tb), Vec2::new(a, ta)];
            for t in [[p[0], p[1], p[2]], [p[0], p[2], p[3]]] {
                if super::point::orient(t[0], t[1], t[2]) > 0.0 {
                    tris.push([self.to_world(t[0]), self.to_world(t[1]), self.to_world(t[2])]);
                }
            }
        }
        tris
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lipschitz_estimates() {
        assert_eq!(LipschitzPatch::flat(1.0, 0.1).unwrap().lipschitz_estimate(), 0.0);
        let lin = LipschitzPatch::line(1.0, 0.1).unwrap();
        assert!((lin.lipschitz_estimate() - 0.1).abs() < 1e-14);
        let w = LipschitzPatch::from_fn_with(Vec2::ZERO, 1.0, 0.0, 0.05, 100, |y| 0.05 * y.abs()).unwrap();
        assert!((w.lipschitz_estimate() - 0.05).abs() < 1e-14);
    }

    #[test]
    fn rejects_steep_graph() {
        let err = LipschitzPatch::from_fn(Vec2::ZERO, 1.0, 0.0, 0.1, |y| 0.3 * y).unwrap_err();
        assert!(matches!(err, Error::InvalidPatch(_)));
    }

    #[test]
    fn rejects_offset_graph() {
        assert!(LipschitzPatch::from_fn(Vec2::ZERO, 1.0, 0.0, 0.1, |y| 0.01 + 0.0 * y).is_err());
    }

    #[test]
    fn frame_round_trip() {
        let p = LipschitzPatch::from_fn(Vec2::new(1.0, 2.0), 0.5, 0.7, 0.2, |y| 0.1 * y).unwrap();
        let w = Vec2::new(1.3, 1.9);
        let back = p.to_world(p.to_local(w));
        assert!(back.dist(w) < 1e-14);
        assert!(p.to_world(Vec2::ZERO).dist(p.center()) < 1e-15);
    }

    #[test]
    fn classification() {
        let p = LipschitzPatch::flat(1.0, 0.1).unwrap();
        assert_eq!(p.contains(Vec2::new(0.0, 0.5)), Location::Inside);
        assert_eq!(p.contains(Vec2::new(0.3, 0.0)), Location::Boundary);
        assert_eq!(p.contains(Vec2::new(0.0, -0.5)), Location::Outside);
        assert_eq!(p.contains(Vec2::new(0.0, 1.5)), Location::Outside);
        assert_eq!(p.epigraph_location(Vec2::new(0.0, 1.5)), Location::Inside);
    }

    #[test]
    fn scaling_power_of_two_is_exact() {
        let p = LipschitzPatch::from_fn(Vec2::ZERO, 1.0, 0.0, 0.3, |y| 0.2 * y.abs() - 0.1 * y).unwrap();
        let s = p.scaled(4.0).unwrap();
        assert_eq!(p.lipschitz_estimate(), s.lipschitz_estimate());
    }
}
