//! Planar geometry: points, Lipschitz charts, polygon domains, balls, cubes,
//! the boundary cube decomposition and triangle/disk clipping.

mod clip;
mod construction;
mod files;
mod patch;
mod point;
mod polygon;
mod star;

pub use clip::{clip_cell, ClipPiece, ClipResult};
pub use files::{DomainFile, PatchFile};
pub use construction::{standard_construction, StandardConstruction, INNER_CUBE_DISTANCE_CONSTANT};
pub use patch::{LipschitzPatch, DEFAULT_GRAPH_INTERVALS};
pub use point::{orient, point_segment_distance, Aabb, Vec2};
pub use polygon::PolygonDomain;
pub use star::{star_shaped_check, star_shaped_from, StarReport};

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

impl Location {
    /// Inside or on the boundary.
    pub fn in_closure(self) -> bool {
        self != Location::Outside
    }
}

/// A Euclidean ball in dimension 2 or 3. In dimension 2 the third center
/// coordinate is ignored.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Ball {
    pub center: [f64; 3],
    pub radius: f64,
    pub dim: usize,
}

impl Ball {
    pub fn new2(center: Vec2, radius: f64) -> Self {
        assert!(radius > 0.0, "ball radius must be positive");
        Self { center: [center.x, center.y, 0.0], radius, dim: 2 }
    }

    pub fn new3(center: [f64; 3], radius: f64) -> Self {
        assert!(radius > 0.0, "ball radius must be positive");
        Self { center, radius, dim: 3 }
    }

    /// Ball with the same center and radius scaled by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self { radius: self.radius * c, ..*self }
    }

    pub fn center2(&self) -> Vec2 {
        Vec2::new(self.center[0], self.center[1])
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        let d2: f64 = (0..self.dim).map(|i| (p[i] - self.center[i]).powi(2)).sum();
        d2 < self.radius * self.radius
    }

    /// Lebesgue measure.
    pub fn volume(&self) -> f64 {
        ball_volume(self.dim, self.radius)
    }

    pub fn contains_ball(&self, other: &Ball) -> bool {
        let d: f64 = (0..self.dim).map(|i| (other.center[i] - self.center[i]).powi(2)).sum::<f64>().sqrt();
        d + other.radius <= self.radius * (1.0 + 1e-12)
    }
}

pub fn ball_volume(dim: usize, r: f64) -> f64 {
    use std::f64::consts::PI;
    match dim {
        1 => 2.0 * r,
        2 => PI * r * r,
        3 => 4.0 / 3.0 * PI * r * r * r,
        _ => panic!("unsupported dimension {dim}"),
    }
}

/// A square with sides parallel to a chart frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cube {
    pub center: Vec2,
    pub side: f64,
    /// Rotation of the frame, as in [`LipschitzPatch::angle`].
    pub angle: f64,
}

impl Cube {
    pub fn new(center: Vec2, side: f64, angle: f64) -> Self {
        assert!(side > 0.0, "cube side must be positive");
        Self { center, side, angle }
    }

    pub fn diameter(&self) -> f64 {
        self.side * std::f64::consts::SQRT_2
    }

    pub fn corners(&self) -> [Vec2; 4] {
        let h = 0.5 * self.side;
        [(-h, -h), (h, -h), (h, h), (-h, h)].map(|(x, y)| self.center + Vec2::new(x, y).rotate(self.angle))
    }

    pub fn to_local(&self, p: Vec2) -> Vec2 {
        (p - self.center).rotate(-self.angle)
    }

    pub fn contains(&self, p: Vec2) -> bool {
        let l = self.to_local(p);
        let h = 0.5 * self.side * (1.0 + 1e-12);
        l.x.abs() <= h && l.y.abs() <= h
    }

    pub fn to_world(&self, local: Vec2) -> Vec2 {
        self.center + local.rotate(self.angle)
    }
}
