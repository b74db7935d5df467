use super::point::{orient, Vec2};

/// One piece of a triangle/disk intersection.
///
/// Pieces carry a sign: the decomposition fans out from the disk center, and
/// pieces from edges facing away from the center subtract.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClipPiece {
    /// A counter-clockwise triangle lying entirely inside the disk.
    Triangle([Vec2; 3]),
    /// The polar region `{center + r·(cos θ, sin θ) : θ0 ≤ θ ≤ θ1, 0 ≤ r ≤ R(θ)}`
    /// where `R(θ) = radius` on an arc, or the distance to a line for a chord.
    Wedge {
        center: Vec2,
        radius: f64,
        theta0: f64,
        theta1: f64,
        /// `(distance, normal angle)` of the bounding line, or `None` for an arc.
        line: Option<(f64, f64)>,
        sign: f64,
    },
}

impl ClipPiece {
    pub fn signed_area(&self) -> f64 {
        match *self {
            ClipPiece::Triangle([a, b, c]) => 0.5 * orient(a, b, c),
            ClipPiece::Wedge { radius, theta0, theta1, line, sign, .. } => {
                let a = match line {
                    None => 0.5 * radius * radius * (theta1 - theta0),
                    Some((d, tn)) => 0.5 * d * d * ((theta1 - tn).tan() - (theta0 - tn).tan()),
                };
                sign * a
            }
        }
    }

    /// Outer radial limit of a wedge at angle `theta`.
    pub fn wedge_extent(radius: f64, line: Option<(f64, f64)>, theta: f64) -> f64 {
        match line {
            None => radius,
            Some((d, tn)) => (d / (theta - tn).cos()).min(radius),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClipResult {
    pub area: f64,
    pub pieces: Vec<ClipPiece>,
}

/// Intersects a triangle with the disk `B(center, radius)`.
///
/// The area is exact up to rounding; the pieces tile the intersection with
/// signs and are the integration cells used by the mass quadrature.
pub fn clip_cell(tri: [Vec2; 3], center: Vec2, radius: f64) -> ClipResult {
    let mut t = tri;
    if orient(t[0], t[1], t[2]) < 0.0 {
        t.swap(1, 2);
    }
    let r2 = radius * radius;
    if t.iter().all(|p| p.dist(center) <= radius) {
        let area = 0.5 * orient(t[0], t[1], t[2]);
        return ClipResult { area, pieces: vec![ClipPiece::Triangle(t)] };
    }
    if disjoint(&t, center, radius) {
        return ClipResult { area: 0.0, pieces: vec![] };
    }
    let mut pieces = Vec::with_capacity(9);
    for i in 0..3 {
        let p = t[i] - center;
        let q = t[(i + 1) % 3] - center;
        let d = q - p;
        let a = d.norm2();
        let b = p.dot(d);
        let c = p.norm2() - r2;
        let disc = b * b - a * c;
        let (mut s0, mut s1) = (1.0, 0.0);
        if disc > 0.0 && a > 0.0 {
            let sq = disc.sqrt();
            s0 = ((-b - sq) / a).max(0.0);
            s1 = ((-b + sq) / a).min(1.0);
        }
        if s0 >= s1 {
            push_sector(&mut pieces, center, radius, p, q);
            continue;
        }
        let p0 = p + d * s0;
        let p1 = p + d * s1;
        if s0 > 0.0 {
            push_sector(&mut pieces, center, radius, p, p0);
        }
        push_fan_triangle(&mut pieces, center, radius, p0, p1);
        if s1 < 1.0 {
            push_sector(&mut pieces, center, radius, p1, q);
        }
    }
    let area = pieces.iter().map(|p| p.signed_area()).sum();
    ClipResult { area, pieces }
}

fn disjoint(t: &[Vec2; 3], c: Vec2, r: f64) -> bool {
    let inside = (0..3).all(|i| orient(t[i], t[(i + 1) % 3], c) >= 0.0);
    if inside {
        return false;
    }
    (0..3).all(|i| super::point::point_segment_distance(c, t[i], t[(i + 1) % 3]) >= r)
}

fn signed_angle(a: Vec2, b: Vec2) -> f64 {
    a.cross(b).atan2(a.dot(b))
}

fn push_sector(out: &mut Vec<ClipPiece>, center: Vec2, radius: f64, a: Vec2, b: Vec2) {
    let dt = signed_angle(a, b);
    if dt == 0.0 {
        return;
    }
    let t0 = a.y.atan2(a.x);
    let (lo, hi, sign) = if dt > 0.0 { (t0, t0 + dt, 1.0) } else { (t0 + dt, t0, -1.0) };
    out.push(ClipPiece::Wedge { center, radius, theta0: lo, theta1: hi, line: None, sign });
}

fn push_fan_triangle(out: &mut Vec<ClipPiece>, center: Vec2, radius: f64, a: Vec2, b: Vec2) {
    let cross = a.cross(b);
    let len = (b - a).norm();
    if cross == 0.0 || len == 0.0 {
        return;
    }
    let dt = signed_angle(a, b);
    let dist = cross.abs() / len;
    // foot of the perpendicular from the origin onto the chord line
    let e = (b - a) * (1.0 / len);
    let foot = a - e * a.dot(e);
    let tn = foot.y.atan2(foot.x);
    let t0 = a.y.atan2(a.x);
    let (lo, hi, sign) = if dt > 0.0 { (t0, t0 + dt, 1.0) } else { (t0 + dt, t0, -1.0) };
    // keep the normal angle within half a turn of the wedge
    let mid = 0.5 * (lo + hi);
    let tn = tn + (2.0 * std::f64::consts::PI) * ((mid - tn) / (2.0 * std::f64::consts::PI)).round();
    out.push(ClipPiece::Wedge { center, radius, theta0: lo, theta1: hi, line: Some((dist, tn)), sign });
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn disjoint_is_zero() {
        let r = clip_cell([Vec2::new(5.0, 5.0), Vec2::new(6.0, 5.0), Vec2::new(5.0, 6.0)], Vec2::ZERO, 1.0);
        assert_eq!(r.area, 0.0);
        assert!(r.pieces.is_empty());
    }

    #[test]
    fn full_disk() {
        let rho = 0.3;
        let r = clip_cell([Vec2::new(-5.0, -5.0), Vec2::new(5.0, -5.0), Vec2::new(0.0, 5.0)], Vec2::ZERO, rho);
        assert!((r.area - PI * rho * rho).abs() < 1e-14);
    }

    #[test]
    fn quarter_disk() {
        // legs of length 2 put the hypotenuse outside the unit disk
        let r = clip_cell([Vec2::new(0.0, 0.0), Vec2::new(2.0, 0.0), Vec2::new(0.0, 2.0)], Vec2::ZERO, 1.0);
        assert!((r.area - PI / 4.0).abs() < 1e-14, "{}", r.area);
    }

    #[test]
    fn unit_right_triangle_lies_in_unit_disk() {
        // the hypotenuse is a chord, so nothing is cut off
        let r = clip_cell([Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)], Vec2::ZERO, 1.0);
        assert!((r.area - 0.5).abs() < 1e-15);
    }

    #[test]
    fn orientation_independent() {
        let a = clip_cell([Vec2::new(0.1, 0.2), Vec2::new(1.3, -0.4), Vec2::new(0.6, 1.1)], Vec2::new(0.5, 0.3), 0.6);
        let b = clip_cell([Vec2::new(0.1, 0.2), Vec2::new(0.6, 1.1), Vec2::new(1.3, -0.4)], Vec2::new(0.5, 0.3), 0.6);
        assert!((a.area - b.area).abs() < 1e-15);
        let pieces: f64 = a.pieces.iter().map(|p| p.signed_area()).sum();
        assert!((pieces - a.area).abs() < 1e-15);
    }

    #[test]
    fn chord_cut_matches_segment_formula() {
        // half-plane x > 0.5 cut from the unit disk by a large triangle
        let r = clip_cell([Vec2::new(0.5, -10.0), Vec2::new(10.0, 0.0), Vec2::new(0.5, 10.0)], Vec2::ZERO, 1.0);
        let h: f64 = 0.5;
        let segment = h.acos() - h * (1.0 - h * h).sqrt();
        assert!((r.area - segment).abs() < 1e-13, "{} vs {}", r.area, segment);
    }
}
