use super::patch::LipschitzPatch;
use super::point::Vec2;
use crate::error::{Error, Result};
use crate::sampling::Halton2;

#[derive(Debug, Clone, PartialEq)]
pub struct StarReport {
    pub holds: bool,
    /// Apex used for the check.
    pub apex: Vec2,
    /// A segment from the apex leaving Ω, when one was found.
    pub witness: Option<(Vec2, Vec2)>,
    pub pairs_checked: usize,
}

/// Default number of subdivision points per segment.
pub const STAR_SUBDIVISIONS: usize = 64;

/// Checks that `Ω ∩ B(x1, r/2)` is star-shaped about the lifted point
/// `x1 = x0 + τ·r·e_d`, with `x0` in the closure of Ω within a quarter of the chart.
pub fn star_shaped_check(patch: &LipschitzPatch, x0: Vec2, samples: usize) -> Result<StarReport> {
    if patch.tau() >= 0.25 {
        return Err(Error::Precondition(format!("star-shapedness needs tau < 1/4, got {}", patch.tau())));
    }
    if x0.dist(patch.center()) > 0.25 * patch.radius() * (1.0 + 1e-12) || patch.height_above_graph(x0) < -1e-12 {
        return Err(Error::Precondition("x0 must lie in the closure of Ω within a quarter of the chart".into()));
    }
    if samples < 1000 {
        return Err(Error::Precondition("at least 1000 samples are required".into()));
    }
    let apex = x0 + patch.normal() * (patch.tau() * patch.radius());
    Ok(star_shaped_from(patch, apex, 0.5 * patch.radius(), samples, STAR_SUBDIVISIONS))
}

/// Star-shapedness of `Ω ∩ B(apex, rho)` about `apex`, by sampling. Graph vertices in
/// the ball are always part of the sample set.
pub fn star_shaped_from(patch: &LipschitzPatch, apex: Vec2, rho: f64, samples: usize, subdivisions: usize) -> StarReport {
    let tol = 1e-12 * patch.radius();
    // (target, lies on ∂Ω)
    let mut targets: Vec<(Vec2, bool)> = patch
        .graph_vertices()
        .filter(|v| v.dist(apex) < rho)
        .map(|v| (v, true))
        .collect();
    let mut halton = Halton2::new();
    let mut drawn = 0;
    let mut attempts = 0;
    while drawn < samples && attempts < samples * 20 {
        attempts += 1;
        let (u, v) = halton.next_unit();
        let p = apex + Vec2::new(2.0 * u - 1.0, 2.0 * v - 1.0) * rho;
        if p.dist(apex) < rho && patch.height_above_graph(p) > tol {
            targets.push((p, false));
            drawn += 1;
        }
    }
    let pairs_checked = targets.len();
    for &(x2, on_boundary) in &targets {
        for j in 1..subdivisions {
            let x3 = apex.lerp(x2, j as f64 / subdivisions as f64);
            let h = patch.height_above_graph(x3);
            // segments to boundary vertices only need to stay in the closure
            if h < -tol || (!on_boundary && h <= tol) {
                return StarReport { holds: false, apex, witness: Some((apex, x2)), pairs_checked };
            }
        }
    }
    StarReport { holds: true, apex, witness: None, pairs_checked }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_patch_is_star_shaped() {
        let p = LipschitzPatch::flat(1.0, 0.1).unwrap();
        let r = star_shaped_check(&p, Vec2::ZERO, 10_000).unwrap();
        assert!(r.holds);
        assert!(r.pairs_checked >= 10_000);
    }

    #[test]
    fn lifted_wedge_is_star_shaped() {
        for slope in [0.2, -0.2] {
            let p = LipschitzPatch::wedge(1.0, slope).unwrap();
            assert!(star_shaped_check(&p, Vec2::ZERO, 10_000).unwrap().holds, "slope {slope}");
        }
    }

    #[test]
    fn unlifted_reentrant_wedge_fails_near_corner() {
        let p = LipschitzPatch::wedge(1.0, -0.2).unwrap();
        let x0 = Vec2::new(-0.1, -0.02);
        let r = star_shaped_from(&p, x0, 0.5, 10_000, STAR_SUBDIVISIONS);
        assert!(!r.holds);
        let (a, b) = r.witness.unwrap();
        // the violating segment passes over the corner at the origin
        assert!(a.x < 0.0 && b.x > 0.0);
        assert!(crate::geometry::point_segment_distance(Vec2::ZERO, a, b) < 0.1);
    }

    #[test]
    fn rejects_large_tau() {
        let p = LipschitzPatch::wedge(1.0, 0.3).unwrap();
        assert!(matches!(star_shaped_check(&p, Vec2::ZERO, 2000), Err(Error::Precondition(_))));
    }
}
