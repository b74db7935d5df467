use super::{Region, ScalarField};
use crate::error::{Error, Result};
use crate::geometry::{Ball, LipschitzPatch, Vec2};
use crate::sampling::Halton2;

/// Number of quasi-random base points in `sup_on_ball`.
pub const SUP_BASE_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupEstimate {
    pub value: f64,
    /// Maximizer, padded with zeros beyond the field dimension.
    pub argmax: [f64; 3],
    /// Relative gain of the final ascent stage, an error indicator.
    pub rel_error: f64,
}

/// Estimates `sup |h|` over `B ∩ closure(Ω)`.
///
/// Planar balls are sampled directly. For the extension of a planar field the
/// supremum over the 3D ball is attained on its upper cap, so the search runs
/// over the disk below with `|u(x)|·e^{√λ(t0 + s(x))}`, `s(x) = √(r² - |x - x0|²)`.
pub fn sup_on_ball(field: &ScalarField, ball: &Ball, region: &Region) -> Result<SupEstimate> {
    let dim = field.dim();
    if ball.dim != dim.max(2) && !(dim == 1 && ball.dim == 2) {
        return Err(Error::Precondition(format!("ball of dimension {} for a {dim}D field", ball.dim)));
    }
    let c = ball.center2();
    let r = ball.radius;
    // the maximum of a piecewise-linear field sits at a vertex or on the sphere
    let fem = match field.as_extension() {
        Some((inner, _)) => inner.as_fem(),
        None => field.as_fem(),
    };
    let extra: Vec<Vec2> = fem
        .map(|f| f.mesh.vertices.iter().copied().filter(|v| v.dist(c) <= r).collect())
        .unwrap_or_default();
    match dim {
        1 => {
            // a 1D interval, with the ball's first coordinate as center
            let g = |x: Vec2| field.eval(&[x.x]).map(f64::abs);
            let lift = |x: Vec2| [x.x, 0.0, 0.0];
            search(&g, &lift, c, r, region, true, &extra)
        }
        2 => {
            let g = |x: Vec2| field.eval2(x).map(f64::abs);
            let lift = |x: Vec2| [x.x, x.y, 0.0];
            search(&g, &lift, c, r, region, false, &extra)
        }
        _ => {
            let (inner, lambda) = field.as_extension().expect("3D fields are extensions");
            let s = lambda.sqrt();
            let t0 = ball.center[2];
            let cap = |x: Vec2| (r * r - (x - c).norm2()).max(0.0).sqrt();
            // e^{√λ t} is monotone in t, so the upper cap wins
            let g = |x: Vec2| inner.eval2(x).map(|u| u.abs() * (s * (t0 + cap(x))).exp());
            let lift = |x: Vec2| [x.x, x.y, t0 + cap(x)];
            search(&g, &lift, c, r, region, false, &extra)
        }
    }
}

fn search(
    g: &dyn Fn(Vec2) -> Option<f64>,
    lift: &dyn Fn(Vec2) -> [f64; 3],
    c: Vec2,
    r: f64,
    region: &Region,
    one_d: bool,
    extra: &[Vec2],
) -> Result<SupEstimate> {
    let admissible = |p: Vec2| -> Option<f64> {
        if p.dist(c) > r || !region.in_closure(p) {
            return None;
        }
        g(p)
    };
    let mut cands: Vec<(f64, Vec2)> = Vec::with_capacity(SUP_BASE_SAMPLES + 128);
    let mut push = |p: Vec2| {
        if let Some(v) = admissible(p) {
            cands.push((v, p));
        }
    };
    push(c);
    if one_d {
        for i in 0..=SUP_BASE_SAMPLES {
            push(Vec2::new(c.x - r + 2.0 * r * i as f64 / SUP_BASE_SAMPLES as f64, c.y));
        }
    } else {
        let mut h = Halton2::new();
        let mut drawn = 0;
        let mut tries = 0;
        while drawn < SUP_BASE_SAMPLES && tries < 4 * SUP_BASE_SAMPLES {
            tries += 1;
            let (u, v) = h.next_unit();
            let p = c + Vec2::new(2.0 * u - 1.0, 2.0 * v - 1.0) * r;
            if p.dist(c) <= r {
                drawn += 1;
                push(p);
            }
        }
        for i in 0..128 {
            push(c + Vec2::from_angle(2.0 * std::f64::consts::PI * i as f64 / 128.0) * (r * (1.0 - 1e-12)));
        }
        for &p in extra {
            push(p);
        }
    }
    if cands.is_empty() {
        return Err(Error::EmptyIntersection(format!("ball at ({}, {}) of radius {r} misses the region", c.x, c.y)));
    }
    cands.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.x.total_cmp(&b.1.x)).then(a.1.y.total_cmp(&b.1.y)));
    let (mut best, mut best_p) = cands[0];
    let mut rel_error: f64 = 0.0;
    for &(v0, p0) in cands.iter().take(6) {
        let (v, p, gain) = ascend(&admissible, v0, p0, r, one_d);
        if v > best {
            best = v;
            best_p = p;
        }
        if p == best_p {
            rel_error = gain;
        }
    }
    Ok(SupEstimate { value: best, argmax: lift(best_p), rel_error })
}

/// Compass search with step halving; returns the final value, point and the
/// relative gain achieved below step `1e-4·r`.
fn ascend(f: &dyn Fn(Vec2) -> Option<f64>, mut v: f64, mut p: Vec2, r: f64, one_d: bool) -> (f64, Vec2, f64) {
    let dirs: Vec<Vec2> = if one_d {
        vec![Vec2::new(1.0, 0.0), Vec2::new(-1.0, 0.0)]
    } else {
        (0..8).map(|k| Vec2::from_angle(k as f64 * std::f64::consts::FRAC_PI_4)).collect()
    };
    let mut step = r / 32.0;
    let mut v_mark = None;
    let mut iters = 0;
    while step > 1e-10 * r && iters < 2000 {
        iters += 1;
        if v_mark.is_none() && step < 1e-4 * r {
            v_mark = Some(v);
        }
        let mut moved = false;
        for d in &dirs {
            let q = p + *d * step;
            if let Some(w) = f(q) {
                if w > v {
                    v = w;
                    p = q;
                    moved = true;
                    break;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    let mark = v_mark.unwrap_or(v);
    let gain = if v > 0.0 { (v - mark) / v } else { 0.0 };
    (v, p, gain)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolderFit {
    pub beta: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Fits `log|h| ≈ β·log dist(·, ∂Ω) + c` along inward rays of the chart.
pub fn holder_boundary_check(field: &ScalarField, patch: &LipschitzPatch) -> Result<HolderFit> {
    if field.dim() != 2 {
        return Err(Error::Precondition("Hölder check needs a planar field".into()));
    }
    let rad = patch.radius();
    let n = patch.normal();
    let mut scale: f64 = 0.0;
    for k in 0..9 {
        let y = (k as f64 / 4.0 - 1.0) * 0.5 * rad;
        let b = patch.to_world(Vec2::new(y, patch.graph(y)));
        if let Some(v) = field.eval2(b + n * (0.25 * rad)) {
            scale = scale.max(v.abs());
        }
    }
    if scale == 0.0 {
        return Err(Error::Precondition("field vanishes identically near the chart".into()));
    }
    let mut worst: f64 = 0.0;
    for k in 0..=64 {
        let y = (k as f64 / 32.0 - 1.0) * 0.5 * rad;
        let b = patch.to_world(Vec2::new(y, patch.graph(y)));
        let v = field.eval2(b).ok_or_else(|| Error::Precondition("field undefined on the chart boundary".into()))?;
        worst = worst.max(v.abs());
    }
    if worst > 1e-8 * scale {
        return Err(Error::NotVanishing(worst / scale));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &y in &[-0.3, -0.2, -0.1, 0.1, 0.2, 0.3] {
        let y = y * rad;
        let b = patch.to_world(Vec2::new(y, patch.graph(y)));
        for k in 4..=20 {
            let delta = rad * 0.5f64.powi(k);
            let p = b + n * delta;
            let d = patch.distance_to_graph(p);
            if let Some(v) = field.eval2(p) {
                if v != 0.0 && d > 0.0 {
                    xs.push(d.ln());
                    ys.push(v.abs().ln());
                }
            }
        }
    }
    if xs.len() < 3 {
        return Err(Error::Precondition("not enough nonzero samples along the rays".into()));
    }
    let (beta, _, r_squared) = crate::stats::linear_fit(&xs, &ys);
    if beta <= 0.0 {
        return Err(Error::Hypothesis(format!("fitted Hölder exponent {beta} is not positive")));
    }
    Ok(HolderFit { beta, r_squared, points: xs.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_extension, HarmonicPolynomial};

    #[test]
    fn linear_sup_on_unit_disk() {
        let f = ScalarField::Harmonic(HarmonicPolynomial::re_power(1));
        let s = sup_on_ball(&f, &Ball::new2(Vec2::ZERO, 1.0), &Region::Plane).unwrap();
        assert!((s.value - 1.0).abs() < 1e-6, "{}", s.value);
        // |x| peaks at both ends of the horizontal diameter
        assert!((s.argmax[0].abs() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn quadratic_sup() {
        let f = ScalarField::Harmonic(HarmonicPolynomial::re_power(2));
        let r: f64 = 0.3;
        let s = sup_on_ball(&f, &Ball::new2(Vec2::ZERO, r), &Region::Plane).unwrap();
        assert!((s.value - r * r).abs() < 1e-3 * r * r);
    }

    #[test]
    fn ground_state_peak() {
        let f = ScalarField::Rectangle { m: 1, n: 1, a: 1.0, b: 1.0 };
        let region = Region::polygon(crate::geometry::PolygonDomain::unit_square()).unwrap();
        let s = sup_on_ball(&f, &Ball::new2(Vec2::new(0.5, 0.5), 0.1), &region).unwrap();
        assert!((s.value - 1.0).abs() < 1e-9);
        assert!(Vec2::new(s.argmax[0], s.argmax[1]).dist(Vec2::new(0.5, 0.5)) < 1e-4);
    }

    #[test]
    fn half_disk_restriction() {
        // h = y on the upper half-plane patch: sup over B(0, r) ∩ {y ≥ 0} is r
        let patch = LipschitzPatch::flat(1.0, 0.1).unwrap();
        let f = ScalarField::Harmonic(HarmonicPolynomial::im_power(1).scaled(-1.0));
        let s = sup_on_ball(&f, &Ball::new2(Vec2::ZERO, 0.2), &Region::Patch(patch)).unwrap();
        assert!((s.value - 0.2).abs() < 1e-6);
    }

    #[test]
    fn extension_sup_uses_cap() {
        let u = ScalarField::Rectangle { m: 1, n: 1, a: 1.0, b: 1.0 };
        let lambda = 2.0 * std::f64::consts::PI.powi(2);
        let h = make_extension(u, lambda).unwrap();
        let region = Region::polygon(crate::geometry::PolygonDomain::unit_square()).unwrap();
        let s = sup_on_ball(&h, &Ball::new3([0.5, 0.5, 0.0], 0.1), &region).unwrap();
        // the top of the ball at the peak: e^{√λ·0.1}
        assert!((s.value - (lambda.sqrt() * 0.1).exp()).abs() < 1e-6);
    }

    #[test]
    fn empty_intersection_is_an_error() {
        let f = ScalarField::constant(1.0);
        let region = Region::polygon(crate::geometry::PolygonDomain::unit_square()).unwrap();
        assert!(sup_on_ball(&f, &Ball::new2(Vec2::new(5.0, 5.0), 0.5), &region).is_err());
    }

    #[test]
    fn holder_exponents() {
        let patch = LipschitzPatch::flat(1.0, 0.1).unwrap();
        let y = ScalarField::Harmonic(HarmonicPolynomial::im_power(1));
        let fit = holder_boundary_check(&y, &patch).unwrap();
        assert!((fit.beta - 1.0).abs() < 0.02);
        let xy = ScalarField::Harmonic(HarmonicPolynomial::im_power(2));
        let fit = holder_boundary_check(&xy, &patch).unwrap();
        assert!((fit.beta - 1.0).abs() < 0.05);
        let x = ScalarField::Harmonic(HarmonicPolynomial::re_power(1));
        assert!(matches!(holder_boundary_check(&x, &patch), Err(Error::NotVanishing(_))));
    }
}
