//! Checks on harmonic functions: monotonicity, three-ball inequalities, the
//! mean-value bound, the interior nodal bound and quantitative Cauchy uniqueness.

use std::f64::consts::{LN_2, PI};
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use super::{fmt, in_disk, Case, CheckReport};
use crate::doubling::{ball_for, doubling_index, mass};
use crate::error::{Error, Result};
use crate::fields::{make_extension, sup_on_ball, HarmonicPolynomial, Region, ScalarField, SupEstimate};
use crate::geometry::{ball_volume, LipschitzPatch, PolygonDomain, Vec2};
use crate::nodal::nodal_measure;
use crate::sampling::rng;
use crate::stats::linear_fit;

fn sup(field: &ScalarField, c: [f64; 3], r: f64, region: &Region) -> Result<SupEstimate> {
    sup_on_ball(field, &ball_for(field, &c, r), region)
}

fn flat_half_plane() -> Result<Region> {
    Ok(Region::Patch(LipschitzPatch::flat(1.0, 0.03)?))
}

fn unit_square() -> Result<Region> {
    Region::polygon(PolygonDomain::unit_square())
}

fn nonempty(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Precondition("empty corpus".into()));
    }
    Ok(())
}

/// A random point of the closed upper half-disk of radius `r` about the origin.
fn in_upper_half_disk<R: Rng>(rng: &mut R, r: f64) -> Vec2 {
    let p = in_disk(rng, Vec2::ZERO, r);
    Vec2::new(p.x, p.y.abs())
}

/// A random square mode `sin(mπx)sin(nπy)`, `m, n ≤ 4`, and its extension.
fn random_square_extension<R: Rng>(rng: &mut R) -> Result<(u32, u32, ScalarField)> {
    let (m, n) = (rng.gen_range(1..=4u32), rng.gen_range(1..=4u32));
    let (u, l) = crate::spectral::analytic_rectangle(m, n, 1.0, 1.0)?;
    Ok((m, n, make_extension(u, l)?))
}

/// `N(x, r) ≤ N(x, R)` for `r < R` and `B(x, 2R)` inside the domain (the plane).
pub fn check_interior_monotonicity(seed: u64, fields: usize, pairs: usize) -> Result<CheckReport> {
    let start = Instant::now();
    nonempty(fields * pairs)?;
    let mut rng = rng(seed);
    let mut configs = Vec::new();
    for i in 0..fields {
        let deg = rng.gen_range(1..=6);
        let poly = HarmonicPolynomial::random(&mut rng, deg, false);
        let c = Vec2::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        for _ in 0..pairs {
            let (a, b): (f64, f64) = (rng.gen_range(0.02..0.5), rng.gen_range(0.02..0.5));
            configs.push((i, poly.clone(), c, a.min(b), a.max(b)));
        }
    }
    let cases: Vec<Case> = configs
        .par_iter()
        .map(|(i, poly, c, r, big)| {
            let f = ScalarField::Harmonic(poly.clone());
            let lo = doubling_index(&f, &[c.x, c.y], *r, &Region::Plane)?;
            let hi = doubling_index(&f, &[c.x, c.y], *big, &Region::Plane)?;
            Ok(Case::new(
                vec![i.to_string(), poly.to_string(), fmt(c.x), fmt(c.y), fmt(*r), fmt(*big), fmt(lo.n), fmt(hi.n)],
                hi.n - lo.n,
                1e-6 + lo.error + hi.error,
            ))
        })
        .collect::<Result<_>>()?;
    let mut rep = CheckReport::from_cases(
        "interior_monotonicity",
        &["field", "spec", "cx", "cy", "r", "R", "N_r", "N_R"],
        cases,
        start,
    );
    rep.notes.push("margin = N(x,R) - N(x,r)".into());
    Ok(rep)
}

/// Margin `ln(C·a^p·b^(1-p)) - ln(lhs)` and its error from the sup estimates.
fn three_ball_margin(c: f64, p: f64, lhs: &SupEstimate, a: &SupEstimate, b: &SupEstimate) -> (f64, f64) {
    let m = c.ln() + p * a.value.ln() + (1.0 - p) * b.value.ln() - lhs.value.ln();
    let e = lhs.rel_error + p * a.rel_error + (1.0 - p) * b.rel_error + 1e-12;
    (m, e)
}

/// `sup_{3/2 B} |h| ≤ 2^d (sup_B |h|)^{1/2} (sup_{4B} |h|)^{1/2}` for `4B` inside
/// the domain: `planar` random polynomials in the plane and `extended`
/// extensions of square modes with `4B` inside the cylinder.
pub fn check_three_ball_interior(seed: u64, planar: usize, extended: usize) -> Result<CheckReport> {
    let start = Instant::now();
    nonempty(planar + extended)?;
    let mut rng = rng(seed);
    let square = unit_square()?;
    let mut configs = Vec::new();
    for _ in 0..planar {
        let deg = rng.gen_range(1..=6);
        let poly = HarmonicPolynomial::random(&mut rng, deg, false);
        let c = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), 0.0];
        let r = rng.gen_range(0.02..0.15);
        configs.push((poly.to_string(), ScalarField::Harmonic(poly), Region::Plane, c, r));
    }
    for _ in 0..extended {
        let (m, n, f) = random_square_extension(&mut rng)?;
        let c = [rng.gen_range(0.3..0.7), rng.gen_range(0.3..0.7), rng.gen_range(-0.2..0.2)];
        let r = rng.gen_range(0.01..0.05);
        configs.push((format!("ext:rect:{m},{n}"), f, square.clone(), c, r));
    }
    let cases: Vec<Case> = configs
        .par_iter()
        .map(|(spec, f, region, c, r)| {
            let d = f.dim() as i32;
            let lhs = sup(f, *c, 1.5 * r, region)?;
            let a = sup(f, *c, *r, region)?;
            let b = sup(f, *c, 4.0 * r, region)?;
            let (m, e) = three_ball_margin(2f64.powi(d), 0.5, &lhs, &a, &b);
            Ok(Case::new(
                vec![spec.clone(), d.to_string(), fmt(c[0]), fmt(c[1]), fmt(c[2]), fmt(*r), fmt(lhs.value), fmt(a.value), fmt(b.value)],
                m,
                e,
            ))
        })
        .collect::<Result<_>>()?;
    let mut rep = CheckReport::from_cases(
        "three_ball_interior",
        &["spec", "d", "cx", "cy", "ct", "r", "sup_1_5", "sup_1", "sup_4"],
        cases,
        start,
    );
    rep.notes.push("margin is the log slack".into());
    Ok(rep)
}

/// The boundary three-ball inequality with constant `3^d` on a flat chart of
/// radius 1: `B₀ = B(x₀, ρ)` with `x₀` in the closed upper half of `(1/4)B`
/// and `16B₀ ⊂ B`. The fields are random polynomials vanishing on the axis;
/// the first case is `h = y` with `B₀ = B(0, 0.05)`.
pub fn check_three_ball_boundary(seed: u64, cases: usize) -> Result<CheckReport> {
    let start = Instant::now();
    nonempty(cases)?;
    let region = flat_half_plane()?;
    let mut rng = rng(seed);
    let mut configs = vec![(HarmonicPolynomial::im_power(1), Vec2::ZERO, 0.05)];
    while configs.len() < cases {
        let deg = rng.gen_range(1..=6);
        let poly = HarmonicPolynomial::random(&mut rng, deg, true);
        let x0 = in_upper_half_disk(&mut rng, 0.25);
        let rho = rng.gen_range(0.2..1.0) * (1.0 - x0.norm()) / 16.0;
        configs.push((poly, x0, rho));
    }
    let rows: Vec<Case> = configs
        .par_iter()
        .map(|(poly, x0, rho)| {
            let f = ScalarField::Harmonic(poly.clone());
            let c = [x0.x, x0.y, 0.0];
            let lhs = sup(&f, c, 1.5 * rho, &region)?;
            let a = sup(&f, c, *rho, &region)?;
            let b = sup(&f, c, 4.0 * rho, &region)?;
            let (m, e) = three_ball_margin(9.0, 1.0 / 3.0, &lhs, &a, &b);
            Ok(Case::new(
                vec![poly.to_string(), fmt(x0.x), fmt(x0.y), fmt(*rho), fmt(lhs.value), fmt(a.value), fmt(b.value)],
                m,
                e,
            ))
        })
        .collect::<Result<_>>()?;
    let mut rep = CheckReport::from_cases(
        "three_ball_boundary",
        &["spec", "x0", "y0", "rho", "sup_1_5", "sup_1", "sup_4"],
        rows,
        start,
    );
    rep.notes.push("margin is the log slack".into());
    Ok(rep)
}

/// The mean-value bound `h²(y) ≤ H(x, r) / |B(y, r/2)|` for `y ∈ B(x, r/2) ∩ Ω`
/// and `h = 0` on `∂Ω ∩ B(x, r)`: `planar` polynomials vanishing on the axis of
/// a half-plane and `extended` extensions of square modes on the cylinder.
pub fn check_subharmonic(seed: u64, planar: usize, extended: usize) -> Result<CheckReport> {
    let start = Instant::now();
    nonempty(planar + extended)?;
    let mut rng = rng(seed);
    let half = flat_half_plane()?;
    let square = unit_square()?;
    let mut configs = Vec::new();
    for _ in 0..planar {
        let deg = rng.gen_range(1..=6);
        let poly = HarmonicPolynomial::random(&mut rng, deg, true);
        let x = in_upper_half_disk(&mut rng, 0.25);
        let r = rng.gen_range(0.05..0.3);
        configs.push((poly.to_string(), ScalarField::Harmonic(poly), half.clone(), [x.x, x.y, 0.0], r));
    }
    for i in 0..extended {
        let (m, n, f) = random_square_extension(&mut rng)?;
        // every fourth center sits on an edge of the square
        let mut x = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(-0.2..0.2)];
        if i % 4 == 0 {
            x[1] = 0.0;
        }
        let r = rng.gen_range(0.05..0.2);
        configs.push((format!("ext:rect:{m},{n}"), f, square.clone(), x, r));
    }
    let rows: Vec<Case> = configs
        .par_iter()
        .map(|(spec, f, region, x, r)| {
            let d = f.dim();
            let h = mass(f, &ball_for(f, x, *r), region)?;
            let s = sup(f, *x, 0.5 * r, region)?;
            let rhs = h.value / ball_volume(d, 0.5 * r);
            let lhs = s.value * s.value;
            Ok(Case::new(
                vec![spec.clone(), d.to_string(), fmt(x[0]), fmt(x[1]), fmt(x[2]), fmt(*r), fmt(lhs), fmt(rhs)],
                (rhs / lhs).ln(),
                h.error + 2.0 * s.rel_error + 1e-12,
            ))
        })
        .collect::<Result<_>>()?;
    let mut rep = CheckReport::from_cases(
        "subharmonic",
        &["spec", "d", "cx", "cy", "ct", "r", "sup_h2", "mean_bound"],
        rows,
        start,
    );
    rep.notes.push("margin = ln(H(x,r)/|B(r/2)|) - ln(sup_{B(x,r/2)} h^2)".into());
    Ok(rep)
}

/// `ε̂ = N(x₀, r)/N(x₀, 2r) - 1` on a flat chart of radius 1 with `r < 1/16`.
///
/// At centers on the flat boundary the odd reflection makes `N` nondecreasing,
/// so those cases must give `ε̂ ≤ 1e-4`; every other case `ε̂ ≤ 0.5`. The first fields are `y`, `Im(z²)`, `y + Im(z²)` and `Im(z³)`,
/// followed by `random` polynomials vanishing on the axis.
pub fn check_almost_monotonicity(seed: u64, random: usize, r_grid: &[f64]) -> Result<CheckReport> {
    let start = Instant::now();
    nonempty(r_grid.len())?;
    if let Some(r) = r_grid.iter().find(|r| !(**r > 0.0 && **r < 1.0 / 16.0)) {
        return Err(Error::Precondition(format!("radius {r} is outside (0, R/16)")));
    }
    let region = flat_half_plane()?;
    let mut rng = rng(seed);
    let mut fields = vec![
        HarmonicPolynomial::im_power(1),
        HarmonicPolynomial::im_power(2),
        HarmonicPolynomial::parse("y + Im(z^2)")?,
        HarmonicPolynomial::im_power(3),
    ];
    for _ in 0..random {
        let deg = rng.gen_range(1..=5);
        fields.push(HarmonicPolynomial::random(&mut rng, deg, true));
    }
    let centers = [Vec2::ZERO, Vec2::new(0.1, 0.0), Vec2::new(-0.2, 0.0), Vec2::new(0.05, 0.05), Vec2::new(-0.1, 0.15)];
    let mut configs = Vec::new();
    for (i, poly) in fields.iter().enumerate() {
        for c in &centers {
            for &r in r_grid {
                configs.push((i, poly, c.y == 0.0, *c, r));
            }
        }
    }
    let rows: Vec<Case> = configs
        .par_iter()
        .map(|(i, poly, exact, c, r)| {
            let f = ScalarField::Harmonic((*poly).clone());
            let a = doubling_index(&f, &[c.x, c.y], *r, &region)?;
            let b = doubling_index(&f, &[c.x, c.y], 2.0 * r, &region)?;
            let eps = a.n / b.n - 1.0;
            let bound = if *exact { 1e-4 } else { 0.5 };
            let err = (a.error + b.error) * (1.0 + a.n.abs() / b.n.abs()) / b.n.abs();
            Ok(Case::new(
                vec![i.to_string(), poly.to_string(), fmt(c.x), fmt(c.y), fmt(*r), fmt(a.n), fmt(b.n), fmt(eps), fmt(bound)],
                bound - eps,
                err,
            ))
        })
        .collect::<Result<_>>()?;
    let eps_max = rows.iter().map(|c| c.cells[7].parse::<f64>().unwrap()).fold(f64::NEG_INFINITY, f64::max);
    let mut rep = CheckReport::from_cases(
        "almost_monotonicity",
        &["field", "spec", "cx", "cy", "r", "N_r", "N_2r", "eps_hat", "bound"],
        rows,
        start,
    );
    rep.fitted.insert("eps_hat_max".into(), eps_max);
    Ok(rep)
}

/// `N(x₁, r/2) ≤ 3(1 + ε)² N(x₂, r)` with `ε = 0.1` on a flat chart of radius
/// 1: `x₁, x₂` in the closed upper half of `(1/4)B`, `|x₁ - x₂| < r/4`, `r < 1/8`.
pub fn check_corollary_shift(seed: u64, cases: usize) -> Result<CheckReport> {
    let start = Instant::now();
    nonempty(cases)?;
    let region = flat_half_plane()?;
    let factor = 3.0 * 1.1f64.powi(2);
    let mut rng = rng(seed);
    let y = HarmonicPolynomial::im_power(1);
    let mut configs = vec![(y.clone(), Vec2::ZERO, Vec2::ZERO, 0.1), (y.clone(), Vec2::new(0.1 / 8.0, 1e-9), Vec2::ZERO, 0.1)];
    while configs.len() < cases {
        let deg = rng.gen_range(1..=6);
        let poly = HarmonicPolynomial::random(&mut rng, deg, true);
        let r = rng.gen_range(0.02..0.12);
        let x2 = in_upper_half_disk(&mut rng, 0.25 - r / 4.0);
        let mut x1 = in_disk(&mut rng, x2, r / 4.0 * 0.999);
        x1.y = x1.y.abs();
        configs.push((poly, x1, x2, r));
    }
    let rows: Vec<Case> = configs
        .par_iter()
        .map(|(poly, x1, x2, r)| {
            let f = ScalarField::Harmonic(poly.clone());
            let a = doubling_index(&f, &[x1.x, x1.y], 0.5 * r, &region)?;
            let b = doubling_index(&f, &[x2.x, x2.y], *r, &region)?;
            Ok(Case::new(
                vec![poly.to_string(), fmt(x1.x), fmt(x1.y), fmt(x2.x), fmt(x2.y), fmt(*r), fmt(a.n), fmt(b.n)],
                factor * b.n - a.n,
                a.error + factor * b.error + 1e-9,
            ))
        })
        .collect::<Result<_>>()?;
    let mut rep = CheckReport::from_cases(
        "corollary_shift",
        &["spec", "x1", "y1", "x2", "y2", "r", "N_x1_half_r", "N_x2_r"],
        rows,
        start,
    );
    rep.notes.push("margin = 3(1.1)^2 N(x2,r) - N(x1,r/2)".into());
    Ok(rep)
}

/// `ρ = length(Z(h) ∩ B(x, r)) / ((N(x, 4r) + 1)·r)` for a planar field in the
/// plane, measured at resolutions `r/100` and `r/200`; returns
/// `(ρ, N(x, 4r), |ρ₁ - ρ₂| + doubling error)`.
pub fn interior_nodal_ratio(field: &ScalarField, x: Vec2, r: f64) -> Result<(f64, f64, f64)> {
    let ball = crate::geometry::Ball::new2(x, r);
    let l1 = nodal_measure(field, &ball, &Region::Plane, r / 100.0)?;
    let l2 = nodal_measure(field, &ball, &Region::Plane, r / 200.0)?;
    let n = doubling_index(field, &[x.x, x.y], 4.0 * r, &Region::Plane)?;
    let denom = (n.n + 1.0) * r;
    let rho = l2 / denom;
    Ok((rho, n.n, (l1 - l2).abs() / denom + rho * n.error))
}

/// The interior nodal bound: `Re(z^k)`, `k = 1..=6`, about the origin must match
/// `2k/((2k+2)ln 2 + 1)` within 2% and the whole corpus must have `ρ ≤ 5`.
pub fn check_interior_nodal_bound(seed: u64, random: usize) -> Result<CheckReport> {
    let start = Instant::now();
    let mut rng = rng(seed);
    let mut configs: Vec<(HarmonicPolynomial, Vec2, f64, Option<f64>)> = (1..=6)
        .map(|k| {
            let kf = k as f64;
            (HarmonicPolynomial::re_power(k), Vec2::ZERO, 0.1, Some(2.0 * kf / ((2.0 * kf + 2.0) * LN_2 + 1.0)))
        })
        .collect();
    configs.push((HarmonicPolynomial::constant(1.0), Vec2::ZERO, 0.1, Some(0.0)));
    for _ in 0..random {
        let deg = rng.gen_range(1..=6);
        let poly = HarmonicPolynomial::random(&mut rng, deg, false);
        let c = Vec2::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        configs.push((poly, c, rng.gen_range(0.05..0.2), None));
    }
    let rows: Vec<Case> = configs
        .par_iter()
        .map(|(poly, c, r, exact)| {
            let f = ScalarField::Harmonic(poly.clone());
            let (rho, n, err) = interior_nodal_ratio(&f, *c, *r)?;
            let mut margin = 5.0 - rho;
            if let Some(e) = exact {
                margin = margin.min(0.02 * e - (rho - e).abs());
            }
            let exact_cell = exact.map(fmt).unwrap_or_default();
            Ok(Case::new(
                vec![poly.to_string(), fmt(c.x), fmt(c.y), fmt(*r), fmt(n), fmt(rho), exact_cell],
                margin,
                err,
            ))
        })
        .collect::<Result<_>>()?;
    let c_max = rows.iter().map(|c| c.cells[5].parse::<f64>().unwrap()).fold(0.0, f64::max);
    let mut rep = CheckReport::from_cases(
        "interior_nodal",
        &["spec", "cx", "cy", "r", "N_4r", "rho", "rho_exact"],
        rows,
        start,
    );
    rep.fitted.insert("C".into(), c_max);
    Ok(rep)
}

/// Fit of `log M` against `log ε` for the Cauchy families.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CauchyFit {
    pub gamma: f64,
    pub r_squared: f64,
    pub slope_y: f64,
    pub slope_re: f64,
    pub members: usize,
}

/// Samples `|g|` on the arc of radius `rho` of the upper half-disk and on its
/// flat side; by the maximum principle this is `sup |g|` over the half-disk.
fn half_disk_sup(g: impl Fn(Vec2) -> f64, rho: f64) -> f64 {
    const M: usize = 20_000;
    let mut best: f64 = 0.0;
    for i in 0..=M {
        let t = i as f64 / M as f64;
        best = best.max(g(Vec2::from_angle(PI * t) * rho).abs());
        best = best.max(g(Vec2::new(rho * (2.0 * t - 1.0), 0.0)).abs());
    }
    best
}

/// Quantitative Cauchy uniqueness on the half-disk `B₊`.
///
/// Main family: `g_n = sin(nx)·sinh(ny)/K_n`, where `K_n` is the sup of
/// `max(|g|, |∇g|)` over `B₊`. It vanishes on `Γ` and `ε_n = sup_Γ |∂_y g_n|`
/// decays like `e^{-n}`. Members with `ε ∈ [1e-6, 1e-1]` are fitted. The
/// scaling families `ε·y` and `ε·Re(z)` must give slope `1 ± 0.02`.
pub fn check_cauchy() -> Result<(CheckReport, CauchyFit)> {
    let start = Instant::now();
    let mut rows = Vec::new();
    let (mut le, mut lm) = (Vec::new(), Vec::new());
    let members: Vec<(u32, f64, f64, f64)> = (1..=24u32)
        .into_par_iter()
        .map(|n| {
            let nf = n as f64;
            let g = |p: Vec2| (nf * p.x).sin() * (nf * p.y).sinh();
            // |∇g|² = n²(sinh²(ny) + sin²(nx))
            let grad = |p: Vec2| nf * ((nf * p.y).sinh().powi(2) + (nf * p.x).sin().powi(2)).sqrt();
            let k = half_disk_sup(|p| g(p).abs().max(grad(p)), 1.0);
            let eps = half_disk_sup(|p| if p.y == 0.0 { nf * (nf * p.x).sin() } else { 0.0 }, 1.0) / k;
            let m = half_disk_sup(g, 1.0 / 3.0) / k;
            // normalization slack: the sup of max(|h|, |∇h|) must be 1
            let norm = half_disk_sup(|p| (g(p).abs().max(grad(p))) / k, 1.0);
            (n, eps, m, 1.0 - norm)
        })
        .collect();
    for (n, eps, m, slack) in members {
        if !(1e-6..=1e-1).contains(&eps) {
            continue;
        }
        le.push(eps.ln());
        lm.push(m.ln());
        rows.push(Case::new(vec!["hadamard".into(), n.to_string(), fmt(eps), fmt(m)], slack, 1e-12));
    }
    if le.len() < 3 {
        return Err(Error::Precondition("fewer than three family members in [1e-6, 1e-1]".into()));
    }
    let (gamma, _, r2) = linear_fit(&le, &lm);
    let mut slope = |name: &str, g: fn(Vec2) -> f64| {
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for i in 0..=10 {
            let eps = 10f64.powf(-6.0 + 0.5 * i as f64);
            let m = half_disk_sup(|p| eps * g(p), 1.0 / 3.0);
            xs.push(eps.ln());
            ys.push(m.ln());
            rows.push(Case::info(vec![name.into(), i.to_string(), fmt(eps), fmt(m)]));
        }
        linear_fit(&xs, &ys).0
    };
    let slope_y = slope("scale_y", |p| p.y);
    let slope_re = slope("scale_re", |p| p.x);
    rows.push(Case::new(vec!["fit_gamma".into(), String::new(), fmt(gamma), fmt(r2)], (gamma - 0.05).min(r2 - 0.9), 1e-9));
    for (name, s) in [("fit_scale_y", slope_y), ("fit_scale_re", slope_re)] {
        rows.push(Case::new(vec![name.into(), String::new(), fmt(s), String::new()], 0.02 - (s - 1.0).abs(), 1e-9));
    }
    let fit = CauchyFit { gamma, r_squared: r2, slope_y, slope_re, members: le.len() };
    let mut rep = CheckReport::from_cases("cauchy", &["family", "member", "eps", "M"], rows, start);
    rep.fitted.insert("gamma".into(), gamma);
    rep.fitted.insert("r_squared".into(), r2);
    rep.fitted.insert("slope_y".into(), slope_y);
    rep.fitted.insert("slope_re".into(), slope_re);
    Ok((rep, fit))
}
