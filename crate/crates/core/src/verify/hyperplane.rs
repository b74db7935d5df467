//! The boundary-cube dichotomy: some cube `q` of the standard construction either
//! halves `N**` or misses the zero set.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{fmt, Case, CheckReport};
use crate::doubling::max_doubling;
use crate::error::{Error, Result};
use crate::fields::{HarmonicPolynomial, Region, ScalarField};
use crate::geometry::{standard_construction, Aabb, Cube, LipschitzPatch, Vec2};
use crate::nodal::extract_nodal_in;
use crate::sampling::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dichotomy {
    Halved,
    ZeroFree,
    Neither,
}

impl Dichotomy {
    pub fn as_str(self) -> &'static str {
        match self {
            Dichotomy::Halved => "halved",
            Dichotomy::ZeroFree => "zero_free",
            Dichotomy::Neither => "neither",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubcubeResult {
    pub center: Vec2,
    pub side: f64,
    pub n_star: f64,
    /// `max(N*, N₀/2)`.
    pub n2: f64,
    pub zero_free: bool,
    pub halved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperplaneReport {
    pub dichotomy: Dichotomy,
    pub n_star_q: f64,
    pub n2_q: f64,
    pub n0: f64,
    pub subcubes: Vec<SubcubeResult>,
}

/// Whether `Z(h)` meets the closed cube: the nodal set is extracted on the
/// bounding box of `q` at resolution `side/32` and tested segment by segment.
fn zero_free(field: &ScalarField, region: &Region, q: &Cube) -> Result<bool> {
    let bb = Aabb::from_points(q.corners());
    let ns = extract_nodal_in(field, region, bb, q.side / 32.0)?;
    let hits = ns.segments.iter().any(|s| {
        (0..=4).any(|k| q.contains(s[0].lerp(s[1], k as f64 / 4.0)))
    });
    Ok(!hits)
}

/// Runs the dichotomy for the boundary cubes of the standard construction of
/// `(Q, k)`. `N**(·) = max(N*(·), n0/2)`; outcome (i) is `N**(q) < N**(Q)/2`,
/// outcome (ii) is `Z(h) ∩ q = ∅`.
pub fn run_hyperplane_experiment(
    patch: &LipschitzPatch,
    field: &ScalarField,
    cube: Cube,
    k: u32,
    n0: f64,
) -> Result<HyperplaneReport> {
    let sc = standard_construction(patch, cube, k)?;
    let region = Region::Patch(patch.clone());
    let nq = max_doubling(field, &cube, &region)?.value;
    let n2q = nq.max(0.5 * n0);
    let subcubes: Vec<SubcubeResult> = sc
        .boundary_cubes
        .par_iter()
        .map(|q| {
            let n = max_doubling(field, q, &region)?.value;
            let n2 = n.max(0.5 * n0);
            Ok(SubcubeResult {
                center: q.center,
                side: q.side,
                n_star: n,
                n2,
                zero_free: zero_free(field, &region, q)?,
                halved: n2 < 0.5 * n2q,
            })
        })
        .collect::<Result<_>>()?;
    let dichotomy = if subcubes.iter().any(|s| s.halved) {
        Dichotomy::Halved
    } else if subcubes.iter().any(|s| s.zero_free) {
        Dichotomy::ZeroFree
    } else {
        Dichotomy::Neither
    };
    Ok(HyperplaneReport { dichotomy, n_star_q: nq, n2_q: n2q, n0, subcubes })
}

/// The dichotomy on a flat chart of radius 1 (`τ = 0.03`), `k = 3`, cubes
/// inside `(1/32)B`. Fields: `y`, `Im(z)`, `Im(z^j)` for `j = 2..=5` and
/// `random` polynomials vanishing on the axis with origins shifted along it.
/// Each case is a data row; the single checked row requires outcome (i) or (ii)
/// in at least 95% of the cases.
pub fn check_hyperplane(seed: u64, random: usize, n0: f64) -> Result<CheckReport> {
    let start = Instant::now();
    let patch = LipschitzPatch::flat(1.0, 0.03)?;
    let mut rng = rng(seed);
    let mut configs: Vec<(String, HarmonicPolynomial, Cube)> = vec![
        ("y".into(), HarmonicPolynomial::parse("y")?, Cube::new(Vec2::ZERO, 0.04, 0.0)),
        ("Im(z)".into(), HarmonicPolynomial::im_power(1), Cube::new(Vec2::new(0.01, 0.0), 0.02, 0.0)),
    ];
    for j in 2..=5 {
        configs.push((format!("Im(z^{j})"), HarmonicPolynomial::im_power(j), Cube::new(Vec2::ZERO, 0.04, 0.0)));
    }
    for _ in 0..random {
        let deg = rng.gen_range(2..=5);
        let side = rng.gen_range(0.01..0.04);
        // corners stay inside (1/32)B
        let room: f64 = 1.0 / 32.0 - side / 2f64.sqrt();
        let a = rng.gen_range(-room..room) * 0.99;
        let shift = a + rng.gen_range(-0.5..0.5) * side;
        // the shifted polynomial is re-expanded so the row's spec is the field itself
        let poly = HarmonicPolynomial::random(&mut rng, deg, true).with_origin(Vec2::new(shift, 0.0)).recentered(Vec2::ZERO);
        let spec = poly.to_string();
        configs.push((spec, poly, Cube::new(Vec2::new(a, 0.0), side, 0.0)));
    }
    let results: Vec<(String, Cube, HyperplaneReport)> = configs
        .into_iter()
        .map(|(spec, poly, cube)| {
            let f = ScalarField::Harmonic(poly);
            run_hyperplane_experiment(&patch, &f, cube, 3, n0).map(|r| (spec, cube, r))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut ok = 0;
    for (spec, cube, r) in &results {
        if r.dichotomy != Dichotomy::Neither {
            ok += 1;
        }
        let halved = r.subcubes.iter().filter(|s| s.halved).count();
        let free = r.subcubes.iter().filter(|s| s.zero_free).count();
        let max_q = r.subcubes.iter().map(|s| s.n_star).fold(f64::NEG_INFINITY, f64::max);
        rows.push(Case::info(vec![
            spec.clone(),
            fmt(cube.center.x),
            fmt(cube.side),
            fmt(r.n_star_q),
            fmt(max_q),
            halved.to_string(),
            free.to_string(),
            r.dichotomy.as_str().into(),
        ]));
    }
    if results.is_empty() {
        return Err(Error::Precondition("empty corpus".into()));
    }
    let frac = ok as f64 / results.len() as f64;
    rows.push(Case::new(
        vec!["fraction_with_outcome".into(), String::new(), String::new(), String::new(), String::new(), String::new(), String::new(), fmt(frac)],
        frac - 0.95,
        0.0,
    ));
    let mut rep = CheckReport::from_cases(
        "hyperplane",
        &["spec", "cube_x", "cube_side", "N_star_Q", "max_N_star_q", "halved_count", "zero_free_count", "dichotomy"],
        rows,
        start,
    );
    let neither = results.len() - ok;
    if neither > 0 {
        rep.notes.push(format!("{neither} case(s) with neither outcome"));
    }
    rep.fitted.insert("fraction_with_outcome".into(), frac);
    rep.fitted.insert("n0".into(), n0);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_field_is_zero_free_everywhere() {
        let patch = LipschitzPatch::flat(1.0, 0.03).unwrap();
        let f = ScalarField::Harmonic(HarmonicPolynomial::im_power(1));
        let rep = run_hyperplane_experiment(&patch, &f, Cube::new(Vec2::ZERO, 0.04, 0.0), 3, 10.0).unwrap();
        assert_eq!(rep.dichotomy, Dichotomy::ZeroFree);
        assert_eq!(rep.subcubes.len(), 8);
        assert!(rep.subcubes.iter().all(|s| s.zero_free && !s.halved));
        // N* of y is ln 16 at every scale; N** is N₀/2
        assert!((rep.n_star_q - 16f64.ln()).abs() < 1e-3, "{}", rep.n_star_q);
        assert_eq!(rep.n2_q, 5.0);
    }

    #[test]
    fn cubic_field_rays_hit_the_middle_cubes() {
        let patch = LipschitzPatch::flat(1.0, 0.03).unwrap();
        let f = ScalarField::Harmonic(HarmonicPolynomial::im_power(3));
        let rep = run_hyperplane_experiment(&patch, &f, Cube::new(Vec2::ZERO, 0.04, 0.0), 3, 10.0).unwrap();
        assert_eq!(rep.dichotomy, Dichotomy::ZeroFree);
        // rays at π/3 and 2π/3 cross x = ±y/√3, |x| ≤ 0.0025/√3 inside the boundary cubes
        let hit: Vec<bool> = rep.subcubes.iter().map(|s| !s.zero_free).collect();
        assert_eq!(hit, [false, false, false, true, true, false, false, false]);
    }

    #[test]
    fn invalid_construction_is_an_error() {
        let patch = LipschitzPatch::flat(1.0, 0.03).unwrap();
        let f = ScalarField::Harmonic(HarmonicPolynomial::im_power(1));
        assert!(run_hyperplane_experiment(&patch, &f, Cube::new(Vec2::ZERO, 0.04, 0.0), 2, 10.0).is_err());
    }
}
