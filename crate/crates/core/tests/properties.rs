use std::f64::consts::PI;

use lipnodal::doubling::{chain_of_balls, doubling_index};
use lipnodal::fields::{HarmonicPolynomial, Region, ScalarField};
use lipnodal::geometry::{clip_cell, standard_construction, Cube, LipschitzPatch, PolygonDomain, Vec2};
use lipnodal::meshing::triangulate;
use proptest::prelude::*;

fn poly(coeffs: &[(f64, f64)]) -> HarmonicPolynomial {
    let mut p = HarmonicPolynomial::zero();
    for (k, (a, b)) in coeffs.iter().enumerate() {
        p.set_re(k, *a);
        if k > 0 {
            p.set_im(k, *b);
        }
    }
    p
}

fn coeffs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2..7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn clipped_areas_add_up_to_the_disk(cx in -0.3..0.3f64, cy in -0.3..0.3f64, r in 0.05..0.6f64, n in 2usize..6) {
        // n×n grid of the square [-1, 1]², two triangles per cell
        let c = Vec2::new(cx, cy);
        let h = 2.0 / n as f64;
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let p = Vec2::new(-1.0 + i as f64 * h, -1.0 + j as f64 * h);
                let q = [p, p + Vec2::new(h, 0.0), p + Vec2::new(h, h), p + Vec2::new(0.0, h)];
                for t in [[q[0], q[1], q[2]], [q[0], q[2], q[3]]] {
                    let a = clip_cell(t, c, r).area;
                    prop_assert!(a >= -1e-15 && a <= 0.5 * h * h + 1e-15);
                    total += a;
                }
            }
        }
        prop_assert!((total - PI * r * r).abs() <= 1e-10 * PI * r * r, "{} vs {}", total, PI * r * r);
    }

    #[test]
    fn doubling_index_of_homogeneous_fields_is_scale_free(k in 1usize..7, r in 0.01..2.0f64) {
        let f = ScalarField::Harmonic(HarmonicPolynomial::re_power(k));
        let n = doubling_index(&f, &[0.0, 0.0], r, &Region::Plane).unwrap().n;
        prop_assert!((n - (2 * k + 2) as f64 * 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn doubling_index_ignores_amplitude(c in coeffs(), s in 0.001..1000.0f64, x in -0.5..0.5f64, y in -0.5..0.5f64) {
        let p = poly(&c);
        prop_assume!(!p.is_zero());
        let a = doubling_index(&ScalarField::Harmonic(p.clone()), &[x, y], 0.2, &Region::Plane).unwrap().n;
        let b = doubling_index(&ScalarField::Harmonic(p.scaled(s)), &[x, y], 0.2, &Region::Plane).unwrap().n;
        prop_assert!((a - b).abs() < 1e-9 * a.abs().max(1.0));
    }

    #[test]
    fn doubling_index_grows_with_radius(c in coeffs(), x in -0.5..0.5f64, y in -0.5..0.5f64, r in 0.01..0.3f64, t in 1.0..4.0f64) {
        let f = ScalarField::Harmonic(poly(&c));
        prop_assume!(!poly(&c).is_zero());
        let a = doubling_index(&f, &[x, y], r, &Region::Plane).unwrap();
        let b = doubling_index(&f, &[x, y], t * r, &Region::Plane).unwrap();
        prop_assert!(a.n <= b.n + 1e-9 + a.error + b.error, "{} > {}", a.n, b.n);
    }

    #[test]
    fn harmonic_polynomials_print_and_parse_back(c in coeffs()) {
        let p = poly(&c);
        let q = HarmonicPolynomial::parse(&p.to_string()).unwrap();
        for z in [Vec2::new(0.3, -0.2), Vec2::new(-0.7, 0.4)] {
            prop_assert!((p.eval(z) - q.eval(z)).abs() < 1e-12);
        }
    }

    #[test]
    fn recentering_keeps_the_function(c in coeffs(), ox in -1.0..1.0f64, oy in -1.0..1.0f64) {
        let p = poly(&c).with_origin(Vec2::new(ox, oy));
        let q = p.recentered(Vec2::new(oy, ox));
        for z in [Vec2::new(0.3, -0.2), Vec2::new(-0.7, 0.4)] {
            prop_assert!((p.eval(z) - q.eval(z)).abs() < 1e-10);
        }
    }

    #[test]
    fn boundary_cubes_tile_the_upper_part(slope in -0.04..0.04f64, k in 3u32..6, u in 0.0..1.0f64, v in 0.0..1.0f64) {
        let patch = LipschitzPatch::line(1.0, slope).unwrap();
        let side = 0.1;
        let sc = standard_construction(&patch, Cube::new(Vec2::ZERO, side, 0.0), k).unwrap();
        prop_assert_eq!(sc.boundary_cubes.len(), 1 << k);
        let x = -0.5 * side + u * side;
        let top = 0.5 * side;
        let y = patch.graph(x) + v * (top - patch.graph(x));
        prop_assert!(sc.covers(Vec2::new(x, y)), "({}, {}) uncovered", x, y);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn rectangles_mesh_to_their_area(a in 0.3..2.0f64, b in 0.3..2.0f64, h in 0.05..0.2f64) {
        let d = PolygonDomain::rectangle(a, b).unwrap();
        let m = triangulate(&d, h).unwrap();
        m.validate().unwrap();
        prop_assert!((m.area() - a * b).abs() < 1e-12 * a * b);
        prop_assert!(m.h_max <= 1.5 * h);
    }

    #[test]
    fn chains_keep_their_invariants(sx in 0.05..0.95f64, sy in 0.05..0.95f64, tx in 0.05..0.95f64, ty in 0.05..0.95f64, r in 0.15..0.4f64) {
        let d = PolygonDomain::l_shape();
        let s = Vec2::new(sx, sy);
        let t = Vec2::new(tx, ty);
        prop_assume!(d.is_inside(s) && d.is_inside(t));
        let ch = chain_of_balls(&d, s, t, r).unwrap();
        ch.validate().unwrap();
        prop_assert!(ch.centers().first().unwrap().dist(s) < 1e-12);
    }

    #[test]
    fn domain_files_round_trip(n in 3usize..12, radius in 0.1..5.0f64) {
        let d = PolygonDomain::regular_polygon(n, radius).unwrap();
        let back = PolygonDomain::from_json(&d.to_json().unwrap()).unwrap();
        prop_assert_eq!(back.loops(), d.loops());
        prop_assert_eq!(back.r0(), d.r0());
    }
}
