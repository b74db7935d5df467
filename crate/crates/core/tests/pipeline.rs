//! Mesh → eigenpairs → nodal set and doubling index, compared with the
//! analytic square modes.

use std::f64::consts::PI;

use lipnodal::doubling::doubling_index;
use lipnodal::fields::{make_extension, Region};
use lipnodal::geometry::PolygonDomain;
use lipnodal::nodal::extract_nodal;
use lipnodal::spectral::{analytic_rectangle, Spectrum};

#[test]
fn fem_square_matches_closed_forms() {
    let square = PolygonDomain::unit_square();
    let sp = Spectrum::for_domain(&square, 0.03, 4).unwrap();
    let want = [2.0, 5.0, 5.0, 8.0].map(|k| k * PI * PI);
    for (p, w) in sp.pairs.iter().zip(want) {
        assert!((p.lambda - w).abs() < 0.01 * w, "{} vs {w}", p.lambda);
    }

    // the region recovered from the mesh is the square itself
    let ground = sp.field(0);
    let region = Region::natural_for(&ground).unwrap();
    assert!(extract_nodal(&ground, &region, 0.01).unwrap().total_length == 0.0);

    // u_{2,2} is simple: one vertical and one horizontal line
    let u22 = sp.field(3);
    let len = extract_nodal(&u22, &region, 0.005).unwrap().total_length;
    assert!((len - 2.0).abs() < 0.04, "{len}");

    // doubling of the ground state against the closed-form mode
    let (exact, _) = analytic_rectangle(1, 1, 1.0, 1.0).unwrap();
    let a = doubling_index(&ground, &[0.5, 0.5], 0.1, &region).unwrap().n;
    let b = doubling_index(&exact, &[0.5, 0.5], 0.1, &region).unwrap().n;
    assert!((a - b).abs() < 0.01, "{a} vs {b}");

    // and of the harmonic extension, whose t-integral is closed-form
    let lambda = sp.pairs[0].lambda;
    let ea = make_extension(ground, lambda).unwrap();
    let eb = make_extension(exact, 2.0 * PI * PI).unwrap();
    let na = doubling_index(&ea, &[0.0, 0.5, 0.0], 0.05, &region).unwrap().n;
    let nb = doubling_index(&eb, &[0.0, 0.5, 0.0], 0.05, &region).unwrap().n;
    assert!((na - nb).abs() < 0.02, "{na} vs {nb}");
}
