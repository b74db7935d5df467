//! Browser bindings. Each export takes plain numbers and strings and returns
//! a JSON string, so the page needs no generated glue beyond wasm-bindgen's.

use std::path::Path;

use lipnodal::doubling::doubling_profile;
use lipnodal::fields::{parse_field_spec, Region, ScalarField};
use lipnodal::geometry::{standard_construction, Cube, LipschitzPatch, PolygonDomain, Vec2};
use lipnodal::nodal::extract_nodal;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn analytic(spec: &str) -> Result<ScalarField, String> {
    if spec.starts_with("fem:") {
        return Err("the demo has no file system; use rect:, disk: or harmonic:".into());
    }
    parse_field_spec(spec, Path::new(".")).map_err(|e| e.to_string())
}

/// Nodal segments of an analytic field on its own domain, clipped to a window
/// of half-width `extent` around the origin for harmonic polynomials.
pub fn nodal_lines(spec: &str, resolution: f64, extent: f64) -> Result<String, String> {
    let field = analytic(spec)?;
    let region = match &field {
        ScalarField::Harmonic(_) => {
            let e = extent;
            let window = vec![Vec2::new(-e, -e), Vec2::new(e, -e), Vec2::new(e, e), Vec2::new(-e, e)];
            Region::polygon(PolygonDomain::new(window, vec![]).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?
        }
        f => Region::natural_for(f).map_err(|e| e.to_string())?,
    };
    let ns = extract_nodal(&field, &region, resolution).map_err(|e| e.to_string())?;
    let segs: Vec<[[f64; 2]; 2]> = ns.segments.iter().map(|s| [[s[0].x, s[0].y], [s[1].x, s[1].y]]).collect();
    let bounds = region.bounds().map(|b| [b.min.x, b.min.y, b.max.x, b.max.y]);
    Ok(json!({
        "segments": segs,
        "length": ns.total_length,
        "lambda": field.eigenvalue(),
        "bounds": bounds,
        "disk": matches!(field, ScalarField::Disk { .. }),
    })
    .to_string())
}

/// `N(x, r)` at `steps` geometrically spaced radii.
pub fn doubling(spec: &str, cx: f64, cy: f64, rmin: f64, rmax: f64, steps: usize) -> Result<String, String> {
    let field = analytic(spec)?;
    let region = Region::natural_for(&field).map_err(|e| e.to_string())?;
    let rep = doubling_profile(&field, &[cx, cy, 0.0], rmin, rmax, steps, &region).map_err(|e| e.to_string())?;
    Ok(json!({ "r": rep.radii, "n": rep.n_values, "err": rep.quad_error }).to_string())
}

/// Boundary and inner cubes for the graph `f(y) = slope·|y|` (a corner when
/// `slope ≠ 0`) and the cube of side `side` centred at the origin.
pub fn construction(slope: f64, side: f64, k: u32) -> Result<String, String> {
    let patch = LipschitzPatch::wedge(1.0, slope).map_err(|e| e.to_string())?;
    let sc = standard_construction(&patch, Cube::new(Vec2::ZERO, side, 0.0), k).map_err(|e| e.to_string())?;
    let square = |c: &Cube| json!([c.center.x, c.center.y, c.side]);
    let graph: Vec<[f64; 2]> = (0..=64)
        .map(|i| {
            let y = -side + 2.0 * side * i as f64 / 64.0;
            [y, patch.graph(y)]
        })
        .collect();
    Ok(json!({
        "boundary": sc.boundary_cubes.iter().map(square).collect::<Vec<_>>(),
        "inner": sc.all_inner().map(square).collect::<Vec<_>>(),
        "graph": graph,
    })
    .to_string())
}

#[wasm_bindgen(js_name = nodalLines)]
pub fn nodal_lines_js(spec: &str, resolution: f64, extent: f64) -> Result<String, JsValue> {
    nodal_lines(spec, resolution, extent).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = doublingProfile)]
pub fn doubling_js(spec: &str, cx: f64, cy: f64, rmin: f64, rmax: f64, steps: usize) -> Result<String, JsValue> {
    doubling(spec, cx, cy, rmin, rmax, steps).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = standardConstruction)]
pub fn construction_js(slope: f64, side: f64, k: u32) -> Result<String, JsValue> {
    construction(slope, side, k).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> serde_json::Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn rectangle_mode_lines() {
        let v = parse(&nodal_lines("rect:2,3", 0.01, 1.0).unwrap());
        // m + n - 2 unit segments
        assert!((v["length"].as_f64().unwrap() - 3.0).abs() < 0.03);
        assert_eq!(v["bounds"], json!([0.0, 0.0, 1.0, 1.0]));
    }

    #[test]
    fn harmonic_lines_in_a_window() {
        let v = parse(&nodal_lines("harmonic:Re(z^2)", 0.01, 1.0).unwrap());
        // two diagonals of the square [-1, 1]²
        assert!((v["length"].as_f64().unwrap() - 4.0 * 2f64.sqrt()).abs() < 0.05);
    }

    #[test]
    fn profile_of_re_z3() {
        let v = parse(&doubling("harmonic:Re(z^3)", 0.0, 0.0, 0.1, 0.4, 4).unwrap());
        for n in v["n"].as_array().unwrap() {
            assert!((n.as_f64().unwrap() - 8.0 * 2f64.ln()).abs() < 1e-6);
        }
    }

    #[test]
    fn construction_counts() {
        let v = parse(&construction(0.03, 0.04, 3).unwrap());
        assert_eq!(v["boundary"].as_array().unwrap().len(), 8);
        assert!(construction(0.3, 0.04, 3).is_err());
    }

    #[test]
    fn files_are_refused() {
        assert!(nodal_lines("fem:x.json#0", 0.01, 1.0).is_err());
    }
}
