use std::path::Path;
use std::process::{Command, Output};

fn lipnodal(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lipnodal")).current_dir(dir).args(args).output().expect("binary runs")
}

fn square(dir: &Path) {
    std::fs::write(dir.join("square.json"), r#"{"loops": [[[0,0],[1,0],[1,1],[0,1]]]}"#).unwrap();
}

fn csv_rows(p: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(p).unwrap().records().map(Result::unwrap).collect()
}

#[test]
fn yau_on_square_file() {
    let t = tempfile::tempdir().unwrap();
    square(t.path());
    let o = lipnodal(t.path(), &["verify", "yau", "--domain", "square.json", "--count", "36", "--out", "out"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(csv_rows(&t.path().join("out/yau.csv")).len(), 36);
    assert!(t.path().join("out/yau.svg").exists());
    let s: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(t.path().join("out/yau.summary.json")).unwrap()).unwrap();
    assert_eq!(s["check_id"], "yau");
    assert_eq!(s["violations"], 0);
}

#[test]
fn doubling_of_re_z2_is_six_ln2() {
    let t = tempfile::tempdir().unwrap();
    let args = ["doubling", "--field", "harmonic:Re(z^2)", "--center", "0,0", "--rmin", "0.1", "--rmax", "0.4", "--steps", "8"];
    let o = lipnodal(t.path(), &args);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&t.path().join("doubling.csv"));
    assert_eq!(rows.len(), 8);
    for r in rows {
        let n: f64 = r[5].parse().unwrap();
        assert!((n - 6.0 * 2f64.ln()).abs() < 1e-6, "{n}");
    }
}

#[test]
fn missing_mesh_is_a_usage_error() {
    let t = tempfile::tempdir().unwrap();
    let o = lipnodal(t.path(), &["solve", "--mesh", "nope.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope.json"));
}

#[test]
fn unknown_flag_prints_usage() {
    let t = tempfile::tempdir().unwrap();
    let o = lipnodal(t.path(), &["mesh", "--domain", "square.json", "--h", "0.1", "--colour"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert!(o.stdout.is_empty());
}

#[test]
fn bad_field_spec_is_rejected() {
    let t = tempfile::tempdir().unwrap();
    let args = ["doubling", "--field", "cone:1", "--center", "0,0", "--rmin", "0.1", "--rmax", "0.2"];
    assert_eq!(lipnodal(t.path(), &args).status.code(), Some(2));
}

#[test]
fn mesh_solve_nodal_pipeline() {
    let t = tempfile::tempdir().unwrap();
    square(t.path());
    assert!(lipnodal(t.path(), &["mesh", "--domain", "square.json", "--h", "0.05"]).status.success());
    assert!(lipnodal(t.path(), &["solve", "--mesh", "mesh.json", "--count", "3", "--out", "sol"]).status.success());
    let sol: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(t.path().join("sol/solution.json")).unwrap()).unwrap();
    let l0 = sol["pairs"][0]["lambda"].as_f64().unwrap();
    assert!((l0 / (2.0 * std::f64::consts::PI.powi(2)) - 1.0).abs() < 0.02, "{l0}");
    let o = lipnodal(t.path(), &["nodal", "--solution", "sol/solution.json", "--index", "0", "--resolution", "0.01"]);
    assert!(o.status.success());
    let ns: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(t.path().join("nodal.json")).unwrap()).unwrap();
    // the ground state has no interior zeros
    assert_eq!(ns["total_length"].as_f64(), Some(0.0));
    assert!(t.path().join("nodal.svg").exists());
    let doubling = ["doubling", "--field", "fem:sol/solution.json#0", "--center", "0.5,0.5", "--rmin", "0.05", "--rmax", "0.1", "--steps", "2"];
    assert!(lipnodal(t.path(), &doubling).status.success());
}

#[test]
fn construct_and_chain() {
    let t = tempfile::tempdir().unwrap();
    let samples = vec![0.0; 33];
    let patch = serde_json::json!({"center": [0, 0], "radius": 1, "angle": 0, "tau": 0.03, "samples": samples});
    std::fs::write(t.path().join("patch.json"), patch.to_string()).unwrap();
    let o = lipnodal(t.path(), &["construct", "--patch", "patch.json", "--cube", "0,0,0.04", "--k", "3"]);
    assert!(o.status.success());
    let c: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(t.path().join("construction.json")).unwrap()).unwrap();
    assert_eq!(c["boundary_cubes"].as_array().unwrap().len(), 8);
    assert_eq!(lipnodal(t.path(), &["construct", "--patch", "patch.json", "--cube", "0,0,0.04", "--k", "2"]).status.code(), Some(2));

    square(t.path());
    let o = lipnodal(t.path(), &["chain", "--domain", "square.json", "--start", "0.05,0.05", "--r", "0.1", "--h", "0.1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let ch: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(t.path().join("chain.json")).unwrap()).unwrap();
    assert!(ch["steps"].as_u64().unwrap() <= ch["net"].as_array().unwrap().len() as u64 + 2);
}

#[test]
fn verify_is_deterministic() {
    let t = tempfile::tempdir().unwrap();
    for dir in ["a", "b"] {
        let o = lipnodal(t.path(), &["verify", "monotonicity", "--cases", "5", "--seed", "7", "--out", dir]);
        assert_eq!(o.status.code(), Some(0));
    }
    let a = std::fs::read(t.path().join("a/interior_monotonicity.csv")).unwrap();
    let b = std::fs::read(t.path().join("b/interior_monotonicity.csv")).unwrap();
    assert_eq!(a, b);
    let o = lipnodal(t.path(), &["verify", "monotonicity", "--cases", "5", "--seed", "8", "--out", "c"]);
    assert!(o.status.success());
    assert_ne!(a, std::fs::read(t.path().join("c/interior_monotonicity.csv")).unwrap());
}

#[test]
fn sweep_writes_data_files() {
    let t = tempfile::tempdir().unwrap();
    square(t.path());
    let o = lipnodal(t.path(), &["sweep", "--domain", "square.json", "--count", "6"]);
    assert!(o.status.success());
    assert_eq!(csv_rows(&t.path().join("sweep.csv")).len(), 6);
    assert!(t.path().join("sweep.svg").exists());
}
