//! Inequalities run as falsification experiments.
//!
//! Each check evaluates both sides of an inequality on a corpus of cases and
//! records the signed slack (`margin`, positive when the inequality holds)
//! together with a numerical error bar. A case is a violation only when
//! `margin < -error`.

mod eigen;
mod harmonic;
mod hyperplane;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

pub use eigen::{
    boundary_nodal_ratio, check_boundary_nodal_bound, check_df_doubling_bound, fem_corpus, scatter_svg,
    square_corpus, square_grid_corpus, yau_sweep, EigenMode,
};
pub use harmonic::{
    check_almost_monotonicity, check_cauchy, check_corollary_shift, check_interior_monotonicity,
    check_interior_nodal_bound, check_subharmonic, check_three_ball_boundary, check_three_ball_interior,
    interior_nodal_ratio, CauchyFit,
};
pub use hyperplane::{check_hyperplane, run_hyperplane_experiment, Dichotomy, HyperplaneReport, SubcubeResult};

use crate::error::Result;

pub(crate) use crate::doubling::fmt;

/// Default seed of the random corpora.
pub const DEFAULT_SEED: u64 = 0;

/// One evaluated row: CSV cells plus its slack and error bar. Rows without a
/// margin carry data only and are not counted as cases.
#[derive(Debug, Clone)]
pub(crate) struct Case {
    pub cells: Vec<String>,
    pub margin: Option<f64>,
    pub error: f64,
}

impl Case {
    pub fn new(cells: Vec<String>, margin: f64, error: f64) -> Self {
        Self { cells, margin: Some(margin), error }
    }

    pub fn info(cells: Vec<String>) -> Self {
        Self { cells, margin: None, error: 0.0 }
    }

    pub fn violated(&self) -> bool {
        self.margin.is_some_and(|m| !(m >= -self.error))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check_id: String,
    pub cases: usize,
    pub violations: usize,
    pub worst_margin: f64,
    pub runtime_ms: u64,
    pub artifacts: Vec<String>,
    /// Fitted constants and other measured outputs.
    pub fitted: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub header: Vec<String>,
    #[serde(skip)]
    pub rows: Vec<Vec<String>>,
    /// Extra files `(name, contents)` written next to the CSV, such as plots.
    #[serde(skip)]
    pub attachments: Vec<(String, String)>,
}

#[derive(Serialize)]
struct Summary<'a> {
    check_id: &'a str,
    cases: usize,
    violations: usize,
    worst_margin: f64,
    runtime_ms: u64,
}

impl CheckReport {
    pub(crate) fn from_cases(check_id: &str, header: &[&str], cases: Vec<Case>, start: Instant) -> Self {
        let violations = cases.iter().filter(|c| c.violated()).count();
        let counted = cases.iter().filter(|c| c.margin.is_some()).count();
        let worst_margin = cases.iter().filter_map(|c| c.margin).fold(f64::INFINITY, f64::min);
        let mut h: Vec<String> = header.iter().map(|s| s.to_string()).collect();
        h.extend(["margin", "error", "violation"].map(String::from));
        let rows = cases
            .iter()
            .map(|c| {
                let mut r = c.cells.clone();
                match c.margin {
                    Some(m) => r.extend([fmt(m), fmt(c.error), (c.violated() as u8).to_string()]),
                    None => r.extend([String::new(), String::new(), "0".into()]),
                }
                r
            })
            .collect();
        Self {
            check_id: check_id.to_string(),
            cases: counted,
            violations,
            worst_margin: if counted == 0 { 0.0 } else { worst_margin },
            runtime_ms: start.elapsed().as_millis() as u64,
            artifacts: Vec::new(),
            fitted: BTreeMap::new(),
            notes: Vec::new(),
            header: h,
            rows,
            attachments: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    /// `{check_id, cases, violations, worst_margin, runtime_ms}`.
    pub fn summary_json(&self) -> Result<String> {
        let s = Summary {
            check_id: &self.check_id,
            cases: self.cases,
            violations: self.violations,
            worst_margin: self.worst_margin,
            runtime_ms: self.runtime_ms,
        };
        Ok(serde_json::to_string_pretty(&s)?)
    }

    pub fn csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| crate::Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    /// Writes `<check_id>.csv`, the attachments and `<check_id>.summary.json`
    /// into `dir` and records them as artifacts.
    pub fn write(&mut self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut paths = vec![dir.join(format!("{}.csv", self.check_id))];
        std::fs::write(&paths[0], self.csv_string()?)?;
        for (name, body) in &self.attachments {
            let p = dir.join(name);
            std::fs::write(&p, body)?;
            paths.push(p);
        }
        let json_path = dir.join(format!("{}.summary.json", self.check_id));
        std::fs::write(&json_path, self.summary_json()?)?;
        paths.push(json_path);
        self.artifacts.extend(paths.iter().map(|p| p.display().to_string()));
        Ok(paths)
    }
}

/// Uniform point in a disk.
pub(crate) fn in_disk<R: rand::Rng>(rng: &mut R, c: crate::geometry::Vec2, r: f64) -> crate::geometry::Vec2 {
    let rho = r * rng.gen::<f64>().sqrt();
    let th = rng.gen_range(0.0..std::f64::consts::TAU);
    c + crate::geometry::Vec2::from_angle(th) * rho
}
