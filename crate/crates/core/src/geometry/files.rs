//! JSON files for domains and charts.
//!
//! ```text
//! domain: {"loops": [[[x, y], ...], ...], "patches": [patch, ...], "r0": 0.25}
//! patch:  {"center": [x, y], "radius": 1, "angle": 0, "tau": 0.03, "samples": [...]}
//! ```
//!
//! `patches` and `r0` may be omitted, in which case they are derived from the loops.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{LipschitzPatch, PolygonDomain, Vec2};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchFile {
    pub center: [f64; 2],
    pub radius: f64,
    pub angle: f64,
    pub tau: f64,
    pub samples: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainFile {
    pub loops: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    pub patches: Vec<PatchFile>,
    #[serde(default)]
    pub r0: Option<f64>,
}

impl From<&LipschitzPatch> for PatchFile {
    fn from(p: &LipschitzPatch) -> Self {
        let c = p.center();
        Self { center: [c.x, c.y], radius: p.radius(), angle: p.angle(), tau: p.tau(), samples: p.samples().to_vec() }
    }
}

impl TryFrom<&PatchFile> for LipschitzPatch {
    type Error = Error;

    fn try_from(f: &PatchFile) -> Result<Self> {
        LipschitzPatch::new(Vec2::new(f.center[0], f.center[1]), f.radius, f.angle, f.tau, f.samples.clone())
    }
}

impl DomainFile {
    pub fn into_domain(self) -> Result<PolygonDomain> {
        let loops: Vec<Vec<Vec2>> =
            self.loops.iter().map(|l| l.iter().map(|p| Vec2::new(p[0], p[1])).collect()).collect();
        if loops.is_empty() {
            return Err(Error::Schema { what: "domain", detail: "no loops".into() });
        }
        match self.r0 {
            None if self.patches.is_empty() => {
                let mut it = loops.into_iter();
                let outer = it.next().expect("checked nonempty");
                PolygonDomain::new(outer, it.collect())
            }
            None => Err(Error::Schema { what: "domain", detail: "patches given without r0".into() }),
            Some(r0) => {
                let patches = self.patches.iter().map(LipschitzPatch::try_from).collect::<Result<_>>()?;
                PolygonDomain::with_patches(loops, patches, r0)
            }
        }
    }
}

impl From<&PolygonDomain> for DomainFile {
    fn from(d: &PolygonDomain) -> Self {
        Self {
            loops: d.loops().iter().map(|l| l.iter().map(|p| [p.x, p.y]).collect()).collect(),
            patches: d.patches().iter().map(PatchFile::from).collect(),
            r0: Some(d.r0()),
        }
    }
}

impl PolygonDomain {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<DomainFile>(s)?.into_domain()
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&DomainFile::from(self))?)
    }

    /// Whether the domain is an axis-aligned rectangle with a corner at the origin,
    /// returning its side lengths.
    pub fn as_rectangle(&self) -> Option<(f64, f64)> {
        if self.loops().len() != 1 || self.outer().len() != 4 {
            return None;
        }
        let bb = self.bbox();
        let (a, b) = (bb.max.x, bb.max.y);
        let want = [Vec2::new(0.0, 0.0), Vec2::new(a, 0.0), Vec2::new(a, b), Vec2::new(0.0, b)];
        let tol = 1e-12 * (a + b);
        let ok = bb.min.norm() <= tol && self.outer().iter().all(|p| want.iter().any(|w| w.dist(*p) <= tol));
        ok.then_some((a, b))
    }
}

impl LipschitzPatch {
    pub fn from_json(s: &str) -> Result<Self> {
        LipschitzPatch::try_from(&serde_json::from_str::<PatchFile>(s)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&PatchFile::from(self))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bare_loops_derive_charts() {
        let d = PolygonDomain::from_json(r#"{"loops": [[[0,0],[1,0],[1,1],[0,1]]]}"#).unwrap();
        assert_eq!(d.as_rectangle(), Some((1.0, 1.0)));
        assert!(!d.patches().is_empty());
        assert!(d.r0() > 0.0);
    }

    #[test]
    fn domain_round_trips() {
        let d = PolygonDomain::l_shape();
        let back = PolygonDomain::from_json(&d.to_json().unwrap()).unwrap();
        assert_eq!(back.loops(), d.loops());
        assert_eq!(back.patches(), d.patches());
        assert_eq!(back.r0(), d.r0());
        assert_eq!(d.as_rectangle(), None);
    }

    #[test]
    fn patch_round_trips_and_validates() {
        let p = LipschitzPatch::wedge(0.5, 0.2).unwrap();
        assert_eq!(LipschitzPatch::from_json(&p.to_json().unwrap()).unwrap(), p);
        let bad = r#"{"center":[0,0],"radius":1,"angle":0,"tau":0.1,"samples":[1,0,1]}"#;
        assert!(LipschitzPatch::from_json(bad).is_err());
    }

    #[test]
    fn patches_without_r0_are_rejected() {
        let p = PatchFile::from(&LipschitzPatch::flat(0.1, 0.01).unwrap());
        let f = DomainFile { loops: vec![vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]], patches: vec![p], r0: None };
        assert!(f.into_domain().is_err());
    }
}
