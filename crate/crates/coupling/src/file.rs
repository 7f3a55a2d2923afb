//! Versioned JSON model files: patches with trims and materials, interfaces, cross-points,
//! supports, and loads.
//!
//! ```json
//! { "version": 1,
//!   "patches": [{ "name": "web", "geometry": { "version": 1, ... }, "degree": 2,
//!                 "elements": [4, 4], "material": { "kind": "isotropic", "e": 1e7, "nu": 0.3, "t": 0.05 } }],
//!   "interfaces": [{ "patches": [0, 1], "curves": [...] }],
//!   "supports": [{ "patch": 0, "edge": "U0", "clamped": true }],
//!   "point_loads": [{ "patch": 1, "uv": [1, 1], "force": [0, 0, -10] }],
//!   "probes": [{ "name": "tip", "patch": 1, "uv": [1, 1] }] }
//! ```
//!
//! Every patch is discretized with `elements` uniform elements per direction on level 0,
//! halved on each further level.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use isoshell_core::error::{Error, Result};
use isoshell_core::math::Vec3;
use isoshell_geometry::{Edge, SurfaceMap};
use isoshell_shell::{DirichletBc, Material, Patch};
use isoshell_spline::{KnotVector, PatchFile, SplineSpace};
use isoshell_trimming::TrimCurve;

use crate::analysis::{Pin, PointLoad, Problem, VectorField};
use crate::model::{CrossPoint, InterfaceDef, MultiPatchModel};

pub const MODEL_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchDef {
    pub name: String,
    pub geometry: PatchFile,
    /// Displacement degree in both directions.
    pub degree: usize,
    /// Uniform elements per direction on level 0.
    pub elements: [usize; 2],
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trims: Vec<TrimCurve>,
    pub material: Material,
}

fn all_components() -> [bool; 3] {
    [true; 3]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportDef {
    pub patch: usize,
    pub edge: Edge,
    #[serde(default = "all_components")]
    pub components: [bool; 3],
    /// Also fixes the normal slope.
    #[serde(default)]
    pub clamped: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointLoadDef {
    pub patch: usize,
    pub uv: [f64; 2],
    pub force: Vec3,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PinDef {
    pub patch: usize,
    pub uv: [f64; 2],
    pub component: usize,
}

/// Point where the displacement is reported.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Probe {
    pub name: String,
    pub patch: usize,
    pub uv: [f64; 2],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub version: u32,
    pub patches: Vec<PatchDef>,
    #[serde(default)]
    pub interfaces: Vec<InterfaceDef>,
    #[serde(default)]
    pub crosspoints: Vec<CrossPoint>,
    #[serde(default)]
    pub supports: Vec<SupportDef>,
    #[serde(default)]
    pub pins: Vec<PinDef>,
    #[serde(default)]
    pub point_loads: Vec<PointLoadDef>,
    /// Constant force per unit mid-surface area.
    #[serde(default)]
    pub area_load: Option<Vec3>,
    #[serde(default)]
    pub probes: Vec<Probe>,
}

fn uniform_space(p: usize, elements: [usize; 2], level: usize) -> Result<SplineSpace> {
    let dirs = elements
        .iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::Invalid("patches need at least one element per direction".into()));
            }
            Ok(KnotVector::uniform(p, n << level))
        })
        .collect::<Result<Vec<_>>>()?;
    SplineSpace::new(dirs, None)
}

impl ModelFile {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parses a model file; the version is checked before anything else.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let version = value
            .get("version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::Invalid("missing model version".into()))?;
        if version != u64::from(MODEL_VERSION) {
            return Err(Error::Version(version.min(u64::from(u32::MAX)) as u32));
        }
        let file: ModelFile = serde_json::from_value(value)?;
        file.check_indices()?;
        Ok(file)
    }

    fn check_indices(&self) -> Result<()> {
        let n = self.patches.len();
        let bad = |what: &str, p: usize| Error::Invalid(format!("{what} refers to patch {p} of {n}"));
        for i in &self.interfaces {
            if let Some(&p) = i.patches.iter().find(|&&p| p >= n) {
                return Err(bad("interface", p));
            }
        }
        for c in &self.crosspoints {
            if let Some(&(p, _)) = c.incident.iter().find(|i| i.0 >= n) {
                return Err(bad("cross-point", p));
            }
        }
        let refs = self.supports.iter().map(|s| ("support", s.patch)).chain(self.pins.iter().map(|s| ("pin", s.patch)));
        let refs = refs.chain(self.point_loads.iter().map(|s| ("point load", s.patch)));
        for (what, p) in refs.chain(self.probes.iter().map(|s| ("probe", s.patch))) {
            if p >= n {
                return Err(bad(what, p));
            }
        }
        if let Some(p) = self.pins.iter().find(|p| p.component > 2) {
            return Err(Error::Invalid(format!("pin component {} is not 0, 1 or 2", p.component)));
        }
        Ok(())
    }

    /// Patches discretized on refinement `level`.
    pub fn model(&self, level: usize) -> Result<MultiPatchModel> {
        let patches = self
            .patches
            .iter()
            .map(|d| {
                let geometry = SurfaceMap::from_patch_file(&d.geometry)?;
                let space = uniform_space(d.degree, d.elements, level)?;
                Patch::new(d.name.clone(), geometry, space, d.trims.clone(), d.material.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        let model =
            MultiPatchModel { patches, interfaces: self.interfaces.clone(), crosspoints: self.crosspoints.clone() };
        model.validate()?;
        Ok(model)
    }

    /// Model, supports, and loads on refinement `level`.
    pub fn problem(&self, level: usize) -> Result<Problem> {
        let bcs = self
            .supports
            .iter()
            .map(|s| DirichletBc { clamped: s.clamped, ..DirichletBc::components(s.patch, s.edge, s.components) })
            .collect();
        let body_force = self.area_load.map(|f| Arc::new(move |_: Vec3| f) as VectorField);
        Ok(Problem {
            model: self.model(level)?,
            bcs,
            body_force,
            point_loads: self
                .point_loads
                .iter()
                .map(|l| PointLoad { patch: l.patch, uv: l.uv, force: l.force })
                .collect(),
            pins: self.pins.iter().map(|p| Pin { patch: p.patch, uv: p.uv, component: p.component }).collect(),
            exact: None,
        })
    }
}
