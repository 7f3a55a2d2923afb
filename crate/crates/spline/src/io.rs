//! Versioned JSON patch format.
//!
//! ```json
//! { "version": 1,
//!   "degrees": [2, 1],
//!   "knots": [[0, 0, 0, 1, 1, 1], [0, 0, 1, 1]],
//!   "weights": [1, 1, 0.7071, 0.7071, 1, 1],
//!   "points": [[1, 0, 0], [1, 0, 1], ...] }
//! ```
//!
//! Control points and weights are listed in row-major tensor order: the last parametric
//! direction varies fastest. `weights` may be omitted for polynomial patches.

use serde::{Deserialize, Serialize};

use isoshell_core::error::{Error, Result};

use crate::knots::KnotVector;
use crate::tensor::SplineSpace;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchFile {
    pub version: u32,
    pub degrees: Vec<usize>,
    pub knots: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub points: Vec<Vec<f64>>,
}

impl PatchFile {
    pub fn new(space: &SplineSpace, points: Vec<Vec<f64>>) -> Self {
        Self {
            version: FORMAT_VERSION,
            degrees: space.dirs().iter().map(|k| k.degree()).collect(),
            knots: space.dirs().iter().map(|k| k.knots().to_vec()).collect(),
            weights: space.weights().map(|w| w.to_vec()),
            points,
        }
    }

    /// The validated spline space described by the file.
    pub fn space(&self) -> Result<SplineSpace> {
        if self.degrees.len() != self.knots.len() {
            return Err(Error::Invalid(format!(
                "{} degrees for {} knot vectors",
                self.degrees.len(),
                self.knots.len()
            )));
        }
        let dirs = self
            .knots
            .iter()
            .zip(&self.degrees)
            .map(|(k, &p)| KnotVector::new(k.clone(), p))
            .collect::<Result<Vec<_>>>()?;
        let space = SplineSpace::new(dirs, self.weights.clone())?;
        if self.points.len() != space.num_basis() {
            return Err(Error::Invalid(format!(
                "{} control points for {} basis functions",
                self.points.len(),
                space.num_basis()
            )));
        }
        Ok(space)
    }

    /// Control points as fixed-size vectors; all points must have `D` coordinates.
    pub fn points<const D: usize>(&self) -> Result<Vec<[f64; D]>> {
        self.points
            .iter()
            .map(|p| {
                <[f64; D]>::try_from(p.as_slice())
                    .map_err(|_| Error::Invalid(format!("expected {D} coordinates per point, got {}", p.len())))
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parses a patch file, rejecting versions other than [`FORMAT_VERSION`] before
    /// looking at the remaining fields.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let version = value
            .get("version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::Invalid("missing format version".into()))?;
        if version != u64::from(FORMAT_VERSION) {
            return Err(Error::Version(version.min(u64::from(u32::MAX)) as u32));
        }
        let file: PatchFile = serde_json::from_value(value)?;
        file.space()?;
        Ok(file)
    }
}
