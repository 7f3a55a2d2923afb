use serde::{Deserialize, Serialize};

use isoshell_core::error::{Error, Result};
use isoshell_core::math::{norm, sub};
use isoshell_geometry::Edge;
use isoshell_shell::Patch;
use isoshell_spline::SplineCurve;

/// Parametric preimage of an interface in one patch: `s ∈ [0,1] ↦ curve(t0 + s (t1 − t0))`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveRef {
    pub curve: SplineCurve<2>,
    pub range: [f64; 2],
}

impl CurveRef {
    pub fn new(curve: SplineCurve<2>, range: [f64; 2]) -> Self {
        Self { curve, range }
    }

    /// A full patch edge, traversed in increasing parameter.
    pub fn edge(edge: Edge) -> Self {
        Self { curve: edge.curve(), range: [0.0, 1.0] }
    }

    pub fn t_of(&self, s: f64) -> f64 {
        self.range[0] + s * (self.range[1] - self.range[0])
    }

    pub fn s_of(&self, t: f64) -> f64 {
        (t - self.range[0]) / (self.range[1] - self.range[0])
    }

    /// Parameter point and its derivative with respect to `s`.
    pub fn eval(&self, s: f64) -> Result<([f64; 2], [f64; 2])> {
        let d = self.curve.derivs(self.t_of(s), 1)?;
        let f = self.range[1] - self.range[0];
        Ok((d[0], [d[1][0] * f, d[1][1] * f]))
    }
}

/// Coupling edge between two patches.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InterfaceDef {
    pub patches: [usize; 2],
    pub curves: [CurveRef; 2],
    /// Forces the active side (0 or 1); by default the finer side is chosen.
    #[serde(default)]
    pub active: Option<usize>,
}

/// Point shared by several patches where interfaces meet.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrossPoint {
    pub incident: Vec<(usize, [f64; 2])>,
}

#[derive(Clone, Debug)]
pub struct MultiPatchModel {
    pub patches: Vec<Patch>,
    pub interfaces: Vec<InterfaceDef>,
    pub crosspoints: Vec<CrossPoint>,
}

impl MultiPatchModel {
    pub fn bbox_diagonal(&self) -> f64 {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in &self.patches {
            for q in p.geometry.points() {
                for d in 0..3 {
                    lo[d] = lo[d].min(q[d]);
                    hi[d] = hi[d].max(q[d]);
                }
            }
        }
        norm(sub(hi, lo))
    }

    pub fn watertight_tol(&self) -> f64 {
        1e-10 * self.bbox_diagonal()
    }

    /// Largest physical gap between the two preimages of interface `l` over 50 samples.
    pub fn interface_gap(&self, l: usize) -> Result<f64> {
        let def = &self.interfaces[l];
        let mut gap: f64 = 0.0;
        for k in 0..50 {
            let s = k as f64 / 49.0;
            let mut x = [[0.0; 3]; 2];
            for side in 0..2 {
                let (uv, _) = def.curves[side].eval(s)?;
                x[side] = self.patches[def.patches[side]].geometry.eval(uv)?;
            }
            gap = gap.max(norm(sub(x[0], x[1])));
        }
        Ok(gap)
    }

    /// Checks watertightness of every interface and agreement of cross-point preimages.
    pub fn validate(&self) -> Result<()> {
        let tol = self.watertight_tol();
        for (l, def) in self.interfaces.iter().enumerate() {
            if def.patches[0] == def.patches[1] || def.patches.iter().any(|&p| p >= self.patches.len()) {
                return Err(Error::Invalid(format!("interface {l} must join two distinct patches")));
            }
            let gap = self.interface_gap(l)?;
            if gap > tol {
                return Err(Error::NotWatertight { interface: l, gap });
            }
        }
        for (c, cp) in self.crosspoints.iter().enumerate() {
            let pts: Vec<_> =
                cp.incident.iter().map(|&(p, uv)| self.patches[p].geometry.eval(uv)).collect::<Result<_>>()?;
            let gap = pts.iter().map(|x| norm(sub(*x, pts[0]))).fold(0.0, f64::max);
            if gap > tol {
                return Err(Error::CrossPointMismatch { index: c, gap });
            }
        }
        Ok(())
    }
}
