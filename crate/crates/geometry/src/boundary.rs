use serde::{Deserialize, Serialize};

use crate::surface::{SurfaceFrame, SurfaceMap};
use isoshell_core::error::{Error, Result};
use isoshell_core::math::{cross, dot, norm, scale, Vec3};
use isoshell_spline::SplineCurve;

/// One of the four edges of the unit parameter square.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Edge {
    /// ξ = 0
    U0,
    /// ξ = 1
    U1,
    /// η = 0
    V0,
    /// η = 1
    V1,
}

impl Edge {
    pub const ALL: [Edge; 4] = [Edge::U0, Edge::U1, Edge::V0, Edge::V1];

    /// Parameter point at position `s` along the edge (edges run in increasing ξ or η).
    pub fn point(self, s: f64) -> [f64; 2] {
        match self {
            Edge::U0 => [0.0, s],
            Edge::U1 => [1.0, s],
            Edge::V0 => [s, 0.0],
            Edge::V1 => [s, 1.0],
        }
    }

    /// Whether the unit square lies on the left of the edge's travel direction.
    pub fn kept_left(self) -> bool {
        matches!(self, Edge::U1 | Edge::V0)
    }

    /// The edge as a straight parametric curve on [0, 1].
    pub fn curve(self) -> SplineCurve<2> {
        SplineCurve::line(self.point(0.0), self.point(1.0))
    }

    /// Direction normal to the edge (0 for ξ, 1 for η).
    pub fn normal_dir(self) -> usize {
        match self {
            Edge::U0 | Edge::U1 => 0,
            Edge::V0 | Edge::V1 => 1,
        }
    }

    pub fn is_far(self) -> bool {
        matches!(self, Edge::U1 | Edge::V1)
    }
}

/// Geometric data of a boundary or interface curve at one curve parameter.
#[derive(Clone, Debug)]
pub struct BoundaryTrace {
    pub t: f64,
    pub uv: [f64; 2],
    /// Parametric velocity `dγ̂/dt`.
    pub duv: [f64; 2],
    pub x: Vec3,
    pub tangent: Vec3,
    /// Outward unit in-plane normal.
    pub normal: Vec3,
    /// Contravariant components `n^α = n · a^α`.
    pub normal_con: [f64; 2],
    /// `|dx/dt|`.
    pub jac: f64,
}

/// Trace of the parametric curve `curve` at `t`. `kept_left` tells on which side of the
/// curve's travel direction the patch material lies; the normal points away from it.
pub fn boundary_trace(
    map: &SurfaceMap,
    curve: &SplineCurve<2>,
    t: f64,
    kept_left: bool,
) -> Result<(BoundaryTrace, SurfaceFrame)> {
    let cd = curve.derivs(t, 1)?;
    let uv = cd[0];
    let fr = map.frame(uv, 0)?;
    let trace = trace_from_frame(&fr, t, cd[1], kept_left)?;
    Ok((trace, fr))
}

pub fn trace_from_frame(fr: &SurfaceFrame, t: f64, duv: [f64; 2], kept_left: bool) -> Result<BoundaryTrace> {
    let mut dx = [0.0; 3];
    for d in 0..3 {
        dx[d] = fr.a[0][d] * duv[0] + fr.a[1][d] * duv[1];
    }
    let jac = norm(dx);
    if !(jac > 1e-14) {
        return Err(Error::DegenerateCurve(t));
    }
    let tangent = scale(dx, 1.0 / jac);
    let normal = if kept_left { cross(tangent, fr.a3) } else { cross(fr.a3, tangent) };
    let normal_con = [dot(normal, fr.a_con[0]), dot(normal, fr.a_con[1])];
    Ok(BoundaryTrace { t, uv: fr.uv, duv, x: fr.x, tangent, normal, normal_con, jac })
}
