use crate::model::{CurveRef, MultiPatchModel};
use isoshell_core::error::{Error, Result};
use isoshell_core::math::{norm, scale, Vec3};
use isoshell_numerics::gauss;
use isoshell_shell::Patch;
use isoshell_spline::{build_reduced_space, KnotVector, SplineSpace};
use isoshell_trimming::roots_on_line;

/// Quadrature point on an interface with both parametric preimages.
#[derive(Clone, Debug)]
pub struct InterfacePoint {
    pub s: f64,
    /// Gauss weight times the arc-length Jacobian `|dX/ds|`.
    pub weight: f64,
    pub uv: [[f64; 2]; 2],
    pub duv: [[f64; 2]; 2],
    pub x: Vec3,
    /// Unit physical tangent along increasing `s`, taken from the active side.
    pub tangent: Vec3,
}

/// Discrete data of one coupling edge.
#[derive(Clone, Debug)]
pub struct InterfaceSpace {
    pub index: usize,
    pub patches: [usize; 2],
    pub active: usize,
    /// Interface knot vector on `s ∈ [0,1]`, degree of the active patch.
    pub knots: KnotVector,
    /// Degree-reduced scalar space; the vector version applies it per component.
    pub reduced: SplineSpace,
    /// Intersection mesh breakpoints in `s`.
    pub mesh: Vec<f64>,
    pub points: Vec<InterfacePoint>,
    pub measure: f64,
    pub h: f64,
}

impl InterfaceSpace {
    pub fn degree(&self) -> usize {
        self.knots.degree()
    }

    pub fn reduced_dim(&self) -> usize {
        self.reduced.num_basis()
    }
}

/// Interior knot-line crossings of a preimage curve in `s`, sorted.
pub fn knot_line_crossings(curve: &CurveRef, patch: &Patch) -> Result<Vec<f64>> {
    let segments = curve.curve.bezier_segments();
    let mut out = Vec::new();
    for axis in 0..2 {
        let breaks = patch.space.dir(axis).breakpoints();
        for &c in &breaks[1..breaks.len() - 1] {
            let roots = match roots_on_line(&segments, axis, c, None) {
                Ok(r) => r,
                // A preimage running along a knot line crosses nothing on that axis.
                Err(Error::AmbiguousClassification { .. }) => continue,
                Err(e) => return Err(e),
            };
            out.extend(roots.into_iter().map(|t| curve.s_of(t)).filter(|&s| s > 1e-12 && s < 1.0 - 1e-12));
        }
    }
    Ok(sorted_unique(out))
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-10);
    v
}

/// Builds the interface space of interface `l`. `active` overrides the default choice,
/// which is the side with more knot-line crossings (side 0 on ties).
pub fn build_interface(model: &MultiPatchModel, l: usize, active: Option<usize>) -> Result<InterfaceSpace> {
    let def = &model.interfaces[l];
    let gap = model.interface_gap(l)?;
    if gap > model.watertight_tol() {
        return Err(Error::NotWatertight { interface: l, gap });
    }
    let crossings = [
        knot_line_crossings(&def.curves[0], &model.patches[def.patches[0]])?,
        knot_line_crossings(&def.curves[1], &model.patches[def.patches[1]])?,
    ];
    let active = active.or(def.active).unwrap_or(if crossings[1].len() > crossings[0].len() { 1 } else { 0 });
    if active > 1 {
        return Err(Error::Invalid(format!("active side {active} of interface {l}")));
    }
    let ap = &model.patches[def.patches[active]];
    let p = ap.degree();
    let mut breaks = vec![0.0];
    breaks.extend(&crossings[active]);
    breaks.push(1.0);
    let knots = KnotVector::from_breakpoints(p, &breaks);
    let reduced = build_reduced_space(&knots)?;

    let mut mesh = breaks.clone();
    mesh.extend(&crossings[1 - active]);
    let mesh = sorted_unique(mesh);

    let rule = gauss(p + 1)?;
    let mut points = Vec::with_capacity(rule.len() * (mesh.len() - 1));
    let mut measure = 0.0;
    for w in mesh.windows(2) {
        for (s, wq) in rule.mapped(w[0], w[1]) {
            let mut uv = [[0.0; 2]; 2];
            let mut duv = [[0.0; 2]; 2];
            for side in 0..2 {
                (uv[side], duv[side]) = def.curves[side].eval(s)?;
            }
            let fr = model.patches[def.patches[active]].frame(uv[active], 0)?;
            let mut dx = [0.0; 3];
            for a in 0..2 {
                for d in 0..3 {
                    dx[d] += fr.a[a][d] * duv[active][a];
                }
            }
            let jac = norm(dx);
            if jac < 1e-14 {
                return Err(Error::DegenerateCurve(s));
            }
            measure += wq * jac;
            points.push(InterfacePoint { s, weight: wq * jac, uv, duv, x: fr.x, tangent: scale(dx, 1.0 / jac) });
        }
    }
    let h = measure / (breaks.len() - 1) as f64;
    Ok(InterfaceSpace { index: l, patches: def.patches, active, knots, reduced, mesh, points, measure, h })
}
