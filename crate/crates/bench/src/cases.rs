//! Benchmark geometries, materials, loads, and exact solutions.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::fields::{
    astroid_field, check_cartesian, check_parametric, cylinder_amplitude, four_patch_field, three_patch_field,
};
use isoshell_core::error::{Error, Result};
use isoshell_coupling::analysis::{Pin, PointLoad, Problem};
use isoshell_coupling::{CrossPoint, CurveRef, InterfaceDef, ModelFile, MultiPatchModel, Probe};
use isoshell_geometry::{flat_rectangle, Edge, SurfaceMap};
use isoshell_shell::{CartesianField, DirichletBc, ExactSolution, Material, NormalField, ParametricField, Patch};
use isoshell_spline::{KnotVector, SplineCurve, SplineSpace};
use isoshell_trimming::TrimCurve;

/// Knot shift that makes neighbouring meshes non-conforming.
pub const KNOT_SHIFT: f64 = SQRT_2 / 100.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseId {
    FourPatch,
    ScordelisLo,
    LBeam,
    ThreePatch,
    Astroid,
    Cylinder,
}

impl CaseId {
    pub const ALL: [CaseId; 6] =
        [CaseId::FourPatch, CaseId::ScordelisLo, CaseId::LBeam, CaseId::ThreePatch, CaseId::Astroid, CaseId::Cylinder];

    pub fn name(self) -> &'static str {
        match self {
            CaseId::FourPatch => "four-patch",
            CaseId::ScordelisLo => "scordelis-lo",
            CaseId::LBeam => "l-beam",
            CaseId::ThreePatch => "three-patch",
            CaseId::Astroid => "astroid",
            CaseId::Cylinder => "cylinder",
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CaseId::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| Error::Invalid(format!("unknown case '{s}'")))
    }
}

/// Catalogue entry with the physical parameters of a benchmark.
#[derive(Clone, Debug, Serialize)]
pub struct BenchmarkCase {
    pub id: CaseId,
    pub description: &'static str,
    pub young: f64,
    pub poisson: f64,
    /// Default thickness and the values studied.
    pub thickness: f64,
    pub thicknesses: Vec<f64>,
    pub manufactured: bool,
    /// Elements per direction and patch on the coarsest level.
    pub base_elements: usize,
}

pub fn case_catalogue() -> Vec<BenchmarkCase> {
    vec![
        BenchmarkCase {
            id: CaseId::FourPatch,
            description: "four planar patches with curved, shifted interfaces and one cross-point",
            young: 1e6,
            poisson: 0.3,
            thickness: 0.005,
            thicknesses: vec![0.005],
            manufactured: true,
            base_elements: 4,
        },
        BenchmarkCase {
            id: CaseId::ScordelisLo,
            description: "Scordelis-Lo roof split into six patches under gravity",
            young: 4.32e8,
            poisson: 0.0,
            thickness: 0.025,
            thicknesses: vec![0.025],
            manufactured: false,
            base_elements: 4,
        },
        BenchmarkCase {
            id: CaseId::LBeam,
            description: "clamped L-section beam of two perpendicular patches with a tip load",
            young: 1e7,
            poisson: 0.3,
            thickness: 0.05,
            thicknesses: vec![0.05],
            manufactured: false,
            base_elements: 4,
        },
        BenchmarkCase {
            id: CaseId::ThreePatch,
            description: "pure bending of three trimmed planar patches",
            young: 1e6,
            poisson: 0.3,
            thickness: 0.05,
            thicknesses: vec![0.5, 0.05, 0.01],
            manufactured: true,
            base_elements: 4,
        },
        BenchmarkCase {
            id: CaseId::Astroid,
            description: "astroid domain split by two trimming curves",
            young: 1e6,
            poisson: 0.3,
            thickness: 0.01,
            thicknesses: vec![0.1, 0.01, 0.005],
            manufactured: true,
            base_elements: 4,
        },
        BenchmarkCase {
            id: CaseId::Cylinder,
            description: "quarter cylinder split into four trimmed patches meeting at a cross-point",
            young: 1e7,
            poisson: 0.3,
            thickness: 0.001,
            thicknesses: vec![0.001],
            manufactured: true,
            base_elements: 4,
        },
    ]
}

pub fn case(id: CaseId) -> BenchmarkCase {
    case_catalogue().into_iter().find(|c| c.id == id).expect("every id is catalogued")
}

/// Geometry and load overrides; unset values keep the defaults listed by `bench list`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseParams {
    /// Scordelis-Lo gravity per unit area, or the L-beam tip load.
    pub load: Option<f64>,
    /// L-beam length.
    pub length: Option<f64>,
    /// L-beam flange and web width.
    pub leg: Option<f64>,
    /// Cylinder radius.
    pub radius: Option<f64>,
    /// Cylinder arc in degrees, below 180.
    pub span: Option<f64>,
    /// Cylinder height.
    pub height: Option<f64>,
}

impl CaseParams {
    /// Rejects values a case does not use and non-positive sizes.
    pub fn check(&self, id: CaseId) -> Result<()> {
        let named = [
            ("load", self.load),
            ("length", self.length),
            ("leg", self.leg),
            ("radius", self.radius),
            ("span", self.span),
            ("height", self.height),
        ];
        let used: &[&str] = match id {
            CaseId::ScordelisLo => &["load"],
            CaseId::LBeam => &["load", "length", "leg"],
            CaseId::Cylinder => &["radius", "span", "height"],
            _ => &[],
        };
        for (name, v) in named {
            let Some(v) = v else { continue };
            if !used.contains(&name) {
                return Err(Error::Invalid(format!("{id} has no parameter '{name}'")));
            }
            if !(v > 0.0) || (name == "span" && v >= 180.0) {
                return Err(Error::Invalid(format!("{name} = {v} is out of range")));
            }
        }
        Ok(())
    }
}

/// Discretization and parameter choice for one run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseSetup {
    pub id: CaseId,
    pub degree: usize,
    pub level: usize,
    pub thickness: Option<f64>,
    #[serde(default)]
    pub params: CaseParams,
}

impl CaseSetup {
    /// Default thickness and parameters.
    pub fn new(id: CaseId, degree: usize, level: usize) -> Self {
        Self { id, degree, level, thickness: None, params: CaseParams::default() }
    }
}

/// What is measured after solving.
#[derive(Clone)]
pub enum Quantity {
    /// Error norms against the manufactured solution.
    Errors(Arc<dyn ExactSolution>),
    /// Vertical displacement at a point, normalized by a reference value.
    Deflection { patch: usize, uv: [f64; 2], reference: f64 },
    /// Tip deflection and the linearized change of the angle between two patches at a corner.
    Angle { tip: (usize, [f64; 2]), corner: [(usize, [f64; 2]); 2] },
    /// Displacement components at named points.
    Probes(Vec<Probe>),
}

pub struct BuiltCase {
    pub problem: Problem,
    pub quantity: Quantity,
}

/// Breakpoints of `n` uniform elements, optionally shifted, refined `level` times.
pub fn refined_breaks(n: usize, shifted: bool, level: usize) -> Vec<f64> {
    let shift = if shifted { KNOT_SHIFT } else { 0.0 };
    let mut b: Vec<f64> =
        (0..=n).map(|i| if i == 0 || i == n { i as f64 / n as f64 } else { i as f64 / n as f64 + shift }).collect();
    for _ in 0..level {
        let mut r = Vec::with_capacity(2 * b.len());
        for w in b.windows(2) {
            r.push(w[0]);
            r.push(0.5 * (w[0] + w[1]));
        }
        r.push(1.0);
        b = r;
    }
    b
}

/// Degree-`p` space with maximal smoothness on the given breakpoints.
pub fn discretization(p: usize, ub: &[f64], vb: &[f64]) -> SplineSpace {
    SplineSpace::surface(KnotVector::from_breakpoints(p, ub), KnotVector::from_breakpoints(p, vb))
}

fn mesh(setup: &CaseSetup, nu: usize, nv: usize, shifted: bool) -> SplineSpace {
    discretization(setup.degree, &refined_breaks(nu, shifted, setup.level), &refined_breaks(nv, shifted, setup.level))
}

fn isotropic(c: &BenchmarkCase, t: Option<f64>) -> Material {
    Material::Isotropic { e: c.young, nu: c.poisson, t: t.unwrap_or(c.thickness) }
}

fn edge_pair(a: usize, ea: Edge, b: usize, eb: Edge) -> InterfaceDef {
    InterfaceDef { patches: [a, b], curves: [CurveRef::edge(ea), CurveRef::edge(eb)], active: None }
}

fn quadratic(points: Vec<[f64; 2]>) -> SplineCurve<2> {
    let n = points.len();
    let kv = KnotVector::from_breakpoints(2, &(0..n - 1).map(|i| i as f64 / (n - 2) as f64).collect::<Vec<_>>());
    SplineCurve::new(kv, points, None).expect("quadratic curve")
}

fn affine_curve(c: &SplineCurve<2>, x0: f64, x1: f64, y0: f64, y1: f64) -> SplineCurve<2> {
    let pts = c.points().iter().map(|p| [(p[0] - x0) / (x1 - x0), (p[1] - y0) / (y1 - y0)]).collect();
    SplineCurve::new(c.knots().clone(), pts, None).expect("same knots")
}

fn boundary_bcs(patches: &[(usize, Vec<Edge>)], ex: &Arc<dyn ExactSolution>) -> Vec<DirichletBc> {
    patches.iter().flat_map(|(p, edges)| edges.iter().map(|&e| DirichletBc::exact(*p, e, ex.clone()))).collect()
}

pub fn build_case(setup: &CaseSetup) -> Result<BuiltCase> {
    if !(2..=4).contains(&setup.degree) {
        return Err(Error::UnsupportedDegree(setup.degree));
    }
    setup.params.check(setup.id)?;
    match setup.id {
        CaseId::FourPatch => four_patch(setup),
        CaseId::ScordelisLo => scordelis_lo(setup),
        CaseId::LBeam => l_beam(setup),
        CaseId::ThreePatch => three_patch(setup),
        CaseId::Astroid => astroid(setup),
        CaseId::Cylinder => cylinder(setup),
    }
}

/// Biquadratic map of `[0,2]^2` with perturbed interior control points.
pub fn four_patch_geometry() -> SurfaceMap {
    let kv = KnotVector::new(vec![0.0, 0.0, 0.0, 1.0, 2.0, 2.0, 2.0], 2).expect("valid knots");
    let g = [0.0, 0.5, 1.5, 2.0];
    let (a, b) = (0.1, 0.1);
    let mut pts = Vec::with_capacity(16);
    for i in 0..4 {
        for j in 0..4 {
            let mut p = [g[i], g[j], 0.0];
            match (i, j) {
                (1, 1) => p = [0.5 + a, 0.5 + b, 0.0],
                (2, 1) => p = [1.5 + a, 0.5 - b, 0.0],
                (1, 2) => p = [0.5 - a, 1.5 + b, 0.0],
                (2, 2) => p = [1.5 - a, 1.5 - b, 0.0],
                _ => {}
            }
            pts.push(p);
        }
    }
    SurfaceMap::new(SplineSpace::surface(kv.clone(), kv), pts).expect("valid map")
}

fn four_patch(setup: &CaseSetup) -> Result<BuiltCase> {
    let c = case(CaseId::FourPatch);
    check_cartesian("four-patch", four_patch_field, &[[0.3, 0.7, 0.0], [1.2, 1.9, 0.0]])?;
    let global = four_patch_geometry();
    let mat = isotropic(&c, setup.thickness);
    // SW, SE, NW, NE; SE and NW carry shifted knots.
    let quads =
        [((0.0, 1.0), (0.0, 1.0)), ((1.0, 2.0), (0.0, 1.0)), ((0.0, 1.0), (1.0, 2.0)), ((1.0, 2.0), (1.0, 2.0))];
    let mut patches = Vec::new();
    for (k, (u, v)) in quads.iter().enumerate() {
        let geo = global.extract(*u, *v)?;
        let space = mesh(setup, c.base_elements, c.base_elements, k == 1 || k == 2);
        patches.push(Patch::new(format!("patch{}", k + 1), geo, space, vec![], mat.clone())?);
    }
    let interfaces = vec![
        edge_pair(0, Edge::U1, 1, Edge::U0),
        edge_pair(2, Edge::U1, 3, Edge::U0),
        edge_pair(0, Edge::V1, 2, Edge::V0),
        edge_pair(1, Edge::V1, 3, Edge::V0),
    ];
    let crosspoints =
        vec![CrossPoint { incident: vec![(0, [1.0, 1.0]), (1, [0.0, 1.0]), (2, [1.0, 0.0]), (3, [0.0, 0.0])] }];
    let ex: Arc<dyn ExactSolution> = Arc::new(CartesianField(four_patch_field));
    let bcs = boundary_bcs(
        &[
            (0, vec![Edge::U0, Edge::V0]),
            (1, vec![Edge::U1, Edge::V0]),
            (2, vec![Edge::U0, Edge::V1]),
            (3, vec![Edge::U1, Edge::V1]),
        ],
        &ex,
    );
    let model = MultiPatchModel { patches, interfaces, crosspoints };
    Ok(BuiltCase {
        problem: Problem { model, bcs, body_force: None, point_loads: vec![], pins: vec![], exact: Some(ex.clone()) },
        quantity: Quantity::Errors(ex),
    })
}

pub const SCORDELIS_REFERENCE: f64 = -32.01045;
/// Gravity load per unit mid-surface area.
pub const SCORDELIS_LOAD: f64 = 90.0;

/// Cylindrical roof: `ξ` along the axis `x ∈ [−25, 25]`, `η` along the ±40° arc of radius 25.
pub fn scordelis_geometry() -> SurfaceMap {
    let r = 25.0;
    let phi = 40f64.to_radians();
    let (s, c) = (phi.sin(), phi.cos());
    let arc = [[-r * s, r * c], [0.0, r / c], [r * s, r * c]];
    let w = [1.0, c, 1.0];
    let mut pts = Vec::new();
    let mut weights = Vec::new();
    for x in [-25.0, 25.0] {
        for j in 0..3 {
            pts.push([x, arc[j][0], arc[j][1]]);
            weights.push(w[j]);
        }
    }
    let space = SplineSpace::new(vec![KnotVector::uniform(1, 1), KnotVector::uniform(2, 1)], Some(weights))
        .expect("valid rational space");
    SurfaceMap::new(space, pts).expect("valid map")
}

fn scordelis_lo(setup: &CaseSetup) -> Result<BuiltCase> {
    let c = case(CaseId::ScordelisLo);
    let load = setup.params.load.unwrap_or(SCORDELIS_LOAD);
    let global = scordelis_geometry();
    let mat = isotropic(&c, setup.thickness);
    let mut patches = Vec::new();
    let xs = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];
    let ys = [0.0, 0.5, 1.0];
    let idx = |i: usize, j: usize| 2 * i + j;
    for i in 0..3 {
        for j in 0..2 {
            let geo = global.extract((xs[i], xs[i + 1]), (ys[j], ys[j + 1]))?;
            let space = mesh(setup, c.base_elements, c.base_elements, (i + j) % 2 == 1);
            patches.push(Patch::new(format!("patch{}", idx(i, j) + 1), geo, space, vec![], mat.clone())?);
        }
    }
    let mut interfaces = Vec::new();
    for i in 0..3 {
        interfaces.push(edge_pair(idx(i, 0), Edge::V1, idx(i, 1), Edge::V0));
    }
    for i in 0..2 {
        for j in 0..2 {
            interfaces.push(edge_pair(idx(i, j), Edge::U1, idx(i + 1, j), Edge::U0));
        }
    }
    let crosspoints = (0..2)
        .map(|i| CrossPoint {
            incident: vec![
                (idx(i, 0), [1.0, 1.0]),
                (idx(i, 1), [1.0, 0.0]),
                (idx(i + 1, 0), [0.0, 1.0]),
                (idx(i + 1, 1), [0.0, 0.0]),
            ],
        })
        .collect();
    let diaphragm = [false, true, true];
    let mut bcs = Vec::new();
    for j in 0..2 {
        bcs.push(DirichletBc::components(idx(0, j), Edge::U0, diaphragm));
        bcs.push(DirichletBc::components(idx(2, j), Edge::U1, diaphragm));
    }
    let model = MultiPatchModel { patches, interfaces, crosspoints };
    Ok(BuiltCase {
        problem: Problem {
            model,
            bcs,
            body_force: Some(Arc::new(move |_| [0.0, 0.0, -load])),
            point_loads: vec![],
            pins: vec![Pin { patch: idx(0, 0), uv: [0.0, 0.0], component: 0 }],
            exact: None,
        },
        // The response is linear in the load.
        quantity: Quantity::Deflection {
            patch: idx(1, 1),
            uv: [0.5, 1.0],
            reference: SCORDELIS_REFERENCE * load / SCORDELIS_LOAD,
        },
    })
}

pub const L_BEAM_LENGTH: f64 = 2.0;
pub const L_BEAM_LEG: f64 = 0.5;
pub const L_BEAM_LOAD: f64 = 10.0;

fn l_beam(setup: &CaseSetup) -> Result<BuiltCase> {
    let c = case(CaseId::LBeam);
    let l = setup.params.length.unwrap_or(L_BEAM_LENGTH);
    let b = setup.params.leg.unwrap_or(L_BEAM_LEG);
    let load = setup.params.load.unwrap_or(L_BEAM_LOAD);
    let mat = isotropic(&c, setup.thickness);
    // Flange in z = 0 (η along +y), web in y = 0 (η along +z); they share the edge η = 0.
    let flange = isoshell_geometry::bilinear([[[0.0, 0.0, 0.0], [0.0, b, 0.0]], [[l, 0.0, 0.0], [l, b, 0.0]]]);
    let web = isoshell_geometry::bilinear([[[0.0, 0.0, 0.0], [0.0, 0.0, b]], [[l, 0.0, 0.0], [l, 0.0, b]]]);
    let n = c.base_elements;
    let patches = vec![
        Patch::new("flange", flange, mesh(setup, 2 * n, n, false), vec![], mat.clone())?,
        Patch::new("web", web, mesh(setup, 2 * n, n, true), vec![], mat)?,
    ];
    let interfaces = vec![edge_pair(0, Edge::V0, 1, Edge::V0)];
    let bcs = vec![DirichletBc::clamped(0, Edge::U0), DirichletBc::clamped(1, Edge::U0)];
    let model = MultiPatchModel { patches, interfaces, crosspoints: vec![] };
    Ok(BuiltCase {
        problem: Problem {
            model,
            bcs,
            body_force: None,
            point_loads: vec![PointLoad { patch: 0, uv: [1.0, 1.0], force: [0.0, 0.0, -load] }],
            pins: vec![],
            exact: None,
        },
        quantity: Quantity::Angle { tip: (0, [1.0, 1.0]), corner: [(0, [1.0, 0.0]), (1, [1.0, 0.0])] },
    })
}

/// Interface curves of the three-patch strip in physical coordinates.
pub fn three_patch_curves() -> [SplineCurve<2>; 2] {
    [
        quadratic(vec![[0.62, 0.0], [0.54, 0.3], [0.74, 0.7], [0.66, 1.0]]),
        quadratic(vec![[1.34, 0.0], [1.26, 0.3], [1.46, 0.7], [1.38, 1.0]]),
    ]
}

fn three_patch(setup: &CaseSetup) -> Result<BuiltCase> {
    let c = case(CaseId::ThreePatch);
    check_cartesian("three-patch", three_patch_field, &[[0.3, 0.7, 0.0], [1.2, 0.9, 0.0]])?;
    let mat = isotropic(&c, setup.thickness);
    let [ca, cb] = three_patch_curves();
    let boxes = [(0.0, 0.8), (0.5, 1.5), (1.2, 2.0)];
    let n = c.base_elements;
    let mut patches = Vec::new();
    let mut refs = Vec::new();
    for (k, &(x0, x1)) in boxes.iter().enumerate() {
        let geo = flat_rectangle(x0, x1, 0.0, 1.0);
        let local = [affine_curve(&ca, x0, x1, 0.0, 1.0), affine_curve(&cb, x0, x1, 0.0, 1.0)];
        // Curves run upwards, so their left side is the smaller x.
        let trims = match k {
            0 => vec![TrimCurve::new(local[0].clone(), true)?],
            1 => vec![TrimCurve::new(local[0].clone(), false)?, TrimCurve::new(local[1].clone(), true)?],
            _ => vec![TrimCurve::new(local[1].clone(), false)?],
        };
        patches.push(Patch::new(format!("patch{}", k + 1), geo, mesh(setup, n, n, k == 1), trims, mat.clone())?);
        refs.push(local);
    }
    let interfaces = vec![
        InterfaceDef {
            patches: [0, 1],
            curves: [CurveRef::new(refs[0][0].clone(), [0.0, 1.0]), CurveRef::new(refs[1][0].clone(), [0.0, 1.0])],
            active: None,
        },
        InterfaceDef {
            patches: [1, 2],
            curves: [CurveRef::new(refs[1][1].clone(), [0.0, 1.0]), CurveRef::new(refs[2][1].clone(), [0.0, 1.0])],
            active: None,
        },
    ];
    let ex: Arc<dyn ExactSolution> = Arc::new(CartesianField(three_patch_field));
    let bcs = boundary_bcs(
        &[
            (0, vec![Edge::U0, Edge::V0, Edge::V1]),
            (1, vec![Edge::V0, Edge::V1]),
            (2, vec![Edge::U1, Edge::V0, Edge::V1]),
        ],
        &ex,
    );
    let model = MultiPatchModel { patches, interfaces, crosspoints: vec![] };
    Ok(BuiltCase {
        problem: Problem { model, bcs, body_force: None, point_loads: vec![], pins: vec![], exact: Some(ex.clone()) },
        quantity: Quantity::Errors(ex),
    })
}

/// Biquadratic astroid-shaped planar map with control points `P_ij` ordered along `(ξ, η)`.
pub fn astroid_geometry() -> SurfaceMap {
    let x = [[0.0, 1.0 / 3.0, 0.0], [0.5, 0.5, 0.5], [1.0, 2.0 / 3.0, 1.0]];
    let y = [[0.0, 0.5, 1.0], [1.0 / 3.0, 0.5, 2.0 / 3.0], [0.0, 0.5, 1.0]];
    let mut pts = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            pts.push([x[i][j], y[i][j], 0.0]);
        }
    }
    let space = SplineSpace::surface(KnotVector::uniform(2, 1), KnotVector::uniform(2, 1));
    SurfaceMap::new(space, pts).expect("valid map")
}

/// Parametric interface curves of the astroid.
pub fn astroid_curves() -> [SplineCurve<2>; 2] {
    [quadratic(vec![[0.35, 0.0], [0.27, 0.5], [0.35, 1.0]]), quadratic(vec![[0.65, 0.0], [0.73, 0.5], [0.65, 1.0]])]
}

fn trimmed_copies(
    setup: &CaseSetup,
    c: &BenchmarkCase,
    geo: &SurfaceMap,
    trims: Vec<Vec<TrimCurve>>,
    shifted: &[usize],
) -> Result<Vec<Patch>> {
    let mat = isotropic(c, setup.thickness);
    let n = c.base_elements;
    trims
        .into_iter()
        .enumerate()
        .map(|(k, t)| {
            Patch::new(format!("patch{}", k + 1), geo.clone(), mesh(setup, n, n, shifted.contains(&k)), t, mat.clone())
        })
        .collect()
}

fn shared(curve: &SplineCurve<2>, a: usize, b: usize, range: [f64; 2]) -> InterfaceDef {
    InterfaceDef {
        patches: [a, b],
        curves: [CurveRef::new(curve.clone(), range), CurveRef::new(curve.clone(), range)],
        active: None,
    }
}

fn astroid(setup: &CaseSetup) -> Result<BuiltCase> {
    let c = case(CaseId::Astroid);
    check_parametric("astroid", |uv| astroid_field(uv).to_vec(), &[[0.3, 0.6], [0.8, 0.1]])?;
    let geo = astroid_geometry();
    let [ca, cb] = astroid_curves();
    let trims = vec![
        vec![TrimCurve::new(ca.clone(), true)?],
        vec![TrimCurve::new(ca.clone(), false)?, TrimCurve::new(cb.clone(), true)?],
        vec![TrimCurve::new(cb.clone(), false)?],
    ];
    let patches = trimmed_copies(setup, &c, &geo, trims, &[1])?;
    let interfaces = vec![shared(&ca, 0, 1, [0.0, 1.0]), shared(&cb, 1, 2, [0.0, 1.0])];
    let ex: Arc<dyn ExactSolution> = Arc::new(ParametricField(astroid_field));
    let bcs = boundary_bcs(
        &[
            (0, vec![Edge::U0, Edge::V0, Edge::V1]),
            (1, vec![Edge::V0, Edge::V1]),
            (2, vec![Edge::U1, Edge::V0, Edge::V1]),
        ],
        &ex,
    );
    let model = MultiPatchModel { patches, interfaces, crosspoints: vec![] };
    Ok(BuiltCase {
        problem: Problem { model, bcs, body_force: None, point_loads: vec![], pins: vec![], exact: Some(ex.clone()) },
        quantity: Quantity::Errors(ex),
    })
}

/// Default cylinder: radius 1, 90° arc along `ξ`, height 1 along `η`.
pub const CYLINDER_RADIUS: f64 = 1.0;
pub const CYLINDER_SPAN: f64 = 90.0;
pub const CYLINDER_HEIGHT: f64 = 1.0;

/// Circular arc of `span` degrees as one rational quadratic along `ξ`, straight along `η`.
pub fn cylinder_geometry(radius: f64, span: f64, height: f64) -> SurfaceMap {
    let half = 0.5 * span.to_radians();
    let w = half.cos();
    let arc =
        [[radius, 0.0], [radius, radius * half.tan()], [radius * (2.0 * half).cos(), radius * (2.0 * half).sin()]];
    let mut pts = Vec::new();
    let mut weights = Vec::new();
    for (i, a) in arc.iter().enumerate() {
        for z in [0.0, height] {
            pts.push([a[0], a[1], z]);
            weights.push(if i == 1 { w } else { 1.0 });
        }
    }
    let space = SplineSpace::new(vec![KnotVector::uniform(2, 1), KnotVector::uniform(1, 1)], Some(weights))
        .expect("valid rational space");
    SurfaceMap::new(space, pts).expect("valid map")
}

/// Crossing parametric interface curves of the cylinder; both pass `(0.52, 0.52)` at `t = 1/2`.
pub fn cylinder_curves() -> [SplineCurve<2>; 2] {
    [
        quadratic(vec![[0.37, 0.0], [0.47, 0.37], [0.57, 0.67], [0.67, 1.0]]),
        quadratic(vec![[0.0, 0.67], [0.37, 0.57], [0.67, 0.47], [1.0, 0.37]]),
    ]
}

pub const CYLINDER_CROSSING: [f64; 2] = [0.52, 0.52];

fn cylinder(setup: &CaseSetup) -> Result<BuiltCase> {
    let c = case(CaseId::Cylinder);
    check_parametric("cylinder", |uv| vec![cylinder_amplitude(uv)], &[[0.3, 0.6], [0.8, 0.1]])?;
    let p = setup.params;
    let geo = cylinder_geometry(
        p.radius.unwrap_or(CYLINDER_RADIUS),
        p.span.unwrap_or(CYLINDER_SPAN),
        p.height.unwrap_or(CYLINDER_HEIGHT),
    );
    let [cv, ch] = cylinder_curves();
    // The vertical curve runs upwards (left is smaller ξ), the horizontal one rightwards
    // (left is larger η). Patches: SW, SE, NW, NE.
    let trims = vec![
        vec![TrimCurve::new(cv.clone(), true)?, TrimCurve::new(ch.clone(), false)?],
        vec![TrimCurve::new(cv.clone(), false)?, TrimCurve::new(ch.clone(), false)?],
        vec![TrimCurve::new(cv.clone(), true)?, TrimCurve::new(ch.clone(), true)?],
        vec![TrimCurve::new(cv.clone(), false)?, TrimCurve::new(ch.clone(), true)?],
    ];
    let patches = trimmed_copies(setup, &c, &geo, trims, &[1, 2])?;
    let interfaces = vec![
        shared(&cv, 0, 1, [0.0, 0.5]),
        shared(&cv, 2, 3, [0.5, 1.0]),
        shared(&ch, 0, 2, [0.0, 0.5]),
        shared(&ch, 1, 3, [0.5, 1.0]),
    ];
    let crosspoints = vec![CrossPoint { incident: (0..4).map(|p| (p, CYLINDER_CROSSING)).collect() }];
    let ex: Arc<dyn ExactSolution> = Arc::new(NormalField(cylinder_amplitude));
    let bcs = boundary_bcs(
        &[
            (0, vec![Edge::U0, Edge::V0]),
            (1, vec![Edge::U1, Edge::V0]),
            (2, vec![Edge::U0, Edge::V1]),
            (3, vec![Edge::U1, Edge::V1]),
        ],
        &ex,
    );
    let model = MultiPatchModel { patches, interfaces, crosspoints };
    Ok(BuiltCase {
        problem: Problem { model, bcs, body_force: None, point_loads: vec![], pins: vec![], exact: Some(ex.clone()) },
        quantity: Quantity::Errors(ex),
    })
}

/// A model file on refinement `level`. `degree` replaces every patch degree and
/// `thickness` every isotropic thickness when given.
pub fn build_model(file: &ModelFile, degree: Option<usize>, level: usize, thickness: Option<f64>) -> Result<BuiltCase> {
    let mut file = file.clone();
    for p in &mut file.patches {
        if let Some(d) = degree {
            p.degree = d;
        }
        if !(2..=4).contains(&p.degree) {
            return Err(Error::UnsupportedDegree(p.degree));
        }
        if let (Some(t), Material::Isotropic { t: pt, .. }) = (thickness, &mut p.material) {
            *pt = t;
        }
    }
    Ok(BuiltCase { problem: file.problem(level)?, quantity: Quantity::Probes(file.probes.clone()) })
}
