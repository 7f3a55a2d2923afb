use nalgebra::DMatrix;
use proptest::prelude::*;

use isoshell_core::error::Error;
use isoshell_core::math::Vec3;
use isoshell_coupling::analysis::{analyze, AnalysisOptions, Problem};
use isoshell_coupling::{
    assemble_penalty, build_interface, cross_point_constraints, jump_operator, penalty_formula, penalty_parameters,
    projection_matrices, Beta, CrossPoint, CrossPointConstraint, CurveRef, InterfaceDef, InterfaceSpace, JumpOperator,
    ModelFile, MultiPatchModel, PenaltyStrategy, MODEL_VERSION,
};
use isoshell_geometry::{flat_rectangle, Edge};
use isoshell_shell::{DirichletBc, DofMap, Material, Patch};
use isoshell_spline::{KnotVector, SplineCurve, SplineSpace};
use isoshell_trimming::{roots_on_line, TrimCurve};

const E: f64 = 1e6;
const NU: f64 = 0.3;
const T: f64 = 0.005;

fn material() -> Material {
    Material::Isotropic { e: E, nu: NU, t: T }
}

fn square(x0: f64, y0: f64, p: usize, n: usize) -> Patch {
    let space = SplineSpace::surface(KnotVector::uniform(p, n), KnotVector::uniform(p, n));
    Patch::new("square", flat_rectangle(x0, x0 + 1.0, y0, y0 + 1.0), space, Vec::new(), material()).unwrap()
}

fn edge_interface(patches: [usize; 2], edges: [Edge; 2]) -> InterfaceDef {
    InterfaceDef { patches, curves: [CurveRef::edge(edges[0]), CurveRef::edge(edges[1])], active: None }
}

/// `[0,1]²` and `[1,2]×[0,1]` joined along x = 1.
fn two_squares(p: usize, na: usize, nb: usize) -> MultiPatchModel {
    MultiPatchModel {
        patches: vec![square(0.0, 0.0, p, na), square(1.0, 0.0, p, nb)],
        interfaces: vec![edge_interface([0, 1], [Edge::U1, Edge::U0])],
        crosspoints: Vec::new(),
    }
}

/// Four unit squares around the point (1, 1).
fn four_squares(p: usize, n: usize) -> MultiPatchModel {
    MultiPatchModel {
        patches: vec![square(0.0, 0.0, p, n), square(1.0, 0.0, p, n), square(0.0, 1.0, p, n), square(1.0, 1.0, p, n)],
        interfaces: vec![
            edge_interface([0, 1], [Edge::U1, Edge::U0]),
            edge_interface([2, 3], [Edge::U1, Edge::U0]),
            edge_interface([0, 2], [Edge::V1, Edge::V0]),
            edge_interface([1, 3], [Edge::V1, Edge::V0]),
        ],
        crosspoints: vec![CrossPoint {
            incident: vec![(0, [1.0, 1.0]), (1, [0.0, 1.0]), (2, [1.0, 0.0]), (3, [0.0, 0.0])],
        }],
    }
}

struct Setup {
    model: MultiPatchModel,
    dofs: DofMap,
    iface: InterfaceSpace,
    op: JumpOperator,
}

fn setup(model: MultiPatchModel) -> Setup {
    let dofs = DofMap::new(&model.patches);
    let iface = build_interface(&model, 0, None).unwrap();
    let op = jump_operator(&model, &dofs, &iface).unwrap();
    Setup { model, dofs, iface, op }
}

/// Coefficients of the affine field `u(x) = a x + b` on flat bilinear patches, where
/// control points sit at the mapped Greville abscissae.
fn affine_field(model: &MultiPatchModel, dofs: &DofMap, a: [[f64; 3]; 3], b: Vec3) -> Vec<f64> {
    let mut u = vec![0.0; dofs.n_dofs];
    for (pi, p) in model.patches.iter().enumerate() {
        let (gu, gv) = (p.space.dir(0).greville(), p.space.dir(1).greville());
        for (i, &s) in gu.iter().enumerate() {
            for (j, &r) in gv.iter().enumerate() {
                let x = p.geometry.eval([s, r]).unwrap();
                if let Some(d) = dofs.dof(pi, p.space.flat(i, j), 0) {
                    for c in 0..3 {
                        u[d + c] = b[c] + (0..3).map(|k| a[c][k] * x[k]).sum::<f64>();
                    }
                }
            }
        }
    }
    u
}

fn strategies() -> Vec<PenaltyStrategy> {
    vec![
        PenaltyStrategy::Classic,
        PenaltyStrategy::scaled(),
        PenaltyStrategy::projected(Beta::PPlus1),
        PenaltyStrategy::Projected { beta: Beta::PMinus1, lumped: true },
    ]
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn conforming_interface_knots_and_reduced_space() {
    let s = setup(two_squares(2, 3, 3));
    assert!(close(&s.iface.knots.breakpoints(), &[0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0], 1e-12));
    assert_eq!(s.iface.reduced.dir(0).degree(), 0);
    assert_eq!(s.iface.reduced_dim(), 3);
    assert!((s.iface.measure - 1.0).abs() < 1e-12);
}

#[test]
fn non_conforming_mesh_merges_both_sides() {
    let s = setup(two_squares(2, 3, 4));
    let expected = [0.0, 0.25, 1.0 / 3.0, 0.5, 2.0 / 3.0, 0.75, 1.0];
    assert!(close(&s.iface.mesh, &expected, 1e-12), "{:?}", s.iface.mesh);
}

/// Interior breakpoints of a quadratic trimming interface match the grid crossings
/// counted by sampling the curve densely.
#[test]
fn trimmed_interface_breakpoints_count_grid_crossings() {
    let kv = KnotVector::uniform(2, 1);
    let curve = SplineCurve::new(kv, vec![[0.0, 0.3], [0.5, 0.85], [1.0, 0.4]], None).unwrap();
    let trimmed = |n: usize, keep_left: bool| {
        let space = SplineSpace::surface(KnotVector::uniform(2, n), KnotVector::uniform(2, n));
        let trim = TrimCurve::new(curve.clone(), keep_left).unwrap();
        Patch::new("half", flat_rectangle(0.0, 1.0, 0.0, 1.0), space, vec![trim], material()).unwrap()
    };
    let curve_ref = CurveRef::new(curve.clone(), [0.0, 1.0]);
    let model = MultiPatchModel {
        patches: vec![trimmed(8, true), trimmed(5, false)],
        interfaces: vec![InterfaceDef { patches: [0, 1], curves: [curve_ref.clone(), curve_ref], active: Some(0) }],
        crosspoints: Vec::new(),
    };
    let iface = build_interface(&model, 0, None).unwrap();
    assert_eq!(iface.active, 0);

    let samples = 200_000;
    let pts: Vec<[f64; 2]> = (0..=samples).map(|k| curve.eval(k as f64 / samples as f64).unwrap()).collect();
    let mut crossings: Vec<f64> = Vec::new();
    for axis in 0..2 {
        for k in 1..8 {
            let c = k as f64 / 8.0;
            for (i, w) in pts.windows(2).enumerate() {
                if (w[0][axis] < c) != (w[1][axis] < c) {
                    crossings.push(i as f64 / samples as f64);
                }
            }
        }
    }
    crossings.sort_by(|a, b| a.partial_cmp(b).unwrap());
    crossings.dedup_by(|a, b| (*a - *b).abs() < 1e-4);
    let interior = iface.knots.breakpoints().len() - 2;
    assert_eq!(interior, crossings.len(), "{:?} vs {crossings:?}", iface.knots.breakpoints());

    let segments = curve.bezier_segments();
    let direct: usize = (0..2)
        .flat_map(|axis| (1..8).map(move |k| (axis, k as f64 / 8.0)))
        .map(|(axis, c)| roots_on_line(&segments, axis, c, None).unwrap().len())
        .sum();
    assert_eq!(direct, crossings.len());
}

#[test]
fn penalty_formula_reference_values() {
    let d = 1.0 - NU * NU;
    let pp = penalty_formula(3.0, 1.0, 0.25, E * T / d, E * T.powi(3) / (12.0 * d));
    assert!((pp.disp - 351_648.351_648).abs() < 1e-3, "{}", pp.disp);
    assert!((pp.rot - 0.732_600_732_6).abs() < 1e-9, "{}", pp.rot);

    let s = setup(two_squares(2, 4, 4));
    assert!((s.iface.h - 0.25).abs() < 1e-12);
    let mats = [&s.model.patches[0].material, &s.model.patches[1].material];
    let from_iface = penalty_parameters(&PenaltyStrategy::projected(Beta::PPlus1), &s.iface, mats);
    assert!((from_iface.disp / pp.disp - 1.0).abs() < 1e-12);
    assert_eq!(penalty_parameters(&PenaltyStrategy::Classic, &s.iface, mats).disp, 1e9);
    assert_eq!(penalty_parameters(&PenaltyStrategy::Classic, &s.iface, mats).rot, 1e9);
    for st in &strategies()[1..] {
        let pp = penalty_parameters(st, &s.iface, mats);
        assert!((pp.rot / pp.disp / (T * T / 12.0) - 1.0).abs() < 1e-12, "{st}");
    }
}

#[test]
fn degree_zero_projection_averages() {
    let s = setup(two_squares(2, 1, 1));
    let proj = projection_matrices(&s.iface, &s.op, false).unwrap();
    assert_eq!(proj.r, 1);
    let c = proj.project_values(&s.op, |q| s.iface.points[q].s);
    assert!((c[0] - 0.5).abs() < 1e-14);
}

#[test]
fn mass_matrix_structure() {
    for (p, band) in [(2, 0), (3, 1)] {
        let s = setup(two_squares(p, 5, 5));
        let proj = projection_matrices(&s.iface, &s.op, false).unwrap();
        assert_eq!(proj.diagonal, p == 2);
        let r = proj.r;
        for i in 0..r {
            for j in 0..r {
                let m = proj.mass[i * r + j];
                assert!((m - proj.mass[j * r + i]).abs() < 1e-15);
                if i.abs_diff(j) > band {
                    assert_eq!(m, 0.0, "p={p} ({i},{j})");
                } else if i == j {
                    assert!(m > 0.0);
                }
            }
        }
    }
}

#[test]
fn reduced_space_members_project_to_themselves() {
    for (p, nb) in [(2, 4), (3, 4), (3, 3), (4, 2)] {
        let s = setup(two_squares(p, 3, nb));
        let proj = projection_matrices(&s.iface, &s.op, false).unwrap();
        let coeffs: Vec<f64> = (0..proj.r).map(|k| (k as f64 * 0.7).sin() + 0.3).collect();
        let member = |q: usize| {
            let pj = &s.op.points[q];
            pj.rho.iter().enumerate().map(|(k, r)| r * coeffs[pj.rho_first + k]).sum::<f64>()
        };
        let back = proj.project_values(&s.op, member);
        assert!(close(&back, &coeffs, 1e-12), "p={p}: {back:?}");
    }
}

#[test]
fn continuous_fields_have_no_jump_and_no_penalty_energy() {
    let a = [[0.3, -0.2, 0.0], [0.1, 0.4, 0.0], [0.5, -0.7, 0.0]];
    for (p, nb) in [(2, 3), (3, 3), (2, 5), (3, 4)] {
        let s = setup(two_squares(p, 3, nb));
        let u = affine_field(&s.model, &s.dofs, a, [0.2, -0.1, 0.3]);
        let local = s.op.gather(&u);
        let proj = projection_matrices(&s.iface, &s.op, false).unwrap();
        let (d, r) = proj.project(&local);
        assert!(d.iter().chain(&r).all(|x| x.abs() < 1e-12), "p={p} nb={nb}");
        let unorm2: f64 = local.iter().map(|x| x * x).sum();
        let mats = [&s.model.patches[0].material, &s.model.patches[1].material];
        for st in strategies() {
            let pp = penalty_parameters(&st, &s.iface, mats);
            let block = assemble_penalty(&s.iface, &s.op, &st, pp).unwrap();
            let e = block.energy(&u);
            assert!(e.abs() < 1e-12 * block.max_abs() * unorm2, "{st} p={p} nb={nb}: {e}");
        }
    }
}

#[test]
fn rigid_translation_has_no_penalty_energy() {
    let s = setup(two_squares(3, 2, 3));
    let u = affine_field(&s.model, &s.dofs, [[0.0; 3]; 3], [1.0, -2.0, 0.5]);
    let unorm2: f64 = s.op.gather(&u).iter().map(|x| x * x).sum();
    let mats = [&s.model.patches[0].material, &s.model.patches[1].material];
    for st in strategies() {
        let block = assemble_penalty(&s.iface, &s.op, &st, penalty_parameters(&st, &s.iface, mats)).unwrap();
        assert!(block.energy(&u).abs() < 1e-12 * block.max_abs() * unorm2, "{st}");
    }
}

#[test]
fn four_patch_cross_point_is_tied() {
    let model = four_squares(2, 2);
    let dofs = DofMap::new(&model.patches);
    let ifaces: Vec<_> = (0..4).map(|l| build_interface(&model, l, None).unwrap()).collect();
    let st = PenaltyStrategy::projected(Beta::PPlus1);
    let params: Vec<_> = ifaces
        .iter()
        .map(|i| {
            penalty_parameters(&st, i, [&model.patches[i.patches[0]].material, &model.patches[i.patches[1]].material])
        })
        .collect();
    let cons = cross_point_constraints(&model, &dofs, &ifaces, &params).unwrap();
    assert_eq!(cons.len(), 1);
    let CrossPointConstraint::Ties(ties) = &cons[0] else { panic!("expected ties") };
    assert_eq!(ties.len(), 9);
    let mut involved: Vec<usize> = ties.iter().flat_map(|&(s, m)| [s, m]).collect();
    involved.sort_unstable();
    involved.dedup();
    assert_eq!(involved.len(), 12);

    let none = two_squares(2, 2, 2);
    let dofs = DofMap::new(&none.patches);
    let iface = build_interface(&none, 0, None).unwrap();
    let pp = penalty_parameters(&st, &iface, [&none.patches[0].material, &none.patches[1].material]);
    assert!(cross_point_constraints(&none, &dofs, &[iface], &[pp]).unwrap().is_empty());
}

#[test]
fn tied_solve_agrees_at_the_cross_point() {
    let load: Vec3 = [0.0, 0.0, -1.0];
    let problem = Problem {
        model: four_squares(2, 3),
        bcs: vec![
            DirichletBc::clamped(0, Edge::U0),
            DirichletBc::clamped(2, Edge::U0),
            DirichletBc::fixed(1, Edge::U1),
            DirichletBc::fixed(3, Edge::U1),
        ],
        body_force: Some(std::sync::Arc::new(move |_: Vec3| load)),
        point_loads: Vec::new(),
        pins: Vec::new(),
        exact: None,
    };
    let res = analyze(&problem, &AnalysisOptions::default()).unwrap();
    let incident = &problem.model.crosspoints[0].incident;
    let us: Vec<Vec3> =
        incident.iter().map(|&(p, uv)| res.solution.displacement(&problem.model.patches, p, uv).unwrap()).collect();
    assert!(us[0][2] < 0.0);
    for u in &us[1..] {
        for c in 0..3 {
            assert!((u[c] - us[0][c]).abs() <= 1e-12 * us[0][2].abs().max(1e-300), "{us:?}");
        }
    }
}

const TWO_PLATES: &str = include_str!("../../../configs/models/two-plates.json");

#[test]
fn model_file_round_trip_and_version() {
    let file = ModelFile::from_json(TWO_PLATES).unwrap();
    let text = file.to_json().unwrap();
    assert_eq!(ModelFile::from_json(&text).unwrap().to_json().unwrap(), text);
    let model = file.model(1).unwrap();
    assert_eq!(model.patches.len(), 2);
    assert_eq!(model.interfaces.len(), 1);

    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    value["version"] = serde_json::json!(MODEL_VERSION + 1);
    let err = ModelFile::from_json(&value.to_string()).unwrap_err();
    assert!(matches!(err, Error::Version(v) if v == MODEL_VERSION + 1), "{err}");

    let mut bad = serde_json::from_str::<serde_json::Value>(&text).unwrap();
    bad["interfaces"][0]["patches"] = serde_json::json!([0, 7]);
    assert!(ModelFile::from_json(&bad.to_string()).is_err());
    let mut extra = serde_json::from_str::<serde_json::Value>(&text).unwrap();
    extra["colour"] = serde_json::json!("red");
    assert!(ModelFile::from_json(&extra.to_string()).is_err());
}

fn min_eigenvalue(m: &faer::Mat<f64>) -> f64 {
    let n = m.nrows();
    let d = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    d.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn projection_is_orthogonal(p in 2usize..=4, na in 1usize..=4, nb in 1usize..=4, seed in any::<u64>()) {
        let s = setup(two_squares(p, na, nb));
        let proj = projection_matrices(&s.iface, &s.op, false).unwrap();
        let mut state = seed | 1;
        let u: Vec<f64> = (0..s.op.ncols())
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
            })
            .collect();
        prop_assert!(proj.residual(&u) < 1e-11);
    }

    #[test]
    fn penalty_blocks_are_psd(p in 2usize..=3, na in 1usize..=3, nb in 1usize..=3, k in 0usize..4) {
        let s = setup(two_squares(p, na, nb));
        let st = strategies()[k];
        let mats = [&s.model.patches[0].material, &s.model.patches[1].material];
        let block = assemble_penalty(&s.iface, &s.op, &st, penalty_parameters(&st, &s.iface, mats)).unwrap();
        prop_assume!(block.columns.len() <= 200);
        let min = min_eigenvalue(&block.matrix);
        prop_assert!(min >= -1e-9 * block.max_abs(), "{} min eigenvalue {}", st, min);
    }
}
