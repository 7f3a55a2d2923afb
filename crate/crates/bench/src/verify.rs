//! Property suites run by `bench verify` and the acceptance tests. Every check compares
//! against an oracle that does not share code with the checked path.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_6};
use std::fmt;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use isoshell_core::error::Result;
use isoshell_coupling::analysis::{assemble, AnalysisOptions};
use isoshell_coupling::{
    build_interface, jump_operator, projection_matrices, CurveRef, InterfaceDef, MultiPatchModel, PenaltyStrategy,
};
use isoshell_geometry::{flat_rectangle, Edge};
use isoshell_shell::{laminate_abd, Assembler, DofMap, Material, Patch, Ply};
use isoshell_spline::{eval_basis, KnotVector, SplineCurve, SplineSpace};
use isoshell_trimming::{classify_elements, TrimCurve, TrimmedDomain};

use crate::cases::{build_case, CaseId, CaseSetup};

/// One measured quantity against its bound; passes when `value < tol`.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tol: f64,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self { name: name.into(), value, tol }
    }

    pub fn passed(&self) -> bool {
        self.value < self.tol
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "ok  " } else { "FAIL" };
        write!(f, "{status} {:<48} {:.3e} (< {:.0e})", self.name, self.value, self.tol)
    }
}

/// Naive recursive Cox-de Boor definition.
fn cox_de_boor(t: &[f64], i: usize, p: usize, u: f64) -> f64 {
    if p == 0 {
        let last = t[t.len() - 1];
        let in_span = t[i] <= u && u < t[i + 1];
        let at_end = u == last && t[i + 1] == last && t[i] < t[i + 1];
        return if in_span || at_end { 1.0 } else { 0.0 };
    }
    let mut v = 0.0;
    if t[i + p] > t[i] {
        v += (u - t[i]) / (t[i + p] - t[i]) * cox_de_boor(t, i, p - 1, u);
    }
    if t[i + p + 1] > t[i + 1] {
        v += (t[i + p + 1] - u) / (t[i + p + 1] - t[i + 1]) * cox_de_boor(t, i + 1, p - 1, u);
    }
    v
}

fn random_knots(rng: &mut StdRng, p: usize) -> KnotVector {
    let n = rng.random_range(0..6);
    let mut br: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..0.95)).collect();
    br.sort_by(|a, b| a.partial_cmp(b).unwrap());
    br.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    let mut all = vec![0.0];
    all.extend(br);
    all.push(1.0);
    KnotVector::from_breakpoints(p, &all)
}

/// Partition of unity, recursion oracle, finite differences, knot insertion, and the
/// rational quarter circle.
pub fn spline_suite(seed: u64) -> Result<Vec<Check>> {
    let mut rng = StdRng::seed_from_u64(seed);
    let (mut pou, mut dsum, mut recursion, mut fd, mut insertion) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for p in 2..=4 {
        for _ in 0..20 {
            let kv = random_knots(&mut rng, p);
            for _ in 0..100 {
                let u: f64 = rng.random_range(0.0..=1.0);
                let b = eval_basis(&kv, u, 1)?;
                pou = pou.max((b.ders[0].iter().sum::<f64>() - 1.0).abs());
                dsum = dsum.max(b.ders[1].iter().sum::<f64>().abs());
                for (r, v) in b.ders[0].iter().enumerate() {
                    recursion = recursion.max((v - cox_de_boor(kv.knots(), b.first() + r, p, u)).abs());
                }
            }
            let h = 1e-6;
            let br = kv.breakpoints();
            for _ in 0..20 {
                let u: f64 = rng.random_range(0.02..0.98);
                if br.iter().any(|b| (b - u).abs() < 2.0 * h) {
                    continue;
                }
                let (b0, bm, bp) = (eval_basis(&kv, u, 3)?, eval_basis(&kv, u - h, 3)?, eval_basis(&kv, u + h, 3)?);
                for k in 1..=p.min(3) {
                    for r in 0..=p {
                        let d = (bp.ders[k - 1][r] - bm.ders[k - 1][r]) / (2.0 * h);
                        let exact = b0.ders[k][r];
                        fd = fd.max((d - exact).abs() / exact.abs().max(1.0));
                    }
                }
            }
            let pts: Vec<[f64; 2]> =
                (0..kv.num_basis()).map(|_| [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]).collect();
            let curve = SplineCurve::new(kv, pts, None)?;
            let new: Vec<f64> = (0..rng.random_range(1..5)).map(|_| rng.random_range(0.01..0.99)).collect();
            let fine = curve.refined(&new)?;
            for _ in 0..50 {
                let t: f64 = rng.random_range(0.0..=1.0);
                let (a, b) = (curve.eval(t)?, fine.eval(t)?);
                insertion = insertion.max((a[0] - b[0]).abs().max((a[1] - b[1]).abs()));
            }
        }
    }
    // Rational surface derivatives against differences of values.
    let mut rational_fd = 0.0f64;
    let w: Vec<f64> = (0..12).map(|k| 0.6 + 0.1 * (k % 5) as f64).collect();
    let space = SplineSpace::new(vec![KnotVector::uniform(2, 2), KnotVector::uniform(2, 1)], Some(w))?;
    for _ in 0..20 {
        let uv = [rng.random_range(0.05..0.45), rng.random_range(0.05..0.95)];
        let h = 1e-6;
        let e0 = space.eval(&uv, 1)?;
        let em = space.eval(&[uv[0] - h, uv[1]], 0)?;
        let ep = space.eval(&[uv[0] + h, uv[1]], 0)?;
        for a in 0..e0.len() {
            let d = (ep.values[a][0] - em.values[a][0]) / (2.0 * h);
            rational_fd = rational_fd.max((d - e0.values[a][1]).abs() / e0.values[a][1].abs().max(1.0));
        }
    }
    let circle = SplineCurve::new(
        KnotVector::uniform(2, 1),
        vec![[1., 0.], [1., 1.], [0., 1.]],
        Some(vec![1., FRAC_1_SQRT_2, 1.]),
    )?;
    let mut radius = 0.0f64;
    for i in 0..=32 {
        let p = circle.eval(i as f64 / 32.0)?;
        radius = radius.max((p[0].hypot(p[1]) - 1.0).abs());
    }
    Ok(vec![
        Check::new("partition of unity", pou, 1e-12),
        Check::new("first derivatives sum to zero", dsum, 1e-10),
        Check::new("recursive Cox-de Boor oracle", recursion, 1e-13),
        Check::new("derivatives vs finite differences (rel)", fd, 1e-6),
        Check::new("rational derivatives vs differences (rel)", rational_fd, 1e-6),
        Check::new("knot insertion exactness", insertion, 1e-13),
        Check::new("quarter circle radius", radius, 1e-14),
    ])
}

/// Area of the part of the unit square left of the directed line `a -> b`.
fn half_plane_area(a: [f64; 2], b: [f64; 2]) -> f64 {
    let side = |p: [f64; 2]| (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    let square = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    let mut poly = Vec::new();
    for k in 0..4 {
        let (p, q) = (square[k], square[(k + 1) % 4]);
        let (sp, sq) = (side(p), side(q));
        if sp >= 0.0 {
            poly.push(p);
        }
        if (sp > 0.0 && sq < 0.0) || (sp < 0.0 && sq > 0.0) {
            let s = sp / (sp - sq);
            poly.push([p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]);
        }
    }
    let n = poly.len();
    0.5 * (0..n).map(|k| poly[k][0] * poly[(k + 1) % n][1] - poly[(k + 1) % n][0] * poly[k][1]).sum::<f64>()
}

fn breaks(n: usize) -> Vec<f64> {
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

/// Element activity and function activity by dense point sampling.
fn sampled_active(
    domain: &TrimmedDomain,
    space: &SplineSpace,
    kept: &dyn Fn([f64; 2]) -> bool,
) -> (Vec<bool>, Vec<bool>) {
    let (ub, vb) = (&domain.u_breaks, &domain.v_breaks);
    let s = 48;
    let mut cells = Vec::new();
    for i in 0..ub.len() - 1 {
        for j in 0..vb.len() - 1 {
            let hit = (0..s).any(|a| {
                (0..s).any(|b| {
                    let u = ub[i] + (a as f64 + 0.5) / s as f64 * (ub[i + 1] - ub[i]);
                    let v = vb[j] + (b as f64 + 0.5) / s as f64 * (vb[j + 1] - vb[j]);
                    kept([u, v])
                })
            });
            cells.push(((i, j), hit));
        }
    }
    let (ku, kv) = (space.dir(0), space.dir(1));
    let mut funcs = vec![false; space.num_basis()];
    for (f, active) in funcs.iter_mut().enumerate() {
        let (a, b) = space.unflat(f);
        let (u0, u1) = (ku.knots()[a], ku.knots()[a + ku.degree() + 1]);
        let (v0, v1) = (kv.knots()[b], kv.knots()[b + kv.degree() + 1]);
        *active =
            cells.iter().any(|&((i, j), hit)| hit && ub[i] >= u0 && ub[i + 1] <= u1 && vb[j] >= v0 && vb[j + 1] <= v1);
    }
    (cells.iter().map(|c| c.1).collect(), funcs)
}

/// Parabola area, straight-chord areas, and active sets against sampling.
pub fn trimming_suite() -> Result<Vec<Check>> {
    let parabola = TrimCurve::new(SplineCurve::bezier(vec![[0.0, 0.0], [0.5, 0.0], [1.0, 1.0]]), true)?;
    let mut area = 0.0f64;
    for n in [1, 4, 8] {
        let d = classify_elements(&breaks(n), &breaks(n), std::slice::from_ref(&parabola))?;
        area = area.max((d.kept_area(3) - 2.0 / 3.0).abs());
    }
    let chords = [
        ([0.0, 0.3], [1.0, 0.75]),
        ([0.2, 0.0], [0.9, 1.0]),
        ([0.0, 0.6], [0.55, 1.0]),
        ([1.0, 0.15], [0.0, 0.4142]),
        ([0.3, 0.0], [0.3, 1.0]),
        ([0.71, 1.0], [1.0, 0.2]),
    ];
    let mut chord = 0.0f64;
    for (a, b) in chords {
        let tc = TrimCurve::new(SplineCurve::line(a, b), true)?;
        let exact = half_plane_area(a, b);
        for n in [1, 3, 4, 8] {
            let d = classify_elements(&breaks(n), &breaks(n), std::slice::from_ref(&tc))?;
            chord = chord.max((d.kept_area(3) - exact).abs());
        }
    }

    type Oracle = Box<dyn Fn([f64; 2]) -> bool>;
    let line_oracle = |a: [f64; 2], b: [f64; 2]| -> Oracle {
        Box::new(move |p: [f64; 2]| (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) > 0.0)
    };
    // Quadratic graphs y = f(x) and x = g(y) in Bezier form.
    let f = |x: f64| 0.2 + 0.9 * x - 0.6 * x * x;
    let g = |y: f64| 0.8 - 0.9 * y + 0.3 * y * y;
    let mut cases: Vec<(TrimCurve, Oracle)> = vec![
        (parabola, Box::new(|p: [f64; 2]| p[1] > p[0] * p[0])),
        (
            TrimCurve::new(SplineCurve::bezier(vec![[0.0, 0.2], [0.5, 0.65], [1.0, 0.5]]), true)?,
            Box::new(move |p: [f64; 2]| p[1] > f(p[0])),
        ),
        (
            TrimCurve::new(SplineCurve::bezier(vec![[0.8, 0.0], [0.35, 0.5], [0.2, 1.0]]), true)?,
            Box::new(move |p: [f64; 2]| p[0] < g(p[1])),
        ),
    ];
    for (a, b) in chords {
        cases.push((TrimCurve::new(SplineCurve::line(a, b), true)?, line_oracle(a, b)));
    }
    let (mut cell_miss, mut func_miss) = (0usize, 0usize);
    for (tc, kept) in &cases {
        for n in [3, 4, 7, 8] {
            for p in [2, 3] {
                let d = classify_elements(&breaks(n), &breaks(n), std::slice::from_ref(tc))?;
                let space = SplineSpace::surface(KnotVector::uniform(p, n), KnotVector::uniform(p, n));
                let (cells, funcs) = sampled_active(&d, &space, kept.as_ref());
                let (nu, nv) = d.shape();
                for i in 0..nu {
                    for j in 0..nv {
                        cell_miss += usize::from(d.cell(i, j).is_active() != cells[i * nv + j]);
                    }
                }
                let active = d.active_functions(&space);
                func_miss += active.iter().zip(&funcs).filter(|(a, b)| a != b).count();
            }
        }
    }
    Ok(vec![
        Check::new("parabola-trimmed square area", area, 1e-10),
        Check::new("straight-chord areas", chord, 1e-13),
        Check::new("active elements vs sampling (mismatches)", cell_miss as f64, 0.5),
        Check::new("active functions vs sampling (mismatches)", func_miss as f64, 0.5),
    ])
}

/// Orthogonality and idempotence of the interface projection on benchmark interfaces,
/// and the degree-0 average example.
pub fn projection_suite(seed: u64) -> Result<Vec<Check>> {
    let mut rng = StdRng::seed_from_u64(seed);
    let (mut ortho, mut idem) = (0.0f64, 0.0f64);
    let setups = [
        (CaseId::FourPatch, 2, 1),
        (CaseId::FourPatch, 3, 1),
        (CaseId::ThreePatch, 2, 1),
        (CaseId::Astroid, 3, 0),
        (CaseId::Cylinder, 2, 1),
        (CaseId::LBeam, 3, 0),
    ];
    for (id, degree, level) in setups {
        let built = build_case(&CaseSetup::new(id, degree, level))?;
        let model = &built.problem.model;
        let dofs = DofMap::new(&model.patches);
        for l in 0..model.interfaces.len() {
            let iface = build_interface(model, l, None)?;
            let op = jump_operator(model, &dofs, &iface)?;
            let proj = projection_matrices(&iface, &op, false)?;
            for _ in 0..5 {
                let u: Vec<f64> = (0..op.ncols()).map(|_| rng.random_range(-1.0..1.0)).collect();
                ortho = ortho.max(proj.residual(&u));
                let c: Vec<f64> = (0..proj.r).map(|_| rng.random_range(-1.0..1.0)).collect();
                let g = |q: usize| {
                    let pj = &op.points[q];
                    pj.rho.iter().enumerate().map(|(k, r)| r * c[pj.rho_first + k]).sum::<f64>()
                };
                let back = proj.project_values(&op, g);
                idem = idem.max(back.iter().zip(&c).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
            }
        }
    }

    // Two conforming single-element quadratic patches: the reduced space is one constant.
    let mat = Material::Isotropic { e: 1.0, nu: 0.0, t: 0.1 };
    let space = SplineSpace::surface(KnotVector::uniform(2, 1), KnotVector::uniform(2, 1));
    let patches = vec![
        Patch::new("left", flat_rectangle(0.0, 1.0, 0.0, 1.0), space.clone(), vec![], mat.clone())?,
        Patch::new("right", flat_rectangle(1.0, 2.0, 0.0, 1.0), space, vec![], mat)?,
    ];
    let model = MultiPatchModel {
        interfaces: vec![InterfaceDef {
            patches: [0, 1],
            curves: [CurveRef::edge(Edge::U1), CurveRef::edge(Edge::U0)],
            active: None,
        }],
        patches,
        crosspoints: vec![],
    };
    let dofs = DofMap::new(&model.patches);
    let iface = build_interface(&model, 0, None)?;
    let op = jump_operator(&model, &dofs, &iface)?;
    let proj = projection_matrices(&iface, &op, false)?;
    let avg = proj.project_values(&op, |q| iface.points[q].s);
    let average = if avg.len() == 1 { (avg[0] - 0.5).abs() } else { f64::INFINITY };

    Ok(vec![
        Check::new("projection orthogonality residual", ortho, 1e-11),
        Check::new("projection idempotence", idem, 1e-12),
        Check::new("degree-0 projection of s is 1/2", average, 1e-14),
    ])
}

fn symmetry_defect(k: &[f64]) -> f64 {
    let n = (k.len() as f64).sqrt() as usize;
    let scale = k.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            worst = worst.max((k[i * n + j] - k[j * n + i]).abs());
        }
    }
    worst / scale
}

fn element_matrices(patches: &[Patch]) -> Result<Vec<Vec<f64>>> {
    let dofs = DofMap::new(patches);
    let asm = Assembler::new(patches, &dofs);
    asm.active_cells().into_iter().map(|(p, c)| asm.element(p, c, None).map(|e| e.k)).collect()
}

/// Rigid translations, stiffness symmetry, single-ply laminates, and symmetric stacks.
pub fn mechanics_suite() -> Result<Vec<Check>> {
    let strategies = [PenaltyStrategy::Classic, PenaltyStrategy::scaled(), PenaltyStrategy::default()];
    let setups = [
        (CaseId::FourPatch, 2, 1),
        (CaseId::ThreePatch, 3, 0),
        (CaseId::ScordelisLo, 2, 0),
        (CaseId::LBeam, 2, 1),
        (CaseId::Astroid, 2, 0),
        (CaseId::Cylinder, 3, 0),
    ];
    let (mut rigid, mut penalty_rigid, mut sym) = (0.0f64, 0.0f64, 0.0f64);
    for (id, degree, level) in setups {
        let built = build_case(&CaseSetup::new(id, degree, level))?;
        for strategy in strategies {
            let asm = assemble(&built.problem, &AnalysisOptions { strategy, ..Default::default() })?;
            let scale = asm.system.max_abs();
            for c in 0..3 {
                let mut x = vec![0.0; asm.dofs.n_dofs];
                for (pi, local) in asm.dofs.local.iter().enumerate() {
                    for f in 0..local.len() {
                        if let Some(d) = asm.dofs.dof(pi, f, c) {
                            x[d] = 1.0;
                        }
                    }
                }
                let kx = asm.system.matvec(&x);
                rigid = rigid.max(kx.iter().fold(0.0f64, |a, v| a.max(v.abs())) / scale);
                for b in &asm.penalties {
                    let pscale = b.max_abs() * b.columns.len() as f64;
                    if pscale > 0.0 {
                        penalty_rigid = penalty_rigid.max(b.energy(&x).abs() / pscale);
                    }
                }
            }
            for b in &asm.penalties {
                let n = b.columns.len();
                let k: Vec<f64> = (0..n * n).map(|i| b.matrix[(i / n, i % n)]).collect();
                sym = sym.max(symmetry_defect(&k));
            }
        }
        for k in element_matrices(&built.problem.model.patches)? {
            sym = sym.max(symmetry_defect(&k));
        }
    }

    // A single isotropic ply at an arbitrary fiber angle on curved and trimmed patches.
    let mut ply = 0.0f64;
    for (id, degree) in [(CaseId::ScordelisLo, 2), (CaseId::ThreePatch, 3), (CaseId::Cylinder, 2)] {
        let built = build_case(&CaseSetup::new(id, degree, 0))?;
        let iso = built.problem.model.patches.clone();
        let mut lam = iso.clone();
        for p in &mut lam {
            if let Material::Isotropic { e, nu, t } = p.material {
                let g = e / (2.0 * (1.0 + nu));
                p.material = Material::Laminate {
                    plies: vec![Ply { e1: e, e2: e, g12: g, nu12: nu, angle: 0.7, thickness: t }],
                };
            }
        }
        for (a, b) in element_matrices(&iso)?.iter().zip(element_matrices(&lam)?) {
            let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let diff = a.iter().zip(&b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            ply = ply.max(diff / scale);
        }
    }

    // Symmetric [0/90/0] and [30/-45/-45/30] stacks of a glass-epoxy ply.
    let uniax = |angle: f64| Ply { e1: 41.63e9, e2: 14.93e9, g12: 5.047e9, nu12: 0.241, angle, thickness: 1e-3 };
    let stacks = [
        vec![uniax(0.0), uniax(std::f64::consts::FRAC_PI_2), uniax(0.0)],
        vec![uniax(FRAC_PI_6), uniax(-FRAC_PI_4), uniax(-FRAC_PI_4), uniax(FRAC_PI_6)],
    ];
    let roof = crate::cases::scordelis_geometry();
    let mut coupling = 0.0f64;
    for plies in &stacks {
        let t: f64 = plies.iter().map(|p| p.thickness).sum();
        for uv in [[0.3, 0.4], [0.8, 0.1]] {
            let abd = laminate_abd(plies, &roof.frame(uv, 1)?)?;
            let a = abd.a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
            let b = abd.b.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
            coupling = coupling.max(b / (a * t));
        }
    }

    Ok(vec![
        Check::new("rigid translation null space (rel)", rigid, 1e-10),
        Check::new("rigid translation penalty energy (rel)", penalty_rigid, 1e-10),
        Check::new("stiffness symmetry (rel)", sym, 1e-12),
        Check::new("single-ply laminate vs isotropic (rel)", ply, 1e-10),
        Check::new("symmetric stack coupling stiffness (rel)", coupling, 1e-12),
    ])
}

/// All suites with a fixed seed, labelled by suite.
pub fn run_all(seed: u64) -> Result<Vec<(&'static str, Vec<Check>)>> {
    Ok(vec![
        ("spline", spline_suite(seed)?),
        ("trimming", trimming_suite()?),
        ("projection", projection_suite(seed)?),
        ("mechanics", mechanics_suite()?),
    ])
}
