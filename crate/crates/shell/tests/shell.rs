use isoshell_core::math::{cross, Vec3};
use isoshell_geometry::{flat_rectangle, SurfaceMap};
use isoshell_numerics::{PatternBuilder, SparseSymmetricSystem};
use isoshell_shell::{constitutive_isotropic, jet_strains, laminate_abd, Assembler, DofMap, Jet, Material, Patch, Ply};
use isoshell_spline::{KnotVector, SplineCurve, SplineSpace};
use isoshell_trimming::TrimCurve;
use proptest::prelude::*;

const E: f64 = 2e5;
const NU: f64 = 0.3;

/// Biquadratic saddle over [0,1]^2.
fn saddle() -> SurfaceMap {
    let mut pts = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            pts.push([i as f64 / 2.0, j as f64 / 2.0, 0.3 * (i as f64 - 1.0) * (j as f64 - 1.0)]);
        }
    }
    SurfaceMap::new(SplineSpace::surface(KnotVector::uniform(2, 1), KnotVector::uniform(2, 1)), pts).unwrap()
}

fn saddle_patch(trimmed: bool) -> Patch {
    let n = 3;
    let space = SplineSpace::surface(KnotVector::uniform(2, n), KnotVector::uniform(2, n));
    let trims =
        if trimmed { vec![TrimCurve::new(SplineCurve::line([0.0, 0.15], [1.0, 0.8]), true).unwrap()] } else { vec![] };
    Patch::new("saddle", saddle(), space, trims, Material::Isotropic { e: E, nu: NU, t: 0.02 }).unwrap()
}

fn stiffness(patches: &[Patch]) -> (DofMap, SparseSymmetricSystem) {
    let dofs = DofMap::new(patches);
    let asm = Assembler::new(patches, &dofs);
    let mut pb = PatternBuilder::new(dofs.n_dofs);
    asm.add_pattern(&mut pb);
    let mut sys = SparseSymmetricSystem::new(pb.build());
    asm.assemble(&mut sys, None).unwrap();
    (dofs, sys)
}

/// Coefficients of `x ↦ f(x)` on the patch, exact for fields affine in the geometry.
fn interpolate(patch: &Patch, dofs: &DofMap, f: impl Fn(Vec3) -> Vec3) -> Vec<f64> {
    let breaks = |d: usize| patch.space.dir(d).breakpoints()[1..patch.space.dir(d).breakpoints().len() - 1].to_vec();
    let fine = patch.geometry.refined(&[breaks(0), breaks(1)]).unwrap();
    let mut u = vec![0.0; dofs.n_dofs];
    for (k, x) in fine.points().iter().enumerate() {
        let v = f(*x);
        for c in 0..3 {
            if let Some(d) = dofs.dof(0, k, c) {
                u[d] = v[c];
            }
        }
    }
    u
}

fn rel_energy(sys: &SparseSymmetricSystem, u: &[f64]) -> f64 {
    let ku = sys.matvec(u);
    let n2 = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    n2(&ku) / (sys.max_abs() * n2(u))
}

#[test]
fn plane_stress_tensor_on_a_unit_frame() {
    let fr = flat_rectangle(0.0, 1.0, 0.0, 1.0).frame([0.3, 0.6], 1).unwrap();
    let c = constitutive_isotropic(&fr, E, NU);
    let k = E / (1.0 - NU * NU);
    let expected = [[k, k * NU, 0.0], [k * NU, k, 0.0], [0.0, 0.0, k * (1.0 - NU) / 2.0]];
    for i in 0..3 {
        for j in 0..3 {
            assert!((c[i][j] - expected[i][j]).abs() < 1e-10 * k);
        }
    }
}

#[test]
fn strains_of_simple_fields() {
    // x = 2ξ, y = η: stretching u_x = x and bending w = x²/2.
    let fr = flat_rectangle(0.0, 2.0, 0.0, 1.0).frame([0.5, 0.5], 1).unwrap();
    let mut j = Jet::default();
    j.du[0] = [2.0, 0.0, 0.0];
    let s = jet_strains(&fr, &j);
    assert_eq!(s, [4.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let mut j = Jet::default();
    j.ddu[0][0] = [0.0, 0.0, 4.0];
    let s = jet_strains(&fr, &j);
    assert_eq!(s, [0.0, 0.0, 0.0, -4.0, 0.0, 0.0]);
    // A twist w = xy gives 2β12 = -2 ∂²w/∂ξ∂η = -4.
    let mut j = Jet::default();
    j.ddu[0][1] = [0.0, 0.0, 2.0];
    j.ddu[1][0] = [0.0, 0.0, 2.0];
    assert_eq!(jet_strains(&fr, &j)[5], -4.0);
}

#[test]
fn rigid_motions_carry_no_energy() {
    for trimmed in [false, true] {
        let patches = vec![saddle_patch(trimmed)];
        let (dofs, sys) = stiffness(&patches);
        let translation = interpolate(&patches[0], &dofs, |_| [0.3, -1.0, 0.7]);
        assert!(rel_energy(&sys, &translation) < 1e-10);
        let w = [0.2, -0.5, 0.9];
        let rotation = interpolate(&patches[0], &dofs, |x| cross(w, x));
        assert!(rel_energy(&sys, &rotation) < 1e-10, "trimmed: {trimmed}");
        let stretch = interpolate(&patches[0], &dofs, |x| [x[0], 0.0, 0.0]);
        assert!(rel_energy(&sys, &stretch) > 1e-4);
    }
}

#[test]
fn element_matrices_are_symmetric() {
    let patches = vec![saddle_patch(true)];
    let dofs = DofMap::new(&patches);
    let asm = Assembler::new(&patches, &dofs);
    for (pi, ci) in asm.active_cells() {
        let e = asm.element(pi, ci, None).unwrap();
        let m = e.dofs.len();
        let scale = e.k.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for a in 0..m {
            for b in 0..a {
                assert!((e.k[a * m + b] - e.k[b * m + a]).abs() <= 1e-12 * scale);
            }
        }
    }
}

fn max_abs(m: &[[f64; 3]; 3]) -> f64 {
    m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn stiffness_is_positive_semidefinite(vals in prop::collection::vec(-1.0f64..1.0, 64)) {
        let patches = vec![saddle_patch(true)];
        let (dofs, sys) = stiffness(&patches);
        let u: Vec<f64> = (0..dofs.n_dofs).map(|i| vals[i % 64] * (1.0 + (i / 64) as f64)).collect();
        prop_assert!(sys.energy(&u) >= -1e-12 * sys.max_abs());
    }

    #[test]
    fn single_ply_is_isotropic(u in 0.0f64..1.0, v in 0.0f64..1.0, angle in -3.2f64..3.2) {
        let fr = saddle().frame([u, v], 1).unwrap();
        let t = 0.02;
        let ply = Ply { e1: E, e2: E, g12: E / (2.0 * (1.0 + NU)), nu12: NU, angle, thickness: t };
        let lam = laminate_abd(&[ply], &fr).unwrap();
        let iso = Material::Isotropic { e: E, nu: NU, t }.abd(&fr);
        for (a, b) in [(lam.a, iso.a), (lam.d, iso.d)] {
            let scale = max_abs(&b);
            for i in 0..3 {
                for j in 0..3 {
                    prop_assert!((a[i][j] - b[i][j]).abs() < 1e-10 * scale);
                }
            }
        }
        prop_assert!(max_abs(&lam.b) < 1e-12 * max_abs(&lam.a) * t);
    }

    #[test]
    fn symmetric_stacks_decouple(u in 0.0f64..1.0, v in 0.0f64..1.0, a1 in -1.6f64..1.6, a2 in -1.6f64..1.6) {
        let fr = saddle().frame([u, v], 1).unwrap();
        let ply = |angle: f64, thickness: f64| Ply { e1: 1.4e5, e2: 1e4, g12: 5e3, nu12: 0.3, angle, thickness };
        let plies = [ply(a1, 0.1), ply(a2, 0.25), ply(a2, 0.25), ply(a1, 0.1)];
        let abd = laminate_abd(&plies, &fr).unwrap();
        prop_assert!(max_abs(&abd.b) < 1e-12 * max_abs(&abd.a) * 0.7);
        let skew = laminate_abd(&[ply(a1, 0.1), ply(a1 + 0.9, 0.2)], &fr).unwrap();
        prop_assert!(max_abs(&skew.b) > 1e-6 * max_abs(&skew.a) * 0.3);
    }
}
