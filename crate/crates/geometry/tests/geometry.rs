use isoshell_core::math::{dot, norm};
use isoshell_geometry::{boundary_trace, flat_rectangle, Edge, SurfaceMap};
use isoshell_spline::{KnotVector, SplineSpace};
use proptest::prelude::*;

const R: f64 = 2.0;
const HEIGHT: f64 = 3.0;

/// Quarter cylinder of radius `R`: rational quadratic arc along ξ, straight along η.
fn cylinder() -> SurfaceMap {
    let w = std::f64::consts::FRAC_1_SQRT_2;
    let arc = [[R, 0.0], [R, R], [0.0, R]];
    let mut pts = Vec::new();
    let mut weights = Vec::new();
    for (i, a) in arc.iter().enumerate() {
        for z in [0.0, HEIGHT] {
            pts.push([a[0], a[1], z]);
            weights.push(if i == 1 { w } else { 1.0 });
        }
    }
    let space = SplineSpace::new(vec![KnotVector::uniform(2, 1), KnotVector::uniform(1, 1)], Some(weights)).unwrap();
    SurfaceMap::new(space, pts).unwrap()
}

fn metric_at(map: &SurfaceMap, uv: [f64; 2]) -> [[f64; 2]; 2] {
    map.frame(uv, 0).unwrap().metric
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn cylinder_frame(u in 0.05f64..0.95, v in 0.05f64..0.95) {
        let map = cylinder();
        let fr = map.frame([u, v], 2).unwrap();
        let x = fr.x;
        prop_assert!((x[0].hypot(x[1]) - R).abs() < 1e-13);
        prop_assert!((norm(fr.a3) - 1.0).abs() < 1e-14);
        for al in 0..2 {
            prop_assert!(dot(fr.a3, fr.a[al]).abs() < 1e-13);
        }
        // The normal is radial.
        let radial = [x[0] / R, x[1] / R, 0.0];
        prop_assert!((dot(fr.a3, radial).abs() - 1.0).abs() < 1e-13);
        // Inverse metric.
        for i in 0..2 {
            for j in 0..2 {
                let e: f64 = (0..2).map(|k| fr.metric[i][k] * fr.inv_metric[k][j]).sum();
                let id = if i == j { 1.0 } else { 0.0 };
                prop_assert!((e - id).abs() < 1e-13);
            }
        }
        // Curvatures: K = 0 and |H| = 1/(2R).
        let b = |al: usize, be: usize| dot(fr.a3, fr.da[al][be]);
        let det_b = b(0, 0) * b(1, 1) - b(0, 1) * b(1, 0);
        prop_assert!(det_b.abs() < 1e-12);
        let h: f64 = (0..2).flat_map(|a| (0..2).map(move |c| (a, c))).map(|(a, c)| fr.inv_metric[a][c] * b(a, c)).sum::<f64>() / 2.0;
        prop_assert!((h.abs() - 0.5 / R).abs() < 1e-12);
    }

    #[test]
    fn normal_derivatives_match_differences(u in 0.05f64..0.95, v in 0.05f64..0.95) {
        let map = cylinder();
        let fr = map.frame([u, v], 2).unwrap();
        let h = 1e-6;
        for al in 0..2 {
            let mut p = [u, v];
            let mut m = [u, v];
            p[al] += h;
            m[al] -= h;
            let (fp, fm) = (map.frame(p, 1).unwrap(), map.frame(m, 1).unwrap());
            for d in 0..3 {
                let fd = (fp.a3[d] - fm.a3[d]) / (2.0 * h);
                prop_assert!((fd - fr.da3[al][d]).abs() < 1e-7);
                for be in 0..2 {
                    let fd2 = (fp.da3[be][d] - fm.da3[be][d]) / (2.0 * h);
                    prop_assert!((fd2 - fr.dda3[be][al][d]).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn christoffel_from_metric_derivatives(u in 0.05f64..0.95, v in 0.05f64..0.95) {
        let map = cylinder();
        let fr = map.frame([u, v], 1).unwrap();
        let h = 1e-6;
        // dg[c][a][b] = ∂_c g_ab
        let mut dg = [[[0.0; 2]; 2]; 2];
        for c in 0..2 {
            let mut p = [u, v];
            let mut m = [u, v];
            p[c] += h;
            m[c] -= h;
            let (gp, gm) = (metric_at(&map, p), metric_at(&map, m));
            for a in 0..2 {
                for b in 0..2 {
                    dg[c][a][b] = (gp[a][b] - gm[a][b]) / (2.0 * h);
                }
            }
        }
        for g in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    let oracle: f64 = (0..2)
                        .map(|d| 0.5 * fr.inv_metric[g][d] * (dg[b][d][a] + dg[a][d][b] - dg[d][a][b]))
                        .sum();
                    prop_assert!((fr.christoffel(g, a, b) - oracle).abs() < 1e-7);
                }
            }
        }
    }
}

#[test]
fn flat_rectangle_edges_have_outward_normals() {
    let map = flat_rectangle(0.0, 2.0, 0.0, 1.0);
    let expect = [
        (Edge::U0, [-1.0, 0.0, 0.0]),
        (Edge::U1, [1.0, 0.0, 0.0]),
        (Edge::V0, [0.0, -1.0, 0.0]),
        (Edge::V1, [0.0, 1.0, 0.0]),
    ];
    for (edge, n) in expect {
        let (tr, _) = boundary_trace(&map, &edge.curve(), 0.3, edge.kept_left()).unwrap();
        for d in 0..3 {
            assert!((tr.normal[d] - n[d]).abs() < 1e-15, "{edge:?}");
        }
        let len = if edge.normal_dir() == 0 { 1.0 } else { 2.0 };
        assert!((tr.jac - len).abs() < 1e-14);
    }
}

#[test]
fn patch_file_round_trip() {
    let map = cylinder();
    let back = SurfaceMap::from_patch_file(&map.to_patch_file()).unwrap();
    for uv in [[0.1, 0.2], [0.7, 0.9]] {
        assert_eq!(map.eval(uv).unwrap(), back.eval(uv).unwrap());
    }
}

#[test]
fn refinement_keeps_the_surface() {
    let map = cylinder();
    let fine = map.refined(&[vec![0.25, 0.5, 0.75], vec![0.5]]).unwrap();
    for uv in [[0.1, 0.2], [0.33, 0.61], [0.9, 0.95]] {
        let (a, b) = (map.eval(uv).unwrap(), fine.eval(uv).unwrap());
        for d in 0..3 {
            assert!((a[d] - b[d]).abs() < 1e-14);
        }
    }
}
