use isoshell_spline::{build_reduced_space, eval_basis, insert_knots, KnotVector, SplineCurve, SplineSpace};
use proptest::prelude::*;

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

#[test]
fn matches_recursive_definition() {
    let kv = KnotVector::new(vec![0., 0., 0., 0.5, 1., 1., 1.], 2).unwrap();
    let b = eval_basis(&kv, 0.25, 0).unwrap();
    for (r, v) in b.ders[0].iter().enumerate() {
        let oracle = cox_de_boor(kv.knots(), b.first() + r, 2, 0.25);
        assert!((v - oracle).abs() < 1e-15);
    }
    let expected = [0.25, 0.625, 0.125];
    for (v, e) in b.ders[0].iter().zip(expected) {
        assert!((v - e).abs() < 1e-15);
    }
}

#[test]
fn quarter_circle_on_circle() {
    let w = std::f64::consts::FRAC_1_SQRT_2;
    let c =
        SplineCurve::new(KnotVector::uniform(2, 1), vec![[1., 0.], [1., 1.], [0., 1.]], Some(vec![1., w, 1.])).unwrap();
    for i in 0..33 {
        let p = c.eval(i as f64 / 32.0).unwrap();
        assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-14);
    }
}

#[test]
fn reduced_dimension_counts() {
    for p in 2..=4 {
        for n_el in 1..=6 {
            let kv = KnotVector::uniform(p, n_el);
            let r = build_reduced_space(&kv).unwrap();
            assert_eq!(r.num_basis(), kv.num_basis() - 2);
        }
    }
}

#[test]
fn dyadic_refinement_counts() {
    let kv = KnotVector::uniform(2, 4);
    let (fine, _) = insert_knots(&kv, &kv.dyadic_knots(4)).unwrap();
    assert_eq!(fine.num_elements(), 64);
}

fn random_knots(p: usize, interior: &[f64]) -> KnotVector {
    let mut br: Vec<f64> = interior.iter().map(|x| 0.05 + 0.9 * x).collect();
    br.sort_by(|a, b| a.partial_cmp(b).unwrap());
    br.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    let mut all = vec![0.0];
    all.extend(br);
    all.push(1.0);
    KnotVector::from_breakpoints(p, &all)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partition_of_unity(p in 2usize..=4, interior in prop::collection::vec(0.0f64..1.0, 0..6),
                          us in prop::collection::vec(0.0f64..=1.0, 100)) {
        let kv = random_knots(p, &interior);
        for &u in &us {
            let b = eval_basis(&kv, u, 1).unwrap();
            prop_assert_eq!(b.ders[0].len(), p + 1);
            prop_assert!((b.ders[0].iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(b.ders[1].iter().sum::<f64>().abs() < 1e-10);
        }
    }

    #[test]
    fn derivatives_match_differences(p in 2usize..=4, interior in prop::collection::vec(0.0f64..1.0, 0..4),
                                     u in 0.02f64..0.98) {
        let kv = random_knots(p, &interior);
        let br = kv.breakpoints();
        let h = 1e-6;
        // Keep the difference stencil inside one knot span.
        prop_assume!(br.iter().all(|b| (b - u).abs() > 2.0 * h));
        let b0 = eval_basis(&kv, u, 3).unwrap();
        let bm = eval_basis(&kv, u - h, 3).unwrap();
        let bp = eval_basis(&kv, u + h, 3).unwrap();
        for k in 1..=p.min(3) {
            for r in 0..=p {
                let fd = (bp.ders[k - 1][r] - bm.ders[k - 1][r]) / (2.0 * h);
                let exact = b0.ders[k][r];
                let scale = exact.abs().max(1.0);
                prop_assert!((fd - exact).abs() / scale < 1e-6, "k={} fd={} exact={}", k, fd, exact);
            }
        }
    }

    #[test]
    fn knot_insertion_exact(p in 2usize..=4, interior in prop::collection::vec(0.0f64..1.0, 0..4),
                            new in prop::collection::vec(0.01f64..0.99, 1..5),
                            coef in prop::collection::vec(-2.0f64..2.0, 30),
                            ts in prop::collection::vec(0.0f64..=1.0, 50)) {
        let kv = random_knots(p, &interior);
        let n = kv.num_basis();
        let pts: Vec<[f64; 2]> = (0..n).map(|i| [coef[i % 30], coef[(7 * i + 3) % 30]]).collect();
        let c = SplineCurve::new(kv, pts, None).unwrap();
        let fine = c.refined(&new).unwrap();
        for &t in &ts {
            let a = c.eval(t).unwrap();
            let b = fine.eval(t).unwrap();
            prop_assert!((a[0] - b[0]).abs() < 1e-13 && (a[1] - b[1]).abs() < 1e-13);
        }
    }

    #[test]
    fn rational_surface_refinement_exact(new_u in prop::collection::vec(0.01f64..0.99, 1..3),
                                         new_v in prop::collection::vec(0.01f64..0.99, 1..3),
                                         ts in prop::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), 20)) {
        let ku = KnotVector::uniform(2, 2);
        let kv = KnotVector::uniform(2, 1);
        let w: Vec<f64> = (0..12).map(|k| 0.6 + 0.1 * (k % 5) as f64).collect();
        let space = SplineSpace::new(vec![ku, kv], Some(w)).unwrap();
        let coeffs: Vec<[f64; 1]> = (0..12).map(|k| [(k as f64 * 0.37).sin()]).collect();
        let (fine, t) = space.h_refine(&[new_u, new_v]).unwrap();
        let fc = t.apply(&coeffs);
        for &(u, v) in &ts {
            let a: f64 = {
                let e = space.eval(&[u, v], 0).unwrap();
                e.indices.iter().zip(&e.values).map(|(i, d)| d[0] * coeffs[*i][0]).sum()
            };
            let b: f64 = {
                let e = fine.eval(&[u, v], 0).unwrap();
                e.indices.iter().zip(&e.values).map(|(i, d)| d[0] * fc[*i][0]).sum()
            };
            prop_assert!((a - b).abs() < 1e-13);
        }
    }
}

#[test]
fn json_round_trip_keeps_curves() {
    let w = std::f64::consts::FRAC_1_SQRT_2;
    let c =
        SplineCurve::new(KnotVector::uniform(2, 1), vec![[1., 0.], [1., 1.], [0., 1.]], Some(vec![1., w, 1.])).unwrap();
    let text = serde_json::to_string(&c).unwrap();
    let back: SplineCurve<2> = serde_json::from_str(&text).unwrap();
    assert_eq!(back, c);
}

#[test]
fn json_input_is_validated() {
    let bad_knots = r#"{"knots":[0,0,1,0.5,1,1],"degree":1}"#;
    assert!(serde_json::from_str::<KnotVector>(bad_knots).is_err());
    let bad_weights = r#"{"dirs":[{"knots":[0,0,1,1],"degree":1}],"weights":[1.0]}"#;
    assert!(serde_json::from_str::<SplineSpace>(bad_weights).is_err());
    let short = r#"{"space":{"dirs":[{"knots":[0,0,0,1,1,1],"degree":2}]},"points":[[0,0],[1,1]]}"#;
    assert!(serde_json::from_str::<SplineCurve<2>>(short).is_err());
    let line = r#"{"space":{"dirs":[{"knots":[0,0,1,1],"degree":1}]},"points":[[0,0],[1,2]]}"#;
    let c: SplineCurve<2> = serde_json::from_str(line).unwrap();
    assert_eq!(c.eval(0.5).unwrap(), [0.5, 1.0]);
}
