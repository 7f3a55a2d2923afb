use isoshell_spline::{KnotVector, SplineCurve, SplineSpace};
use isoshell_trimming::{classify_elements, intersect_curve_gridline, CellStatus, TrimCurve};
use proptest::prelude::*;

fn breaks(n: usize) -> Vec<f64> {
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

/// Cubic graph `v = f(u)` through Bezier ordinates `c`, kept above.
fn graph(c: [f64; 4]) -> TrimCurve {
    let pts = (0..4).map(|i| [i as f64 / 3.0, c[i]]).collect();
    TrimCurve::new(SplineCurve::bezier(pts), true).unwrap()
}

fn graph_value(c: [f64; 4], u: f64) -> f64 {
    let s = 1.0 - u;
    c[0] * s * s * s + 3.0 * c[1] * u * s * s + 3.0 * c[2] * u * u * s + c[3] * u * u * u
}

/// Range of the graph over `[a, b]`, by dense sampling of the one-dimensional cubic.
fn graph_range(c: [f64; 4], a: f64, b: f64) -> (f64, f64) {
    (0..=2000)
        .map(|k| graph_value(c, a + (b - a) * k as f64 / 2000.0))
        .fold((f64::MAX, f64::MIN), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

#[test]
fn parabola_trimmed_square() {
    // v = u², kept above: area 2/3.
    let c = TrimCurve::new(SplineCurve::bezier(vec![[0.0, 0.0], [0.5, 0.0], [1.0, 1.0]]), true).unwrap();
    for n in 1..=8 {
        let d = classify_elements(&breaks(n), &breaks(n), std::slice::from_ref(&c)).unwrap();
        assert!((d.kept_area(4) - 2.0 / 3.0).abs() < 1e-10, "n={n}");
    }
}

#[test]
fn gridline_intersections() {
    let c = TrimCurve::new(SplineCurve::bezier(vec![[0.0, 0.0], [0.5, 1.0], [1.0, 0.0]]), true).unwrap();
    let r = intersect_curve_gridline(&c, 1, 0.25).unwrap();
    let s = 2f64.sqrt() / 4.0;
    assert_eq!(r.len(), 2);
    assert!((r[0] - (0.5 - s)).abs() < 1e-13);
    assert!((r[1] - (0.5 + s)).abs() < 1e-13);
}

#[test]
fn curves_must_end_on_the_boundary() {
    assert!(TrimCurve::new(SplineCurve::line([0.0, 0.2], [0.5, 0.5]), true).is_err());
}

#[test]
fn two_curves_bound_a_strip() {
    let a = TrimCurve::new(SplineCurve::line([0.0, 0.2], [1.0, 0.4]), true).unwrap();
    let b = TrimCurve::new(SplineCurve::line([0.0, 0.7], [1.0, 0.9]), false).unwrap();
    let d = classify_elements(&breaks(5), &breaks(5), &[a, b]).unwrap();
    assert!((d.kept_area(4) - 0.5).abs() < 1e-13);
    assert!(d.contains([0.5, 0.5]) && !d.contains([0.5, 0.1]) && !d.contains([0.5, 0.95]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn chord_areas_exact(a in 0.05f64..0.95, b in 0.05f64..0.95, n in 1usize..=8, vertical in any::<bool>()) {
        let (curve, area) = if vertical {
            // Upwards; the left side is the smaller-u part.
            (SplineCurve::line([a, 0.0], [b, 1.0]), 0.5 * (a + b))
        } else {
            (SplineCurve::line([0.0, a], [1.0, b]), 1.0 - 0.5 * (a + b))
        };
        let c = TrimCurve::new(curve, true).unwrap();
        let d = classify_elements(&breaks(n), &breaks(n), &[c]).unwrap();
        prop_assert!((d.kept_area(3) - area).abs() < 1e-13);
    }

    #[test]
    fn active_sets_match_the_graph(c0 in 0.05f64..0.95, c1 in 0.0f64..1.0, c2 in 0.0f64..1.0, c3 in 0.05f64..0.95,
                                   n in 1usize..=8, p in 2usize..=3) {
        let c = [c0, c1, c2, c3];
        let (lo, hi) = graph_range(c, 0.0, 1.0);
        prop_assume!(lo > 0.0 && hi < 1.0);
        let br = breaks(n);
        let d = classify_elements(&br, &br, &[graph(c)]).unwrap();
        let mut expected = vec![false; n * n];
        for i in 0..n {
            let (lo, hi) = graph_range(c, br[i], br[i + 1]);
            for j in 0..n {
                let (v0, v1) = (br[j], br[j + 1]);
                // Skip cells touched only within sampling accuracy.
                prop_assume!((lo - v1).abs() > 1e-6 && (hi - v0).abs() > 1e-6);
                let cell = d.cell(i, j);
                let want = if hi <= v0 { CellStatus::Inside } else if lo >= v1 { CellStatus::Outside } else { CellStatus::Cut };
                prop_assert_eq!(cell.status, want, "cell ({}, {})", i, j);
                expected[i * n + j] = cell.is_active();
            }
        }
        let space = SplineSpace::surface(KnotVector::uniform(p, n), KnotVector::uniform(p, n));
        let active = d.active_functions(&space);
        let m = n + p;
        for fi in 0..m {
            for fj in 0..m {
                // Uniform open knots: function i is supported on elements i-p..=i.
                let cells = |f: usize| f.saturating_sub(p)..=f.min(n - 1);
                let want = cells(fi).any(|i| cells(fj).any(|j| expected[i * n + j]));
                prop_assert_eq!(active[fi * m + fj], want);
            }
        }
    }
}
