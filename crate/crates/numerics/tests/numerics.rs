use isoshell_core::Error;
use isoshell_numerics::{gauss, solve, solve_with, SolveOptions, SparseSymmetricSystem, TripletBuffer};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

/// Linear elements for `-u'' = 1` on [0, 1] with `u(0) = u(1) = 0`.
fn poisson(n: usize) -> SparseSymmetricSystem {
    let h = 1.0 / n as f64;
    let mut t = TripletBuffer::default();
    for e in 0..n {
        t.push(e, e, 1.0 / h);
        t.push(e + 1, e + 1, 1.0 / h);
        t.push(e, e + 1, -1.0 / h);
    }
    let mut sys = SparseSymmetricSystem::from_triplets(n + 1, &t);
    for e in 0..n {
        sys.add_rhs(e, 0.5 * h);
        sys.add_rhs(e + 1, 0.5 * h);
    }
    sys.fix(0, 0.0);
    sys.fix(n, 0.0);
    sys
}

/// Symmetric positive definite system with rows of very different scale.
fn random_spd(n: usize, vals: &[f64]) -> SparseSymmetricSystem {
    let mut t = TripletBuffer::default();
    let scale = |i: usize| 10f64.powi((i % 7) as i32 - 3);
    let mut k = 0;
    let mut next = || {
        k += 1;
        vals[k % vals.len()]
    };
    let mut rowsum = vec![0.0; n];
    let mut off = Vec::new();
    for i in 0..n {
        for j in i + 1..(i + 4).min(n) {
            let v = next() * scale(i).sqrt() * scale(j).sqrt();
            rowsum[i] += v.abs();
            rowsum[j] += v.abs();
            off.push((i, j, v));
        }
    }
    for &(i, j, v) in &off {
        t.push(i, j, v);
    }
    for i in 0..n {
        t.push(i, i, rowsum[i] + scale(i));
    }
    let mut sys = SparseSymmetricSystem::from_triplets(n, &t);
    for i in 0..n {
        sys.add_rhs(i, next() * scale(i));
    }
    sys
}

fn dense_solve(sys: &SparseSymmetricSystem) -> Vec<f64> {
    let a = sys.to_dense();
    let n = a.len();
    let m = DMatrix::from_fn(n, n, |i, j| a[i][j]);
    let b = DVector::from_vec(sys.rhs.clone());
    m.cholesky().expect("positive definite").solve(&b).iter().copied().collect()
}

#[test]
fn gauss_integrates_polynomials() {
    for n in 1..=10 {
        let rule = gauss(n).unwrap();
        for k in 0..2 * n {
            let q: f64 = rule.mapped(0.0, 2.0).map(|(x, w)| w * x.powi(k as i32)).sum();
            let exact = 2f64.powi(k as i32 + 1) / (k as f64 + 1.0);
            assert!((q - exact).abs() < 1e-13 * exact.max(1.0), "n={n} k={k}");
        }
    }
}

#[test]
fn poisson_is_nodally_exact() {
    let n = 16;
    let (u, report) = solve(&poisson(n)).unwrap();
    for (i, ui) in u.iter().enumerate() {
        let x = i as f64 / n as f64;
        assert!((ui - 0.5 * x * (1.0 - x)).abs() < 1e-14);
    }
    assert!(report.residual < 1e-14);
    assert_eq!(report.free_dofs, n - 1);
}

#[test]
fn identity_returns_rhs() {
    let mut t = TripletBuffer::default();
    for i in 0..5 {
        t.push(i, i, 1.0);
    }
    let mut sys = SparseSymmetricSystem::from_triplets(5, &t);
    sys.rhs = vec![1.0, -2.0, 3.0, 0.5, 7.0];
    let (u, _) = solve(&sys).unwrap();
    assert_eq!(u, sys.rhs);
}

#[test]
fn ties_and_fixed_values() {
    let mut sys = poisson(8);
    sys.fixed.clear();
    sys.fix(0, 1.0);
    sys.fix(8, 1.0);
    sys.tie(3, 5);
    let (u, _) = solve(&sys).unwrap();
    assert_eq!(u[0], 1.0);
    assert_eq!(u[3], u[5]);
}

#[test]
fn indefinite_matrix_is_reported() {
    let mut t = TripletBuffer::default();
    t.push(0, 0, 1.0);
    t.push(1, 1, 1.0);
    t.push(0, 1, 2.0);
    let mut sys = SparseSymmetricSystem::from_triplets(2, &t);
    sys.rhs = vec![1.0, 1.0];
    assert!(matches!(solve(&sys), Err(Error::Indefinite)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn matches_dense_cholesky(n in 2usize..40, vals in prop::collection::vec(-1.0f64..1.0, 16)) {
        let sys = random_spd(n, &vals);
        let (u, report) = solve(&sys).unwrap();
        let oracle = dense_solve(&sys);
        let scale = oracle.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in u.iter().zip(&oracle) {
            prop_assert!((a - b).abs() <= 1e-10 * scale);
        }
        prop_assert!(report.residual < 1e-12);
    }

    #[test]
    fn scaling_does_not_change_the_solution(n in 2usize..40, vals in prop::collection::vec(-1.0f64..1.0, 16)) {
        let sys = random_spd(n, &vals);
        let (a, _) = solve_with(&sys, SolveOptions { scaling: true, ..Default::default() }).unwrap();
        let (b, _) = solve_with(&sys, SolveOptions { scaling: false, ..Default::default() }).unwrap();
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-11 * scale);
        }
    }
}
