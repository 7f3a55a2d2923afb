use std::sync::OnceLock;

use isoshell_core::error::{Error, Result};

pub const MAX_POINTS: usize = 30;

/// Gauss-Legendre rule on [-1, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct GaussRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = 0.5 * (b - a);
        self.points.iter().zip(&self.weights).map(move |(&x, &w)| (a + h * (x + 1.0), w * h))
    }

    /// Tensor rule on the unit square `[0,1]^2`.
    pub fn unit_square(&self) -> Vec<([f64; 2], f64)> {
        let pts: Vec<(f64, f64)> = self.mapped(0.0, 1.0).collect();
        let mut out = Vec::with_capacity(pts.len() * pts.len());
        for &(x, wx) in &pts {
            for &(y, wy) in &pts {
                out.push(([x, y], wx * wy));
            }
        }
        out
    }
}

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = pk;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

fn compute(n: usize) -> GaussRule {
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        points[i] = -x;
        points[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        points[n / 2] = 0.0;
    }
    GaussRule { points, weights }
}

fn table() -> &'static [GaussRule] {
    static TABLE: OnceLock<Vec<GaussRule>> = OnceLock::new();
    TABLE.get_or_init(|| (1..=MAX_POINTS).map(compute).collect())
}

/// Cached `n`-point rule.
pub fn gauss(n: usize) -> Result<&'static GaussRule> {
    if n == 0 || n > MAX_POINTS {
        return Err(Error::GaussPoints(n));
    }
    Ok(&table()[n - 1])
}

pub fn gauss_rule(n: usize) -> Result<GaussRule> {
    gauss(n).cloned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points() {
        let g = gauss_rule(2).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert!((g.points[0] + r).abs() < 1e-15 && (g.points[1] - r).abs() < 1e-15);
        assert!((g.weights[0] - 1.0).abs() < 1e-15 && (g.weights[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn one_point() {
        let g = gauss_rule(1).unwrap();
        assert_eq!(g.points, vec![0.0]);
        assert!((g.weights[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn exactness_degree() {
        for n in 1..=MAX_POINTS {
            let g = gauss(n).unwrap();
            assert!(g.weights.iter().all(|&w| w > 0.0));
            assert!((g.weights.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for deg in 0..2 * n {
                let q: f64 = g.points.iter().zip(&g.weights).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg + 1) as f64 };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn out_of_range() {
        assert!(gauss_rule(0).is_err());
        assert!(gauss_rule(31).is_err());
    }
}
