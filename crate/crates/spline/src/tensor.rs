use serde::{Deserialize, Serialize};

use crate::basis::{ders_at_span, UniBasis};
use crate::knots::KnotVector;
use isoshell_core::error::{Error, Result};
use isoshell_core::math::binomial;

/// Highest supported derivative order.
pub const MAX_ORDER: usize = 3;

/// Number of mixed partials of total order <= 3 in two variables.
pub const NDERIV: usize = 10;

/// Position of the mixed partial `d^(i+j) / du^i dv^j` inside a [`Derivs`] array.
pub const fn didx(i: usize, j: usize) -> usize {
    let n = i + j;
    n * (n + 1) / 2 + j
}

pub type Derivs = [f64; NDERIV];

/// Nonzero basis functions of a space at one point, with derivatives.
#[derive(Clone, Debug, Default)]
pub struct BasisEval {
    /// Flat basis indices, see [`SplineSpace::flat`].
    pub indices: Vec<usize>,
    /// Derivatives per function, indexed with [`didx`].
    pub values: Vec<Derivs>,
    pub order: usize,
}

impl BasisEval {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Tensor-product (optionally rational) spline space in one or two directions.
///
/// Basis functions are numbered row-major: `flat(i, j) = i * n_v + j` with `i` along
/// the first direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceRepr")]
pub struct SplineSpace {
    dirs: Vec<KnotVector>,
    weights: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceRepr {
    dirs: Vec<KnotVector>,
    #[serde(default)]
    weights: Option<Vec<f64>>,
}

impl TryFrom<SpaceRepr> for SplineSpace {
    type Error = Error;
    fn try_from(r: SpaceRepr) -> Result<Self> {
        SplineSpace::new(r.dirs, r.weights)
    }
}

impl SplineSpace {
    pub fn new(dirs: Vec<KnotVector>, weights: Option<Vec<f64>>) -> Result<Self> {
        if dirs.is_empty() || dirs.len() > 2 {
            return Err(Error::Invalid(format!("{} parametric directions", dirs.len())));
        }
        let n: usize = dirs.iter().map(|d| d.num_basis()).product();
        if let Some(w) = &weights {
            if w.len() != n {
                return Err(Error::WeightCount { expected: n, got: w.len() });
            }
            if let Some(&bad) = w.iter().find(|&&x| !(x > 0.0)) {
                return Err(Error::Weight(bad));
            }
        }
        Ok(Self { dirs, weights })
    }

    pub fn curve(kv: KnotVector) -> Self {
        Self { dirs: vec![kv], weights: None }
    }

    pub fn surface(ku: KnotVector, kv: KnotVector) -> Self {
        Self { dirs: vec![ku, kv], weights: None }
    }

    pub fn dim(&self) -> usize {
        self.dirs.len()
    }

    pub fn dir(&self, d: usize) -> &KnotVector {
        &self.dirs[d]
    }

    pub fn dirs(&self) -> &[KnotVector] {
        &self.dirs
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn is_rational(&self) -> bool {
        self.weights.is_some()
    }

    pub fn num_basis(&self) -> usize {
        self.dirs.iter().map(|d| d.num_basis()).product()
    }

    pub fn shape(&self) -> (usize, usize) {
        let nu = self.dirs[0].num_basis();
        let nv = self.dirs.get(1).map_or(1, |d| d.num_basis());
        (nu, nv)
    }

    pub fn flat(&self, i: usize, j: usize) -> usize {
        i * self.shape().1 + j
    }

    pub fn unflat(&self, f: usize) -> (usize, usize) {
        let nv = self.shape().1;
        (f / nv, f % nv)
    }

    /// Evaluates every nonzero basis function at `point` with derivatives up to `k`.
    pub fn eval(&self, point: &[f64], k: usize) -> Result<BasisEval> {
        assert_eq!(point.len(), self.dim(), "point dimension mismatch");
        assert!(k <= MAX_ORDER, "derivative order above {MAX_ORDER}");
        let mut uni = Vec::with_capacity(self.dim());
        for (d, kv) in self.dirs.iter().enumerate() {
            let u = kv.check(point[d])?;
            let span = kv.find_span(u);
            uni.push(UniBasis { span, ders: ders_at_span(kv, span, u, k) });
        }
        Ok(self.combine(&uni, k))
    }

    /// Tensor combination of precomputed univariate rows (must come from this space's knots).
    pub fn combine(&self, uni: &[UniBasis], k: usize) -> BasisEval {
        let mut out = BasisEval { order: k, ..Default::default() };
        if self.dim() == 1 {
            let b = &uni[0];
            let f0 = b.first();
            for r in 0..b.ders[0].len() {
                let mut d = [0.0; NDERIV];
                for kk in 0..=k {
                    d[didx(kk, 0)] = b.ders[kk][r];
                }
                out.indices.push(f0 + r);
                out.values.push(d);
            }
        } else {
            let (bu, bv) = (&uni[0], &uni[1]);
            let (fu, fv) = (bu.first(), bv.first());
            let nv = self.shape().1;
            let (pu, pv) = (bu.ders[0].len(), bv.ders[0].len());
            out.indices.reserve(pu * pv);
            out.values.reserve(pu * pv);
            for a in 0..pu {
                for b in 0..pv {
                    let mut d = [0.0; NDERIV];
                    for i in 0..=k {
                        for j in 0..=(k - i) {
                            d[didx(i, j)] = bu.ders[i][a] * bv.ders[j][b];
                        }
                    }
                    out.indices.push((fu + a) * nv + fv + b);
                    out.values.push(d);
                }
            }
        }
        if let Some(w) = &self.weights {
            rationalize(&mut out, w, k, self.dim());
        }
        out
    }
}

/// Converts polynomial basis derivatives into rational ones with the quotient rule.
fn rationalize(ev: &mut BasisEval, w: &[f64], k: usize, dim: usize) {
    let mut wd = [0.0; NDERIV];
    for (idx, v) in ev.indices.iter().zip(ev.values.iter_mut()) {
        for x in v.iter_mut() {
            *x *= w[*idx];
        }
        for (s, x) in wd.iter_mut().zip(v.iter()) {
            *s += x;
        }
    }
    let kv = if dim == 1 { 0 } else { k };
    for v in ev.values.iter_mut() {
        let a = *v;
        let mut r = [0.0; NDERIV];
        for n in 0..=k {
            for j in 0..=n.min(kv) {
                let i = n - j;
                let mut val = a[didx(i, j)];
                for ii in 0..=i {
                    for jj in 0..=j {
                        if ii == 0 && jj == 0 {
                            continue;
                        }
                        val -= binomial(i, ii) * binomial(j, jj) * wd[didx(ii, jj)] * r[didx(i - ii, j - jj)];
                    }
                }
                r[didx(i, j)] = val / wd[0];
            }
        }
        *v = r;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_index_layout() {
        let order = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3)];
        for (n, &(i, j)) in order.iter().enumerate() {
            assert_eq!(didx(i, j), n);
        }
    }

    #[test]
    fn tensor_midpoint() {
        let s = SplineSpace::surface(KnotVector::uniform(2, 1), KnotVector::uniform(2, 1));
        let ev = s.eval(&[0.5, 0.5], 0).unwrap();
        let uni = [0.25, 0.5, 0.25];
        assert_eq!(ev.len(), 9);
        for (f, v) in ev.indices.iter().zip(&ev.values) {
            let (i, j) = s.unflat(*f);
            assert_eq!(v[0], uni[i] * uni[j]);
        }
    }

    #[test]
    fn unit_weights_match_polynomial() {
        let ku = KnotVector::uniform(3, 3);
        let kv = KnotVector::uniform(2, 2);
        let poly = SplineSpace::surface(ku.clone(), kv.clone());
        let rat = SplineSpace::new(vec![ku, kv], Some(vec![1.0; poly.num_basis()])).unwrap();
        let a = poly.eval(&[0.3, 0.7], 3).unwrap();
        let b = rat.eval(&[0.3, 0.7], 3).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            for n in 0..NDERIV {
                assert!((x[n] - y[n]).abs() < 1e-12 * (1.0 + x[n].abs()));
            }
        }
    }

    #[test]
    fn weight_count_checked() {
        let kv = KnotVector::uniform(2, 1);
        assert!(SplineSpace::new(vec![kv.clone()], Some(vec![1.0; 2])).is_err());
        assert!(SplineSpace::new(vec![kv], Some(vec![1.0, -1.0, 1.0])).is_err());
    }
}
