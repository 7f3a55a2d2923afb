use serde::{Deserialize, Serialize};

use crate::knots::KnotVector;
use crate::refine::insert_knots;
use crate::tensor::{didx, SplineSpace};
use isoshell_core::error::{Error, Result};

/// Spline curve in `D` dimensions, optionally rational.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveRepr<D>")]
pub struct SplineCurve<const D: usize> {
    space: SplineSpace,
    #[serde(with = "points_serde")]
    points: Vec<[f64; D]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveRepr<const D: usize> {
    space: SplineSpace,
    #[serde(with = "points_serde")]
    points: Vec<[f64; D]>,
}

impl<const D: usize> TryFrom<CurveRepr<D>> for SplineCurve<D> {
    type Error = Error;
    fn try_from(r: CurveRepr<D>) -> Result<Self> {
        if r.space.dim() != 1 {
            return Err(Error::Invalid(format!("curves need one parametric direction, got {}", r.space.dim())));
        }
        let weights = r.space.weights().map(|w| w.to_vec());
        SplineCurve::new(r.space.dir(0).clone(), r.points, weights)
    }
}

/// Polynomial piece of a curve between two consecutive breakpoints.
#[derive(Clone, Debug)]
pub struct BezierSegment<const D: usize> {
    pub t0: f64,
    pub t1: f64,
    pub points: Vec<[f64; D]>,
}

impl<const D: usize> SplineCurve<D> {
    pub fn new(kv: KnotVector, points: Vec<[f64; D]>, weights: Option<Vec<f64>>) -> Result<Self> {
        if points.len() != kv.num_basis() {
            return Err(Error::Invalid(format!(
                "{} control points for {} basis functions",
                points.len(),
                kv.num_basis()
            )));
        }
        Ok(Self { space: SplineSpace::new(vec![kv], weights)?, points })
    }

    /// Straight segment from `a` to `b` as a degree-1 curve on [0, 1].
    pub fn line(a: [f64; D], b: [f64; D]) -> Self {
        Self { space: SplineSpace::curve(KnotVector::uniform(1, 1)), points: vec![a, b] }
    }

    /// Single Bezier piece on [0, 1].
    pub fn bezier(points: Vec<[f64; D]>) -> Self {
        let p = points.len() - 1;
        Self { space: SplineSpace::curve(KnotVector::uniform(p, 1)), points }
    }

    pub fn knots(&self) -> &KnotVector {
        self.space.dir(0)
    }

    pub fn degree(&self) -> usize {
        self.knots().degree()
    }

    pub fn space(&self) -> &SplineSpace {
        &self.space
    }

    pub fn points(&self) -> &[[f64; D]] {
        &self.points
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.space.weights()
    }

    pub fn domain(&self) -> (f64, f64) {
        self.knots().domain()
    }

    pub fn eval(&self, t: f64) -> Result<[f64; D]> {
        Ok(self.derivs(t, 0)?[0])
    }

    /// Point and derivatives up to order `k` (at most 3).
    pub fn derivs(&self, t: f64, k: usize) -> Result<Vec<[f64; D]>> {
        let ev = self.space.eval(&[t], k)?;
        let mut out = vec![[0.0; D]; k + 1];
        for (f, v) in ev.indices.iter().zip(&ev.values) {
            let p = self.points[*f];
            for (kk, o) in out.iter_mut().enumerate() {
                let c = v[didx(kk, 0)];
                for d in 0..D {
                    o[d] += c * p[d];
                }
            }
        }
        Ok(out)
    }

    /// Same curve with refined knots.
    pub fn refined(&self, new_knots: &[f64]) -> Result<Self> {
        let (space, t) = self.space.h_refine(&[new_knots.to_vec()])?;
        Ok(Self { points: t.apply(&self.points), space })
    }

    /// Same curve with its parameter affinely mapped to [a, b].
    pub fn rescaled(&self, a: f64, b: f64) -> Self {
        let kv = self.knots().rescaled(a, b);
        let space = SplineSpace::new(vec![kv], self.weights().map(|w| w.to_vec())).unwrap();
        Self { space, points: self.points.clone() }
    }

    /// Bezier decomposition of a polynomial curve.
    pub fn bezier_segments(&self) -> Vec<BezierSegment<D>> {
        assert!(!self.space.is_rational(), "Bezier extraction of rational curves is not supported");
        let kv = self.knots();
        let p = kv.degree();
        let br = kv.breakpoints();
        let mut add = Vec::new();
        for &b in &br[1..br.len() - 1] {
            for _ in kv.multiplicity(b)..p {
                add.push(b);
            }
        }
        let (full, t) = insert_knots(kv, &add).expect("valid Bezier extraction");
        let pts = t.apply(&self.points);
        debug_assert_eq!(pts.len(), (br.len() - 1) * p + 1);
        let _ = full;
        br.windows(2)
            .enumerate()
            .map(|(s, w)| BezierSegment { t0: w[0], t1: w[1], points: pts[s * p..=s * p + p].to_vec() })
            .collect()
    }
}

impl<const D: usize> BezierSegment<D> {
    pub fn degree(&self) -> usize {
        self.points.len() - 1
    }

    /// De Casteljau split at local parameter `s` in (0, 1).
    pub fn split(&self, s: f64) -> (Self, Self) {
        let n = self.points.len();
        let mut work = self.points.clone();
        let mut left = Vec::with_capacity(n);
        let mut right = vec![[0.0; D]; n];
        left.push(work[0]);
        right[n - 1] = work[n - 1];
        for r in 1..n {
            for i in 0..n - r {
                for d in 0..D {
                    work[i][d] = (1.0 - s) * work[i][d] + s * work[i + 1][d];
                }
            }
            left.push(work[0]);
            right[n - 1 - r] = work[n - 1 - r];
        }
        let tm = self.t0 + s * (self.t1 - self.t0);
        (BezierSegment { t0: self.t0, t1: tm, points: left }, BezierSegment { t0: tm, t1: self.t1, points: right })
    }

    /// Value and first derivative (with respect to the global curve parameter).
    pub fn eval(&self, t: f64) -> ([f64; D], [f64; D]) {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let n = self.points.len();
        let mut work = self.points.clone();
        let mut der = [0.0; D];
        for r in 1..n {
            if r == n - 1 {
                for d in 0..D {
                    der[d] = (n - 1) as f64 * (work[1][d] - work[0][d]) / h;
                }
            }
            for i in 0..n - r {
                for d in 0..D {
                    work[i][d] = (1.0 - s) * work[i][d] + s * work[i + 1][d];
                }
            }
        }
        (work[0], der)
    }
}

mod points_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer, const D: usize>(pts: &[[f64; D]], s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<Vec<f64>> = pts.iter().map(|p| p.to_vec()).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, De: Deserializer<'de>, const D: usize>(d: De) -> Result<Vec<[f64; D]>, De::Error> {
        let v: Vec<Vec<f64>> = Vec::deserialize(d)?;
        v.into_iter()
            .map(|p| {
                <[f64; D]>::try_from(p.as_slice())
                    .map_err(|_| serde::de::Error::custom(format!("expected {D} coordinates")))
            })
            .collect()
    }
}
