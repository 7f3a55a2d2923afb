use std::sync::Arc;

use serde::{Deserialize, Serialize};

use isoshell_core::error::{Error, Result};
use isoshell_spline::{BezierSegment, SplineCurve};

/// Tolerance for points on the unit-square boundary.
pub const BOUNDARY_TOL: f64 = 1e-10;

/// Parametric trim curve with the kept region on one side of its travel direction.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "TrimCurveRepr", into = "TrimCurveRepr")]
pub struct TrimCurve {
    curve: Arc<SplineCurve<2>>,
    keep_left: bool,
    segments: Vec<BezierSegment<2>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct TrimCurveRepr {
    curve: SplineCurve<2>,
    keep_left: bool,
}

impl TryFrom<TrimCurveRepr> for TrimCurve {
    type Error = Error;
    fn try_from(r: TrimCurveRepr) -> Result<Self> {
        TrimCurve::new(r.curve, r.keep_left)
    }
}

impl From<TrimCurve> for TrimCurveRepr {
    fn from(t: TrimCurve) -> Self {
        TrimCurveRepr { curve: (*t.curve).clone(), keep_left: t.keep_left }
    }
}

impl TrimCurve {
    /// The curve is reparametrized onto [0, 1]. Its end points must lie on the boundary
    /// of the unit square so that it splits the square in two.
    pub fn new(curve: SplineCurve<2>, keep_left: bool) -> Result<Self> {
        if curve.space().is_rational() {
            return Err(Error::Invalid("trim curves must be polynomial".into()));
        }
        if curve.degree() > 3 || curve.degree() == 0 {
            return Err(Error::Invalid(format!("trim curve degree {}", curve.degree())));
        }
        let curve = curve.rescaled(0.0, 1.0);
        for t in [0.0, 1.0] {
            let p = curve.eval(t)?;
            if perimeter_coord(p).is_none() {
                return Err(Error::Invalid(format!(
                    "trim curve end point ({}, {}) is not on the parameter-domain boundary",
                    p[0], p[1]
                )));
            }
        }
        let segments = curve.bezier_segments();
        Ok(Self { curve: Arc::new(curve), keep_left, segments })
    }

    pub fn curve(&self) -> &SplineCurve<2> {
        &self.curve
    }

    pub fn shared_curve(&self) -> Arc<SplineCurve<2>> {
        self.curve.clone()
    }

    pub fn keep_left(&self) -> bool {
        self.keep_left
    }

    pub fn segments(&self) -> &[BezierSegment<2>] {
        &self.segments
    }

    pub fn eval(&self, t: f64) -> [f64; 2] {
        self.segment_at(t).eval(t).0
    }

    pub fn eval_d1(&self, t: f64) -> ([f64; 2], [f64; 2]) {
        self.segment_at(t).eval(t)
    }

    fn segment_at(&self, t: f64) -> &BezierSegment<2> {
        let k = self.segments.partition_point(|s| s.t1 < t).min(self.segments.len() - 1);
        &self.segments[k]
    }

    /// Parameters where the curve meets the line `uv[axis] = c`.
    pub fn intersect_gridline(&self, axis: usize, c: f64) -> Result<Vec<f64>> {
        roots_on_line(&self.segments, axis, c, None)
    }

    /// True when `p` lies on the left of the curve (closed along the square's boundary).
    pub fn is_left(&self, p: [f64; 2]) -> bool {
        let mut winding = 0i32;
        let roots = roots_on_line(&self.segments, 1, p[1], None).unwrap_or_default();
        for t in roots {
            let (q, dq) = self.eval_d1(t);
            if q[0] > p[0] && dq[1] != 0.0 {
                winding += if dq[1] > 0.0 { 1 } else { -1 };
            }
        }
        let s_start = perimeter_coord(self.eval(0.0)).unwrap_or(0.0);
        let s_end = perimeter_coord(self.eval(1.0)).unwrap_or(0.0);
        let s_ray = 1.0 + p[1];
        let span = (s_start - s_end).rem_euclid(4.0);
        if (s_ray - s_end).rem_euclid(4.0) < span {
            winding += 1;
        }
        winding != 0
    }

    /// Whether `p` is on the kept side.
    pub fn keeps(&self, p: [f64; 2]) -> bool {
        self.is_left(p) == self.keep_left
    }
}

/// Counter-clockwise perimeter coordinate in [0, 4) of a point on the unit square's boundary.
pub fn perimeter_coord(p: [f64; 2]) -> Option<f64> {
    let tol = BOUNDARY_TOL;
    let inside = |x: f64| x > -tol && x < 1.0 + tol;
    if !inside(p[0]) || !inside(p[1]) {
        return None;
    }
    if p[1].abs() <= tol {
        Some(p[0].clamp(0.0, 1.0))
    } else if (p[0] - 1.0).abs() <= tol {
        Some(1.0 + p[1].clamp(0.0, 1.0))
    } else if (p[1] - 1.0).abs() <= tol {
        Some(2.0 + (1.0 - p[0].clamp(0.0, 1.0)))
    } else if p[0].abs() <= tol {
        Some((3.0 + (1.0 - p[1].clamp(0.0, 1.0))).rem_euclid(4.0))
    } else {
        None
    }
}

/// Roots of `segment[axis](t) = c` over all segments, optionally only for segments whose
/// control box meets `window = [[u0,u1],[v0,v1]]`. Roots are polished to `|res| < 1e-12`.
pub fn roots_on_line(
    segments: &[BezierSegment<2>],
    axis: usize,
    c: f64,
    window: Option<[[f64; 2]; 2]>,
) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for seg in segments {
        if let Some(w) = window {
            let pad = 1e-12;
            let disjoint = (0..2).any(|d| {
                let lo = seg.points.iter().map(|p| p[d]).fold(f64::INFINITY, f64::min);
                let hi = seg.points.iter().map(|p| p[d]).fold(f64::NEG_INFINITY, f64::max);
                hi < w[d][0] - pad || lo > w[d][1] + pad
            });
            if disjoint {
                continue;
            }
        }
        bezier_roots(seg, axis, c, 0, &mut out)?;
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-10);
    Ok(out)
}

fn bezier_roots(seg: &BezierSegment<2>, axis: usize, c: f64, depth: usize, out: &mut Vec<f64>) -> Result<()> {
    let vals: Vec<f64> = seg.points.iter().map(|p| p[axis] - c).collect();
    let scale = seg.points.iter().map(|p| p[axis].abs()).fold(1.0, f64::max);
    let tol = 1e-14 * scale;
    if vals.iter().all(|&v| v > tol) || vals.iter().all(|&v| v < -tol) {
        return Ok(());
    }
    if vals.iter().all(|&v| v.abs() <= 1e-13 * scale) {
        return Err(Error::AmbiguousClassification { axis: if axis == 0 { 'u' } else { 'v' }, value: c });
    }
    let monotone = vals.windows(2).all(|w| w[1] >= w[0]) || vals.windows(2).all(|w| w[1] <= w[0]);
    let f = |t: f64| seg.eval(t).0[axis] - c;
    if monotone {
        let (a, b) = (seg.t0, seg.t1);
        let (fa, fb) = (f(a), f(b));
        if fa.abs() <= 1e-14 * scale {
            out.push(a);
            return Ok(());
        }
        if fb.abs() <= 1e-14 * scale {
            out.push(b);
            return Ok(());
        }
        if fa.signum() == fb.signum() {
            return Ok(());
        }
        out.push(safeguarded_newton(seg, axis, c, a, b, fa));
        return Ok(());
    }
    if depth > 48 || seg.t1 - seg.t0 < 1e-13 {
        let tm = 0.5 * (seg.t0 + seg.t1);
        if f(tm).abs() < 1e-12 * scale {
            out.push(tm);
        }
        return Ok(());
    }
    let (l, r) = seg.split(0.5);
    bezier_roots(&l, axis, c, depth + 1, out)?;
    bezier_roots(&r, axis, c, depth + 1, out)
}

fn safeguarded_newton(seg: &BezierSegment<2>, axis: usize, c: f64, mut a: f64, mut b: f64, fa: f64) -> f64 {
    let sa = fa.signum();
    let mut t = 0.5 * (a + b);
    for _ in 0..200 {
        let (p, dp) = seg.eval(t);
        let ft = p[axis] - c;
        if ft == 0.0 {
            return t;
        }
        if ft.signum() == sa {
            a = t;
        } else {
            b = t;
        }
        let d = dp[axis];
        let mut next = if d != 0.0 { t - ft / d } else { f64::NAN };
        if !(next > a && next < b) {
            next = 0.5 * (a + b);
        }
        if (next - t).abs() <= 1e-16 * (1.0 + t.abs()) || b - a <= 1e-16 {
            return next;
        }
        t = next;
    }
    t
}

/// Intersections of two trim curves: pairs `(t_a, t_b)`.
pub fn curve_intersections(a: &TrimCurve, b: &TrimCurve) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for sa in a.segments() {
        for sb in b.segments() {
            seg_intersections(sa, sb, 0, &mut out);
        }
    }
    let mut res: Vec<(f64, f64)> = Vec::new();
    for (ta, tb) in out {
        if let Some((ta, tb)) = newton2(a, b, ta, tb) {
            if !res.iter().any(|r| (r.0 - ta).abs() < 1e-8 && (r.1 - tb).abs() < 1e-8) {
                res.push((ta, tb));
            }
        }
    }
    res.sort_by(|x, y| x.partial_cmp(y).unwrap());
    res
}

fn bbox(s: &BezierSegment<2>) -> [[f64; 2]; 2] {
    let mut b = [[f64::INFINITY, f64::NEG_INFINITY]; 2];
    for p in &s.points {
        for d in 0..2 {
            b[d][0] = b[d][0].min(p[d]);
            b[d][1] = b[d][1].max(p[d]);
        }
    }
    b
}

fn seg_intersections(a: &BezierSegment<2>, b: &BezierSegment<2>, depth: usize, out: &mut Vec<(f64, f64)>) {
    let (ba, bb) = (bbox(a), bbox(b));
    let pad = 1e-12;
    if (0..2).any(|d| ba[d][1] < bb[d][0] - pad || bb[d][1] < ba[d][0] - pad) {
        return;
    }
    let size = |x: &[[f64; 2]; 2]| (x[0][1] - x[0][0]).max(x[1][1] - x[1][0]);
    if depth >= 30 || (size(&ba) < 1e-7 && size(&bb) < 1e-7) {
        out.push((0.5 * (a.t0 + a.t1), 0.5 * (b.t0 + b.t1)));
        return;
    }
    let (a1, a2) = a.split(0.5);
    let (b1, b2) = b.split(0.5);
    for x in [&a1, &a2] {
        for y in [&b1, &b2] {
            seg_intersections(x, y, depth + 1, out);
        }
    }
}

fn newton2(a: &TrimCurve, b: &TrimCurve, mut ta: f64, mut tb: f64) -> Option<(f64, f64)> {
    for _ in 0..50 {
        let (pa, da) = a.eval_d1(ta);
        let (pb, db) = b.eval_d1(tb);
        let r = [pa[0] - pb[0], pa[1] - pb[1]];
        if r[0].hypot(r[1]) < 1e-15 {
            break;
        }
        let det = -da[0] * db[1] + da[1] * db[0];
        if det.abs() < 1e-300 {
            break;
        }
        // Solve [da, -db] [dta, dtb] = -r.
        let dta = (-r[0] * -db[1] + db[0] * -r[1]) / det;
        let dtb = (da[0] * -r[1] - da[1] * -r[0]) / det;
        ta = (ta + dta).clamp(0.0, 1.0);
        tb = (tb + dtb).clamp(0.0, 1.0);
    }
    let (pa, pb) = (a.eval(ta), b.eval(tb));
    ((pa[0] - pb[0]).hypot(pa[1] - pb[1]) < 1e-11).then_some((ta, tb))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_line() {
        let c = TrimCurve::new(SplineCurve::line([0.0, 0.0], [1.0, 1.0]), true).unwrap();
        assert_eq!(c.intersect_gridline(0, 0.5).unwrap(), vec![0.5]);
        assert!(c.is_left([0.2, 0.8]));
        assert!(!c.is_left([0.8, 0.2]));
    }

    #[test]
    fn parabola_roots() {
        // 2t(1-t) = 1/4 has roots 1/2 ± sqrt(2)/4; the apex sits at height 1/2.
        let c = TrimCurve::new(SplineCurve::bezier(vec![[0.0, 0.0], [0.5, 1.0], [1.0, 0.0]]), true).unwrap();
        let r = c.intersect_gridline(1, 0.25).unwrap();
        let s = 2f64.sqrt() / 4.0;
        assert_eq!(r.len(), 2);
        assert!((r[0] - (0.5 - s)).abs() < 1e-13 && (r[1] - (0.5 + s)).abs() < 1e-13);
        for t in r {
            assert!((c.eval(t)[1] - 0.25).abs() < 1e-12);
        }
        let apex = c.intersect_gridline(1, 0.5).unwrap();
        assert_eq!(apex.len(), 1);
        assert!((apex[0] - 0.5).abs() < 1e-6);
        assert!(c.intersect_gridline(1, 0.7).unwrap().is_empty());
        assert!(c.intersect_gridline(0, 1.5).unwrap().is_empty());
    }

    #[test]
    fn sides_of_vertical_line() {
        let c = TrimCurve::new(SplineCurve::line([0.3, 0.0], [0.3, 1.0]), true).unwrap();
        assert!(c.is_left([0.1, 0.5]));
        assert!(!c.is_left([0.9, 0.5]));
        let d = TrimCurve::new(SplineCurve::line([0.3, 1.0], [0.3, 0.0]), true).unwrap();
        assert!(!d.is_left([0.1, 0.5]));
        assert!(d.is_left([0.9, 0.1]));
    }

    #[test]
    fn interior_endpoint_rejected() {
        assert!(TrimCurve::new(SplineCurve::line([0.3, 0.0], [0.3, 0.5]), true).is_err());
    }

    #[test]
    fn coincident_with_gridline() {
        let c = TrimCurve::new(SplineCurve::line([0.5, 0.0], [0.5, 1.0]), true).unwrap();
        assert!(matches!(c.intersect_gridline(0, 0.5), Err(Error::AmbiguousClassification { .. })));
    }

    #[test]
    fn crossing_curves() {
        let a = TrimCurve::new(SplineCurve::line([0.0, 0.0], [1.0, 1.0]), true).unwrap();
        let b = TrimCurve::new(SplineCurve::bezier(vec![[0.0, 1.0], [0.5, 0.2], [1.0, 0.0]]), true).unwrap();
        let x = curve_intersections(&a, &b);
        assert_eq!(x.len(), 1);
        let (pa, pb) = (a.eval(x[0].0), b.eval(x[0].1));
        assert!((pa[0] - pb[0]).abs() < 1e-12 && (pa[1] - pb[1]).abs() < 1e-12);
    }
}
