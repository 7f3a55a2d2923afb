use std::sync::Arc;

use rayon::prelude::*;

use crate::curve::{curve_intersections, roots_on_line, TrimCurve};
use isoshell_core::error::{Error, Result};
use isoshell_numerics::gauss;
use isoshell_spline::{SplineCurve, SplineSpace};

/// Cut cells whose kept area falls below this fraction of the element area are dropped.
pub const SLIVER: f64 = 1e-12;
const MAX_DEPTH: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellStatus {
    Inside,
    Outside,
    Cut,
}

/// Quadrature subcell: a map from [0,1]^2 into a parametric element.
#[derive(Clone, Debug)]
pub enum QuadSubcell {
    Rect {
        u: [f64; 2],
        v: [f64; 2],
    },
    /// Region between a curve piece and the line `uv[1 - axis] = bound`, ruled along
    /// direction `1 - axis`: the curve parameter runs along the first subcell coordinate.
    Ruled {
        curve: Arc<SplineCurve<2>>,
        t: [f64; 2],
        axis: usize,
        bound: f64,
    },
}

impl QuadSubcell {
    /// Image point and Jacobian determinant (positive) at `(s, r)` in [0,1]^2.
    pub fn map(&self, s: f64, r: f64) -> ([f64; 2], f64) {
        match self {
            QuadSubcell::Rect { u, v } => {
                ([u[0] + s * (u[1] - u[0]), v[0] + r * (v[1] - v[0])], ((u[1] - u[0]) * (v[1] - v[0])).abs())
            }
            QuadSubcell::Ruled { curve, t, axis, bound } => {
                let dt = t[1] - t[0];
                let tt = t[0] + s * dt;
                let d = curve.derivs(tt, 1).expect("subcell curve parameter in range");
                let (c, dc) = (d[0], d[1]);
                let a = *axis;
                let o = 1 - a;
                let mut p = [0.0; 2];
                p[a] = c[a];
                p[o] = c[o] + r * (bound - c[o]);
                (p, (dc[a] * dt * (bound - c[o])).abs())
            }
        }
    }

    /// Tensor Gauss rule with `n` points per direction, weights include the Jacobian.
    pub fn quadrature(&self, n: usize) -> Vec<([f64; 2], f64)> {
        let g = gauss(n).expect("valid point count");
        let pts: Vec<(f64, f64)> = g.mapped(0.0, 1.0).collect();
        let mut out = Vec::with_capacity(n * n);
        for &(s, ws) in &pts {
            for &(r, wr) in &pts {
                let (p, j) = self.map(s, r);
                out.push((p, ws * wr * j));
            }
        }
        out
    }

    pub fn area(&self, n: usize) -> f64 {
        self.quadrature(n).iter().map(|q| q.1).sum()
    }

    /// A point well inside the subcell.
    pub fn center(&self) -> [f64; 2] {
        self.map(0.5, 0.5).0
    }
}

#[derive(Clone, Debug)]
pub struct ElementCell {
    pub i: usize,
    pub j: usize,
    pub u: [f64; 2],
    pub v: [f64; 2],
    pub status: CellStatus,
    /// Kept part of a cut cell; empty otherwise.
    pub subcells: Vec<QuadSubcell>,
}

impl ElementCell {
    pub fn area(&self) -> f64 {
        (self.u[1] - self.u[0]) * (self.v[1] - self.v[0])
    }

    pub fn is_active(&self) -> bool {
        self.status != CellStatus::Outside
    }

    /// Quadrature over the kept part: `n x n` points per subcell (or on the whole cell).
    pub fn quadrature(&self, n: usize) -> Vec<([f64; 2], f64)> {
        match self.status {
            CellStatus::Outside => Vec::new(),
            CellStatus::Inside => QuadSubcell::Rect { u: self.u, v: self.v }.quadrature(n),
            CellStatus::Cut => self.subcells.iter().flat_map(|s| s.quadrature(n)).collect(),
        }
    }
}

/// Element classification of a patch's Bezier mesh against its trim curves.
#[derive(Clone, Debug)]
pub struct TrimmedDomain {
    pub u_breaks: Vec<f64>,
    pub v_breaks: Vec<f64>,
    pub curves: Vec<TrimCurve>,
    /// Row-major: `cells[i * nv + j]`.
    pub cells: Vec<ElementCell>,
}

impl TrimmedDomain {
    pub fn untrimmed(u_breaks: &[f64], v_breaks: &[f64]) -> Self {
        classify_elements(u_breaks, v_breaks, &[]).expect("untrimmed classification")
    }

    pub fn is_trimmed(&self) -> bool {
        !self.curves.is_empty()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.u_breaks.len() - 1, self.v_breaks.len() - 1)
    }

    pub fn cell(&self, i: usize, j: usize) -> &ElementCell {
        &self.cells[i * (self.v_breaks.len() - 1) + j]
    }

    /// Whether a parameter point lies in the kept region.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let tol = 1e-12;
        if p[0] < -tol || p[0] > 1.0 + tol || p[1] < -tol || p[1] > 1.0 + tol {
            return false;
        }
        self.curves.iter().all(|c| c.keeps(p))
    }

    /// Kept area in the parameter domain.
    pub fn kept_area(&self, n: usize) -> f64 {
        self.cells.iter().flat_map(|c| c.quadrature(n)).map(|q| q.1).sum()
    }

    /// Flags basis functions of `space` whose support meets an active cell.
    pub fn active_functions(&self, space: &SplineSpace) -> Vec<bool> {
        let (nu, nv) = space.shape();
        let (pu, pv) = (space.dir(0).degree(), space.dir(1).degree());
        let mut active = vec![false; nu * nv];
        for c in self.cells.iter().filter(|c| c.is_active()) {
            let su = space.dir(0).find_span(0.5 * (c.u[0] + c.u[1]));
            let sv = space.dir(1).find_span(0.5 * (c.v[0] + c.v[1]));
            for a in su - pu..=su {
                for b in sv - pv..=sv {
                    active[a * nv + b] = true;
                }
            }
        }
        active
    }

    /// Sub-intervals of the line `uv[axis] = c` (for `uv[1-axis]` in [0,1]) inside the kept region.
    pub fn kept_intervals(&self, axis: usize, c: f64) -> Result<Vec<[f64; 2]>> {
        let other = 1 - axis;
        let mut cuts = vec![0.0, 1.0];
        for curve in &self.curves {
            for t in roots_on_line(curve.segments(), axis, c, None)? {
                cuts.push(curve.eval(t)[other].clamp(0.0, 1.0));
            }
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
        let mut out: Vec<[f64; 2]> = Vec::new();
        for w in cuts.windows(2) {
            let mut p = [0.0; 2];
            p[axis] = c;
            p[other] = 0.5 * (w[0] + w[1]);
            // Probe slightly inside the square so that edge lines classify robustly.
            p[axis] = p[axis].clamp(1e-9, 1.0 - 1e-9);
            if self.contains(p) {
                match out.last_mut() {
                    Some(last) if (last[1] - w[0]).abs() < 1e-15 => last[1] = w[1],
                    _ => out.push([w[0], w[1]]),
                }
            }
        }
        Ok(out)
    }
}

/// Labels each element of the breakpoint grid as inside, outside, or cut and builds
/// quadrature subcells for the cut ones.
pub fn classify_elements(u_breaks: &[f64], v_breaks: &[f64], curves: &[TrimCurve]) -> Result<TrimmedDomain> {
    for c in curves {
        for &u in &u_breaks[1..u_breaks.len() - 1] {
            c.intersect_gridline(0, u)?;
        }
        for &v in &v_breaks[1..v_breaks.len() - 1] {
            c.intersect_gridline(1, v)?;
        }
    }
    let mut specials = Vec::new();
    for a in 0..curves.len() {
        for b in a + 1..curves.len() {
            for (ta, _) in curve_intersections(&curves[a], &curves[b]) {
                specials.push(curves[a].eval(ta));
            }
        }
    }
    let (nu, nv) = (u_breaks.len() - 1, v_breaks.len() - 1);
    let ctx = Ctx { curves, specials: &specials };
    let cells = (0..nu * nv)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / nv, k % nv);
            let u = [u_breaks[i], u_breaks[i + 1]];
            let v = [v_breaks[j], v_breaks[j + 1]];
            let mut cell = ElementCell { i, j, u, v, status: CellStatus::Inside, subcells: Vec::new() };
            if curves.is_empty() {
                return Ok(cell);
            }
            let area = cell.area();
            let mut subs = Vec::new();
            let cut = ctx.split(u, v, 0, &mut subs).map_err(|e| match e {
                Error::UnsupportedTopology(..) => Error::UnsupportedTopology(i, j),
                other => other,
            })?;
            if !cut {
                let c = [0.5 * (u[0] + u[1]), 0.5 * (v[0] + v[1])];
                cell.status = if ctx.keeps(c) { CellStatus::Inside } else { CellStatus::Outside };
                return Ok(cell);
            }
            subs.retain(|s| s.area(4) > SLIVER * area);
            cell.status = if subs.is_empty() { CellStatus::Outside } else { CellStatus::Cut };
            cell.subcells = subs;
            Ok(cell)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrimmedDomain { u_breaks: u_breaks.to_vec(), v_breaks: v_breaks.to_vec(), curves: curves.to_vec(), cells })
}

struct Ctx<'a> {
    curves: &'a [TrimCurve],
    specials: &'a [[f64; 2]],
}

struct Piece {
    curve: usize,
    t: [f64; 2],
}

impl Ctx<'_> {
    fn keeps(&self, p: [f64; 2]) -> bool {
        self.curves.iter().all(|c| c.keeps(p))
    }

    fn pieces(&self, u: [f64; 2], v: [f64; 2]) -> Result<Vec<Piece>> {
        let size = (u[1] - u[0]).max(v[1] - v[0]);
        let eps = 1e-11 * size;
        let win = [u, v];
        let inside = |p: [f64; 2]| p[0] > u[0] + eps && p[0] < u[1] - eps && p[1] > v[0] + eps && p[1] < v[1] - eps;
        let on_box = |p: [f64; 2]| p[0] >= u[0] - eps && p[0] <= u[1] + eps && p[1] >= v[0] - eps && p[1] <= v[1] + eps;
        let mut out = Vec::new();
        for (k, c) in self.curves.iter().enumerate() {
            let mut ts = Vec::new();
            for axis in 0..2 {
                for &line in &win[axis] {
                    for t in roots_on_line(c.segments(), axis, line, Some(win))? {
                        if on_box(c.eval(t)) {
                            ts.push(t);
                        }
                    }
                }
            }
            for t in [0.0, 1.0] {
                if on_box(c.eval(t)) {
                    ts.push(t);
                }
            }
            ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            ts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
            for w in ts.windows(2) {
                if inside(c.eval(0.5 * (w[0] + w[1]))) {
                    out.push(Piece { curve: k, t: [w[0], w[1]] });
                }
            }
        }
        Ok(out)
    }

    /// Adds the kept subcells of the rectangle to `out`. Returns false when no curve
    /// passes through its interior (the caller then classifies it as a whole).
    fn split(&self, u: [f64; 2], v: [f64; 2], depth: usize, out: &mut Vec<QuadSubcell>) -> Result<bool> {
        let pieces = self.pieces(u, v)?;
        if pieces.is_empty() {
            return Ok(false);
        }
        let size = (u[1] - u[0]).max(v[1] - v[0]);
        let eps = 1e-9 * size;
        let special = self
            .specials
            .iter()
            .find(|p| p[0] > u[0] + eps && p[0] < u[1] - eps && p[1] > v[0] + eps && p[1] < v[1] - eps);
        if let Some(&s) = special {
            self.recurse(u, v, s, depth, out)?;
            return Ok(true);
        }
        if pieces.len() == 1 {
            let pc = &pieces[0];
            let c = &self.curves[pc.curve];
            let mono = [monotone(c, pc.t, 0), monotone(c, pc.t, 1)];
            if mono[0] || mono[1] {
                let (a, b) = (c.eval(pc.t[0]), c.eval(pc.t[1]));
                let axis = if mono[0] && mono[1] {
                    if (b[0] - a[0]).abs() >= (b[1] - a[1]).abs() {
                        0
                    } else {
                        1
                    }
                } else if mono[0] {
                    0
                } else {
                    1
                };
                self.decompose(u, v, pc, axis, out);
                return Ok(true);
            }
        }
        let mid = [0.5 * (u[0] + u[1]), 0.5 * (v[0] + v[1])];
        self.recurse(u, v, mid, depth, out)?;
        Ok(true)
    }

    fn recurse(&self, u: [f64; 2], v: [f64; 2], at: [f64; 2], depth: usize, out: &mut Vec<QuadSubcell>) -> Result<()> {
        if depth >= MAX_DEPTH {
            return Err(Error::UnsupportedTopology(0, 0));
        }
        for uu in [[u[0], at[0]], [at[0], u[1]]] {
            for vv in [[v[0], at[1]], [at[1], v[1]]] {
                if uu[1] - uu[0] <= 0.0 || vv[1] - vv[0] <= 0.0 {
                    continue;
                }
                if !self.split(uu, vv, depth + 1, out)? {
                    let c = [0.5 * (uu[0] + uu[1]), 0.5 * (vv[0] + vv[1])];
                    if self.keeps(c) {
                        out.push(QuadSubcell::Rect { u: uu, v: vv });
                    }
                }
            }
        }
        Ok(())
    }

    /// Splits a rectangle crossed by one piece monotone along `axis` into two side strips
    /// and two ruled cells, keeping those on the kept side.
    fn decompose(&self, u: [f64; 2], v: [f64; 2], pc: &Piece, axis: usize, out: &mut Vec<QuadSubcell>) {
        let c = &self.curves[pc.curve];
        let rect = [u, v];
        let o = 1 - axis;
        let (a, b) = (c.eval(pc.t[0]), c.eval(pc.t[1]));
        let lo = a[axis].min(b[axis]);
        let hi = a[axis].max(b[axis]);
        let area = (u[1] - u[0]) * (v[1] - v[0]);
        let mut cand = Vec::new();
        let strip = |x0: f64, x1: f64| {
            let mut r = rect;
            r[axis] = [x0, x1];
            QuadSubcell::Rect { u: r[0], v: r[1] }
        };
        if lo - rect[axis][0] > 0.0 {
            cand.push(strip(rect[axis][0], lo));
        }
        if rect[axis][1] - hi > 0.0 {
            cand.push(strip(hi, rect[axis][1]));
        }
        for &bound in &rect[o] {
            cand.push(QuadSubcell::Ruled { curve: c.shared_curve(), t: pc.t, axis, bound });
        }
        for s in cand {
            if s.area(4) > SLIVER * area && self.keeps(s.center()) {
                out.push(s);
            }
        }
    }
}

/// Whether the control polygon of the curve restricted to `t` is monotone in `axis`.
fn monotone(c: &TrimCurve, t: [f64; 2], axis: usize) -> bool {
    for seg in c.segments() {
        let a = seg.t0.max(t[0]);
        let b = seg.t1.min(t[1]);
        if b - a <= 0.0 {
            continue;
        }
        let mut s = seg.clone();
        if b < s.t1 {
            s = s.split((b - s.t0) / (s.t1 - s.t0)).0;
        }
        if a > s.t0 {
            s = s.split((a - s.t0) / (s.t1 - s.t0)).1;
        }
        let vals: Vec<f64> = s.points.iter().map(|p| p[axis]).collect();
        let inc = vals.windows(2).all(|w| w[1] >= w[0]);
        let dec = vals.windows(2).all(|w| w[1] <= w[0]);
        if !(inc || dec) {
            return false;
        }
    }
    // Monotone pieces on each segment must also agree in direction.
    let n = 8;
    let vals: Vec<f64> = (0..=n).map(|k| c.eval(t[0] + (t[1] - t[0]) * k as f64 / n as f64)[axis]).collect();
    vals.windows(2).all(|w| w[1] >= w[0]) || vals.windows(2).all(|w| w[1] <= w[0])
}
