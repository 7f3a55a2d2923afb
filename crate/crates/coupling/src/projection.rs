use std::collections::HashMap;

use faer::linalg::solvers::Llt;
use faer::prelude::*;
use faer::{Mat, Side};

use crate::interface::InterfaceSpace;
use crate::model::MultiPatchModel;
use crate::penalty::{PenaltyParams, PenaltyStrategy};
use isoshell_core::error::{Error, Result};
use isoshell_core::math::{cross, dot};
use isoshell_shell::{normal_variation, DofMap};

/// Jump rows at one interface quadrature point, over local column indices.
#[derive(Clone, Debug, Default)]
pub struct PointJump {
    pub weight: f64,
    /// `(column, component, value)` of the displacement jump `u^0 − u^1`.
    pub disp: Vec<(usize, usize, f64)>,
    /// The two complementary rotation terms `(column, value)`.
    pub rot: [Vec<(usize, f64)>; 2],
    /// First reduced basis index and the nonzero reduced basis values.
    pub rho_first: usize,
    pub rho: Vec<f64>,
}

/// Linearized jump operators of an interface on its quadrature points.
#[derive(Clone, Debug)]
pub struct JumpOperator {
    /// Global dof of each local column.
    pub columns: Vec<usize>,
    pub points: Vec<PointJump>,
}

impl JumpOperator {
    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    /// Gathers the local column values of a global vector.
    pub fn gather(&self, u: &[f64]) -> Vec<f64> {
        self.columns.iter().map(|&d| u[d]).collect()
    }
}

/// Evaluates displacement and rotation jump rows at every interface quadrature point.
///
/// Rotation terms, with side normals `m = a3⁰`, `n = a3¹` and shared tangent `τ`:
/// `t1 = δm·n + m·δn` and `t2 = δm·(τ×n) + δn·(m×τ)`.
pub fn jump_operator(model: &MultiPatchModel, dofs: &DofMap, iface: &InterfaceSpace) -> Result<JumpOperator> {
    let mut colmap: HashMap<usize, usize> = HashMap::new();
    let mut columns = Vec::new();
    let mut col = |d: usize| -> usize {
        *colmap.entry(d).or_insert_with(|| {
            columns.push(d);
            columns.len() - 1
        })
    };
    let mut points = Vec::with_capacity(iface.points.len());
    for q in &iface.points {
        let rb = iface.reduced.eval(&[q.s], 0)?;
        let mut pj = PointJump {
            weight: q.weight,
            rho_first: rb.indices[0],
            rho: rb.values.iter().map(|v| v[0]).collect(),
            ..Default::default()
        };
        let mut frames = Vec::with_capacity(2);
        let mut bases = Vec::with_capacity(2);
        for side in 0..2 {
            let p = &model.patches[iface.patches[side]];
            frames.push(p.frame(q.uv[side], 0)?);
            bases.push(p.space.eval(&q.uv[side], 1)?);
        }
        let (m, n) = (frames[0].a3, frames[1].a3);
        let tau = q.tangent;
        let dirs = [[n, cross(tau, n)], [m, cross(m, tau)]];
        for side in 0..2 {
            let patch = iface.patches[side];
            let sign = if side == 0 { 1.0 } else { -1.0 };
            let basis = &bases[side];
            let dn = normal_variation(&frames[side], basis);
            for (k, (&f, v)) in basis.indices.iter().zip(&basis.values).enumerate() {
                let Some(base) = dofs.dof(patch, f, 0) else { continue };
                for c in 0..3 {
                    let j = col(base + c);
                    if v[0] != 0.0 {
                        pj.disp.push((j, c, sign * v[0]));
                    }
                    let w = dn[3 * k + c];
                    for t in 0..2 {
                        let r = dot(w, dirs[side][t]);
                        if r != 0.0 {
                            pj.rot[t].push((j, r));
                        }
                    }
                }
            }
        }
        points.push(pj);
    }
    Ok(JumpOperator { columns, points })
}

/// L2 projection of the interface jumps onto the degree-reduced space.
#[derive(Clone, Debug)]
pub struct ProjectionOperator {
    pub r: usize,
    /// Reduced mass matrix, row-major `r × r`.
    pub mass: Vec<f64>,
    pub diagonal: bool,
    /// Displacement right-hand side, rows `c r + j`, row-major over the jump columns.
    pub f_disp: Mat<f64>,
    /// Rotation right-hand side, rows `k r + j`.
    pub f_rot: Mat<f64>,
    llt: Option<Llt<f64>>,
    diag: Vec<f64>,
}

impl ProjectionOperator {
    /// Solves `ℳ X = B` blockwise for a right-hand side with a multiple of `r` rows.
    pub fn solve_mass(&self, b: &Mat<f64>) -> Mat<f64> {
        let r = self.r;
        let mut x = b.clone();
        for blk in 0..b.nrows() / r {
            let mut rows = x.as_mut().subrows_mut(blk * r, r);
            if let Some(llt) = &self.llt {
                llt.solve_in_place(rows.as_mut());
            } else {
                for j in 0..rows.ncols() {
                    for i in 0..r {
                        rows[(i, j)] /= self.diag[i];
                    }
                }
            }
        }
        x
    }

    fn apply(f: &Mat<f64>, u: &[f64]) -> Mat<f64> {
        Mat::from_fn(f.nrows(), 1, |i, _| (0..f.ncols()).map(|j| f[(i, j)] * u[j]).sum())
    }

    /// Reduced coefficients `(ũ_disp, ũ_rot)` of the projected jumps of local column values `u`.
    pub fn project(&self, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let d = self.solve_mass(&Self::apply(&self.f_disp, u));
        let r = self.solve_mass(&Self::apply(&self.f_rot, u));
        (d.col(0).iter().copied().collect(), r.col(0).iter().copied().collect())
    }

    /// `max |ℳ ũ − ℱ û|` over both projected jumps.
    pub fn residual(&self, u: &[f64]) -> f64 {
        let (d, rt) = self.project(u);
        let mut worst: f64 = 0.0;
        for (f, x) in [(&self.f_disp, &d), (&self.f_rot, &rt)] {
            let fu = Self::apply(f, u);
            for blk in 0..x.len() / self.r {
                for i in 0..self.r {
                    let mut mx = 0.0;
                    for j in 0..self.r {
                        mx += self.mass[i * self.r + j] * x[blk * self.r + j];
                    }
                    worst = worst.max((mx - fu[(blk * self.r + i, 0)]).abs());
                }
            }
        }
        worst
    }

    /// Projection of a scalar function given at the interface quadrature points.
    pub fn project_values(&self, op: &JumpOperator, g: impl Fn(usize) -> f64) -> Vec<f64> {
        let mut b = Mat::zeros(self.r, 1);
        for (q, pj) in op.points.iter().enumerate() {
            let gq = g(q);
            for (k, rho) in pj.rho.iter().enumerate() {
                b[(pj.rho_first + k, 0)] += pj.weight * rho * gq;
            }
        }
        self.solve_mass(&b).col(0).iter().copied().collect()
    }
}

/// Reduced mass matrix and projection right-hand sides of an interface.
pub fn projection_matrices(iface: &InterfaceSpace, op: &JumpOperator, lumped: bool) -> Result<ProjectionOperator> {
    let r = iface.reduced_dim();
    let nc = op.ncols();
    let mut mass = vec![0.0; r * r];
    let mut f_disp = Mat::zeros(3 * r, nc);
    let mut f_rot = Mat::zeros(2 * r, nc);
    for pj in &op.points {
        for (a, ra) in pj.rho.iter().enumerate() {
            let i = pj.rho_first + a;
            for (b, rb) in pj.rho.iter().enumerate() {
                mass[i * r + pj.rho_first + b] += pj.weight * ra * rb;
            }
            let w = pj.weight * ra;
            for &(j, c, v) in &pj.disp {
                f_disp[(c * r + i, j)] += w * v;
            }
            for t in 0..2 {
                for &(j, v) in &pj.rot[t] {
                    f_rot[(t * r + i, j)] += w * v;
                }
            }
        }
    }
    let diagonal = lumped || iface.reduced.dir(0).degree() == 0;
    let (llt, diag) = if diagonal {
        let d: Vec<f64> = (0..r).map(|i| (0..r).map(|j| mass[i * r + j]).sum()).collect();
        if let Some(i) = d.iter().position(|&x| !(x > 0.0)) {
            return Err(Error::SingularMass(i));
        }
        (None, d)
    } else {
        let m = Mat::from_fn(r, r, |i, j| mass[i * r + j]);
        let llt = m.llt(Side::Lower).map_err(|_| Error::SingularMass(iface.index))?;
        (Some(llt), Vec::new())
    };
    Ok(ProjectionOperator { r, mass, diagonal, f_disp, f_rot, llt, diag })
}

/// Dense symmetric penalty contribution over a set of global dofs.
#[derive(Clone, Debug)]
pub struct PenaltyBlock {
    pub columns: Vec<usize>,
    pub matrix: Mat<f64>,
}

impl PenaltyBlock {
    /// `ûᵀ ΔK û` for a global vector.
    pub fn energy(&self, u: &[f64]) -> f64 {
        let x: Vec<f64> = self.columns.iter().map(|&d| u[d]).collect();
        let n = x.len();
        let mut e = 0.0;
        for i in 0..n {
            for j in 0..n {
                e += x[i] * self.matrix[(i, j)] * x[j];
            }
        }
        e
    }

    pub fn max_abs(&self) -> f64 {
        let n = self.columns.len();
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).fold(0.0, |a, (i, j)| a.max(self.matrix[(i, j)].abs()))
    }

    /// Nonzero upper-triangle global entries `(i ≤ j, value)`. Columns are distinct dofs.
    /// Nothing is truncated: dropping tiny entries can make the block indefinite.
    pub fn upper_entries(&self) -> Vec<(usize, usize, f64)> {
        let n = self.columns.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let (i, j) = (self.columns[a], self.columns[b]);
                let v = self.matrix[(a, b)];
                if i <= j && v != 0.0 {
                    out.push((i, j, v));
                }
            }
        }
        out
    }
}

/// Penalty stiffness of one interface: projected `α ℱᵀ ℳ⁻¹ ℱ` or the unprojected `∫ α ⟦·⟧²`.
pub fn assemble_penalty(
    iface: &InterfaceSpace,
    op: &JumpOperator,
    strategy: &PenaltyStrategy,
    params: PenaltyParams,
) -> Result<PenaltyBlock> {
    let nc = op.ncols();
    let mut k = Mat::<f64>::zeros(nc, nc);
    match strategy {
        PenaltyStrategy::Projected { lumped, .. } => {
            let proj = projection_matrices(iface, op, *lumped)?;
            for (f, alpha) in [(&proj.f_disp, params.disp), (&proj.f_rot, params.rot)] {
                let g = proj.solve_mass(f);
                k += Scale(alpha) * (f.transpose() * &g);
            }
        }
        PenaltyStrategy::Classic | PenaltyStrategy::Scaled { .. } => {
            for pj in &op.points {
                for c in 0..3 {
                    let row: Vec<_> = pj.disp.iter().filter(|e| e.1 == c).collect();
                    for &&(i, _, vi) in &row {
                        for &&(j, _, vj) in &row {
                            k[(i, j)] += params.disp * pj.weight * vi * vj;
                        }
                    }
                }
                for t in 0..2 {
                    for &(i, vi) in &pj.rot[t] {
                        for &(j, vj) in &pj.rot[t] {
                            k[(i, j)] += params.rot * pj.weight * vi * vj;
                        }
                    }
                }
            }
        }
    }
    let sym = Mat::from_fn(nc, nc, |i, j| 0.5 * (k[(i, j)] + k[(j, i)]));
    Ok(PenaltyBlock { columns: op.columns.clone(), matrix: sym })
}
