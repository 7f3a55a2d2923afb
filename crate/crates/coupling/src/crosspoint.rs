use faer::Mat;

use crate::interface::InterfaceSpace;
use crate::model::MultiPatchModel;
use crate::penalty::PenaltyParams;
use crate::projection::PenaltyBlock;
use isoshell_core::error::{Error, Result};
use isoshell_shell::DofMap;

/// Continuity constraint at one cross-point.
#[derive(Clone, Debug)]
pub enum CrossPointConstraint {
    /// `(slave, master)` dof pairs equating corner displacements.
    Ties(Vec<(usize, usize)>),
    /// Point penalty `κ Σ_{a<b} |u_a(c) − u_b(c)|²`.
    Penalty { kappa: f64, block: PenaltyBlock },
}

const CORNER_TOL: f64 = 1e-12;

fn corner_function(model: &MultiPatchModel, dofs: &DofMap, patch: usize, uv: [f64; 2]) -> Option<usize> {
    let space = &model.patches[patch].space;
    let (nu, nv) = space.shape();
    let idx = |x: f64, n: usize| {
        if x.abs() < CORNER_TOL {
            Some(0)
        } else if (x - 1.0).abs() < CORNER_TOL {
            Some(n - 1)
        } else {
            None
        }
    };
    let f = space.flat(idx(uv[0], nu)?, idx(uv[1], nv)?);
    dofs.dof(patch, f, 0).map(|_| f)
}

/// Ties at patch corners, otherwise a point penalty with coefficient `α_disp h` taken as
/// the largest over interfaces joining two incident patches.
pub fn cross_point_constraints(
    model: &MultiPatchModel,
    dofs: &DofMap,
    ifaces: &[InterfaceSpace],
    params: &[PenaltyParams],
) -> Result<Vec<CrossPointConstraint>> {
    let tol = model.watertight_tol();
    let mut out = Vec::with_capacity(model.crosspoints.len());
    for (c, cp) in model.crosspoints.iter().enumerate() {
        let xs: Vec<_> =
            cp.incident.iter().map(|&(p, uv)| model.patches[p].geometry.eval(uv)).collect::<Result<_>>()?;
        let gap = xs.iter().map(|x| isoshell_core::math::norm(isoshell_core::math::sub(*x, xs[0]))).fold(0.0, f64::max);
        if gap > tol {
            return Err(Error::CrossPointMismatch { index: c, gap });
        }
        let corners: Vec<_> = cp.incident.iter().map(|&(p, uv)| corner_function(model, dofs, p, uv)).collect();
        if corners.iter().all(Option::is_some) {
            let (p0, _) = cp.incident[0];
            let master = dofs.dof(p0, corners[0].unwrap(), 0).unwrap();
            let mut ties = Vec::new();
            for (k, &(p, _)) in cp.incident.iter().enumerate().skip(1) {
                let slave = dofs.dof(p, corners[k].unwrap(), 0).unwrap();
                ties.extend((0..3).map(|d| (slave + d, master + d)));
            }
            out.push(CrossPointConstraint::Ties(ties));
            continue;
        }
        let incident: Vec<usize> = cp.incident.iter().map(|e| e.0).collect();
        let joins = |i: &InterfaceSpace, both: bool| {
            let hit = i.patches.iter().filter(|p| incident.contains(p)).count();
            if both {
                hit == 2
            } else {
                hit >= 1
            }
        };
        let kappa = [true, false]
            .iter()
            .map(|&both| {
                ifaces.iter().zip(params).filter(|(i, _)| joins(i, both)).map(|(i, a)| a.disp * i.h).fold(0.0, f64::max)
            })
            .find(|&k| k > 0.0)
            .ok_or_else(|| Error::Invalid(format!("cross-point {c} touches no interface")))?;

        let mut columns: Vec<usize> = Vec::new();
        let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
        for &(p, uv) in &cp.incident {
            let basis = model.patches[p].space.eval(&uv, 0)?;
            let mut row = Vec::new();
            for (&f, v) in basis.indices.iter().zip(&basis.values) {
                if let Some(base) = dofs.dof(p, f, 0) {
                    if v[0] != 0.0 {
                        let col = columns.len();
                        columns.extend([base, base + 1, base + 2]);
                        row.push((col, v[0]));
                    }
                }
            }
            rows.push(row);
        }
        let n = columns.len();
        let mut m = Mat::<f64>::zeros(n, n);
        for a in 0..rows.len() {
            for b in a + 1..rows.len() {
                let jump: Vec<(usize, f64)> =
                    rows[a].iter().copied().chain(rows[b].iter().map(|&(i, v)| (i, -v))).collect();
                for &(i, vi) in &jump {
                    for &(j, vj) in &jump {
                        for d in 0..3 {
                            m[(i + d, j + d)] += kappa * vi * vj;
                        }
                    }
                }
            }
        }
        out.push(CrossPointConstraint::Penalty { kappa, block: PenaltyBlock { columns, matrix: m } });
    }
    Ok(out)
}
