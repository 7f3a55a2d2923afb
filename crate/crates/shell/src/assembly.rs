use rayon::prelude::*;

use crate::exact::ExactSolution;
use crate::patch::{DofMap, Patch};
use crate::strain::{jet_strains, normal_rotation, strain_ops};
use isoshell_core::error::{Error, Result};
use isoshell_core::math::{dot, Vec3};
use isoshell_geometry::{trace_from_frame, SurfaceFrame};
use isoshell_numerics::{PatternBuilder, SparseSymmetricSystem};
use isoshell_spline::SplineCurve;

/// Element-level stiffness and (optional) consistent load.
#[derive(Clone, Debug)]
pub struct ElementData {
    pub dofs: Vec<usize>,
    pub k: Vec<f64>,
    pub f: Vec<f64>,
}

/// Element loops over all patches of a model.
pub struct Assembler<'a> {
    pub patches: &'a [Patch],
    pub dofs: &'a DofMap,
    /// Gauss points per direction added to `p + 1` on every (sub)element.
    pub extra_points: usize,
}

const BATCH: usize = 512;

impl<'a> Assembler<'a> {
    pub fn new(patches: &'a [Patch], dofs: &'a DofMap) -> Self {
        Self { patches, dofs, extra_points: 0 }
    }

    fn points(&self, patch: usize) -> usize {
        self.patches[patch].degree() + 1 + self.extra_points
    }

    /// `(patch, cell)` for every active cell.
    pub fn active_cells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (pi, p) in self.patches.iter().enumerate() {
            for (ci, c) in p.domain.cells.iter().enumerate() {
                if c.is_active() {
                    out.push((pi, ci));
                }
            }
        }
        out
    }

    /// Basis functions supported on a cell.
    pub fn cell_functions(&self, patch: usize, cell: usize) -> Vec<usize> {
        let p = &self.patches[patch];
        let c = &p.domain.cells[cell];
        let (du, dv) = (p.space.dir(0), p.space.dir(1));
        let su = du.find_span(0.5 * (c.u[0] + c.u[1]));
        let sv = dv.find_span(0.5 * (c.v[0] + c.v[1]));
        let mut out = Vec::new();
        for a in su - du.degree()..=su {
            for b in sv - dv.degree()..=sv {
                out.push(p.space.flat(a, b));
            }
        }
        out
    }

    pub fn add_pattern(&self, pb: &mut PatternBuilder) {
        for (pi, ci) in self.active_cells() {
            let f = self.cell_functions(pi, ci);
            pb.add_clique(&self.dofs.dofs_of(pi, &f));
        }
    }

    /// Stiffness and, when `exact` is given, the load `a(u_ex, v)` of one cell.
    pub fn element(&self, patch: usize, cell: usize, exact: Option<&dyn ExactSolution>) -> Result<ElementData> {
        let p = &self.patches[patch];
        let c = &p.domain.cells[cell];
        let funcs = self.cell_functions(patch, cell);
        let dofs = self.dofs.dofs_of(patch, &funcs);
        let n = dofs.len();
        let mut k = vec![0.0; n * n];
        let mut f = vec![0.0; if exact.is_some() { n } else { 0 }];
        let order = if exact.is_some() { 2 } else { 1 };
        let err = || Error::Assembly { patch, i: c.i, j: c.j };
        let mut db = vec![[0.0; 6]; n];
        for (uv, w) in c.quadrature(self.points(patch)) {
            let fr = p.frame(uv, order).map_err(|_| err())?;
            let basis = p.space.eval(&uv, 2)?;
            debug_assert_eq!(basis.indices, funcs);
            let ops = strain_ops(&fr, &basis);
            let m = p.material.abd(&fr).block();
            let wj = w * fr.jac;
            for (r, row) in ops.rows.iter().enumerate() {
                for i in 0..6 {
                    db[r][i] = (0..6).map(|j| m[i][j] * row[j]).sum::<f64>() * wj;
                }
            }
            for a in 0..n {
                let ra = &ops.rows[a];
                for b in a..n {
                    let v: f64 = (0..6).map(|i| ra[i] * db[b][i]).sum();
                    k[a * n + b] += v;
                }
            }
            if let Some(ex) = exact {
                let eps = jet_strains(&fr, &ex.jet(patch, &fr));
                for (a, fa) in f.iter_mut().enumerate() {
                    *fa += (0..6).map(|i| db[a][i] * eps[i]).sum::<f64>();
                }
            }
        }
        for a in 0..n {
            for b in 0..a {
                k[a * n + b] = k[b * n + a];
            }
        }
        Ok(ElementData { dofs, k, f })
    }

    /// Adds stiffness (and manufactured load if `exact` is given) of all cells.
    pub fn assemble(&self, sys: &mut SparseSymmetricSystem, exact: Option<&dyn ExactSolution>) -> Result<()> {
        let cells = self.active_cells();
        for batch in cells.chunks(BATCH) {
            let data: Vec<ElementData> =
                batch.par_iter().map(|&(pi, ci)| self.element(pi, ci, exact)).collect::<Result<_>>()?;
            for e in data {
                sys.add_block(&e.dofs, &e.k);
                for (d, v) in e.dofs.iter().zip(&e.f) {
                    sys.add_rhs(*d, *v);
                }
            }
        }
        Ok(())
    }

    /// Adds `∫ f(x) · v dA` over the kept domains.
    pub fn body_force(&self, sys: &mut SparseSymmetricSystem, force: &(dyn Fn(Vec3) -> Vec3 + Sync)) -> Result<()> {
        let cells = self.active_cells();
        let parts: Vec<(Vec<usize>, Vec<f64>)> = cells
            .par_iter()
            .map(|&(pi, ci)| {
                let p = &self.patches[pi];
                let funcs = self.cell_functions(pi, ci);
                let dofs = self.dofs.dofs_of(pi, &funcs);
                let mut f = vec![0.0; dofs.len()];
                for (uv, w) in p.domain.cells[ci].quadrature(self.points(pi)) {
                    let fr = p.frame(uv, 0)?;
                    let basis = p.space.eval(&uv, 0)?;
                    let load = force(fr.x);
                    for (a, v) in basis.values.iter().enumerate() {
                        for c in 0..3 {
                            f[3 * a + c] += w * fr.jac * v[0] * load[c];
                        }
                    }
                }
                Ok((dofs, f))
            })
            .collect::<Result<_>>()?;
        for (dofs, f) in parts {
            for (d, v) in dofs.iter().zip(&f) {
                sys.add_rhs(*d, *v);
            }
        }
        Ok(())
    }

    /// Point force at a parameter location of a patch.
    pub fn point_load(&self, sys: &mut SparseSymmetricSystem, patch: usize, uv: [f64; 2], force: Vec3) -> Result<()> {
        let p = &self.patches[patch];
        if !p.domain.contains(uv) {
            return Err(Error::PointOutside(uv[0], uv[1], patch));
        }
        let basis = p.space.eval(&uv, 0)?;
        for (f, v) in basis.indices.iter().zip(&basis.values) {
            for c in 0..3 {
                if let Some(d) = self.dofs.dof(patch, *f, c) {
                    sys.add_rhs(d, v[0] * force[c]);
                }
            }
        }
        Ok(())
    }

    /// Point force at a physical location, located by parameter inversion.
    pub fn point_load_at(&self, sys: &mut SparseSymmetricSystem, x: Vec3, force: Vec3) -> Result<()> {
        for (pi, p) in self.patches.iter().enumerate() {
            if let Some(uv) = invert_point(p, x) {
                return self.point_load(sys, pi, uv, force);
            }
        }
        Err(Error::Invalid(format!("point ({}, {}, {}) lies outside all patches", x[0], x[1], x[2])))
    }

    /// Bending moment load `∫ B_nn θ_n(v) ds` along a parametric boundary curve.
    pub fn moment_load(
        &self,
        sys: &mut SparseSymmetricSystem,
        patch: usize,
        curve: &SplineCurve<2>,
        kept_left: bool,
        bnn: f64,
    ) -> Result<()> {
        let p = &self.patches[patch];
        let g = isoshell_numerics::gauss(p.degree() + 2)?;
        let br = curve.knots().breakpoints();
        for w in br.windows(2) {
            for (t, wt) in g.mapped(w[0], w[1]) {
                let cd = curve.derivs(t, 1)?;
                let fr = p.frame(cd[0], 0)?;
                let tr = trace_from_frame(&fr, t, cd[1], kept_left)?;
                let basis = p.space.eval(&cd[0], 1)?;
                let rows = normal_rotation(&fr, &tr, &basis);
                for (a, f) in basis.indices.iter().enumerate() {
                    for c in 0..3 {
                        if let Some(d) = self.dofs.dof(patch, *f, c) {
                            sys.add_rhs(d, wt * tr.jac * bnn * rows[3 * a + c]);
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Parameter point of `p` whose image is `x`, if one exists in the kept region.
pub fn invert_point(p: &Patch, x: Vec3) -> Option<[f64; 2]> {
    let tol = 1e-10 * p.geometry.bbox_diagonal().max(1.0);
    let n = 8;
    let mut best: Option<([f64; 2], f64)> = None;
    for i in 0..=n {
        for j in 0..=n {
            let uv = [i as f64 / n as f64, j as f64 / n as f64];
            let y = p.geometry.eval(uv).ok()?;
            let d = isoshell_core::math::norm(isoshell_core::math::sub(y, x));
            if best.is_none_or(|b| d < b.1) {
                best = Some((uv, d));
            }
        }
    }
    let mut uv = best?.0;
    for _ in 0..50 {
        let fr: SurfaceFrame = p.frame(uv, 0).ok()?;
        let r = isoshell_core::math::sub(x, fr.x);
        let rhs = [dot(r, fr.a[0]), dot(r, fr.a[1])];
        let du = [
            fr.inv_metric[0][0] * rhs[0] + fr.inv_metric[0][1] * rhs[1],
            fr.inv_metric[1][0] * rhs[0] + fr.inv_metric[1][1] * rhs[1],
        ];
        uv = [(uv[0] + du[0]).clamp(0.0, 1.0), (uv[1] + du[1]).clamp(0.0, 1.0)];
        if du[0].abs() + du[1].abs() < 1e-15 {
            break;
        }
    }
    let y = p.geometry.eval(uv).ok()?;
    (isoshell_core::math::norm(isoshell_core::math::sub(y, x)) < tol && p.domain.contains(uv)).then_some(uv)
}
