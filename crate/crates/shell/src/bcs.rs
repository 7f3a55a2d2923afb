use std::sync::Arc;

use crate::exact::ExactSolution;
use crate::patch::{DofMap, Patch};
use isoshell_core::error::Result;
use isoshell_core::math::Vec3;
use isoshell_geometry::{Edge, SurfaceFrame};
use isoshell_numerics::{gauss, SparseSymmetricSystem};

/// Prescribed displacement as a function of the surface point (position, parameters, frame).
pub type BoundaryData = Arc<dyn Fn(&SurfaceFrame) -> Vec3 + Send + Sync>;

/// Strongly imposed displacement data on one edge of a patch.
#[derive(Clone)]
pub struct DirichletBc {
    pub patch: usize,
    pub edge: Edge,
    pub components: [bool; 3],
    /// Also fixes the second row of control points (zero normal slope).
    pub clamped: bool,
    /// Prescribed displacement; `None` means homogeneous.
    pub data: Option<BoundaryData>,
}

impl DirichletBc {
    pub fn fixed(patch: usize, edge: Edge) -> Self {
        Self { patch, edge, components: [true; 3], clamped: false, data: None }
    }

    pub fn clamped(patch: usize, edge: Edge) -> Self {
        Self { clamped: true, ..Self::fixed(patch, edge) }
    }

    pub fn components(patch: usize, edge: Edge, components: [bool; 3]) -> Self {
        Self { components, ..Self::fixed(patch, edge) }
    }

    pub fn with_data(mut self, data: BoundaryData) -> Self {
        self.data = Some(data);
        self
    }

    /// All components prescribed to the values of an analytic field.
    pub fn exact(patch: usize, edge: Edge, field: Arc<dyn ExactSolution>) -> Self {
        Self::fixed(patch, edge).with_data(Arc::new(move |fr: &SurfaceFrame| field.value(patch, fr)))
    }
}

/// Functions of row `row` (counted from the edge) along `edge`, paired with their
/// index along the edge.
fn edge_row(patch: &Patch, edge: Edge, row: usize) -> Vec<(usize, usize)> {
    let (nu, nv) = patch.space.shape();
    match edge {
        Edge::U0 => (0..nv).map(|j| (patch.space.flat(row, j), j)).collect(),
        Edge::U1 => (0..nv).map(|j| (patch.space.flat(nu - 1 - row, j), j)).collect(),
        Edge::V0 => (0..nu).map(|i| (patch.space.flat(i, row), i)).collect(),
        Edge::V1 => (0..nu).map(|i| (patch.space.flat(i, nv - 1 - row), i)).collect(),
    }
}

/// Fixes boundary dofs: homogeneous data directly, otherwise via an L2 projection of the
/// data onto the edge trace space over the kept part of the edge (end values interpolated).
pub fn apply_dirichlet(
    patches: &[Patch],
    dofs: &DofMap,
    bcs: &[DirichletBc],
    sys: &mut SparseSymmetricSystem,
) -> Result<()> {
    for bc in bcs {
        let patch = &patches[bc.patch];
        let along = 1 - bc.edge.normal_dir();
        let kv = patch.space.dir(along);
        let fixed_coord = if bc.edge.is_far() { 1.0 } else { 0.0 };
        let kept = patch.domain.kept_intervals(bc.edge.normal_dir(), fixed_coord)?;
        let row = edge_row(patch, bc.edge, 0);
        // Edge functions whose support meets the kept part of the edge.
        let p = kv.degree();
        let knots = kv.knots();
        let selected: Vec<(usize, usize)> = row
            .into_iter()
            .filter(|&(f, j)| {
                let (a, b) = (knots[j], knots[j + p + 1]);
                dofs.local[bc.patch][f].is_some() && kept.iter().any(|k| k[0].max(a) < k[1].min(b))
            })
            .collect();
        let values = match &bc.data {
            None => vec![[0.0; 3]; selected.len()],
            Some(g) => project_edge(patch, bc.edge, &kept, &selected, g.as_ref())?,
        };
        for (&(f, _), val) in selected.iter().zip(&values) {
            for c in 0..3 {
                if bc.components[c] {
                    if let Some(d) = dofs.dof(bc.patch, f, c) {
                        sys.fix(d, val[c]);
                    }
                }
            }
        }
        if bc.clamped {
            for (f, j) in edge_row(patch, bc.edge, 1) {
                let (a, b) = (knots[j], knots[j + p + 1]);
                if !kept.iter().any(|k| k[0].max(a) < k[1].min(b)) {
                    continue;
                }
                for c in 0..3 {
                    if bc.components[c] {
                        if let Some(d) = dofs.dof(bc.patch, f, c) {
                            sys.fix(d, 0.0);
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn project_edge(
    patch: &Patch,
    edge: Edge,
    kept: &[[f64; 2]],
    selected: &[(usize, usize)],
    g: &(dyn Fn(&SurfaceFrame) -> Vec3 + Send + Sync),
) -> Result<Vec<Vec3>> {
    let along = 1 - edge.normal_dir();
    let kv = patch.space.dir(along);
    let n = selected.len();
    let index_of = |j: usize| selected.iter().position(|s| s.1 == j);
    // End functions interpolate the data where the kept edge reaches a corner.
    let mut known: Vec<Option<Vec3>> = vec![None; n];
    for (s, corner) in [(0.0, 0usize), (1.0, kv.num_basis() - 1)] {
        if kept.iter().any(|k| (k[0] - s).abs() < 1e-14 || (k[1] - s).abs() < 1e-14) {
            if let Some(i) = index_of(corner) {
                known[i] = Some(g(&patch.frame(edge.point(s), 0)?));
            }
        }
    }
    let mut m = vec![0.0; n * n];
    let mut rhs = vec![[0.0; 3]; n];
    let rule = gauss(kv.degree() + 3)?;
    let mut breaks: Vec<f64> = kv.breakpoints();
    for k in kept {
        breaks.extend_from_slice(k);
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    for w in breaks.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if !kept.iter().any(|k| k[0] <= mid && mid <= k[1]) {
            continue;
        }
        for (s, ws) in rule.mapped(w[0], w[1]) {
            let uv = edge.point(s);
            let fr = patch.frame(uv, 0)?;
            let ds = isoshell_core::math::norm(fr.a[along]);
            let basis = isoshell_spline::eval_basis(kv, s, 0)?;
            let first = basis.first();
            let gx = g(&fr);
            let vals: Vec<(usize, f64)> =
                basis.ders[0].iter().enumerate().filter_map(|(r, &v)| index_of(first + r).map(|i| (i, v))).collect();
            for &(i, vi) in &vals {
                for c in 0..3 {
                    rhs[i][c] += ws * ds * vi * gx[c];
                }
                for &(j, vj) in &vals {
                    m[i * n + j] += ws * ds * vi * vj;
                }
            }
        }
    }
    let free: Vec<usize> = (0..n).filter(|&i| known[i].is_none()).collect();
    let nf = free.len();
    let mut a = vec![0.0; nf * nf];
    let mut b = vec![[0.0; 3]; nf];
    for (ii, &i) in free.iter().enumerate() {
        b[ii] = rhs[i];
        for j in 0..n {
            match known[j] {
                Some(val) => {
                    for c in 0..3 {
                        b[ii][c] -= m[i * n + j] * val[c];
                    }
                }
                None => {
                    let jj = free.iter().position(|&x| x == j).unwrap();
                    a[ii * nf + jj] = m[i * n + j];
                }
            }
        }
    }
    let sol = isoshell_core::math::solve_dense(&a, nf, &b)
        .ok_or_else(|| isoshell_core::error::Error::Invalid("singular boundary mass matrix".into()))?;
    let mut out = vec![[0.0; 3]; n];
    for i in 0..n {
        out[i] = known[i].unwrap_or_else(|| sol[free.iter().position(|&x| x == i).unwrap()]);
    }
    Ok(out)
}
