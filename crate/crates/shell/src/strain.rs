use isoshell_core::math::{dot, Vec3};
use isoshell_geometry::{BoundaryTrace, SurfaceFrame};
use isoshell_spline::{didx, BasisEval};

/// Displacement with first and second parametric derivatives at a point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet {
    pub u: Vec3,
    pub du: [Vec3; 2],
    pub ddu: [[Vec3; 2]; 2],
}

impl Jet {
    pub fn sub(&self, o: &Jet) -> Jet {
        let mut r = *self;
        for d in 0..3 {
            r.u[d] -= o.u[d];
            for a in 0..2 {
                r.du[a][d] -= o.du[a][d];
                for b in 0..2 {
                    r.ddu[a][b][d] -= o.ddu[a][b][d];
                }
            }
        }
        r
    }
}

/// Membrane and bending strain rows per local dof `3 k + c` (function `k`, component `c`),
/// in the order `[α11, α22, 2α12, β11, β22, 2β12]`.
#[derive(Clone, Debug)]
pub struct StrainOps {
    pub rows: Vec<[f64; 6]>,
}

/// Derivative of basis function `v` along parametric directions (index helpers).
#[inline]
fn d1(v: &[f64], a: usize) -> f64 {
    if a == 0 {
        v[didx(1, 0)]
    } else {
        v[didx(0, 1)]
    }
}

#[inline]
fn d2(v: &[f64], a: usize, b: usize) -> f64 {
    match a + b {
        0 => v[didx(2, 0)],
        1 => v[didx(1, 1)],
        _ => v[didx(0, 2)],
    }
}

pub fn strain_ops(frame: &SurfaceFrame, basis: &BasisEval) -> StrainOps {
    let gam = christoffel_table(frame);
    let mut rows = Vec::with_capacity(3 * basis.len());
    for v in &basis.values {
        let n1 = [d1(v, 0), d1(v, 1)];
        let mut h = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                h[a][b] = d2(v, a, b) - gam[0][a][b] * n1[0] - gam[1][a][b] * n1[1];
            }
        }
        for c in 0..3 {
            let (a1, a2, a3) = (frame.a[0][c], frame.a[1][c], frame.a3[c]);
            rows.push([
                a1 * n1[0],
                a2 * n1[1],
                a1 * n1[1] + a2 * n1[0],
                -h[0][0] * a3,
                -h[1][1] * a3,
                -2.0 * h[0][1] * a3,
            ]);
        }
    }
    StrainOps { rows }
}

/// `Γ^γ_{αβ}` as `gam[γ][α][β]`.
pub fn christoffel_table(frame: &SurfaceFrame) -> [[[f64; 2]; 2]; 3] {
    let mut g = [[[0.0; 2]; 2]; 3];
    for c in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                g[c][a][b] = frame.christoffel(c, a, b);
            }
        }
    }
    g
}

/// Strains of a displacement jet, same layout as [`StrainOps`] rows.
pub fn jet_strains(frame: &SurfaceFrame, j: &Jet) -> [f64; 6] {
    let gam = christoffel_table(frame);
    let mem = |a: usize, b: usize| 0.5 * (dot(frame.a[a], j.du[b]) + dot(frame.a[b], j.du[a]));
    let bend = |a: usize, b: usize| {
        let mut w = j.ddu[a][b];
        for d in 0..3 {
            w[d] -= gam[0][a][b] * j.du[0][d] + gam[1][a][b] * j.du[1][d];
        }
        -dot(w, frame.a3)
    };
    [mem(0, 0), mem(1, 1), 2.0 * mem(0, 1), bend(0, 0), bend(1, 1), 2.0 * bend(0, 1)]
}

/// Covariant second derivative `e_{|αβ} = e_{,αβ} − Γ^γ_{αβ} e_{,γ}`.
pub fn covariant_hessian(frame: &SurfaceFrame, j: &Jet) -> [[Vec3; 2]; 2] {
    let gam = christoffel_table(frame);
    let mut out = j.ddu;
    for a in 0..2 {
        for b in 0..2 {
            for d in 0..3 {
                out[a][b][d] -= gam[0][a][b] * j.du[0][d] + gam[1][a][b] * j.du[1][d];
            }
        }
    }
    out
}

/// Normal-rotation rows `θ_n = a3 · (u_{,α} n^α)` per local dof `3 k + c`.
pub fn normal_rotation(frame: &SurfaceFrame, trace: &BoundaryTrace, basis: &BasisEval) -> Vec<f64> {
    let mut rows = Vec::with_capacity(3 * basis.len());
    for v in &basis.values {
        let dn = d1(v, 0) * trace.normal_con[0] + d1(v, 1) * trace.normal_con[1];
        for c in 0..3 {
            rows.push(frame.a3[c] * dn);
        }
    }
    rows
}

/// First variation of the unit normal, `δa3 = −(a3 · u_{,γ}) a^γ`, for the unit
/// displacement `N e_c`, returned per local dof `3 k + c`.
pub fn normal_variation(frame: &SurfaceFrame, basis: &BasisEval) -> Vec<Vec3> {
    let mut out = Vec::with_capacity(3 * basis.len());
    for v in &basis.values {
        let g = [d1(v, 0), d1(v, 1)];
        for c in 0..3 {
            let s = frame.a3[c];
            let mut w = [0.0; 3];
            for gi in 0..2 {
                for d in 0..3 {
                    w[d] -= s * g[gi] * frame.a_con[gi][d];
                }
            }
            out.push(w);
        }
    }
    out
}

/// Interpolates coefficients `coef[3 * f + c]` (indexed through `map`) at a point.
pub fn eval_jet(basis: &BasisEval, coef: impl Fn(usize) -> Option<Vec3>) -> Jet {
    let mut j = Jet::default();
    for (f, v) in basis.indices.iter().zip(&basis.values) {
        let Some(c) = coef(*f) else { continue };
        for d in 0..3 {
            j.u[d] += v[0] * c[d];
            if basis.order >= 1 {
                j.du[0][d] += v[didx(1, 0)] * c[d];
                j.du[1][d] += v[didx(0, 1)] * c[d];
            }
            if basis.order >= 2 {
                j.ddu[0][0][d] += v[didx(2, 0)] * c[d];
                j.ddu[0][1][d] += v[didx(1, 1)] * c[d];
                j.ddu[1][1][d] += v[didx(0, 2)] * c[d];
            }
        }
    }
    j.ddu[1][0] = j.ddu[0][1];
    j
}
