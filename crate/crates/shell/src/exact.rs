use crate::strain::Jet;
use isoshell_core::math::Vec3;
use isoshell_geometry::SurfaceFrame;

/// Analytic displacement field with derivatives along a patch's parameters.
pub trait ExactSolution: Send + Sync {
    /// Jet at the point described by `frame` (needs frame order 2) on patch `patch`.
    fn jet(&self, patch: usize, frame: &SurfaceFrame) -> Jet;

    fn value(&self, patch: usize, frame: &SurfaceFrame) -> Vec3 {
        self.jet(patch, frame).u
    }
}

/// Value, gradient `g[i][j] = ∂u_i/∂x_j`, and Hessian `h[i][j][k]` of a Cartesian field.
pub type CartesianDerivs = (Vec3, [[f64; 3]; 3], [[[f64; 3]; 3]; 3]);

/// Field given in Cartesian coordinates of the physical point.
pub struct CartesianField<F>(pub F);

impl<F> ExactSolution for CartesianField<F>
where
    F: Fn(Vec3) -> CartesianDerivs + Send + Sync,
{
    fn jet(&self, _patch: usize, fr: &SurfaceFrame) -> Jet {
        let (u, g, h) = (self.0)(fr.x);
        let mut j = Jet { u, ..Default::default() };
        for a in 0..2 {
            for i in 0..3 {
                j.du[a][i] = (0..3).map(|k| g[i][k] * fr.a[a][k]).sum();
            }
        }
        for a in 0..2 {
            for b in 0..2 {
                for i in 0..3 {
                    let mut s = 0.0;
                    for k in 0..3 {
                        s += g[i][k] * fr.da[a][b][k];
                        for l in 0..3 {
                            s += h[i][k][l] * fr.a[a][k] * fr.a[b][l];
                        }
                    }
                    j.ddu[a][b][i] = s;
                }
            }
        }
        j
    }
}

/// Scalar with parametric derivatives `[f, f_u, f_v, f_uu, f_uv, f_vv]`.
pub type ScalarJet = [f64; 6];

/// Field whose Cartesian components are given as functions of the patch parameters.
pub struct ParametricField<F>(pub F);

impl<F> ExactSolution for ParametricField<F>
where
    F: Fn([f64; 2]) -> [ScalarJet; 3] + Send + Sync,
{
    fn jet(&self, _patch: usize, fr: &SurfaceFrame) -> Jet {
        let c = (self.0)(fr.uv);
        let mut j = Jet::default();
        for i in 0..3 {
            j.u[i] = c[i][0];
            j.du[0][i] = c[i][1];
            j.du[1][i] = c[i][2];
            j.ddu[0][0][i] = c[i][3];
            j.ddu[0][1][i] = c[i][4];
            j.ddu[1][0][i] = c[i][4];
            j.ddu[1][1][i] = c[i][5];
        }
        j
    }
}

/// Field `u = g(ξ, η) a3` along the surface normal.
pub struct NormalField<F>(pub F);

impl<F> ExactSolution for NormalField<F>
where
    F: Fn([f64; 2]) -> ScalarJet + Send + Sync,
{
    fn jet(&self, _patch: usize, fr: &SurfaceFrame) -> Jet {
        let g = (self.0)(fr.uv);
        let gd = [g[1], g[2]];
        let gdd = [[g[3], g[4]], [g[4], g[5]]];
        let mut j = Jet::default();
        for i in 0..3 {
            j.u[i] = g[0] * fr.a3[i];
            for a in 0..2 {
                j.du[a][i] = gd[a] * fr.a3[i] + g[0] * fr.da3[a][i];
                for b in 0..2 {
                    j.ddu[a][b][i] =
                        gdd[a][b] * fr.a3[i] + gd[a] * fr.da3[b][i] + gd[b] * fr.da3[a][i] + g[0] * fr.dda3[a][b][i];
                }
            }
        }
        j
    }
}

/// The zero field.
pub struct Zero;

impl ExactSolution for Zero {
    fn jet(&self, _patch: usize, _frame: &SurfaceFrame) -> Jet {
        Jet::default()
    }
}
