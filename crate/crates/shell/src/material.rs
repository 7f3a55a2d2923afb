use serde::{Deserialize, Serialize};

use isoshell_core::error::{Error, Result};
use isoshell_core::math::{cross, dot, norm, scale};
use isoshell_geometry::SurfaceFrame;

/// Symmetric 3x3 matrix acting on Voigt vectors `[e11, e22, 2 e12]`.
pub type Voigt = [[f64; 3]; 3];

const VOIGT_PAIRS: [(usize, usize); 3] = [(0, 0), (1, 1), (0, 1)];

/// Orthotropic ply of a laminate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ply {
    pub e1: f64,
    pub e2: f64,
    pub g12: f64,
    pub nu12: f64,
    /// Fiber angle from the local first axis, radians.
    pub angle: f64,
    pub thickness: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Material {
    Isotropic { e: f64, nu: f64, t: f64 },
    Laminate { plies: Vec<Ply> },
}

/// Extensional, coupling, and bending stiffness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Abd {
    pub a: Voigt,
    pub b: Voigt,
    pub d: Voigt,
}

impl Abd {
    /// Full 6x6 block matrix `[[A, B], [B, D]]`.
    pub fn block(&self) -> [[f64; 6]; 6] {
        let mut m = [[0.0; 6]; 6];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = self.a[i][j];
                m[i][j + 3] = self.b[i][j];
                m[i + 3][j] = self.b[i][j];
                m[i + 3][j + 3] = self.d[i][j];
            }
        }
        m
    }
}

impl Ply {
    pub fn validate(&self) -> Result<()> {
        let ok = self.e1 > 0.0
            && self.e2 > 0.0
            && self.g12 > 0.0
            && self.thickness > 0.0
            && self.nu12 * self.nu12 * self.e2 / self.e1 < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid(format!("inadmissible ply constants {self:?}")))
        }
    }

    /// Reduced stiffness in the fiber frame.
    pub fn q_fiber(&self) -> Voigt {
        let nu21 = self.nu12 * self.e2 / self.e1;
        let den = 1.0 - self.nu12 * nu21;
        [
            [self.e1 / den, self.nu12 * self.e2 / den, 0.0],
            [self.nu12 * self.e2 / den, self.e2 / den, 0.0],
            [0.0, 0.0, self.g12],
        ]
    }

    /// Reduced stiffness rotated into the local orthonormal shell frame.
    pub fn q_local(&self) -> Voigt {
        let (s, c) = self.angle.sin_cos();
        // Fiber axes expressed in the local frame: f1 = c e1 + s e2, f2 = -s e1 + c e2.
        let t = strain_transform([[c, s], [-s, c]]);
        congruence(&t, &self.q_fiber())
    }
}

/// Voigt strain transformation for `e'_ab = m[a][α] m[b][β] e_αβ`.
pub fn strain_transform(m: [[f64; 2]; 2]) -> Voigt {
    let mut t = [[0.0; 3]; 3];
    for (r, &(a, b)) in VOIGT_PAIRS.iter().enumerate() {
        let f = if a == b { 1.0 } else { 2.0 };
        t[r][0] = f * m[a][0] * m[b][0];
        t[r][1] = f * m[a][1] * m[b][1];
        t[r][2] = 0.5 * f * (m[a][0] * m[b][1] + m[a][1] * m[b][0]);
    }
    t
}

/// `Tᵀ Q T`.
pub fn congruence(t: &Voigt, q: &Voigt) -> Voigt {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut s = 0.0;
            for k in 0..3 {
                for l in 0..3 {
                    s += t[k][i] * q[k][l] * t[l][j];
                }
            }
            out[i][j] = s;
        }
    }
    out
}

/// Contravariant isotropic plane-stress tensor in Voigt form.
pub fn constitutive_isotropic(frame: &SurfaceFrame, e: f64, nu: f64) -> Voigt {
    let g = frame.inv_metric;
    let mu = e / (2.0 * (1.0 + nu));
    let lam = 2.0 * nu / (1.0 - nu);
    let c =
        |a: usize, b: usize, l: usize, m: usize| mu * (g[a][l] * g[b][m] + g[a][m] * g[b][l] + lam * g[a][b] * g[l][m]);
    let mut out = [[0.0; 3]; 3];
    for (r, &(a, b)) in VOIGT_PAIRS.iter().enumerate() {
        for (s, &(l, m)) in VOIGT_PAIRS.iter().enumerate() {
            out[r][s] = c(a, b, l, m);
        }
    }
    out
}

/// Maps covariant curvilinear Voigt strains onto the local orthonormal frame
/// `e1 = a1/|a1|`, `e2 = a3 x e1`.
pub fn local_frame_transform(frame: &SurfaceFrame) -> Voigt {
    let e1 = scale(frame.a[0], 1.0 / norm(frame.a[0]));
    let e2 = cross(frame.a3, e1);
    let m = [[dot(e1, frame.a_con[0]), dot(e1, frame.a_con[1])], [dot(e2, frame.a_con[0]), dot(e2, frame.a_con[1])]];
    strain_transform(m)
}

fn add_scaled(acc: &mut Voigt, m: &Voigt, s: f64) {
    for i in 0..3 {
        for j in 0..3 {
            acc[i][j] += s * m[i][j];
        }
    }
}

/// Classical lamination theory sums for plies with local stiffness `q[n]`.
fn stack_sums(plies: &[Ply], q: impl Fn(&Ply) -> Voigt) -> Abd {
    let total: f64 = plies.iter().map(|p| p.thickness).sum();
    let mut abd = Abd { a: [[0.0; 3]; 3], b: [[0.0; 3]; 3], d: [[0.0; 3]; 3] };
    let mut z0 = -0.5 * total;
    for p in plies {
        let t = p.thickness;
        let z = z0 + 0.5 * t;
        let c = q(p);
        add_scaled(&mut abd.a, &c, t);
        add_scaled(&mut abd.b, &c, t * z);
        add_scaled(&mut abd.d, &c, t * z * z + t * t * t / 12.0);
        z0 += t;
    }
    abd
}

/// ABD matrices of a laminate in the curvilinear frame.
pub fn laminate_abd(plies: &[Ply], frame: &SurfaceFrame) -> Result<Abd> {
    if plies.is_empty() {
        return Err(Error::Invalid("empty laminate".into()));
    }
    for p in plies {
        p.validate()?;
    }
    let t = local_frame_transform(frame);
    Ok(stack_sums(plies, |p| congruence(&t, &p.q_local())))
}

impl Material {
    pub fn validate(&self) -> Result<()> {
        match self {
            Material::Isotropic { e, nu, t } => {
                if *e > 0.0 && *nu > -1.0 && *nu < 0.5 && *t > 0.0 {
                    Ok(())
                } else {
                    Err(Error::Invalid(format!("isotropic material E={e}, nu={nu}, t={t}")))
                }
            }
            Material::Laminate { plies } => {
                if plies.is_empty() {
                    return Err(Error::Invalid("empty laminate".into()));
                }
                plies.iter().try_for_each(|p| p.validate())
            }
        }
    }

    pub fn thickness(&self) -> f64 {
        match self {
            Material::Isotropic { t, .. } => *t,
            Material::Laminate { plies } => plies.iter().map(|p| p.thickness).sum(),
        }
    }

    /// ABD matrices in the curvilinear frame at a point.
    pub fn abd(&self, frame: &SurfaceFrame) -> Abd {
        match self {
            Material::Isotropic { e, nu, t } => {
                let c = constitutive_isotropic(frame, *e, *nu);
                let mut abd = Abd { a: [[0.0; 3]; 3], b: [[0.0; 3]; 3], d: [[0.0; 3]; 3] };
                add_scaled(&mut abd.a, &c, *t);
                add_scaled(&mut abd.d, &c, t * t * t / 12.0);
                abd
            }
            Material::Laminate { plies } => laminate_abd(plies, frame).expect("validated laminate"),
        }
    }

    /// ABD matrices in the local orthonormal frame.
    pub fn abd_local(&self) -> Abd {
        match self {
            Material::Isotropic { e, nu, t } => {
                let q = isotropic_q(*e, *nu);
                let mut abd = Abd { a: [[0.0; 3]; 3], b: [[0.0; 3]; 3], d: [[0.0; 3]; 3] };
                add_scaled(&mut abd.a, &q, *t);
                add_scaled(&mut abd.d, &q, t * t * t / 12.0);
                abd
            }
            Material::Laminate { plies } => stack_sums(plies, |p| p.q_local()),
        }
    }

    /// Membrane stiffness scale used by the penalty formulas.
    pub fn membrane_stiffness(&self) -> f64 {
        match self {
            Material::Isotropic { e, nu, t } => e * t / (1.0 - nu * nu),
            Material::Laminate { .. } => max_entry(&self.abd_local().a),
        }
    }

    /// Bending stiffness scale used by the penalty formulas.
    pub fn bending_stiffness(&self) -> f64 {
        match self {
            Material::Isotropic { e, nu, t } => e * t * t * t / (12.0 * (1.0 - nu * nu)),
            Material::Laminate { .. } => max_entry(&self.abd_local().d),
        }
    }

    /// Young's modulus, or the thickness-averaged largest in-plane modulus of a laminate.
    pub fn young(&self) -> f64 {
        match self {
            Material::Isotropic { e, .. } => *e,
            Material::Laminate { .. } => max_entry(&self.abd_local().a) / self.thickness(),
        }
    }
}

pub fn isotropic_q(e: f64, nu: f64) -> Voigt {
    let f = e / (1.0 - nu * nu);
    [[f, f * nu, 0.0], [f * nu, f, 0.0], [0.0, 0.0, 0.5 * f * (1.0 - nu)]]
}

fn max_entry(m: &Voigt) -> f64 {
    m.iter().flatten().fold(0.0, |a, &b| a.max(b.abs()))
}
