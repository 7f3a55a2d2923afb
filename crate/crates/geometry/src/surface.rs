use serde::{Deserialize, Serialize};

use isoshell_core::error::{Error, Result};
use isoshell_core::math::{cross, dot, inv2, norm, scale, sub, Vec3};
use isoshell_spline::{didx, insert_knots, KnotVector, PatchFile, SplineSpace, Transfer, NDERIV};

/// Mid-surface map `F: [0,1]^2 -> R^3`, a (possibly rational) tensor-product spline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMap {
    space: SplineSpace,
    points: Vec<Vec3>,
}

impl SurfaceMap {
    pub fn new(space: SplineSpace, points: Vec<Vec3>) -> Result<Self> {
        if space.dim() != 2 {
            return Err(Error::Invalid("surface maps need two parametric directions".into()));
        }
        if points.len() != space.num_basis() {
            return Err(Error::Invalid(format!(
                "{} control points for {} basis functions",
                points.len(),
                space.num_basis()
            )));
        }
        Ok(Self { space, points })
    }

    pub fn space(&self) -> &SplineSpace {
        &self.space
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    /// `F` and its partial derivatives up to order `k`, indexed with [`didx`].
    pub fn derivs(&self, uv: [f64; 2], k: usize) -> Result<[Vec3; NDERIV]> {
        let ev = self.space.eval(&uv, k)?;
        let mut out = [[0.0; 3]; NDERIV];
        let nd = (k + 1) * (k + 2) / 2;
        for (f, v) in ev.indices.iter().zip(&ev.values) {
            let p = self.points[*f];
            for (o, &c) in out.iter_mut().zip(v.iter()).take(nd) {
                o[0] += c * p[0];
                o[1] += c * p[1];
                o[2] += c * p[2];
            }
        }
        Ok(out)
    }

    pub fn eval(&self, uv: [f64; 2]) -> Result<Vec3> {
        Ok(self.derivs(uv, 0)?[0])
    }

    /// Geometric frame at `uv` with frame derivatives up to order `k` (at most 2).
    pub fn frame(&self, uv: [f64; 2], k: usize) -> Result<SurfaceFrame> {
        assert!(k <= 2, "frame derivatives above order 2 are not available");
        SurfaceFrame::from_derivs(self.derivs(uv, k + 1)?, uv, k)
    }

    pub fn to_patch_file(&self) -> PatchFile {
        PatchFile::new(&self.space, self.points.iter().map(|p| p.to_vec()).collect())
    }

    /// Reads a surface; parameter ranges other than [0, 1] are mapped onto it.
    pub fn from_patch_file(file: &PatchFile) -> Result<Self> {
        let space = file.space()?;
        let dirs = space.dirs().iter().map(|k| k.rescaled(0.0, 1.0)).collect();
        Self::new(SplineSpace::new(dirs, space.weights().map(|w| w.to_vec()))?, file.points::<3>()?)
    }

    /// Same surface on a refined space.
    pub fn refined(&self, new_knots: &[Vec<f64>]) -> Result<Self> {
        let (space, t) = self.space.h_refine(new_knots)?;
        Ok(Self { points: t.apply(&self.points), space })
    }

    /// The sub-surface over `[u0,u1] x [v0,v1]`, reparametrized onto [0,1]^2.
    pub fn extract(&self, u: (f64, f64), v: (f64, f64)) -> Result<Self> {
        let mut dirs = Vec::new();
        let mut ranges = Vec::new();
        let mut trans = Vec::new();
        for (kv, (a, b)) in self.space.dirs().iter().zip([u, v]) {
            let p = kv.degree();
            let (lo, hi) = kv.domain();
            let mut add = Vec::new();
            for x in [a, b] {
                if x > lo && x < hi {
                    for _ in kv.multiplicity(x)..p + 1 {
                        add.push(x);
                    }
                }
            }
            let (fine, t) = insert_knots(kv, &add)?;
            let k = fine.knots();
            let first = k.iter().position(|&x| x >= a).unwrap();
            let last = k.iter().rposition(|&x| x <= b).unwrap();
            let sub_knots = KnotVector::new(k[first..=last].to_vec(), p)?.rescaled(0.0, 1.0);
            ranges.push((first, sub_knots.num_basis()));
            dirs.push(sub_knots);
            trans.push(t);
        }
        let full = Transfer::kron(&trans[0], &trans[1]);
        let nv_full = trans[1].num_rows();
        let (hw, pts) = match self.space.weights() {
            None => (None, full.apply(&self.points)),
            Some(w) => {
                let hom: Vec<[f64; 4]> =
                    self.points.iter().zip(w).map(|(p, &w)| [p[0] * w, p[1] * w, p[2] * w, w]).collect();
                let h = full.apply(&hom);
                let pts = h.iter().map(|q| [q[0] / q[3], q[1] / q[3], q[2] / q[3]]).collect();
                (Some(h.iter().map(|q| q[3]).collect::<Vec<_>>()), pts)
            }
        };
        let mut sub_pts = Vec::new();
        let mut sub_w = Vec::new();
        for i in ranges[0].0..ranges[0].0 + ranges[0].1 {
            for j in ranges[1].0..ranges[1].0 + ranges[1].1 {
                sub_pts.push(pts[i * nv_full + j]);
                if let Some(w) = &hw {
                    sub_w.push(w[i * nv_full + j]);
                }
            }
        }
        let weights = hw.map(|_| sub_w);
        SurfaceMap::new(SplineSpace::new(dirs, weights)?, sub_pts)
    }

    /// Diagonal of the axis-aligned bounding box of the control net.
    pub fn bbox_diagonal(&self) -> f64 {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in &self.points {
            for d in 0..3 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        norm(sub(hi, lo))
    }
}

/// Covariant and contravariant surface frame with derivatives.
#[derive(Clone, Debug)]
pub struct SurfaceFrame {
    pub uv: [f64; 2],
    pub x: Vec3,
    pub a: [Vec3; 2],
    pub a3: Vec3,
    /// `|a1 x a2|`, the area element.
    pub jac: f64,
    pub metric: [[f64; 2]; 2],
    pub inv_metric: [[f64; 2]; 2],
    pub a_con: [Vec3; 2],
    /// `da[α][β] = a_{α,β}`, available for order >= 1.
    pub da: [[Vec3; 2]; 2],
    /// `a3_{,α}`, available for order >= 1.
    pub da3: [Vec3; 2],
    /// `a3_{,αβ}`, available for order >= 2.
    pub dda3: [[Vec3; 2]; 2],
    /// Map derivatives up to order `order + 1`.
    pub fd: [Vec3; NDERIV],
    pub order: usize,
}

impl SurfaceFrame {
    pub fn from_derivs(fd: [Vec3; NDERIV], uv: [f64; 2], k: usize) -> Result<Self> {
        let a = [fd[didx(1, 0)], fd[didx(0, 1)]];
        let n = cross(a[0], a[1]);
        let nu = norm(n);
        if !(nu >= 1e-14) {
            return Err(Error::DegenerateParametrization(uv[0], uv[1]));
        }
        let a3 = scale(n, 1.0 / nu);
        let metric = [[dot(a[0], a[0]), dot(a[0], a[1])], [dot(a[1], a[0]), dot(a[1], a[1])]];
        let inv_metric = inv2(metric);
        let mut a_con = [[0.0; 3]; 2];
        for al in 0..2 {
            for g in 0..2 {
                for d in 0..3 {
                    a_con[al][d] += inv_metric[al][g] * a[g][d];
                }
            }
        }
        let mut fr = SurfaceFrame {
            uv,
            x: fd[0],
            a,
            a3,
            jac: nu,
            metric,
            inv_metric,
            a_con,
            da: [[[0.0; 3]; 2]; 2],
            da3: [[0.0; 3]; 2],
            dda3: [[[0.0; 3]; 2]; 2],
            fd,
            order: k,
        };
        if k == 0 {
            return Ok(fr);
        }
        // d(a_al)/d(xi_be) = F_{,al be}
        let f2 = |al: usize, be: usize| {
            fd[didx((al == 0) as usize + (be == 0) as usize, (al == 1) as usize + (be == 1) as usize)]
        };
        let f3 = |al: usize, be: usize, ga: usize| {
            let i = [al, be, ga].iter().filter(|&&x| x == 0).count();
            fd[didx(i, 3 - i)]
        };
        for al in 0..2 {
            for be in 0..2 {
                fr.da[al][be] = f2(al, be);
            }
        }
        let mut dn = [[0.0; 3]; 2];
        let mut dnu = [0.0; 2];
        for al in 0..2 {
            let t1 = cross(fr.da[0][al], a[1]);
            let t2 = cross(a[0], fr.da[1][al]);
            dn[al] = [t1[0] + t2[0], t1[1] + t2[1], t1[2] + t2[2]];
            dnu[al] = dot(a3, dn[al]);
            for d in 0..3 {
                fr.da3[al][d] = (dn[al][d] - a3[d] * dnu[al]) / nu;
            }
        }
        if k >= 2 {
            for al in 0..2 {
                for be in 0..2 {
                    let mut ddn = [0.0; 3];
                    let terms = [
                        cross(f3(0, al, be), a[1]),
                        cross(fr.da[0][al], fr.da[1][be]),
                        cross(fr.da[0][be], fr.da[1][al]),
                        cross(a[0], f3(1, al, be)),
                    ];
                    for t in terms {
                        for d in 0..3 {
                            ddn[d] += t[d];
                        }
                    }
                    let ddnu = dot(fr.da3[be], dn[al]) + dot(a3, ddn);
                    for d in 0..3 {
                        fr.dda3[al][be][d] =
                            (ddn[d] - fr.da3[al][d] * dnu[be] - fr.da3[be][d] * dnu[al] - a3[d] * ddnu) / nu;
                    }
                }
            }
        }
        Ok(fr)
    }

    /// Christoffel symbol `Γ^γ_{αβ} = a_{α,β} · a^γ`.
    pub fn christoffel(&self, g: usize, al: usize, be: usize) -> f64 {
        dot(self.da[al][be], self.a_con[g])
    }

    /// Third map derivative `F_{,αβγ}` (needs order >= 2).
    pub fn f3(&self, al: usize, be: usize, ga: usize) -> Vec3 {
        let i = [al, be, ga].iter().filter(|&&x| x == 0).count();
        self.fd[didx(i, 3 - i)]
    }

    /// Coefficients mapping Cartesian to curvilinear components.
    pub fn cartesian_to_curvilinear(&self) -> CurvilinearTransform {
        let mut q = [[0.0; 2]; 3];
        for i in 0..3 {
            q[i] = [self.a[0][i], self.a[1][i]];
        }
        CurvilinearTransform { q, q3: self.a3 }
    }
}

/// `q[i][β] = e^i · a_β` and `q3[i] = e^i · a_3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvilinearTransform {
    pub q: [[f64; 2]; 3],
    pub q3: Vec3,
}
