//! Closed-form manufactured solutions of the benchmark catalogue.

use std::f64::consts::PI;

use isoshell_core::error::{Error, Result};
use isoshell_core::math::Vec3;
use isoshell_shell::{CartesianDerivs, ScalarJet};

/// `[f, f', f'']` of a univariate factor.
pub type Jet1 = [f64; 3];

/// Jet of `f(u) g(v)`.
pub fn product(f: Jet1, g: Jet1) -> ScalarJet {
    [f[0] * g[0], f[1] * g[0], f[0] * g[1], f[2] * g[0], f[1] * g[1], f[0] * g[2]]
}

pub fn scaled(j: ScalarJet, s: f64) -> ScalarJet {
    j.map(|x| x * s)
}

pub fn sin_pi(x: f64) -> Jet1 {
    [(PI * x).sin(), PI * (PI * x).cos(), -PI * PI * (PI * x).sin()]
}

/// `x² (x − 1)²`.
pub fn bump(x: f64) -> Jet1 {
    [x * x * (x - 1.0).powi(2), 2.0 * x * (x - 1.0) * (2.0 * x - 1.0), 2.0 * (6.0 * x * x - 6.0 * x + 1.0)]
}

/// `(1/2 − x) x (1 − x)`.
pub fn odd_cubic(x: f64) -> Jet1 {
    [x / 2.0 - 1.5 * x * x + x * x * x, 0.5 - 3.0 * x + 3.0 * x * x, -3.0 + 6.0 * x]
}

/// `x (1 − x) sin(π x)`.
pub fn damped_sine(x: f64) -> Jet1 {
    let (s, c) = ((PI * x).sin(), (PI * x).cos());
    let q = x - x * x;
    [q * s, (1.0 - 2.0 * x) * s + PI * q * c, -2.0 * s + 2.0 * PI * (1.0 - 2.0 * x) * c - PI * PI * q * s]
}

/// `sin(πx) sin(πy)` with its gradient and Hessian in the plane.
fn sine_sheet(x: Vec3) -> (f64, [f64; 3], [[f64; 3]; 3]) {
    let (a, b) = (sin_pi(x[0]), sin_pi(x[1]));
    let g = [a[1] * b[0], a[0] * b[1], 0.0];
    let h = [[a[2] * b[0], a[1] * b[1], 0.0], [a[1] * b[1], a[0] * b[2], 0.0], [0.0; 3]];
    (a[0] * b[0], g, h)
}

/// Every component equal to `sin(πx) sin(πy)`.
pub fn four_patch_field(x: Vec3) -> CartesianDerivs {
    let (s, g, h) = sine_sheet(x);
    ([s; 3], [g; 3], [h; 3])
}

/// Transverse deflection `sin(πx) sin(πy)` only.
pub fn three_patch_field(x: Vec3) -> CartesianDerivs {
    let (s, g, h) = sine_sheet(x);
    ([0.0, 0.0, s], [[0.0; 3], [0.0; 3], g], [[[0.0; 3]; 3], [[0.0; 3]; 3], h])
}

pub fn astroid_field(uv: [f64; 2]) -> [ScalarJet; 3] {
    let [u, v] = uv;
    [product(bump(u), odd_cubic(v)), scaled(product(odd_cubic(u), bump(v)), -1.0), product(damped_sine(u), sin_pi(v))]
}

/// Amplitude of the normal field `−(ξ−1)² ξ² η (η−1) a3`.
pub fn cylinder_amplitude(uv: [f64; 2]) -> ScalarJet {
    let [u, v] = uv;
    scaled(product(bump(u), [v * v - v, 2.0 * v - 1.0, 2.0]), -1.0)
}

const FD_TOL: f64 = 1e-7;

fn fd_mismatch(exact: f64, fd: f64, scale: f64) -> bool {
    (exact - fd).abs() > FD_TOL * scale.max(1.0)
}

/// Checks gradient and Hessian of a Cartesian field against central differences.
pub fn check_cartesian(name: &str, f: impl Fn(Vec3) -> CartesianDerivs, points: &[Vec3]) -> Result<()> {
    let h = 1e-5;
    for &x in points {
        let (_, g, hs) = f(x);
        for k in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            let (up, gp, _) = f(xp);
            let (um, gm, _) = f(xm);
            for i in 0..3 {
                let scale = g[i].iter().map(|v| v.abs()).fold(0.0, f64::max);
                if fd_mismatch(g[i][k], (up[i] - um[i]) / (2.0 * h), scale) {
                    return Err(Error::Invalid(format!("{name}: gradient inconsistent at {x:?}")));
                }
                for l in 0..3 {
                    let scale = hs[i].iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
                    if fd_mismatch(hs[i][l][k], (gp[i][l] - gm[i][l]) / (2.0 * h), scale) {
                        return Err(Error::Invalid(format!("{name}: Hessian inconsistent at {x:?}")));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Checks parametric first and second derivatives against central differences.
pub fn check_parametric(name: &str, f: impl Fn([f64; 2]) -> Vec<ScalarJet>, points: &[[f64; 2]]) -> Result<()> {
    let h = 1e-5;
    for &uv in points {
        let j = f(uv);
        for d in 0..2 {
            let mut p = uv;
            let mut m = uv;
            p[d] += h;
            m[d] -= h;
            let (jp, jm) = (f(p), f(m));
            for (c, jc) in j.iter().enumerate() {
                let scale = jc.iter().map(|v| v.abs()).fold(0.0, f64::max);
                let first = (jp[c][0] - jm[c][0]) / (2.0 * h);
                // Second derivatives from differences of the first: d = 0 gives (uu, uv), d = 1 gives (uv, vv).
                let second = [(jp[c][1] - jm[c][1]) / (2.0 * h), (jp[c][2] - jm[c][2]) / (2.0 * h)];
                let expect = if d == 0 { [jc[3], jc[4]] } else { [jc[4], jc[5]] };
                if fd_mismatch(jc[1 + d], first, scale)
                    || fd_mismatch(expect[0], second[0], scale)
                    || fd_mismatch(expect[1], second[1], scale)
                {
                    return Err(Error::Invalid(format!("{name}: derivatives inconsistent at {uv:?}")));
                }
            }
        }
    }
    Ok(())
}
