use rayon::prelude::*;

use crate::exact::ExactSolution;
use crate::patch::{Patch, Solution};
use crate::strain::{covariant_hessian, eval_jet, jet_strains};
use isoshell_core::error::Result;
use isoshell_core::math::dot;

/// Error norms of `u_ex − u_h`. `h1` and `h2` are full Sobolev norms.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ErrorNorms {
    pub l2: f64,
    pub h1: f64,
    pub h2: f64,
    pub energy: f64,
}

#[derive(Clone, Copy, Default)]
struct Sums {
    l2: f64,
    h1: f64,
    h2: f64,
    en: f64,
}

impl std::ops::Add for Sums {
    type Output = Sums;
    fn add(self, o: Sums) -> Sums {
        Sums { l2: self.l2 + o.l2, h1: self.h1 + o.h1, h2: self.h2 + o.h2, en: self.en + o.en }
    }
}

/// Integrates the error over all kept regions with `p + 3` Gauss points per direction.
pub fn error_norms(patches: &[Patch], sol: &Solution, exact: &dyn ExactSolution) -> Result<ErrorNorms> {
    let mut cells = Vec::new();
    for (pi, p) in patches.iter().enumerate() {
        for (ci, c) in p.domain.cells.iter().enumerate() {
            if c.is_active() {
                cells.push((pi, ci));
            }
        }
    }
    let s = cells
        .par_iter()
        .map(|&(pi, ci)| -> Result<Sums> {
            let p = &patches[pi];
            let mut s = Sums::default();
            for (uv, w) in p.domain.cells[ci].quadrature(p.degree() + 3) {
                let fr = p.frame(uv, 2)?;
                let basis = p.space.eval(&uv, 2)?;
                let uh = eval_jet(&basis, |f| sol.coefficient(pi, f));
                let e = exact.jet(pi, &fr).sub(&uh);
                let wj = w * fr.jac;
                let g = fr.inv_metric;
                s.l2 += wj * dot(e.u, e.u);
                let mut grad = 0.0;
                for a in 0..2 {
                    for b in 0..2 {
                        grad += g[a][b] * dot(e.du[a], e.du[b]);
                    }
                }
                s.h1 += wj * grad;
                let hh = covariant_hessian(&fr, &e);
                let mut hess = 0.0;
                for a in 0..2 {
                    for b in 0..2 {
                        for c in 0..2 {
                            for d in 0..2 {
                                hess += g[a][c] * g[b][d] * dot(hh[a][b], hh[c][d]);
                            }
                        }
                    }
                }
                s.h2 += wj * hess;
                let eps = jet_strains(&fr, &e);
                let m = p.material.abd(&fr).block();
                let mut en = 0.0;
                for i in 0..6 {
                    for j in 0..6 {
                        en += eps[i] * m[i][j] * eps[j];
                    }
                }
                s.en += wj * en;
            }
            Ok(s)
        })
        .collect::<Result<Vec<Sums>>>()?
        .into_iter()
        // Sequential sum keeps the result independent of the thread schedule.
        .fold(Sums::default(), |a, b| a + b);
    Ok(ErrorNorms {
        l2: s.l2.sqrt(),
        h1: (s.l2 + s.h1).sqrt(),
        h2: (s.l2 + s.h1 + s.h2).sqrt(),
        energy: s.en.max(0.0).sqrt(),
    })
}
