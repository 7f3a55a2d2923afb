use crate::knots::KnotVector;
use isoshell_core::error::Result;

/// Nonzero univariate basis functions and their derivatives at one parameter.
#[derive(Clone, Debug)]
pub struct UniBasis {
    pub span: usize,
    /// `ders[k][r]` is the k-th derivative of function `span - p + r`.
    pub ders: Vec<Vec<f64>>,
}

impl UniBasis {
    pub fn first(&self) -> usize {
        self.span + 1 - self.ders[0].len()
    }
}

/// Cox-de Boor evaluation of the `p+1` nonzero functions and derivatives up to order `k`.
pub fn eval_basis(kv: &KnotVector, u: f64, k: usize) -> Result<UniBasis> {
    let u = kv.check(u)?;
    let span = kv.find_span(u);
    Ok(UniBasis { span, ders: ders_at_span(kv, span, u, k) })
}

pub(crate) fn ders_at_span(kv: &KnotVector, span: usize, u: f64, k: usize) -> Vec<Vec<f64>> {
    let p = kv.degree();
    let t = kv.knots();
    let mut ndu = vec![vec![0.0; p + 1]; p + 1];
    let mut left = vec![0.0; p + 1];
    let mut right = vec![0.0; p + 1];
    ndu[0][0] = 1.0;
    for j in 1..=p {
        left[j] = u - t[span + 1 - j];
        right[j] = t[span + j] - u;
        let mut saved = 0.0;
        for r in 0..j {
            ndu[j][r] = right[r + 1] + left[j - r];
            let temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    let mut ders = vec![vec![0.0; p + 1]; k + 1];
    for j in 0..=p {
        ders[0][j] = ndu[j][p];
    }
    let kmax = k.min(p);
    let mut a = vec![vec![0.0; p + 1]; 2];
    for r in 0..=p {
        let (mut s1, mut s2) = (0usize, 1usize);
        a[0][0] = 1.0;
        for kk in 1..=kmax {
            let mut d = 0.0;
            let rk = r as isize - kk as isize;
            let pk = p - kk;
            if r >= kk {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk as usize];
                d = a[s2][0] * ndu[rk as usize][pk];
            }
            let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
            let j2 = if (r as isize - 1) <= pk as isize { kk - 1 } else { p - r };
            for j in j1..=j2 {
                let idx = (rk + j as isize) as usize;
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][idx];
                d += a[s2][j] * ndu[idx][pk];
            }
            if r <= pk {
                a[s2][kk] = -a[s1][kk - 1] / ndu[pk + 1][r];
                d += a[s2][kk] * ndu[r][pk];
            }
            ders[kk][r] = d;
            std::mem::swap(&mut s1, &mut s2);
        }
    }
    let mut fac = p as f64;
    for kk in 1..=kmax {
        for v in ders[kk].iter_mut() {
            *v *= fac;
        }
        fac *= (p - kk) as f64;
    }
    ders
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernstein_midpoint() {
        let kv = KnotVector::new(vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0], 2).unwrap();
        let b = eval_basis(&kv, 0.5, 2).unwrap();
        assert_eq!(b.ders[0], vec![0.25, 0.5, 0.25]);
        assert_eq!(b.ders[1], vec![-1.0, 0.0, 1.0]);
        assert_eq!(b.ders[2], vec![2.0, -4.0, 2.0]);
    }

    #[test]
    fn higher_orders_are_zero() {
        let kv = KnotVector::uniform(1, 3);
        let b = eval_basis(&kv, 0.4, 3).unwrap();
        assert!(b.ders[2].iter().chain(&b.ders[3]).all(|&v| v == 0.0));
    }

    #[test]
    fn degree_zero() {
        let kv = KnotVector::new(vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0], 0).unwrap();
        let b = eval_basis(&kv, 0.5, 1).unwrap();
        assert_eq!(b.span, 1);
        assert_eq!(b.ders[0], vec![1.0]);
        assert_eq!(eval_basis(&kv, 1.0, 0).unwrap().span, 2);
    }

    #[test]
    fn outside_domain() {
        let kv = KnotVector::uniform(2, 2);
        assert!(eval_basis(&kv, 1.5, 0).is_err());
        assert!(eval_basis(&kv, -0.1, 0).is_err());
    }
}
