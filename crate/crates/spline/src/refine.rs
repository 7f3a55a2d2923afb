use crate::knots::KnotVector;
use crate::tensor::SplineSpace;
use isoshell_core::error::{Error, Result};

/// Sparse coarse-to-fine coefficient map: `fine[r] = sum rows[r] (c, w) * coarse[c]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Transfer {
    pub cols: usize,
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl Transfer {
    pub fn identity(n: usize) -> Self {
        Self { cols: n, rows: (0..n).map(|i| vec![(i, 1.0)]).collect() }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn apply<const D: usize>(&self, coarse: &[[f64; D]]) -> Vec<[f64; D]> {
        assert_eq!(coarse.len(), self.cols);
        self.rows
            .iter()
            .map(|row| {
                let mut out = [0.0; D];
                for &(c, w) in row {
                    for d in 0..D {
                        out[d] += w * coarse[c][d];
                    }
                }
                out
            })
            .collect()
    }

    pub fn apply_scalar(&self, coarse: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|row| row.iter().map(|&(c, w)| w * coarse[c]).sum()).collect()
    }

    /// `self * other` where `other` maps into the columns of `self`.
    pub fn compose(&self, other: &Transfer) -> Transfer {
        assert_eq!(self.cols, other.rows.len());
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc: Vec<(usize, f64)> = Vec::new();
                for &(m, a) in row {
                    for &(c, b) in &other.rows[m] {
                        match acc.iter_mut().find(|e| e.0 == c) {
                            Some(e) => e.1 += a * b,
                            None => acc.push((c, a * b)),
                        }
                    }
                }
                acc.sort_by_key(|e| e.0);
                acc
            })
            .collect();
        Transfer { cols: other.cols, rows }
    }

    /// Tensor product `a (x) b` matching row-major flat numbering.
    pub fn kron(a: &Transfer, b: &Transfer) -> Transfer {
        let mut rows = Vec::with_capacity(a.rows.len() * b.rows.len());
        for ra in &a.rows {
            for rb in &b.rows {
                let mut row = Vec::with_capacity(ra.len() * rb.len());
                for &(ca, wa) in ra {
                    for &(cb, wb) in rb {
                        row.push((ca * b.cols + cb, wa * wb));
                    }
                }
                rows.push(row);
            }
        }
        Transfer { cols: a.cols * b.cols, rows }
    }
}

/// Boehm insertion of each knot in `new` (any order). Returns the refined vector and the
/// coefficient transfer of the polynomial basis.
pub fn insert_knots(kv: &KnotVector, new: &[f64]) -> Result<(KnotVector, Transfer)> {
    let p = kv.degree();
    let (a, b) = kv.domain();
    let mut sorted = new.to_vec();
    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut knots = kv.knots().to_vec();
    let mut t = Transfer::identity(kv.num_basis());
    for &u in &sorted {
        if !(u > a && u < b) {
            return Err(Error::Domain { value: u, lo: a, hi: b });
        }
        let mult = knots.iter().filter(|&&k| k == u).count();
        if mult + 1 > p + 1 {
            return Err(Error::KnotMultiplicity { knot: u, max: p + 1 });
        }
        let n = knots.len() - p - 1;
        let k = knots.iter().rposition(|&x| x <= u).unwrap();
        let mut rows = Vec::with_capacity(n + 1);
        for i in 0..=n {
            if i + p <= k {
                rows.push(vec![(i, 1.0)]);
            } else if i <= k {
                let alpha = (u - knots[i]) / (knots[i + p] - knots[i]);
                rows.push(vec![(i - 1, 1.0 - alpha), (i, alpha)]);
            } else {
                rows.push(vec![(i - 1, 1.0)]);
            }
        }
        let step = Transfer { cols: n, rows };
        t = step.compose(&t);
        knots.insert(k + 1, u);
    }
    Ok((KnotVector::new(knots, p)?, t))
}

impl SplineSpace {
    /// Inserts `new_knots[d]` in direction `d`. The transfer maps coefficients of this
    /// space's basis (rational if weighted) onto the refined basis.
    pub fn h_refine(&self, new_knots: &[Vec<f64>]) -> Result<(SplineSpace, Transfer)> {
        assert_eq!(new_knots.len(), self.dim());
        let mut dirs = Vec::new();
        let mut ts = Vec::new();
        for (kv, add) in self.dirs().iter().zip(new_knots) {
            let (k, t) = insert_knots(kv, add)?;
            dirs.push(k);
            ts.push(t);
        }
        let poly = if ts.len() == 1 { ts.pop().unwrap() } else { Transfer::kron(&ts[0], &ts[1]) };
        match self.weights() {
            None => Ok((SplineSpace::new(dirs, None)?, poly)),
            Some(w) => {
                let wf = poly.apply_scalar(w);
                let rows = poly
                    .rows
                    .iter()
                    .zip(&wf)
                    .map(|(row, &wr)| row.iter().map(|&(c, x)| (c, x * w[c] / wr)).collect())
                    .collect();
                Ok((SplineSpace::new(dirs, Some(wf))?, Transfer { cols: poly.cols, rows }))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_midpoint() {
        let kv = KnotVector::uniform(2, 1);
        let (fine, t) = insert_knots(&kv, &[0.5]).unwrap();
        assert_eq!(fine.knots(), &[0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0]);
        assert_eq!(t.num_rows(), 4);
        assert_eq!(t.cols, 3);
    }

    #[test]
    fn multiplicity_limit() {
        let kv = KnotVector::uniform(1, 2);
        assert!(insert_knots(&kv, &[0.5]).is_ok());
        assert!(matches!(insert_knots(&kv, &[0.5, 0.5]), Err(Error::KnotMultiplicity { .. })));
        assert!(insert_knots(&kv, &[1.0]).is_err());
    }

    #[test]
    fn partition_of_unity_preserved() {
        let kv = KnotVector::uniform(3, 2);
        let (_, t) = insert_knots(&kv, &[0.2, 0.7, 0.7]).unwrap();
        for row in &t.rows {
            let s: f64 = row.iter().map(|e| e.1).sum();
            assert!((s - 1.0).abs() < 1e-14);
        }
    }
}
