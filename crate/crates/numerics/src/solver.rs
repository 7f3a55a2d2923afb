use faer::prelude::*;
use faer::sparse::{SparseColMat, SymbolicSparseColMat};
use faer::{Mat, Side};

use crate::sparse::SparseSymmetricSystem;
use isoshell_core::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Symmetric diagonal scaling `D^{-1/2} K D^{-1/2}` before factorization.
    pub scaling: bool,
    /// Iterative refinement sweeps after the first solve.
    pub refinement_steps: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { scaling: true, refinement_steps: 10 }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    /// `‖K u − f‖ / ‖f‖` on the constrained system (absolute if `f = 0`).
    pub residual: f64,
    /// Ratio of largest to smallest diagonal entry of the constrained matrix.
    pub diag_ratio: f64,
    pub free_dofs: usize,
}

#[derive(Clone, Copy, Debug)]
enum Slot {
    Free(usize),
    Fixed(f64),
}

/// Lower-triangular CSC storage of the constrained system.
struct Reduced {
    n: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl Reduced {
    /// `f − K x` accumulated in double-double arithmetic (error-free products and sums),
    /// so refinement can converge past the working-precision residual floor.
    fn residual(&self, f: &[f64], x: &[f64]) -> Vec<f64> {
        let mut hi = f.to_vec();
        let mut lo = vec![0.0; self.n];
        let mut acc = |i: usize, a: f64, b: f64| {
            let p = -a * b;
            let e = (-a).mul_add(b, -p);
            let s = hi[i] + p;
            let bb = s - hi[i];
            let t = (hi[i] - (s - bb)) + (p - bb);
            hi[i] = s;
            lo[i] += t + e;
        };
        for c in 0..self.n {
            for k in self.col_ptr[c]..self.col_ptr[c + 1] {
                let r = self.row_idx[k];
                let v = self.values[k];
                acc(r, v, x[c]);
                if r != c {
                    acc(c, v, x[r]);
                }
            }
        }
        hi.iter().zip(&lo).map(|(h, l)| h + l).collect()
    }
}

fn slots(sys: &SparseSymmetricSystem) -> (Vec<Slot>, Vec<usize>) {
    let n = sys.n();
    let mut master: Vec<usize> = (0..n).collect();
    for &(s, m) in &sys.ties {
        master[s] = m;
    }
    let root = |mut d: usize| {
        let mut steps = 0;
        while master[d] != d && steps <= n {
            d = master[d];
            steps += 1;
        }
        d
    };
    let roots: Vec<usize> = (0..n).map(root).collect();
    let mut slot = vec![Slot::Fixed(0.0); n];
    let mut free_of_dof = Vec::new();
    let mut next = 0;
    for d in 0..n {
        if roots[d] == d {
            match sys.fixed.get(&d) {
                Some(&v) => slot[d] = Slot::Fixed(v),
                None => {
                    slot[d] = Slot::Free(next);
                    free_of_dof.push(d);
                    next += 1;
                }
            }
        }
    }
    for d in 0..n {
        if roots[d] != d {
            slot[d] = match sys.fixed.get(&d) {
                Some(&v) => Slot::Fixed(v),
                None => slot[roots[d]],
            };
        }
    }
    (slot, free_of_dof)
}

fn reduce(sys: &SparseSymmetricSystem, slot: &[Slot], nf: usize) -> (Reduced, Vec<f64>) {
    let mut rhs = vec![0.0; nf];
    for (d, &f) in sys.rhs.iter().enumerate() {
        if let Slot::Free(r) = slot[d] {
            rhs[r] += f;
        }
    }
    let mut count = vec![0usize; nf + 1];
    let mut mapped = Vec::with_capacity(sys.pattern().nnz());
    for (i, j, v) in sys.upper_entries() {
        match (slot[i], slot[j]) {
            (Slot::Free(a), Slot::Free(b)) => {
                let (c, r) = if a <= b { (a, b) } else { (b, a) };
                let v = if a == b && i != j { 2.0 * v } else { v };
                count[c] += 1;
                mapped.push((c, r, v));
            }
            (Slot::Free(a), Slot::Fixed(g)) => rhs[a] -= v * g,
            (Slot::Fixed(g), Slot::Free(b)) => rhs[b] -= v * g,
            _ => {}
        }
    }
    let mut col_ptr = vec![0usize; nf + 1];
    for c in 0..nf {
        col_ptr[c + 1] = col_ptr[c] + count[c];
    }
    let mut fill = col_ptr.clone();
    let mut rows = vec![0usize; mapped.len()];
    let mut vals = vec![0.0; mapped.len()];
    for (c, r, v) in mapped {
        rows[fill[c]] = r;
        vals[fill[c]] = v;
        fill[c] += 1;
    }
    // Sort each column and merge duplicates created by ties.
    let mut out_ptr = vec![0usize; nf + 1];
    let mut out_rows = Vec::with_capacity(rows.len());
    let mut out_vals = Vec::with_capacity(rows.len());
    let mut buf: Vec<(usize, f64)> = Vec::new();
    for c in 0..nf {
        buf.clear();
        buf.extend((col_ptr[c]..col_ptr[c + 1]).map(|k| (rows[k], vals[k])));
        buf.sort_unstable_by_key(|e| e.0);
        let mut has_diag = false;
        for &(r, v) in buf.iter() {
            if out_rows.len() > out_ptr[c] && *out_rows.last().unwrap() == r {
                *out_vals.last_mut().unwrap() += v;
            } else {
                has_diag |= r == c;
                out_rows.push(r);
                out_vals.push(v);
            }
        }
        if !has_diag {
            out_rows.insert(out_ptr[c], c);
            out_vals.insert(out_ptr[c], 0.0);
        }
        out_ptr[c + 1] = out_rows.len();
    }
    (Reduced { n: nf, col_ptr: out_ptr, row_idx: out_rows, values: out_vals }, rhs)
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn solve(sys: &SparseSymmetricSystem) -> Result<(Vec<f64>, SolveReport)> {
    solve_with(sys, SolveOptions::default())
}

/// Eliminates constraints, factorizes the (optionally scaled) system with a sparse
/// Cholesky decomposition, and expands the solution to all dofs.
pub fn solve_with(sys: &SparseSymmetricSystem, opts: SolveOptions) -> Result<(Vec<f64>, SolveReport)> {
    let (slot, free_of_dof) = slots(sys);
    let nf = free_of_dof.len();
    let (red, rhs) = reduce(sys, &slot, nf);

    let mut diag = vec![0.0; nf];
    for c in 0..nf {
        diag[c] = red.values[red.col_ptr[c]];
        if diag[c] == 0.0 {
            return Err(Error::SingularDof(free_of_dof[c]));
        }
        if !(diag[c] > 0.0) {
            return Err(Error::Indefinite);
        }
    }
    let s: Vec<f64> = if opts.scaling { diag.iter().map(|d| 1.0 / d.sqrt()).collect() } else { vec![1.0; nf] };
    let (dmin, dmax) = diag.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &d| (a.min(d), b.max(d)));

    let mut u_red = vec![0.0; nf];
    if nf > 0 {
        let mut scaled = red.values.clone();
        for c in 0..nf {
            for k in red.col_ptr[c]..red.col_ptr[c + 1] {
                scaled[k] *= s[c] * s[red.row_idx[k]];
            }
        }
        let symbolic =
            SymbolicSparseColMat::<usize>::new_checked(nf, nf, red.col_ptr.clone(), None, red.row_idx.clone());
        let mat = SparseColMat::<usize, f64>::new(symbolic, scaled);
        let llt = mat.sp_cholesky(Side::Lower).map_err(|_| Error::Indefinite)?;
        let mut r = rhs.clone();
        let mut last = f64::INFINITY;
        for step in 0..=opts.refinement_steps {
            let mut b = Mat::<f64>::from_fn(nf, 1, |i, _| r[i] * s[i]);
            llt.solve_in_place(b.as_mut());
            let mut change = 0.0f64;
            for i in 0..nf {
                let d = s[i] * b[(i, 0)];
                u_red[i] += d;
                change += d * d;
            }
            r = red.residual(&rhs, &u_red);
            let change = change.sqrt();
            // Stop once corrections reach rounding level or stop contracting.
            if step == opts.refinement_steps || change <= 1e-15 * norm2(&u_red) || change > 0.5 * last {
                break;
            }
            last = change;
        }
    }
    let res = if nf > 0 { red.residual(&rhs, &u_red) } else { Vec::new() };
    let fnorm = norm2(&rhs);
    let residual = if fnorm > 0.0 { norm2(&res) / fnorm } else { norm2(&res) };

    let u = slot
        .iter()
        .map(|s| match *s {
            Slot::Free(r) => u_red[r],
            Slot::Fixed(v) => v,
        })
        .collect();
    let report = SolveReport { residual, diag_ratio: if nf > 0 { dmax / dmin } else { 1.0 }, free_dofs: nf };
    Ok((u, report))
}
