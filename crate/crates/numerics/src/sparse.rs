use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;

/// Upper-triangular (diagonal included) CSR sparsity pattern of a symmetric matrix.
#[derive(Clone, Debug, Default)]
pub struct SparsityPattern {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
}

impl SparsityPattern {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let row = self.row(i);
        row.binary_search(&j).ok().map(|k| self.row_ptr[i] + k)
    }
}

/// Collects the structural nonzeros row by row.
#[derive(Clone, Debug)]
pub struct PatternBuilder {
    rows: Vec<Vec<usize>>,
}

impl PatternBuilder {
    pub fn new(n: usize) -> Self {
        Self { rows: (0..n).map(|i| vec![i]).collect() }
    }

    pub fn add_entry(&mut self, i: usize, j: usize) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.rows[i].push(j);
    }

    /// Marks every pair of `dofs` as coupled.
    pub fn add_clique(&mut self, dofs: &[usize]) {
        for &a in dofs {
            for &b in dofs {
                if a <= b {
                    self.rows[a].push(b);
                }
            }
        }
    }

    pub fn build(self) -> SparsityPattern {
        let n = self.rows.len();
        let rows: Vec<Vec<usize>> = self
            .rows
            .into_par_iter()
            .map(|mut r| {
                r.sort_unstable();
                r.dedup();
                r
            })
            .collect();
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut cols = Vec::with_capacity(rows.iter().map(|r| r.len()).sum());
        for r in rows {
            cols.extend_from_slice(&r);
            row_ptr.push(cols.len());
        }
        SparsityPattern { n, row_ptr, cols }
    }
}

/// Unordered (i, j, value) entries; merging buffers is concatenation.
#[derive(Clone, Debug, Default)]
pub struct TripletBuffer {
    pub entries: Vec<(usize, usize, f64)>,
}

impl TripletBuffer {
    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        self.entries.push((i, j, v));
    }

    pub fn merge(mut self, other: TripletBuffer) -> Self {
        self.entries.extend(other.entries);
        self
    }
}

/// Assembled symmetric matrix, load vector, and constraint bookkeeping.
#[derive(Clone, Debug)]
pub struct SparseSymmetricSystem {
    pattern: SparsityPattern,
    values: Vec<f64>,
    pub rhs: Vec<f64>,
    /// Prescribed dof values.
    pub fixed: BTreeMap<usize, f64>,
    /// `(slave, master)` pairs: the slave dof equals the master dof.
    pub ties: Vec<(usize, usize)>,
}

impl SparseSymmetricSystem {
    pub fn new(pattern: SparsityPattern) -> Self {
        let n = pattern.n();
        let nnz = pattern.nnz();
        Self { pattern, values: vec![0.0; nnz], rhs: vec![0.0; n], fixed: BTreeMap::new(), ties: Vec::new() }
    }

    /// Builds pattern and values from triplets. An off-diagonal triplet `(i, j, v)` sets
    /// both `K_ij` and `K_ji`, so each symmetric pair is listed once, in either order.
    pub fn from_triplets(n: usize, t: &TripletBuffer) -> Self {
        let mut pb = PatternBuilder::new(n);
        for &(i, j, _) in &t.entries {
            pb.add_entry(i, j);
        }
        let mut sys = Self::new(pb.build());
        for &(i, j, v) in &t.entries {
            sys.add_entry(i, j, v);
        }
        sys
    }

    pub fn n(&self) -> usize {
        self.pattern.n()
    }

    pub fn pattern(&self) -> &SparsityPattern {
        &self.pattern
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn add_entry(&mut self, i: usize, j: usize, v: f64) {
        let k = self.pattern.position(i, j).unwrap_or_else(|| panic!("entry ({i}, {j}) not in the sparsity pattern"));
        self.values[k] += v;
    }

    /// Adds a dense symmetric row-major block over `dofs` (only its upper half is read).
    pub fn add_block(&mut self, dofs: &[usize], block: &[f64]) {
        let m = dofs.len();
        debug_assert_eq!(block.len(), m * m);
        for a in 0..m {
            for b in 0..m {
                let (i, j) = (dofs[a], dofs[b]);
                if i < j || (i == j && a <= b) {
                    if i == j && a != b {
                        // Repeated dof in the list: both mirrored entries land on the diagonal.
                        self.add_entry(i, i, 2.0 * block[a * m + b]);
                    } else {
                        self.add_entry(i, j, block[a * m + b]);
                    }
                }
            }
        }
    }

    pub fn add_rhs(&mut self, i: usize, v: f64) {
        self.rhs[i] += v;
    }

    pub fn fix(&mut self, dof: usize, value: f64) {
        self.fixed.insert(dof, value);
    }

    pub fn tie(&mut self, slave: usize, master: usize) {
        if slave != master {
            self.ties.push((slave, master));
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.pattern.position(i, j).map_or(0.0, |k| self.values[k])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.entry(i, i)).collect()
    }

    /// `K x` for the unconstrained matrix.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut y = vec![0.0; n];
        for i in 0..n {
            for k in self.pattern.row_ptr[i]..self.pattern.row_ptr[i + 1] {
                let j = self.pattern.cols[k];
                let v = self.values[k];
                y[i] += v * x[j];
                if j != i {
                    y[j] += v * x[i];
                }
            }
        }
        y
    }

    /// Energy `xᵀ K x`.
    pub fn energy(&self, x: &[f64]) -> f64 {
        self.matvec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        let mut d = vec![vec![0.0; n]; n];
        for i in 0..n {
            for k in self.pattern.row_ptr[i]..self.pattern.row_ptr[i + 1] {
                let j = self.pattern.cols[k];
                d[i][j] = self.values[k];
                d[j][i] = self.values[k];
            }
        }
        d
    }

    /// Iterates the stored upper-triangle entries.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n()).flat_map(move |i| {
            (self.pattern.row_ptr[i]..self.pattern.row_ptr[i + 1])
                .map(move |k| (i, self.pattern.cols[k], self.values[k]))
        })
    }

    /// Writes the upper triangle as `i j value` lines (0-based).
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "% symmetric upper triangle, {} x {}, {} entries", self.n(), self.n(), self.pattern.nnz())?;
        for (i, j, v) in self.upper_entries() {
            writeln!(w, "{i} {j} {v:.17e}")?;
        }
        Ok(())
    }
}
