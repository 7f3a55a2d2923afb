//! CSV, summary, timing, and field output for convergence studies.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use isoshell_core::error::{Error, Result};
use isoshell_shell::{Patch, Solution};

use crate::convergence::ConvergenceReport;

/// Columns before the per-quantity values in the level CSV.
pub const CSV_KEYS: [&str; 7] = ["case", "strategy", "degree", "thickness", "level", "dofs", "elements"];

fn num(v: f64) -> String {
    format!("{v:.12e}")
}

fn thickness(r: &ConvergenceReport) -> String {
    r.thickness.map(num).unwrap_or_default()
}

/// Quantity names in first-seen order over all reports.
fn quantity_names(reports: &[ConvergenceReport]) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for r in reports {
        for n in r.names() {
            if !names.contains(&n) {
                names.push(n);
            }
        }
    }
    names
}

/// One row per level and report. Contains no timing data, so identical configurations
/// produce identical bytes.
pub fn levels_csv(reports: &[ConvergenceReport]) -> String {
    let names = quantity_names(reports);
    let mut out = CSV_KEYS.join(",");
    for n in &names {
        out.push(',');
        out.push_str(n);
    }
    out.push_str(",residual,diag_ratio\n");
    for r in reports {
        for l in &r.levels {
            let _ = write!(
                out,
                "{},{},{},{},{},{},{}",
                r.case,
                r.strategy,
                r.degree,
                thickness(r),
                l.level,
                l.dofs,
                l.elements
            );
            for n in &names {
                out.push(',');
                if let Some(v) = l.value(n) {
                    out.push_str(&num(v));
                }
            }
            let _ = writeln!(out, ",{},{}", num(l.residual), num(l.diag_ratio));
        }
    }
    out
}

/// Side-by-side comparison: one row per (degree, thickness, level), one column per
/// strategy label and quantity (`<strategy>:<quantity>`).
pub fn comparison_csv(reports: &[ConvergenceReport]) -> String {
    let names = quantity_names(reports);
    let mut labels: Vec<String> = Vec::new();
    for r in reports {
        if !labels.contains(&r.strategy) {
            labels.push(r.strategy.clone());
        }
    }
    type Key = (usize, String, usize);
    let mut rows: BTreeMap<Key, (usize, BTreeMap<String, f64>)> = BTreeMap::new();
    for r in reports {
        for l in &r.levels {
            let row = rows.entry((r.degree, thickness(r), l.level)).or_insert((l.dofs, BTreeMap::new()));
            for (n, v) in &l.values {
                row.1.insert(format!("{}:{}", r.strategy, n), *v);
            }
        }
    }
    let mut out = String::from("degree,thickness,level,dofs");
    let columns: Vec<String> = labels.iter().flat_map(|s| names.iter().map(move |n| format!("{s}:{n}"))).collect();
    for c in &columns {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for ((degree, t, level), (dofs, values)) in &rows {
        let _ = write!(out, "{degree},{t},{level},{dofs}");
        for c in &columns {
            out.push(',');
            if let Some(v) = values.get(c) {
                out.push_str(&num(*v));
            }
        }
        out.push('\n');
    }
    out
}

/// Per-stage wall times in seconds; kept apart from the deterministic data.
pub fn timings_csv(reports: &[ConvergenceReport]) -> String {
    let mut out = String::from("case,strategy,degree,level,dofs,assembly_s,coupling_s,solve_s\n");
    for r in reports {
        for l in &r.levels {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.6},{:.6},{:.6}",
                r.case, r.strategy, r.degree, l.level, l.dofs, l.times.assembly, l.times.coupling, l.times.solve
            );
        }
    }
    out
}

/// Human-readable table of values, with slopes against `sqrt(dofs)` for error norms.
pub fn summary(reports: &[ConvergenceReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let names = r.names();
        let _ = write!(out, "{} | {} | p = {}", r.case, r.strategy, r.degree);
        if let Some(t) = r.thickness {
            let _ = write!(out, " | t = {t}");
        }
        out.push('\n');
        let _ = write!(out, "{:>5} {:>9}", "level", "dofs");
        for n in &names {
            let _ = write!(out, " {n:>14}");
            if r.errors {
                let _ = write!(out, " {:>6}", "slope");
            }
        }
        out.push('\n');
        let slopes: Vec<Vec<f64>> = names.iter().map(|n| r.slopes(n)).collect();
        for (k, l) in r.levels.iter().enumerate() {
            let _ = write!(out, "{:>5} {:>9}", l.level, l.dofs);
            for (i, n) in names.iter().enumerate() {
                let v = l.value(n).map(|v| format!("{v:.4e}")).unwrap_or_default();
                let _ = write!(out, " {v:>14}");
                if r.errors {
                    let s = if k > 0 {
                        slopes[i].get(k - 1).map(|s| format!("{s:.2}")).unwrap_or_default()
                    } else {
                        String::new()
                    };
                    let _ = write!(out, " {s:>6}");
                }
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

/// Whitespace-separated columns `sqrt(dofs)` and values, one block per report, ready
/// for gnuplot's `index`.
pub fn gnuplot_data(reports: &[ConvergenceReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let names = r.names();
        let _ = writeln!(out, "# {} {} p={} sqrt_dofs {}", r.case, r.strategy, r.degree, names.join(" "));
        for l in &r.levels {
            let _ = write!(out, "{:.12e}", (l.dofs as f64).sqrt());
            for n in &names {
                let _ = write!(out, " {}", l.value(n).map(num).unwrap_or_else(|| "nan".into()));
            }
            out.push('\n');
        }
        out.push_str("\n\n");
    }
    out
}

/// Legacy VTK unstructured grid of the displacement, sampled on an `n x n` grid of quads
/// inside every element. Quads with a corner outside the kept region are dropped; the
/// points stay, flagged by the `kept` scalar.
pub fn vtk_field(patches: &[Patch], sol: &Solution, n: usize) -> Result<String> {
    if n == 0 {
        return Err(Error::Invalid("vtk needs at least one subdivision".into()));
    }
    let mut xs = Vec::new();
    let mut us = Vec::new();
    let mut ids = Vec::new();
    let mut kept = Vec::new();
    let mut quads = Vec::new();
    for (pi, p) in patches.iter().enumerate() {
        let (ub, vb) = (&p.domain.u_breaks, &p.domain.v_breaks);
        for i in 0..ub.len() - 1 {
            for j in 0..vb.len() - 1 {
                let base = xs.len();
                for a in 0..=n {
                    for b in 0..=n {
                        let s = a as f64 / n as f64;
                        let r = b as f64 / n as f64;
                        let uv = [ub[i] + s * (ub[i + 1] - ub[i]), vb[j] + r * (vb[j + 1] - vb[j])];
                        xs.push(p.geometry.eval(uv)?);
                        us.push(sol.displacement(patches, pi, uv)?);
                        ids.push(pi);
                        kept.push(p.domain.contains(uv));
                    }
                }
                let at = |a: usize, b: usize| base + a * (n + 1) + b;
                for a in 0..n {
                    for b in 0..n {
                        let q = [at(a, b), at(a + 1, b), at(a + 1, b + 1), at(a, b + 1)];
                        if q.iter().all(|&k| kept[k]) {
                            quads.push(q);
                        }
                    }
                }
            }
        }
    }
    let m = xs.len();
    let mut out = String::from("# vtk DataFile Version 3.0\nisoshell displacement\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(out, "POINTS {m} double");
    for x in &xs {
        let _ = writeln!(out, "{:.12e} {:.12e} {:.12e}", x[0], x[1], x[2]);
    }
    let _ = writeln!(out, "CELLS {} {}", quads.len(), 5 * quads.len());
    for q in &quads {
        let _ = writeln!(out, "4 {} {} {} {}", q[0], q[1], q[2], q[3]);
    }
    let _ = writeln!(out, "CELL_TYPES {}", quads.len());
    for _ in &quads {
        out.push_str("9\n");
    }
    let _ = writeln!(out, "POINT_DATA {m}\nVECTORS displacement double");
    for u in &us {
        let _ = writeln!(out, "{:.12e} {:.12e} {:.12e}", u[0], u[1], u[2]);
    }
    out.push_str("SCALARS patch int 1\nLOOKUP_TABLE default\n");
    for id in &ids {
        let _ = writeln!(out, "{id}");
    }
    out.push_str("SCALARS kept int 1\nLOOKUP_TABLE default\n");
    for k in &kept {
        let _ = writeln!(out, "{}", u8::from(*k));
    }
    Ok(out)
}

/// Which optional artifacts to write besides the CSV files and the summary.
#[derive(Clone, Copy, Debug, Default)]
pub struct ReportOptions {
    pub gnuplot: bool,
}

/// Writes `levels.csv`, `compare.csv`, `summary.txt`, `timings.csv`, and optionally
/// `convergence.dat` into `dir`. Returns the written paths.
pub fn write_reports(dir: &Path, reports: &[ConvergenceReport], opts: ReportOptions) -> Result<Vec<PathBuf>> {
    if reports.is_empty() {
        return Err(Error::Invalid("no reports to write".into()));
    }
    fs::create_dir_all(dir).map_err(|e| Error::Invalid(format!("cannot create {}: {e}", dir.display())))?;
    let mut files = vec![
        ("levels.csv", levels_csv(reports)),
        ("compare.csv", comparison_csv(reports)),
        ("summary.txt", summary(reports)),
        ("timings.csv", timings_csv(reports)),
    ];
    if opts.gnuplot {
        files.push(("convergence.dat", gnuplot_data(reports)));
    }
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}
