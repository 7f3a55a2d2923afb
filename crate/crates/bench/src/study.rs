//! Runs a resolved study and writes its artifacts.

use std::fs;
use std::path::PathBuf;

use isoshell_core::error::{Error, Result};
use isoshell_coupling::analysis::AnalysisResult;

use crate::cases::{build_model, BuiltCase, CaseSetup};
use crate::config::{Study, Target};
use crate::convergence::{run_convergence_with, run_levels, ConvergenceReport, Series};
use crate::report::{vtk_field, write_reports, ReportOptions};

/// Every strategy and degree of the study, levels in sequence. VTK dumps of the finest
/// level are written as `<case>-<strategy>-p<degree>.vtk` when requested.
pub fn run_study(study: &Study) -> Result<(Vec<ConvergenceReport>, Vec<PathBuf>)> {
    let mut reports = Vec::new();
    let mut vtk_files = Vec::new();
    let last = study.levels - 1;
    for &strategy in &study.strategies {
        let opts = study.options(strategy);
        for &degree in &study.degrees {
            let mut field = None;
            let hook = |level: usize, built: &BuiltCase, res: &AnalysisResult| {
                if let (Some(n), true) = (study.vtk, level == last) {
                    field = Some(vtk_field(&built.problem.model.patches, &res.solution, n)?);
                }
                Ok(())
            };
            let report = match &study.target {
                Target::Case(id) => {
                    let base = CaseSetup {
                        thickness: study.thickness,
                        params: study.params,
                        ..CaseSetup::new(*id, degree, 0)
                    };
                    run_convergence_with(base, &opts, study.levels, hook)?
                }
                Target::Model { label, file } => {
                    let series =
                        Series { label: label.clone(), degree, thickness: study.thickness, levels: study.levels };
                    let d = study.degree_given.then_some(degree);
                    run_levels(&series, &opts, |level| build_model(file, d, level, study.thickness), hook)?
                }
            };
            if let Some(body) = field {
                fs::create_dir_all(&study.out)
                    .map_err(|e| Error::Invalid(format!("cannot create {}: {e}", study.out.display())))?;
                let path = study.out.join(format!("{}-{}-p{degree}.vtk", report.case, report.strategy));
                fs::write(&path, body).map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))?;
                vtk_files.push(path);
            }
            reports.push(report);
        }
    }
    let mut written = write_reports(&study.out, &reports, ReportOptions { gnuplot: study.gnuplot })?;
    written.extend(vtk_files);
    Ok((reports, written))
}
