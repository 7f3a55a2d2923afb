use serde::Serialize;

use isoshell_core::error::{Error, Result};
use isoshell_core::math::dot;
use isoshell_coupling::analysis::{analyze, AnalysisOptions, AnalysisResult, StageTimes};
use isoshell_coupling::PenaltyStrategy;
use isoshell_shell::{error_norms, normal_variation, Patch, Solution};

use crate::cases::{build_case, BuiltCase, CaseId, CaseSetup, Quantity};

/// Outcome of one refinement level.
#[derive(Clone, Debug, Serialize)]
pub struct LevelResult {
    pub level: usize,
    pub dofs: usize,
    pub elements: usize,
    /// Named scalar results: error norms or quantities of interest.
    pub values: Vec<(String, f64)>,
    pub residual: f64,
    pub diag_ratio: f64,
    #[serde(skip)]
    pub times: StageTimes,
}

impl LevelResult {
    pub fn value(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|v| v.0 == name).map(|v| v.1)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    /// Case name, or the model file stem.
    pub case: String,
    pub strategy: String,
    pub degree: usize,
    pub thickness: Option<f64>,
    /// Whether the values are error norms, so that convergence slopes are meaningful.
    pub errors: bool,
    pub levels: Vec<LevelResult>,
}

impl ConvergenceReport {
    pub fn names(&self) -> Vec<String> {
        self.levels.first().map(|l| l.values.iter().map(|v| v.0.clone()).collect()).unwrap_or_default()
    }

    pub fn series(&self, name: &str) -> Vec<f64> {
        self.levels.iter().filter_map(|l| l.value(name)).collect()
    }

    /// Slopes of `log(error)` against `log(sqrt(dofs))` over consecutive levels (positive
    /// for decreasing errors).
    pub fn slopes(&self, name: &str) -> Vec<f64> {
        self.levels
            .windows(2)
            .filter_map(|w| {
                let (a, b) = (w[0].value(name)?, w[1].value(name)?);
                let h = 0.5 * (w[1].dofs as f64 / w[0].dofs as f64).ln();
                Some(-(b / a).ln() / h)
            })
            .collect()
    }

    pub fn last_slope(&self, name: &str) -> Option<f64> {
        self.slopes(name).last().copied()
    }
}

/// Linearized change of the angle between the surface normals of two patches.
pub fn angle_change(patches: &[Patch], sol: &Solution, at: [(usize, [f64; 2]); 2]) -> Result<f64> {
    let mut normals = [[0.0; 3]; 2];
    let mut variations = [[0.0; 3]; 2];
    for (k, &(p, uv)) in at.iter().enumerate() {
        let fr = patches[p].frame(uv, 0)?;
        let basis = patches[p].space.eval(&uv, 1)?;
        let dn = normal_variation(&fr, &basis);
        for (a, &f) in basis.indices.iter().enumerate() {
            if let Some(c) = sol.coefficient(p, f) {
                for d in 0..3 {
                    for e in 0..3 {
                        variations[k][e] += dn[3 * a + d][e] * c[d];
                    }
                }
            }
        }
        normals[k] = fr.a3;
    }
    let cos0 = dot(normals[0], normals[1]);
    let dcos = dot(variations[0], normals[1]) + dot(normals[0], variations[1]);
    Ok(-dcos / (1.0 - cos0 * cos0).sqrt())
}

fn measure(q: &Quantity, patches: &[Patch], res: &AnalysisResult) -> Result<Vec<(String, f64)>> {
    let sol = &res.solution;
    Ok(match q {
        Quantity::Errors(ex) => {
            let e = error_norms(patches, sol, ex.as_ref())?;
            vec![("l2".into(), e.l2), ("h1".into(), e.h1), ("h2".into(), e.h2), ("energy".into(), e.energy)]
        }
        Quantity::Deflection { patch, uv, reference } => {
            let uz = sol.displacement(patches, *patch, *uv)?[2];
            vec![("uz".into(), uz), ("uz_normalized".into(), uz / reference)]
        }
        Quantity::Angle { tip, corner } => {
            let uz = sol.displacement(patches, tip.0, tip.1)?[2];
            let da = angle_change(patches, sol, *corner)?;
            vec![("tip_uz".into(), uz), ("angle_error".into(), da.abs())]
        }
        Quantity::Probes(probes) => {
            let mut out = Vec::with_capacity(3 * probes.len());
            for p in probes {
                let u = sol.displacement(patches, p.patch, p.uv)?;
                for (c, v) in ["ux", "uy", "uz"].iter().zip(u) {
                    out.push((format!("{}_{c}", p.name), v));
                }
            }
            out
        }
    })
}

/// Builds and solves one level.
pub fn solve_level(setup: &CaseSetup, opts: &AnalysisOptions) -> Result<(BuiltCase, AnalysisResult)> {
    let built = build_case(setup)?;
    let res = analyze(&built.problem, opts)?;
    Ok((built, res))
}

/// Runs levels `0..levels` of a case.
pub fn run_convergence(
    id: CaseId,
    strategy: PenaltyStrategy,
    degree: usize,
    levels: usize,
    thickness: Option<f64>,
) -> Result<ConvergenceReport> {
    let opts = AnalysisOptions { strategy, ..Default::default() };
    let base = CaseSetup { thickness, ..CaseSetup::new(id, degree, 0) };
    run_convergence_with(base, &opts, levels, |_, _, _| Ok(()))
}

/// Like [`run_convergence`] with full options, starting from `base` whose level is
/// ignored; `hook` sees every solved level.
pub fn run_convergence_with<F>(
    base: CaseSetup,
    opts: &AnalysisOptions,
    levels: usize,
    hook: F,
) -> Result<ConvergenceReport>
where
    F: FnMut(usize, &BuiltCase, &AnalysisResult) -> Result<()>,
{
    let series = Series { label: base.id.name().into(), degree: base.degree, thickness: base.thickness, levels };
    run_levels(&series, opts, |level| build_case(&CaseSetup { level, ..base }), hook)
}

/// Labels and size of one refinement series.
#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub degree: usize,
    pub thickness: Option<f64>,
    pub levels: usize,
}

/// Builds, solves, and measures levels `0..levels` in sequence. Dof counts must grow.
pub fn run_levels<B, F>(series: &Series, opts: &AnalysisOptions, mut build: B, mut hook: F) -> Result<ConvergenceReport>
where
    B: FnMut(usize) -> Result<BuiltCase>,
    F: FnMut(usize, &BuiltCase, &AnalysisResult) -> Result<()>,
{
    let strategy = opts.strategy;
    let context = |level: usize, e: Error| {
        Error::Invalid(format!("{} level {level} (p = {}, {strategy}): {e}", series.label, series.degree))
    };
    let mut out: Vec<LevelResult> = Vec::with_capacity(series.levels);
    let mut errors = false;
    for level in 0..series.levels {
        let built = build(level).map_err(|e| context(level, e))?;
        errors = matches!(built.quantity, Quantity::Errors(_));
        let res = analyze(&built.problem, opts).map_err(|e| context(level, e))?;
        let values = measure(&built.quantity, &built.problem.model.patches, &res).map_err(|e| context(level, e))?;
        let dofs = res.solution.dofs.n_dofs;
        if let Some(prev) = out.last() {
            if dofs <= prev.dofs {
                return Err(context(level, Error::Invalid(format!("dof count {dofs} not above {}", prev.dofs))));
            }
        }
        hook(level, &built, &res).map_err(|e| context(level, e))?;
        out.push(LevelResult {
            level,
            dofs,
            elements: res.n_elements,
            values,
            residual: res.report.residual,
            diag_ratio: res.report.diag_ratio,
            times: res.times,
        });
    }
    Ok(ConvergenceReport {
        case: series.label.clone(),
        strategy: strategy.label(),
        degree: series.degree,
        thickness: series.thickness,
        errors,
        levels: out,
    })
}
