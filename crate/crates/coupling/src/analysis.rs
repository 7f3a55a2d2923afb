//! End-to-end linear analysis of a coupled multi-patch model.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use crate::{
    assemble_penalty, build_interface, cross_point_constraints, jump_operator, penalty_parameters,
    CrossPointConstraint, InterfaceSpace, MultiPatchModel, PenaltyBlock, PenaltyParams, PenaltyStrategy,
};
use isoshell_core::error::{Error, Result};
use isoshell_core::math::Vec3;
use isoshell_numerics::{solve_with, PatternBuilder, SolveOptions, SolveReport, SparseSymmetricSystem};
use isoshell_shell::{apply_dirichlet, Assembler, DirichletBc, DofMap, ExactSolution, Solution};

pub type VectorField = Arc<dyn Fn(Vec3) -> Vec3 + Send + Sync>;

#[derive(Clone, Debug)]
pub struct PointLoad {
    pub patch: usize,
    pub uv: [f64; 2],
    pub force: Vec3,
}

/// Single displacement component fixed to zero at a patch corner.
#[derive(Clone, Debug)]
pub struct Pin {
    pub patch: usize,
    pub uv: [f64; 2],
    pub component: usize,
}

/// Model, boundary conditions, and loads.
#[derive(Clone)]
pub struct Problem {
    pub model: MultiPatchModel,
    pub bcs: Vec<DirichletBc>,
    pub body_force: Option<VectorField>,
    pub point_loads: Vec<PointLoad>,
    pub pins: Vec<Pin>,
    /// Manufactured solution; its induced load `a(u_ex, v)` is added to the right-hand side.
    pub exact: Option<Arc<dyn ExactSolution>>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct AnalysisOptions {
    pub strategy: PenaltyStrategy,
    /// Overrides the default active side of every interface.
    pub active_side: Option<usize>,
    pub extra_points: usize,
    pub solver: SolveOptions,
}

/// Wall time per stage in seconds.
#[derive(Clone, Copy, Debug, Default)]
pub struct StageTimes {
    pub assembly: f64,
    pub coupling: f64,
    pub solve: f64,
}

/// Assembled but unsolved system with its coupling data.
pub struct Assembled {
    pub dofs: DofMap,
    pub system: SparseSymmetricSystem,
    pub interfaces: Vec<InterfaceSpace>,
    pub params: Vec<PenaltyParams>,
    pub penalties: Vec<PenaltyBlock>,
    pub crosspoints: Vec<CrossPointConstraint>,
    pub times: StageTimes,
}

pub struct AnalysisResult {
    pub solution: Solution,
    pub report: SolveReport,
    pub interfaces: Vec<InterfaceSpace>,
    pub params: Vec<PenaltyParams>,
    pub times: StageTimes,
    pub n_elements: usize,
}

/// Assembles stiffness, loads, interface penalties, and cross-point terms. Dirichlet
/// conditions are not applied.
pub fn assemble(problem: &Problem, opts: &AnalysisOptions) -> Result<Assembled> {
    let model = &problem.model;
    model.validate()?;
    let dofs = DofMap::new(&model.patches);
    let mut times = StageTimes::default();

    let t0 = Instant::now();
    let interfaces: Vec<InterfaceSpace> = (0..model.interfaces.len())
        .into_par_iter()
        .map(|l| build_interface(model, l, opts.active_side))
        .collect::<Result<_>>()?;
    let params: Vec<PenaltyParams> = interfaces
        .iter()
        .map(|i| {
            let mats = [&model.patches[i.patches[0]].material, &model.patches[i.patches[1]].material];
            penalty_parameters(&opts.strategy, i, mats)
        })
        .collect();
    let penalties: Vec<PenaltyBlock> = interfaces
        .par_iter()
        .zip(&params)
        .map(|(i, a)| {
            let op = jump_operator(model, &dofs, i)?;
            assemble_penalty(i, &op, &opts.strategy, *a)
        })
        .collect::<Result<_>>()?;
    let crosspoints = cross_point_constraints(model, &dofs, &interfaces, &params)?;
    let mut entries: Vec<(usize, usize, f64)> = penalties.iter().flat_map(|b| b.upper_entries()).collect();
    for c in &crosspoints {
        if let CrossPointConstraint::Penalty { block, .. } = c {
            entries.extend(block.upper_entries());
        }
    }
    times.coupling = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let asm = Assembler { patches: &model.patches, dofs: &dofs, extra_points: opts.extra_points };
    let mut pb = PatternBuilder::new(dofs.n_dofs);
    asm.add_pattern(&mut pb);
    for &(i, j, _) in &entries {
        pb.add_entry(i, j);
    }
    let mut sys = SparseSymmetricSystem::new(pb.build());
    asm.assemble(&mut sys, problem.exact.as_deref())?;
    if let Some(f) = &problem.body_force {
        asm.body_force(&mut sys, f.as_ref())?;
    }
    for pl in &problem.point_loads {
        asm.point_load(&mut sys, pl.patch, pl.uv, pl.force)?;
    }
    for &(i, j, v) in &entries {
        sys.add_entry(i, j, v);
    }
    for c in &crosspoints {
        if let CrossPointConstraint::Ties(t) = c {
            for &(s, m) in t {
                sys.tie(s, m);
            }
        }
    }
    times.assembly = t1.elapsed().as_secs_f64();
    Ok(Assembled { dofs, system: sys, interfaces, params, penalties, crosspoints, times })
}

/// Assembles, applies boundary conditions, and solves.
pub fn analyze(problem: &Problem, opts: &AnalysisOptions) -> Result<AnalysisResult> {
    let Assembled { dofs, mut system, interfaces, params, mut times, .. } = assemble(problem, opts)?;
    apply_dirichlet(&problem.model.patches, &dofs, &problem.bcs, &mut system)?;
    for pin in &problem.pins {
        let space = &problem.model.patches[pin.patch].space;
        let (nu, nv) = space.shape();
        let corner = |x: f64, n: usize| if x < 0.5 { 0 } else { n - 1 };
        let f = space.flat(corner(pin.uv[0], nu), corner(pin.uv[1], nv));
        let d = dofs
            .dof(pin.patch, f, pin.component)
            .ok_or_else(|| Error::Invalid(format!("pinned corner of patch {} is inactive", pin.patch)))?;
        system.fix(d, 0.0);
    }
    let t = Instant::now();
    let (coeffs, report) = solve_with(&system, opts.solver)?;
    times.solve = t.elapsed().as_secs_f64();
    let n_elements =
        problem.model.patches.iter().map(|p| p.domain.cells.iter().filter(|c| c.is_active()).count()).sum();
    Ok(AnalysisResult { solution: Solution { dofs, coeffs }, report, interfaces, params, times, n_elements })
}
