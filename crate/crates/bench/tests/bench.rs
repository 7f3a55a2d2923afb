use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use isoshell_bench::cases::{build_case, build_model, case_catalogue, CaseId, CaseParams, CaseSetup};
use isoshell_bench::config::{StudyConfig, Target};
use isoshell_bench::convergence::{run_convergence, solve_level, ConvergenceReport, LevelResult};
use isoshell_bench::report::{comparison_csv, levels_csv, summary, CSV_KEYS};
use isoshell_coupling::analysis::{analyze, AnalysisOptions};
use isoshell_coupling::{Beta, ModelFile, PenaltyStrategy};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn files_with(dir: &Path, ext: &str) -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    out.sort();
    out
}

fn level(level: usize, dofs: usize, values: &[(&str, f64)]) -> LevelResult {
    LevelResult {
        level,
        dofs,
        elements: dofs / 10,
        values: values.iter().map(|(n, v)| (n.to_string(), *v)).collect(),
        residual: 1e-14,
        diag_ratio: 10.0,
        times: Default::default(),
    }
}

fn report(strategy: &str, levels: Vec<LevelResult>) -> ConvergenceReport {
    ConvergenceReport {
        case: "demo".into(),
        strategy: strategy.into(),
        degree: 2,
        thickness: None,
        errors: true,
        levels,
    }
}

#[test]
fn catalogue_lists_every_case_once() {
    let cat = case_catalogue();
    assert_eq!(cat.len(), CaseId::ALL.len());
    for (c, id) in cat.iter().zip(CaseId::ALL) {
        assert_eq!(c.id, id);
        assert_eq!(id.name().parse::<CaseId>().unwrap(), id);
        assert!(c.young > 0.0 && c.thickness > 0.0 && c.poisson < 0.5);
        assert!(c.thicknesses.contains(&c.thickness));
    }
    assert!("no-such-case".parse::<CaseId>().is_err());
}

#[test]
fn every_case_builds_and_solves_on_the_coarsest_level() {
    for id in CaseId::ALL {
        let (built, res) = solve_level(&CaseSetup::new(id, 2, 0), &AnalysisOptions::default()).unwrap();
        assert!(!built.problem.model.patches.is_empty());
        assert!(res.report.residual < 1e-8, "{id}: {}", res.report.residual);
    }
}

#[test]
fn case_parameters_are_checked() {
    let with = |id, params| build_case(&CaseSetup { params, ..CaseSetup::new(id, 2, 0) });
    assert!(with(CaseId::LBeam, CaseParams { radius: Some(2.0), ..Default::default() }).is_err());
    assert!(with(CaseId::Cylinder, CaseParams { span: Some(200.0), ..Default::default() }).is_err());
    assert!(with(CaseId::ScordelisLo, CaseParams { load: Some(-1.0), ..Default::default() }).is_err());
    assert!(with(CaseId::FourPatch, CaseParams { load: Some(1.0), ..Default::default() }).is_err());
    assert!(with(CaseId::Cylinder, CaseParams { radius: Some(2.0), span: Some(60.0), ..Default::default() }).is_ok());
}

#[test]
fn scordelis_deflection_scales_with_the_load() {
    let opts = AnalysisOptions::default();
    let uz = |load: f64| {
        let setup = CaseSetup {
            params: CaseParams { load: Some(load), ..Default::default() },
            ..CaseSetup::new(CaseId::ScordelisLo, 2, 0)
        };
        let (built, res) = solve_level(&setup, &opts).unwrap();
        let isoshell_bench::cases::Quantity::Deflection { patch, uv, reference } = built.quantity else { panic!() };
        (res.solution.displacement(&built.problem.model.patches, patch, uv).unwrap()[2], reference)
    };
    let (a, ra) = uz(90.0);
    let (b, rb) = uz(45.0);
    assert!((b / a - 0.5).abs() < 1e-10);
    assert!((rb / ra - 0.5).abs() < 1e-12);
}

#[test]
fn four_patch_errors_decrease() {
    let r = run_convergence(CaseId::FourPatch, PenaltyStrategy::projected(Beta::PPlus1), 2, 3, None).unwrap();
    assert!(r.errors);
    for name in ["l2", "h1", "h2"] {
        let s = r.series(name);
        assert_eq!(s.len(), 3, "{name}");
        assert!(s.windows(2).all(|w| w[1] < w[0]), "{name}: {s:?}");
    }
}

#[test]
fn every_shipped_config_resolves() {
    let tomls = files_with(&configs(), "toml");
    assert!(tomls.len() >= 5);
    for path in tomls {
        let study = StudyConfig::load(&path).and_then(StudyConfig::resolve);
        let study = study.unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(study.levels >= 3);
        assert!(!study.strategies.is_empty());
        if let Target::Model { file, .. } = &study.target {
            assert!(!file.patches.is_empty());
        }
    }
}

#[test]
fn every_shipped_model_solves() {
    for path in files_with(&configs().join("models"), "json") {
        let file = ModelFile::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
        let built = build_model(&file, None, 0, None).unwrap();
        let res = analyze(&built.problem, &AnalysisOptions::default()).unwrap();
        assert!(res.report.residual < 1e-8, "{}", path.display());
        for p in &file.probes {
            let u = res.solution.displacement(&built.problem.model.patches, p.patch, p.uv).unwrap();
            assert!(u.iter().all(|x| x.is_finite()), "{}: {}", path.display(), p.name);
        }
    }
}

#[test]
fn level_csv_layout() {
    let empty = report("projected", Vec::new());
    let header = format!("{},residual,diag_ratio\n", CSV_KEYS.join(","));
    assert_eq!(levels_csv(&[empty]), header);

    let r = report("classic", vec![level(0, 100, &[("l2", 1e-2)]), level(1, 400, &[("l2", 2.5e-3)])]);
    let text = levels_csv(std::slice::from_ref(&r));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "case,strategy,degree,thickness,level,dofs,elements,l2,residual,diag_ratio");
    assert!(lines[2].starts_with("demo,classic,2,,1,400,40,2.500000000000e-3,"));
    assert!((r.slopes("l2")[0] - 2.0).abs() < 1e-12);
    assert!(summary(&[r]).contains("2.00"));
}

#[test]
fn comparison_csv_puts_strategies_side_by_side() {
    let a = report(
        "projected",
        vec![level(0, 100, &[("l2", 1.0), ("h2", 3.0)]), level(1, 400, &[("l2", 0.5), ("h2", 2.0)])],
    );
    let b = report("classic", vec![level(0, 100, &[("l2", 4.0), ("h2", 5.0)])]);
    let text = comparison_csv(&[a, b]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "degree,thickness,level,dofs,projected:l2,projected:h2,classic:l2,classic:h2");
    assert_eq!(lines.len(), 3);
    let row: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(row.len(), 8);
    assert_eq!(&row[6..], ["", ""]);
}

#[test]
fn cli_lists_cases_and_rejects_bad_configs() {
    let out = Command::new(env!("CARGO_BIN_EXE_bench")).arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), CaseId::ALL.len());
    for id in CaseId::ALL {
        assert!(text.contains(id.name()));
    }

    let dir = std::env::temp_dir().join(format!("isoshell-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.toml");
    fs::write(&bad, "case = \"l-beam\"\nlevels = 1\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_bench"))
        .args(["run", "--quiet", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("at least 3 levels"));
    let _ = fs::remove_dir_all(&dir);
}
