//! Study settings from CLI flags and TOML config files.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use isoshell_core::error::{Error, Result};
use isoshell_coupling::analysis::AnalysisOptions;
use isoshell_coupling::{Beta, ModelFile, PenaltyStrategy};

use crate::cases::{CaseId, CaseParams};

/// Strategy family as named on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyName {
    Classic,
    Scaled,
    Projected,
}

impl FromStr for StrategyName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classic" => Ok(StrategyName::Classic),
            "scaled" => Ok(StrategyName::Scaled),
            "projected" => Ok(StrategyName::Projected),
            _ => Err(Error::Invalid(format!("unknown strategy '{s}' (expected classic, scaled or projected)"))),
        }
    }
}

impl fmt::Display for StrategyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyName::Classic => "classic",
            StrategyName::Scaled => "scaled",
            StrategyName::Projected => "projected",
        })
    }
}

/// Partial settings. Both the flags and a config file parse into this; set keys of the
/// file win over flags.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub case: Option<CaseId>,
    /// JSON model file studied instead of a catalogue case.
    pub model: Option<PathBuf>,
    pub strategy: Option<StrategyName>,
    /// Several strategies on the same case, written side by side.
    pub strategies: Option<Vec<StrategyName>>,
    pub beta: Option<Beta>,
    /// Factor of the scaled strategy.
    pub delta: Option<f64>,
    /// Row-sum lumped reduced mass matrix for the projected strategy.
    pub lumped: Option<bool>,
    pub degree: Option<usize>,
    pub degrees: Option<Vec<usize>>,
    pub levels: Option<usize>,
    pub thickness: Option<f64>,
    /// Geometry and load overrides of a catalogue case.
    pub params: Option<CaseParams>,
    /// Forces the active side (0 or 1) of every interface.
    pub active_side: Option<usize>,
    /// Visualization points per element and direction for VTK dumps of the finest level.
    pub vtk: Option<usize>,
    pub gnuplot: Option<bool>,
    pub out: Option<PathBuf>,
}

impl StudyConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Invalid(format!("config: {e}")))
    }

    /// Reads a config file; relative `out` and `model` paths are taken relative to the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        if let Some(dir) = path.parent() {
            for p in [cfg.out.as_mut(), cfg.model.as_mut()].into_iter().flatten() {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    /// Keys set in `other` replace those of `self`. `case` and `model` count as one key.
    pub fn overridden_by(self, other: StudyConfig) -> StudyConfig {
        let (case, model) = if other.case.is_some() || other.model.is_some() {
            (other.case, other.model)
        } else {
            (self.case, self.model)
        };
        StudyConfig {
            case,
            model,
            strategy: other.strategy.or(self.strategy),
            strategies: other.strategies.or(self.strategies),
            beta: other.beta.or(self.beta),
            delta: other.delta.or(self.delta),
            lumped: other.lumped.or(self.lumped),
            degree: other.degree.or(self.degree),
            degrees: other.degrees.or(self.degrees),
            levels: other.levels.or(self.levels),
            thickness: other.thickness.or(self.thickness),
            params: other.params.or(self.params),
            active_side: other.active_side.or(self.active_side),
            vtk: other.vtk.or(self.vtk),
            gnuplot: other.gnuplot.or(self.gnuplot),
            out: other.out.or(self.out),
        }
    }

    /// Fills defaults and validates.
    pub fn resolve(self) -> Result<Study> {
        let target = match (self.case, &self.model) {
            (Some(c), None) => Target::Case(c),
            (None, Some(path)) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
                let file = ModelFile::from_json(&text)?;
                let label =
                    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "model".into());
                Target::Model { label, file: Box::new(file) }
            }
            (Some(_), Some(_)) => return Err(Error::Invalid("give either a case or a model, not both".into())),
            (None, None) => return Err(Error::Invalid("no case or model given".into())),
        };
        let degree_given = self.degrees.is_some() || self.degree.is_some();
        let names = match (self.strategies, self.strategy) {
            (Some(s), _) => s,
            (None, Some(s)) => vec![s],
            (None, None) => vec![StrategyName::Projected],
        };
        if names.is_empty() {
            return Err(Error::Invalid("empty strategy list".into()));
        }
        let beta = self.beta.unwrap_or_default();
        let lumped = self.lumped.unwrap_or(false);
        let delta = self.delta.unwrap_or(1e3);
        if !(delta > 0.0) {
            return Err(Error::Invalid(format!("delta must be positive, got {delta}")));
        }
        let strategies = names
            .iter()
            .map(|n| match n {
                StrategyName::Classic => PenaltyStrategy::Classic,
                StrategyName::Scaled => PenaltyStrategy::Scaled { delta },
                StrategyName::Projected => PenaltyStrategy::Projected { beta, lumped },
            })
            .collect();
        let degrees = match (self.degrees, self.degree) {
            (Some(d), _) => d,
            (None, Some(d)) => vec![d],
            (None, None) => match &target {
                Target::Model { file, .. } => vec![file.patches.iter().map(|p| p.degree).max().unwrap_or(2)],
                Target::Case(_) => vec![2],
            },
        };
        if degrees.is_empty() || degrees.iter().any(|d| !(2..=4).contains(d)) {
            return Err(Error::Invalid(format!("degrees must be a non-empty subset of 2, 3, 4; got {degrees:?}")));
        }
        let levels = self.levels.unwrap_or(3);
        if levels < 3 {
            return Err(Error::Invalid(format!("at least 3 levels are needed, got {levels}")));
        }
        if let Some(t) = self.thickness {
            if !(t > 0.0) {
                return Err(Error::Invalid(format!("thickness must be positive, got {t}")));
            }
        }
        if let Some(s) = self.active_side {
            if s > 1 {
                return Err(Error::Invalid(format!("active side must be 0 or 1, got {s}")));
            }
        }
        let params = self.params.unwrap_or_default();
        match &target {
            Target::Case(id) => params.check(*id)?,
            Target::Model { .. } if self.params.is_some() => {
                return Err(Error::Invalid("case parameters do not apply to model files".into()))
            }
            Target::Model { .. } => {}
        }
        if self.vtk == Some(0) {
            return Err(Error::Invalid("vtk needs at least one subdivision".into()));
        }
        Ok(Study {
            target,
            degree_given,
            strategies,
            degrees,
            levels,
            thickness: self.thickness,
            params,
            active_side: self.active_side,
            vtk: self.vtk,
            gnuplot: self.gnuplot.unwrap_or(false),
            out: self.out.unwrap_or_else(|| PathBuf::from("out")),
        })
    }
}

/// Fully resolved study.
#[derive(Clone, Debug)]
pub struct Study {
    pub target: Target,
    /// Whether degrees were set explicitly; otherwise model files keep their own.
    pub degree_given: bool,
    pub strategies: Vec<PenaltyStrategy>,
    pub degrees: Vec<usize>,
    pub levels: usize,
    pub thickness: Option<f64>,
    pub params: CaseParams,
    pub active_side: Option<usize>,
    pub vtk: Option<usize>,
    pub gnuplot: bool,
    pub out: PathBuf,
}

/// What a study runs on.
#[derive(Clone, Debug)]
pub enum Target {
    Case(CaseId),
    Model { label: String, file: Box<ModelFile> },
}

impl Target {
    pub fn label(&self) -> &str {
        match self {
            Target::Case(c) => c.name(),
            Target::Model { label, .. } => label,
        }
    }
}

impl Study {
    pub fn options(&self, strategy: PenaltyStrategy) -> AnalysisOptions {
        AnalysisOptions { strategy, active_side: self.active_side, ..Default::default() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_keys_override_flags() {
        let flags = StudyConfig {
            case: Some(CaseId::FourPatch),
            strategy: Some(StrategyName::Classic),
            levels: Some(4),
            ..Default::default()
        };
        let file = StudyConfig::from_toml("strategy = \"projected\"\nbeta = \"pm1\"\ndegrees = [2, 3]\n").unwrap();
        let s = flags.overridden_by(file).resolve().unwrap();
        assert!(matches!(s.target, Target::Case(CaseId::FourPatch)));
        assert_eq!(s.levels, 4);
        assert_eq!(s.degrees, vec![2, 3]);
        assert_eq!(s.strategies, vec![PenaltyStrategy::Projected { beta: Beta::PMinus1, lumped: false }]);
    }

    #[test]
    fn rejects_bad_settings() {
        assert!(StudyConfig::from_toml("colour = 1").is_err());
        let base = StudyConfig { case: Some(CaseId::LBeam), ..Default::default() };
        assert!(StudyConfig { levels: Some(2), ..base.clone() }.resolve().is_err());
        assert!(StudyConfig { degree: Some(5), ..base.clone() }.resolve().is_err());
        assert!(StudyConfig { active_side: Some(2), ..base.clone() }.resolve().is_err());
        assert!(StudyConfig { model: Some("m.json".into()), ..base.clone() }.resolve().is_err());
        let radius = CaseParams { radius: Some(2.0), ..Default::default() };
        assert!(StudyConfig { params: Some(radius), ..base.clone() }.resolve().is_err());
        let cyl = StudyConfig { case: Some(CaseId::Cylinder), params: Some(radius), ..base.clone() };
        assert_eq!(cyl.resolve().unwrap().params.radius, Some(2.0));
        assert!(StudyConfig::from_toml("case = \"cylinder\"\n[params]\nspan = 200.0\n").unwrap().resolve().is_err());
        assert!(StudyConfig { case: None, ..base }.resolve().is_err());
    }
}
