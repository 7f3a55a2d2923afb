use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::interface::InterfaceSpace;
use isoshell_core::error::{Error, Result};
use isoshell_shell::Material;

/// Exponent of the mesh size in the projected penalty coefficients.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Beta {
    #[serde(rename = "pm1")]
    PMinus1,
    #[serde(rename = "p")]
    P,
    #[default]
    #[serde(rename = "pp1")]
    PPlus1,
}

impl Beta {
    pub fn exponent(self, p: usize) -> f64 {
        let p = p as f64;
        match self {
            Beta::PMinus1 => p - 1.0,
            Beta::P => p,
            Beta::PPlus1 => p + 1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Beta::PMinus1 => "pm1",
            Beta::P => "p",
            Beta::PPlus1 => "pp1",
        }
    }
}

impl FromStr for Beta {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pm1" => Ok(Beta::PMinus1),
            "p" => Ok(Beta::P),
            "pp1" => Ok(Beta::PPlus1),
            _ => Err(Error::Invalid(format!("unknown beta '{s}' (expected pm1, p or pp1)"))),
        }
    }
}

/// How the interface penalty coefficients are chosen and applied.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "lowercase")]
pub enum PenaltyStrategy {
    /// `α = 10³ E` for both terms, unprojected.
    Classic,
    /// Material- and mesh-scaled coefficients with factor `δ`, unprojected.
    Scaled { delta: f64 },
    /// Projection onto the degree-reduced space with `α ∝ h^{-β}`.
    Projected {
        beta: Beta,
        /// Row-sum lumping of the reduced mass matrix instead of a direct solve.
        #[serde(default)]
        lumped: bool,
    },
}

impl Default for PenaltyStrategy {
    fn default() -> Self {
        PenaltyStrategy::Projected { beta: Beta::PPlus1, lumped: false }
    }
}

impl PenaltyStrategy {
    pub fn scaled() -> Self {
        PenaltyStrategy::Scaled { delta: 1e3 }
    }

    pub fn projected(beta: Beta) -> Self {
        PenaltyStrategy::Projected { beta, lumped: false }
    }

    pub fn is_projected(&self) -> bool {
        matches!(self, PenaltyStrategy::Projected { .. })
    }

    pub fn label(&self) -> String {
        match self {
            PenaltyStrategy::Classic => "classic".into(),
            PenaltyStrategy::Scaled { .. } => "scaled".into(),
            PenaltyStrategy::Projected { beta, .. } => format!("projected-{}", beta.label()),
        }
    }

    /// Parses `classic`, `scaled` or `projected` with the given exponent.
    pub fn parse(name: &str, beta: Beta) -> Result<Self> {
        match name {
            "classic" => Ok(PenaltyStrategy::Classic),
            "scaled" => Ok(PenaltyStrategy::scaled()),
            "projected" => Ok(PenaltyStrategy::projected(beta)),
            _ => Err(Error::Invalid(format!("unknown strategy '{name}' (expected classic, scaled or projected)"))),
        }
    }
}

impl fmt::Display for PenaltyStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Displacement and rotation penalty coefficients of one interface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PenaltyParams {
    pub disp: f64,
    pub rot: f64,
}

/// Coefficients for interface `iface` between patches with materials `mats`.
pub fn penalty_parameters(strategy: &PenaltyStrategy, iface: &InterfaceSpace, mats: [&Material; 2]) -> PenaltyParams {
    let membrane = mats[0].membrane_stiffness().min(mats[1].membrane_stiffness());
    let bending = mats[0].bending_stiffness().min(mats[1].bending_stiffness());
    match *strategy {
        PenaltyStrategy::Classic => {
            let a = 1e3 * mats[0].young().min(mats[1].young());
            PenaltyParams { disp: a, rot: a }
        }
        PenaltyStrategy::Scaled { delta } => {
            PenaltyParams { disp: delta * membrane / iface.h, rot: delta * bending / iface.h }
        }
        PenaltyStrategy::Projected { beta, .. } => {
            penalty_formula(beta.exponent(iface.degree()), iface.measure, iface.h, membrane, bending)
        }
    }
}

/// `α = |γ|^{β−1} S / h^β` for membrane and bending stiffness scales `S`.
pub fn penalty_formula(beta: f64, measure: f64, h: f64, membrane: f64, bending: f64) -> PenaltyParams {
    let f = measure.powf(beta - 1.0) / h.powf(beta);
    PenaltyParams { disp: f * membrane, rot: f * bending }
}
