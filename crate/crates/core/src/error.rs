use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter {value} outside domain [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },

    #[error("invalid knot vector: {0}")]
    KnotVector(String),

    #[error("inserting knot {knot} would exceed multiplicity {max}")]
    KnotMultiplicity { knot: f64, max: usize },

    #[error("reduced interface space needs degree >= 2, got {0}")]
    UnsupportedDegree(usize),

    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },

    #[error("non-positive weight {0}")]
    Weight(f64),

    #[error("degenerate parametrization at ({0}, {1})")]
    DegenerateParametrization(f64, f64),

    #[error("degenerate curve at t = {0}")]
    DegenerateCurve(f64),

    #[error("Gauss rule with {0} points is not available (1..=30)")]
    GaussPoints(usize),

    #[error("zero diagonal entry at dof {0}")]
    SingularDof(usize),

    #[error("factorization broke down: system is not positive definite")]
    Indefinite,

    #[error("trim curve runs along the grid line {axis} = {value}")]
    AmbiguousClassification { axis: char, value: f64 },

    #[error("unsupported cut-cell topology in element ({0}, {1})")]
    UnsupportedTopology(usize, usize),

    #[error("degenerate jacobian in patch {patch}, element ({i}, {j})")]
    Assembly { patch: usize, i: usize, j: usize },

    #[error("point ({0}, {1}) lies outside patch {2}")]
    PointOutside(f64, f64, usize),

    #[error("interface {interface} is not watertight: gap {gap:e}")]
    NotWatertight { interface: usize, gap: f64 },

    #[error("interface {0} has an empty or singular reduced mass matrix")]
    SingularMass(usize),

    #[error("cross-point {index} preimages disagree by {gap:e}")]
    CrossPointMismatch { index: usize, gap: f64 },

    #[error("unsupported file version {0}")]
    Version(u32),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
