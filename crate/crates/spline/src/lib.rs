//! B-spline and NURBS spaces.

pub mod basis;
pub mod curve;
pub mod io;
pub mod knots;
pub mod reduced;
pub mod refine;
pub mod tensor;

pub use basis::{eval_basis, UniBasis};
pub use curve::{BezierSegment, SplineCurve};
pub use io::{PatchFile, FORMAT_VERSION};
pub use knots::KnotVector;
pub use reduced::build_reduced_space;
pub use refine::{insert_knots, Transfer};
pub use tensor::{didx, BasisEval, Derivs, SplineSpace, MAX_ORDER, NDERIV};
