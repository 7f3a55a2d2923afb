//! Multi-patch topology, interface spaces, penalty coupling, and cross-points.

pub mod analysis;
pub mod crosspoint;
pub mod file;
pub mod interface;
pub mod model;
pub mod penalty;
pub mod projection;

pub use crosspoint::{cross_point_constraints, CrossPointConstraint};
pub use file::{ModelFile, PatchDef, PinDef, PointLoadDef, Probe, SupportDef, MODEL_VERSION};
pub use interface::{build_interface, knot_line_crossings, InterfacePoint, InterfaceSpace};
pub use model::{CrossPoint, CurveRef, InterfaceDef, MultiPatchModel};
pub use penalty::{penalty_formula, penalty_parameters, Beta, PenaltyParams, PenaltyStrategy};
pub use projection::{
    assemble_penalty, jump_operator, projection_matrices, JumpOperator, PenaltyBlock, PointJump, ProjectionOperator,
};
