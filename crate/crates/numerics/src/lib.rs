//! Quadrature, sparse assembly, and the direct solver.

pub mod gauss;
pub mod solver;
pub mod sparse;

pub use gauss::{gauss, gauss_rule, GaussRule};
pub use solver::{solve, solve_with, SolveOptions, SolveReport};
pub use sparse::{PatternBuilder, SparseSymmetricSystem, SparsityPattern, TripletBuffer};
