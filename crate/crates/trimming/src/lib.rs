//! Parameter-space trimming: element classification and cut-cell quadrature.

pub mod curve;
pub mod domain;

pub use curve::{curve_intersections, perimeter_coord, roots_on_line, TrimCurve};
pub use domain::{classify_elements, CellStatus, ElementCell, QuadSubcell, TrimmedDomain, SLIVER};

use isoshell_core::error::Result;

/// Parameters where a trim curve meets the grid line `uv[axis] = c`.
pub fn intersect_curve_gridline(curve: &TrimCurve, axis: usize, c: f64) -> Result<Vec<f64>> {
    curve.intersect_gridline(axis, c)
}
