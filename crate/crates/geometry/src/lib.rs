//! Mid-surface differential geometry.

pub mod boundary;
pub mod surface;

pub use boundary::{boundary_trace, trace_from_frame, BoundaryTrace, Edge};
pub use surface::{CurvilinearTransform, SurfaceFrame, SurfaceMap};

use isoshell_core::math::Vec3;
use isoshell_spline::{KnotVector, SplineSpace};

/// Bilinear flat map of the unit square onto the rectangle `[x0,x1] x [y0,y1]` in z = 0.
pub fn flat_rectangle(x0: f64, x1: f64, y0: f64, y1: f64) -> SurfaceMap {
    let space = SplineSpace::surface(KnotVector::uniform(1, 1), KnotVector::uniform(1, 1));
    let pts: Vec<Vec3> = vec![[x0, y0, 0.0], [x0, y1, 0.0], [x1, y0, 0.0], [x1, y1, 0.0]];
    SurfaceMap::new(space, pts).expect("bilinear map")
}

/// Bilinear map with the given corners `c[i][j]` at parameter `(i, j)`.
pub fn bilinear(c: [[Vec3; 2]; 2]) -> SurfaceMap {
    let space = SplineSpace::surface(KnotVector::uniform(1, 1), KnotVector::uniform(1, 1));
    SurfaceMap::new(space, vec![c[0][0], c[0][1], c[1][0], c[1][1]]).expect("bilinear map")
}
