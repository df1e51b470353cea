//! Contours, multiply connected domains and their rasterized hulls.

mod basis;
mod domain;
mod grid;
mod path;
mod segment;

pub use basis::{homology_basis, BasisCurve, BasisKind};
pub use domain::{DomainSpec, Region};
pub use grid::{rasterize, simply_connected_hull, GridDomain};
pub use path::Path;
pub use segment::PathSegment;
