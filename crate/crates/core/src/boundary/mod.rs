//! Moment tests, primitive towers and Cauchy transforms for data on a Jordan curve.
//!
//! A density `f` on a closed curve `δ` defines the measure `f(z) dz`. The moments
//! `∫ zᵏ f dz` vanish for all `k` exactly when the discrete primitive tower stays
//! closed at every level, and then the Cauchy transform of `f` is a holomorphic
//! function inside `δ` whose boundary values recover `f`.
//!
//! Only densities against `dz` are modelled; singular parts of a general measure are
//! not represented. Convergence of the transform to the boundary data is tested
//! along inward normals at sample nodes, not uniformly.

mod cauchy;
mod chord;
mod curve;
mod tower;

pub use cauchy::{
    cauchy_transform, nontangential_check, NontangentialReport, CORNER_ANGLE, SPACING_FACTOR,
};
pub use chord::{
    chord_arc_constant, difference_quotient_check, DifferenceQuotientReport,
    DifferenceQuotientStep, MIN_CHORD_SAMPLES,
};
pub use curve::{Density, SampledCurve};
pub use tower::{
    boundary_equivalence, boundary_moment, boundary_moment_scaled, boundary_moments,
    primitive_tower, BoundaryMomentReport, EquivalenceReport, IbpLevel, Method,
    PrimitiveTowerResult, TowerLevel, MIN_SAMPLES,
};
