//! Numerical verification of one-valued primitives on multiply connected plane domains.
//!
//! A holomorphic `f` on a domain with holes admits one-valued primitives of every
//! order exactly when every polynomial moment `∫ zᵏ f(z) dz` vanishes on closed
//! curves in the domain, and exactly when `f` extends holomorphically to the
//! simply connected hull (the complement of the component of infinity). This crate
//! computes all three sides of that equivalence independently so they can be
//! checked against each other:
//!
//! * [`moments`] measures moments on a homology basis and builds primitives by
//!   path integrals,
//! * [`extension`] extracts Laurent tails around each hole and evaluates the
//!   extension by Cauchy integrals,
//! * [`geom`] rasterizes the domain and fills its hull,
//! * [`boundary`] runs the same moment test for densities on a Jordan curve,
//!   together with discrete primitive towers and Cauchy transforms.
//!
//! Functions under test come from a small expression language ([`expr`]) or any
//! type implementing [`Holomorphic`].

pub mod boundary;
pub mod error;
pub mod expr;
pub mod extension;
pub mod geom;
pub mod moments;
pub mod quadrature;
pub mod tolerance;

pub use error::{Error, Result};
pub use expr::{parse, Expr, Function, Holomorphic, PoleRecord, PoleSet};
pub use geom::{DomainSpec, GridDomain, Path, PathSegment};
pub use quadrature::QuadratureResult;
pub use tolerance::Tolerances;

/// Complex scalar used throughout.
pub type ComplexValue = num_complex::Complex64;

pub(crate) const I: ComplexValue = ComplexValue::new(0.0, 1.0);
pub(crate) const TWO_PI_I: ComplexValue = ComplexValue::new(0.0, std::f64::consts::TAU);
