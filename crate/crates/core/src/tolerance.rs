use serde::{Deserialize, Serialize};

use crate::ComplexValue;

/// Zero test and quadrature targets shared by the moment, extension and boundary checks.
///
/// A computed value `m` counts as zero iff `|m| <= abs + rel * scale`, where the scale
/// is the length of the curve times the largest sampled integrand modulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    #[serde(default = "default_abs")]
    pub abs: f64,
    #[serde(default = "default_rel")]
    pub rel: f64,
    /// Absolute target handed to the adaptive quadrature.
    #[serde(default = "default_quad")]
    pub quad: f64,
}

fn default_abs() -> f64 {
    1e-9
}
fn default_rel() -> f64 {
    1e-10
}
fn default_quad() -> f64 {
    1e-12
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            abs: default_abs(),
            rel: default_rel(),
            quad: default_quad(),
        }
    }
}

impl Tolerances {
    pub fn threshold(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale
    }

    pub fn is_zero(&self, value: ComplexValue, scale: f64) -> bool {
        value.norm() <= self.threshold(scale)
    }
}
