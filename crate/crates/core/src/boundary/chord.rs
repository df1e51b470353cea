use rayon::prelude::*;
use serde::Serialize;

use super::curve::SampledCurve;
use super::tower::cumulative_trapezoid;
use crate::{ComplexValue, Error, Result, Tolerances};

/// Fewest intervals accepted by [`chord_arc_constant`].
pub const MIN_CHORD_SAMPLES: usize = 64;

/// Cumulative polygonal arclength at each node.
fn arclengths(z: &[ComplexValue]) -> Vec<f64> {
    let mut s = Vec::with_capacity(z.len());
    let mut acc = 0.0;
    s.push(acc);
    for w in z.windows(2) {
        acc += (w[1] - w[0]).norm();
        s.push(acc);
    }
    s
}

/// Largest ratio of shorter arc to chord over all node pairs.
pub fn chord_arc_constant(curve: &SampledCurve) -> Result<f64> {
    curve.require(MIN_CHORD_SAMPLES)?;
    let m = curve.intervals();
    let z = &curve.points()[..m];
    let s = arclengths(curve.points());
    let total = s[m];
    (0..m)
        .into_par_iter()
        .map(|i| {
            let mut best = 1.0f64;
            for j in i + 1..m {
                let chord = (z[j] - z[i]).norm();
                if chord == 0.0 {
                    return Err(Error::InvalidCurve(format!("nodes {i} and {j} coincide")));
                }
                let arc = s[j] - s[i];
                best = best.max(arc.min(total - arc) / chord);
            }
            Ok(best)
        })
        .try_reduce(|| 1.0, |a, b| Ok(a.max(b)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DifferenceQuotientStep {
    pub offset: usize,
    pub chord: f64,
    pub arc: f64,
    pub residual: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DifferenceQuotientReport {
    pub index: usize,
    pub chord_arc: f64,
    /// Whether the level-1 primitive of the data closes up.
    pub one_valued: bool,
    /// Ordered by decreasing offset.
    pub steps: Vec<DifferenceQuotientStep>,
    pub bound_holds: bool,
    /// Residuals strictly decrease over the last four offsets.
    pub tail_monotone: bool,
}

/// Compares `(F(z) − F(z₀))/(z − z₀)` with `G(z₀)` for nodes at dyadic offsets from
/// `z₀`, where `F` is the discrete primitive of the data `g` (defaults to the curve
/// values). Each residual is checked against `C · max_arc |G − G(z₀)|`.
pub fn difference_quotient_check(
    curve: &SampledCurve,
    g: Option<&[ComplexValue]>,
    index: usize,
    chord_arc: f64,
    tol: &Tolerances,
) -> Result<DifferenceQuotientReport> {
    let m = curve.intervals();
    let g = g.unwrap_or(curve.values());
    if g.len() != m + 1 {
        return Err(Error::InvalidArgument(
            "data length differs from node count".into(),
        ));
    }
    if index >= m {
        return Err(Error::InvalidArgument(format!(
            "node index {index} out of range"
        )));
    }
    // Rotate so that z₀ is node 0 and integrate around the whole curve once.
    let z: Vec<ComplexValue> = (0..=m).map(|k| curve.points()[(index + k) % m]).collect();
    let gv: Vec<ComplexValue> = (0..=m).map(|k| g[(index + k) % m]).collect();
    let f = cumulative_trapezoid(&z, &gv);
    let s = arclengths(&z);
    let defect = f[m];
    let scale: f64 = (0..m)
        .map(|k| gv[k].norm() * (z[k + 1] - z[k]).norm())
        .sum();
    let g0 = gv[0];

    let mut steps = Vec::new();
    let mut offset = 1usize << (usize::BITS - 1 - (m / 4).max(1).leading_zeros());
    while offset >= 1 {
        let dz = z[offset] - z[0];
        let residual = ((f[offset] - f[0]) / dz - g0).norm();
        let sup = gv[..=offset]
            .iter()
            .map(|v| (v - g0).norm())
            .fold(0.0, f64::max);
        steps.push(DifferenceQuotientStep {
            offset,
            chord: dz.norm(),
            arc: s[offset],
            residual,
            bound: chord_arc * sup,
        });
        offset /= 2;
    }
    let slack = 1e-12;
    let bound_holds = steps
        .iter()
        .all(|st| st.residual <= st.bound * (1.0 + slack) + slack);
    let tail = &steps[steps.len().saturating_sub(4)..];
    let tail_monotone = tail.windows(2).all(|w| w[1].residual < w[0].residual);
    Ok(DifferenceQuotientReport {
        index,
        chord_arc,
        one_valued: tol.is_zero(defect, scale),
        steps,
        bound_holds,
        tail_monotone,
    })
}
