use serde::Serialize;

use super::domain::DomainSpec;
use super::path::Path;
use crate::{ComplexValue, Error, Result};

const DILATION_SAMPLES: usize = 256;

/// How a basis curve was built; carries enough to build homologous variants.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BasisKind {
    /// Circle about the witness; any radius in `(r_in, r_out)` is admissible.
    Circle { radius: f64, r_in: f64, r_out: f64 },
    /// Hole boundary pushed outward; any offset in `(0, gap)` is admissible.
    Dilation { offset: f64, gap: f64 },
}

/// A closed curve in the domain winding once around one hole and zero times
/// around all the others.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisCurve {
    pub hole: usize,
    pub witness: ComplexValue,
    pub path: Path,
    pub kind: BasisKind,
}

impl BasisCurve {
    /// A homologous curve at fraction `frac ∈ (0, 1)` of the admissible band.
    pub fn variant(&self, domain: &DomainSpec, frac: f64) -> Result<BasisCurve> {
        let frac = frac.clamp(0.05, 0.95);
        let hole = &domain.holes()[self.hole];
        let (path, kind) = match self.kind {
            BasisKind::Circle { r_in, r_out, .. } => {
                let radius = r_in + frac * (r_out - r_in);
                (
                    Path::circle(self.witness, radius)?,
                    BasisKind::Circle {
                        radius,
                        r_in,
                        r_out,
                    },
                )
            }
            BasisKind::Dilation { gap, .. } => {
                let offset = frac * gap;
                (dilate(hole, offset)?, BasisKind::Dilation { offset, gap })
            }
        };
        let curve = BasisCurve {
            hole: self.hole,
            witness: self.witness,
            path,
            kind,
        };
        check_curve(domain, &curve)?;
        Ok(curve)
    }
}

fn dilate(hole: &Path, offset: f64) -> Result<Path> {
    let pts: Vec<ComplexValue> = (0..DILATION_SAMPLES)
        .map(|i| {
            let t = i as f64 / DILATION_SAMPLES as f64;
            let d = hole.derivative_at_fraction(t);
            let outward = ComplexValue::new(d.im, -d.re) / d.norm();
            hole.point_at_fraction(t) + offset * outward
        })
        .collect();
    Path::polygon(&pts)
}

fn check_curve(domain: &DomainSpec, curve: &BasisCurve) -> Result<()> {
    let fail = |msg: String| Error::BasisConstruction {
        hole: curve.hole,
        msg,
    };
    for (i, &w) in domain.witnesses().iter().enumerate() {
        let expect = i32::from(i == curve.hole);
        let got = curve
            .path
            .winding_number(w)
            .map_err(|e| fail(e.to_string()))?;
        if got != expect {
            return Err(fail(format!(
                "winding number {got} around witness of hole {i}, expected {expect}"
            )));
        }
    }
    for z in curve.path.sample(DILATION_SAMPLES) {
        if !domain.contains(z) {
            return Err(fail(format!("curve leaves the domain near {z}")));
        }
    }
    Ok(())
}

fn min_distance(path: &Path, others: &[&Path]) -> f64 {
    let pts = path.sample(DILATION_SAMPLES);
    others
        .iter()
        .flat_map(|o| pts.iter().map(move |&z| o.distance_to(z)))
        .fold(f64::INFINITY, f64::min)
}

/// One basis curve per hole, in hole order.
///
/// A circle about the hole's witness is used whenever the hole fits in a disc that
/// meets no other boundary; its radius sits midway between the farthest point of the
/// hole and the nearest point of any other boundary. Otherwise the hole boundary is
/// pushed outward by half the gap to its neighbours.
pub fn homology_basis(domain: &DomainSpec) -> Result<Vec<BasisCurve>> {
    let holes = domain.holes();
    (0..holes.len())
        .map(|j| {
            let witness = domain.witnesses()[j];
            let hole = &holes[j];
            let others: Vec<&Path> = domain
                .boundaries()
                .filter(|p| !std::ptr::eq(*p, hole))
                .collect();
            let r_in = hole.max_distance_from(witness);
            let r_out = others
                .iter()
                .map(|p| p.distance_to(witness))
                .fold(f64::INFINITY, f64::min);
            let r_out = if r_out.is_finite() { r_out } else { 3.0 * r_in };
            if r_out > r_in * (1.0 + 1e-6) {
                let radius = 0.5 * (r_in + r_out);
                let curve = BasisCurve {
                    hole: j,
                    witness,
                    path: Path::circle(witness, radius)?,
                    kind: BasisKind::Circle {
                        radius,
                        r_in,
                        r_out,
                    },
                };
                if check_curve(domain, &curve).is_ok() {
                    return Ok(curve);
                }
            }
            let gap = min_distance(hole, &others);
            let gap = if gap.is_finite() { gap } else { r_in };
            let offset = 0.5 * gap;
            let curve = BasisCurve {
                hole: j,
                witness,
                path: dilate(hole, offset)?,
                kind: BasisKind::Dilation { offset, gap },
            };
            check_curve(domain, &curve)?;
            Ok(curve)
        })
        .collect()
}
