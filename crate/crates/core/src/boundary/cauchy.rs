use rayon::prelude::*;
use serde::Serialize;

use super::curve::SampledCurve;
use super::tower::{analytic_parts, boundary_moments, trapezoid, Method};
use crate::expr::DEFAULT_EXCLUSION_RADIUS;
use crate::quadrature::integrate;
use crate::{ComplexValue, Error, Result, Tolerances, I, TWO_PI_I};

/// Discrete evaluations must stay this many local sample spacings from the curve.
pub const SPACING_FACTOR: f64 = 5.0;
/// Turning angle above which a node is treated as a corner.
pub const CORNER_ANGLE: f64 = 0.25;

/// `φ(w) = (1/2πi) ∫ f(z)/(z − w) dz` for `w` inside the curve.
///
/// The discrete route refuses points closer than five local sample spacings to the
/// curve; the analytic route only needs `w` off the curve.
pub fn cauchy_transform(
    curve: &SampledCurve,
    w: ComplexValue,
    method: Method,
    tol: &Tolerances,
) -> Result<ComplexValue> {
    let distance = curve.distance_to(w)?;
    if distance <= DEFAULT_EXCLUSION_RADIUS {
        return Err(Error::TooCloseToCurve {
            point: w,
            distance,
            required: DEFAULT_EXCLUSION_RADIUS,
        });
    }
    let index = curve.winding_number(w)?;
    if index != 1 {
        return Err(Error::WindingPrecondition(format!(
            "point {w} has index {index} with respect to the curve, expected 1"
        )));
    }
    match method {
        Method::Analytic => {
            // Subtracting the value at the nearest curve point keeps the integrand
            // bounded as w approaches the curve; the constant contributes exactly f(ζ*).
            let (path, density) = analytic_parts(curve)?;
            let anchor = density(path.nearest_point(w));
            let q = integrate(&|z| Ok((density(z) - anchor) / (z - w)), path, tol.quad)?;
            Ok(q.value / TWO_PI_I + anchor)
        }
        Method::Discrete => {
            let required = SPACING_FACTOR * curve.local_spacing(w);
            if distance < required {
                return Err(Error::TooCloseToCurve {
                    point: w,
                    distance,
                    required,
                });
            }
            let g: Vec<ComplexValue> = curve
                .points()
                .iter()
                .zip(curve.values())
                .map(|(&z, &f)| f / (z - w))
                .collect();
            Ok(trapezoid(curve.points(), &g).0 / TWO_PI_I)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NontangentialReport {
    pub index: usize,
    pub zeta: ComplexValue,
    pub normal: ComplexValue,
    pub radii: Vec<f64>,
    pub values: Vec<ComplexValue>,
    pub boundary_value: ComplexValue,
    pub residuals: Vec<f64>,
    pub decreasing: bool,
    /// Set when the leading boundary moments do not vanish, so no analytic
    /// extension with these boundary values should exist.
    pub expected_fail: bool,
}

/// Unit inward normal at node `index`, or a corner error.
fn inward_normal(curve: &SampledCurve, index: usize) -> Result<ComplexValue> {
    let m = curve.intervals();
    let z = curve.points();
    let i = index % m;
    let back = z[i] - z[(i + m - 1) % m];
    let fwd = z[i + 1] - z[i];
    if (fwd / back).arg().abs() > CORNER_ANGLE {
        return Err(Error::CornerPoint { index });
    }
    let tangent = z[i + 1] - z[(i + m - 1) % m];
    Ok(I * tangent / tangent.norm())
}

/// Approaches node `index` along the inward normal at each radius and compares the
/// Cauchy transform with the boundary value there.
pub fn nontangential_check(
    curve: &SampledCurve,
    index: usize,
    radii: &[f64],
    method: Method,
    k_max: usize,
    tol: &Tolerances,
) -> Result<NontangentialReport> {
    if index >= curve.intervals() {
        return Err(Error::InvalidArgument(format!(
            "node index {index} out of range 0..{}",
            curve.intervals()
        )));
    }
    let normal = inward_normal(curve, index)?;
    let zeta = curve.points()[index];
    let boundary_value = curve.values()[index];
    let values = radii
        .par_iter()
        .map(|&r| cauchy_transform(curve, zeta + r * normal, method, tol))
        .collect::<Result<Vec<_>>>()?;
    let residuals: Vec<f64> = values.iter().map(|v| (v - boundary_value).norm()).collect();
    let floor = tol.threshold(boundary_value.norm());
    let decreasing = residuals.windows(2).all(|w| w[1] < w[0] || w[1] <= floor);
    let moments = boundary_moments(curve, k_max, Method::best_for(curve), tol)?;
    Ok(NontangentialReport {
        index,
        zeta,
        normal,
        radii: radii.to_vec(),
        values,
        boundary_value,
        residuals,
        decreasing,
        expected_fail: moments.zero.iter().any(|&z| !z),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::ipow;
    use crate::geom::Path;

    fn c(re: f64, im: f64) -> ComplexValue {
        ComplexValue::new(re, im)
    }

    fn unit() -> Path {
        Path::circle(c(0.0, 0.0), 1.0).unwrap()
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn transform_examples() {
        let w = c(0.3, -0.4);
        for n in 0..5 {
            let curve = SampledCurve::from_path(&unit(), 128, move |z| ipow(z, n)).unwrap();
            let v = cauchy_transform(&curve, w, Method::Analytic, &tol()).unwrap();
            assert!((v - ipow(w, n)).norm() < 1e-12);
        }
        let conj = SampledCurve::from_path(&unit(), 128, |z| z.conj()).unwrap();
        assert!(
            cauchy_transform(&conj, c(0.3, 0.0), Method::Analytic, &tol())
                .unwrap()
                .norm()
                < 1e-12
        );
        let pole = SampledCurve::from_path(&unit(), 128, |z| 1.0 / (z - 5.0)).unwrap();
        let v = cauchy_transform(&pole, c(0.0, 0.0), Method::Analytic, &tol()).unwrap();
        assert!((v + 0.2).norm() < 1e-12);
        let v = cauchy_transform(&pole, c(0.0, 0.0), Method::Discrete, &tol()).unwrap();
        assert!((v + 0.2).norm() < 1e-3);
    }

    #[test]
    fn transform_preconditions() {
        let curve = SampledCurve::from_path(&unit(), 64, |z| z).unwrap();
        assert!(matches!(
            cauchy_transform(&curve, c(2.0, 0.0), Method::Analytic, &tol()),
            Err(Error::WindingPrecondition(_))
        ));
        assert!(matches!(
            cauchy_transform(&curve, c(0.95, 0.0), Method::Discrete, &tol()),
            Err(Error::TooCloseToCurve { .. })
        ));
        assert!(cauchy_transform(&curve, c(0.95, 0.0), Method::Analytic, &tol()).is_ok());
    }

    #[test]
    fn nontangential_examples() {
        let sq = SampledCurve::from_path(&unit(), 256, |z| z * z).unwrap();
        let radii = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];
        let r = nontangential_check(&sq, 0, &radii, Method::Analytic, 4, &tol()).unwrap();
        assert!(r.decreasing && !r.expected_fail);
        assert!(*r.residuals.last().unwrap() <= 1e-4);
        assert!((r.normal + 1.0).norm() < 1e-12);

        let conj = SampledCurve::from_path(&unit(), 256, |z| z.conj()).unwrap();
        let r = nontangential_check(&conj, 0, &radii, Method::Analytic, 4, &tol()).unwrap();
        assert!(r.expected_fail);
        assert!((r.residuals.last().unwrap() - 1.0).abs() < 1e-9);

        let k = c(2.0, -1.0);
        let flat = SampledCurve::from_path(&unit(), 256, move |_| k).unwrap();
        let r = nontangential_check(&flat, 17, &radii, Method::Analytic, 4, &tol()).unwrap();
        assert!(r.residuals.iter().all(|&x| x < 1e-12));
    }

    #[test]
    fn corners_are_reported() {
        let square =
            Path::polygon(&[c(-1.0, -1.0), c(1.0, -1.0), c(1.0, 1.0), c(-1.0, 1.0)]).unwrap();
        let curve = SampledCurve::from_path(&square, 64, |z| z).unwrap();
        assert!(matches!(
            nontangential_check(&curve, 0, &[0.1], Method::Analytic, 2, &tol()),
            Err(Error::CornerPoint { index: 0 })
        ));
        assert!(nontangential_check(&curve, 8, &[0.1], Method::Analytic, 2, &tol()).is_ok());
    }
}
