//! Laurent tails around holes and the holomorphic extension to the hull.
//!
//! On a domain with holes `V₁…V_k`, `f = f₀ + Σ f_j` where `f_j` is holomorphic off
//! `V_j` and vanishes at infinity, and `f₀` is holomorphic inside the outer boundary.
//! The coefficients of `f_j` about a centre `c_j ∈ V_j` are contour integrals over the
//! hole's basis curve, and `f` extends to the hull exactly when every `f_j` vanishes.

use rayon::prelude::*;
use serde::Serialize;

use crate::expr::ipow;
use crate::geom::{homology_basis, BasisCurve, DomainSpec, Path, Region};
use crate::moments::{max_primitive_order, PrimitiveOrderVerdict};
use crate::quadrature::integrate;
use crate::{ComplexValue, Error, Holomorphic, Result, Tolerances, TWO_PI_I};

const PROBES: usize = 100;
const PROBE_MARGIN: f64 = 1e-3;

/// A contour-integral value together with the magnitude it was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coefficient {
    pub value: ComplexValue,
    /// `length × max |integrand| / 2π`.
    pub scale: f64,
}

/// `a₋ₙ = (1/2πi) ∫ (z−c)^{n−1} f(z) dz`, the coefficient of `(z−c)^{−n}`.
///
/// `path` must wind exactly once around `c`.
pub fn laurent_coefficient<F: Holomorphic + ?Sized>(
    f: &F,
    path: &Path,
    c: ComplexValue,
    n: usize,
    tol: &Tolerances,
) -> Result<Coefficient> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "coefficient index must be at least 1".into(),
        ));
    }
    let w = path.winding_number(c)?;
    if w != 1 {
        return Err(Error::WindingPrecondition(format!(
            "curve winds {w} times around the centre {c}, expected 1"
        )));
    }
    let q = integrate(
        &|z| Ok(ipow(z - c, (n - 1) as i32) * f.eval(z)?),
        path,
        tol.quad,
    )?;
    Ok(Coefficient {
        value: q.value / TWO_PI_I,
        scale: path.length() * q.max_abs_integrand / std::f64::consts::TAU,
    })
}

/// The truncated principal part `f_j(z) ≈ Σ_{n=1}^{N} a₋ₙ (z−c)^{−n}` of one hole.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaurentComponent {
    pub hole: usize,
    pub center: ComplexValue,
    /// `coefficients[n-1] = a₋ₙ`.
    pub coefficients: Vec<Coefficient>,
    /// Largest distance from the centre to the hole boundary.
    pub hole_radius: f64,
}

impl LaurentComponent {
    pub fn truncation(&self) -> usize {
        self.coefficients.len()
    }

    pub fn eval(&self, z: ComplexValue) -> ComplexValue {
        let w = (z - self.center).inv();
        self.coefficients
            .iter()
            .rev()
            .fold(ComplexValue::new(0.0, 0.0), |acc, a| (acc + a.value) * w)
    }

    /// Index `n` of the first coefficient `a₋ₙ` that is not negligible.
    pub fn first_nonzero(&self, tol: &Tolerances) -> Option<usize> {
        self.coefficients
            .iter()
            .position(|a| !tol.is_zero(a.value, a.scale))
            .map(|i| i + 1)
    }

    pub fn vanishes(&self, tol: &Tolerances) -> bool {
        self.first_nonzero(tol).is_none()
    }
}

/// Laurent components for every hole plus the reconstruction diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub components: Vec<LaurentComponent>,
    #[serde(skip)]
    pub basis: Vec<BasisCurve>,
    pub probes: Vec<ComplexValue>,
    /// Largest `|series − Cauchy integral| / (1 + |f|)` over probe/component pairs.
    pub reconstruction_residual: f64,
}

impl Decomposition {
    /// `f₀(z) = f(z) − Σ f_j(z)` using the truncated tails.
    pub fn f0<F: Holomorphic + ?Sized>(&self, f: &F, z: ComplexValue) -> Result<ComplexValue> {
        Ok(f.eval(z)?
            - self
                .components
                .iter()
                .map(|c| c.eval(z))
                .sum::<ComplexValue>())
    }

    pub fn all_vanish(&self, tol: &Tolerances) -> bool {
        self.components.iter().all(|c| c.vanishes(tol))
    }
}

fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let (mut x, mut f) = (0.0, 1.0 / base as f64);
    while i > 0 {
        x += f * (i % base) as f64;
        i /= base;
        f /= base as f64;
    }
    x
}

/// Deterministic quasi-random points in `domain` at least `1e-3` from its boundary.
pub fn probe_points(domain: &DomainSpec, count: usize) -> Vec<ComplexValue> {
    let Some([x0, x1, y0, y1]) = domain.bbox() else {
        return Vec::new();
    };
    (1..count * 200)
        .map(|i| {
            ComplexValue::new(
                x0 + (x1 - x0) * radical_inverse(i, 2),
                y0 + (y1 - y0) * radical_inverse(i, 3),
            )
        })
        .filter(|&z| domain.contains(z) && domain.distance_to_boundary(z) > PROBE_MARGIN)
        .take(count)
        .collect()
}

/// `f_j(z) = −(1/2πi) ∫_{γ_j} f(ζ)/(ζ−z) dζ` for `z` outside `γ_j`.
fn tail_by_cauchy<F: Holomorphic + ?Sized>(
    f: &F,
    curve: &Path,
    z: ComplexValue,
    tol: &Tolerances,
) -> Result<ComplexValue> {
    let q = integrate(&|zeta| Ok(f.eval(zeta)? / (zeta - z)), curve, tol.quad)?;
    Ok(-q.value / TWO_PI_I)
}

/// Laurent components through `a₋N` for every hole of `domain`.
pub fn decompose<F: Holomorphic + ?Sized>(
    f: &F,
    domain: &DomainSpec,
    n_terms: usize,
    tol: &Tolerances,
) -> Result<Decomposition> {
    let basis = homology_basis(domain)?;
    decompose_on(f, domain, basis, n_terms, tol)
}

fn decompose_on<F: Holomorphic + ?Sized>(
    f: &F,
    domain: &DomainSpec,
    basis: Vec<BasisCurve>,
    n_terms: usize,
    tol: &Tolerances,
) -> Result<Decomposition> {
    let components = basis
        .iter()
        .map(|b| {
            let coefficients = (1..=n_terms)
                .into_par_iter()
                .map(|n| laurent_coefficient(f, &b.path, b.witness, n, tol))
                .collect::<Result<Vec<_>>>()?;
            Ok(LaurentComponent {
                hole: b.hole,
                center: b.witness,
                coefficients,
                hole_radius: domain.holes()[b.hole].max_distance_from(b.witness),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let probes = probe_points(domain, PROBES);
    let mut residual = 0.0f64;
    for &z in &probes {
        let fz = f.eval(z)?;
        for (comp, b) in components.iter().zip(&basis) {
            let reach = b.path.max_distance_from(b.witness);
            if (z - comp.center).norm() <= reach || b.path.winding_number(z)? != 0 {
                continue;
            }
            let direct = tail_by_cauchy(f, &b.path, z, tol)?;
            residual = residual.max((comp.eval(z) - direct).norm() / (1.0 + fz.norm()));
        }
    }
    Ok(Decomposition {
        components,
        basis,
        probes,
        reconstruction_residual: residual,
    })
}

/// Which admissible contour a Cauchy integral uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Contour {
    Primary,
    Alternate,
}

/// Cauchy-integral evaluator for the extension of `f` to the hull.
pub struct Extension<'a, F: Holomorphic + ?Sized> {
    f: &'a F,
    domain: &'a DomainSpec,
    basis: Vec<BasisCurve>,
    alternates: Vec<BasisCurve>,
    tol: Tolerances,
}

impl<'a, F: Holomorphic + ?Sized> Extension<'a, F> {
    /// Refuses unless every moment through degree `k_max` vanishes on every basis curve.
    pub fn new(f: &'a F, domain: &'a DomainSpec, k_max: usize, tol: &Tolerances) -> Result<Self> {
        let verdict = max_primitive_order(f, domain, k_max, tol)?;
        Self::from_verdict(f, domain, &verdict, tol)
    }

    pub fn from_verdict(
        f: &'a F,
        domain: &'a DomainSpec,
        verdict: &PrimitiveOrderVerdict,
        tol: &Tolerances,
    ) -> Result<Self> {
        if let Some((hole, degree)) = verdict
            .first_nonzero
            .iter()
            .enumerate()
            .find_map(|(j, k)| k.map(|k| (j, k)))
        {
            return Err(Error::ExtensionRefused { hole, degree });
        }
        Self::unchecked(f, domain, verdict.basis.clone(), tol)
    }

    /// An evaluator that skips the moment precondition; values inside a hole then
    /// omit that hole's tail.
    pub fn unchecked(
        f: &'a F,
        domain: &'a DomainSpec,
        basis: Vec<BasisCurve>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let alternates = basis
            .iter()
            .map(|b| b.variant(domain, 0.8))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            f,
            domain,
            basis,
            alternates,
            tol: *tol,
        })
    }

    fn cauchy(&self, path: &Path, w: ComplexValue) -> Result<ComplexValue> {
        let q = integrate(&|z| Ok(self.f.eval(z)? / (z - w)), path, self.tol.quad)?;
        Ok(q.value / TWO_PI_I)
    }

    fn hole_of(&self, w: ComplexValue) -> Result<Option<usize>> {
        match self.domain.classify(w) {
            Region::Hole(j) => Ok(Some(j)),
            Region::Domain => Ok(None),
            Region::Outside => Err(Error::OutsideDomain { point: w }),
            Region::Boundary => {
                let outer = self
                    .domain
                    .outer()
                    .map_or(f64::INFINITY, |o| o.distance_to(w));
                let (j, d) = self
                    .domain
                    .holes()
                    .iter()
                    .map(|h| h.distance_to(w))
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .ok_or(Error::OutsideDomain { point: w })?;
                if d < outer {
                    Ok(Some(j))
                } else {
                    Err(Error::OutsideDomain { point: w })
                }
            }
        }
    }

    /// Value of the extension at `w` in the hull.
    pub fn evaluate(&self, w: ComplexValue) -> Result<ComplexValue> {
        self.evaluate_with(w, Contour::Primary)
    }

    /// Inside hole `j` the contour is hole `j`'s basis curve (or a homologous variant).
    /// In the domain it is a small circle about `w`, or for the alternate route the
    /// basis curve of a hole whose curve encloses `w`.
    pub fn evaluate_with(&self, w: ComplexValue, contour: Contour) -> Result<ComplexValue> {
        if let Some(j) = self.hole_of(w)? {
            let curve = match contour {
                Contour::Primary => &self.basis[j],
                Contour::Alternate => &self.alternates[j],
            };
            return self.cauchy(&curve.path, w);
        }
        if contour == Contour::Alternate {
            for b in self.basis.iter().chain(&self.alternates) {
                if b.path.distance_to(w) > PROBE_MARGIN && b.path.winding_number(w)? == 1 {
                    return self.cauchy(&b.path, w);
                }
            }
        }
        let r = match contour {
            Contour::Primary => 0.5,
            Contour::Alternate => 0.25,
        } * self.domain.distance_to_boundary(w);
        self.cauchy(&Path::circle(w, r)?, w)
    }

    /// `|primary − alternate|` at `w`.
    pub fn contour_discrepancy(&self, w: ComplexValue) -> Result<f64> {
        Ok((self.evaluate_with(w, Contour::Primary)?
            - self.evaluate_with(w, Contour::Alternate)?)
        .norm())
    }

    /// Points of the hull that exercise both contour families: every hole witness,
    /// points between each hole and its basis curve, and domain points.
    pub fn hull_probes(&self, per_hole: usize) -> Result<Vec<ComplexValue>> {
        let mut pts = Vec::new();
        for b in &self.basis {
            pts.push(b.witness);
            let hole = &self.domain.holes()[b.hole];
            for i in 0..per_hole {
                let t = (i as f64 + 0.5) / per_hole as f64;
                let edge = hole.point_at_fraction(t);
                pts.push(b.witness + 0.5 * (edge - b.witness));
            }
            let inner = b.variant(self.domain, 0.2)?;
            pts.extend(inner.path.sample(per_hole));
        }
        Ok(pts)
    }
}

/// Outcome of one extension probe.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtensionSample {
    pub point: ComplexValue,
    pub value: ComplexValue,
    pub discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtensionReport {
    pub samples: Vec<ExtensionSample>,
    pub max_discrepancy: f64,
    /// Whether the moment precondition held.
    pub permitted: bool,
}

/// Per-hole agreement between the moment and Laurent sides.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HoleFinding {
    pub hole: usize,
    pub first_nonzero_moment: Option<usize>,
    pub first_nonzero_coefficient: Option<usize>,
    /// `a₋₍ₖ₊₁₎` at the first nonzero moment degree `k`.
    pub coefficient: Option<ComplexValue>,
    /// `|a₋₍ₖ₊₁₎ − m_k / 2πi|`.
    pub duality_residual: f64,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossVerification {
    pub moments_vanish: bool,
    pub components_vanish: bool,
    pub extension_smooth: bool,
    pub consistent: bool,
    pub holes: Vec<HoleFinding>,
    pub verdict: PrimitiveOrderVerdict,
    pub decomposition: Decomposition,
    pub extension: ExtensionReport,
}

/// Runs the moment test, the Laurent decomposition and the extension probes and
/// reports whether they agree.
///
/// The extension side is judged without the moment precondition: probes near each
/// hole are evaluated through a small local circle and through the hole's basis
/// curve, which differ by that hole's tail.
pub fn cross_verify<F: Holomorphic + ?Sized>(
    f: &F,
    domain: &DomainSpec,
    k_max: usize,
    n_terms: usize,
    tol: &Tolerances,
) -> Result<CrossVerification> {
    let verdict = max_primitive_order(f, domain, k_max, tol)?;
    let decomposition = decompose_on(f, domain, verdict.basis.clone(), n_terms, tol)?;

    let ext = Extension::unchecked(f, domain, verdict.basis.clone(), tol)?;
    let samples = ext
        .hull_probes(4)?
        .into_iter()
        .map(|w| {
            let value = ext.evaluate(w)?;
            let discrepancy = ext.contour_discrepancy(w)?;
            Ok(ExtensionSample {
                point: w,
                value,
                discrepancy,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let extension_smooth = samples
        .iter()
        .all(|s| s.discrepancy <= tol.threshold(1.0 + s.value.norm()));
    let max_discrepancy = samples.iter().map(|s| s.discrepancy).fold(0.0, f64::max);

    let holes: Vec<HoleFinding> = decomposition
        .components
        .iter()
        .zip(&verdict.moments)
        .map(|(comp, m)| {
            let k = verdict.first_nonzero[comp.hole];
            let n = comp.first_nonzero(tol);
            let (coefficient, duality) = match k {
                Some(k) if k < comp.truncation() => {
                    let a = comp.coefficients[k].value;
                    (Some(a), (a - m.values[k] / TWO_PI_I).norm())
                }
                _ => (None, 0.0),
            };
            let scale = k.map_or(0.0, |k| m.scales[k]) / std::f64::consts::TAU;
            let matched = match (k, n) {
                (Some(k), Some(n)) => n == k + 1,
                (None, None) => true,
                (None, Some(n)) => n > k_max + 1,
                (Some(k), None) => k >= comp.truncation(),
            };
            HoleFinding {
                hole: comp.hole,
                first_nonzero_moment: k,
                first_nonzero_coefficient: n,
                coefficient,
                duality_residual: duality,
                consistent: matched && duality <= tol.threshold(scale),
            }
        })
        .collect();

    let moments_vanish = verdict.all_vanish();
    let components_vanish = decomposition.all_vanish(tol);
    let consistent = moments_vanish == components_vanish
        && components_vanish == extension_smooth
        && holes.iter().all(|h| h.consistent);
    Ok(CrossVerification {
        moments_vanish,
        components_vanish,
        extension_smooth,
        consistent,
        holes,
        extension: ExtensionReport {
            samples,
            max_discrepancy,
            permitted: moments_vanish,
        },
        verdict,
        decomposition,
    })
}
