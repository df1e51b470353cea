//! Polynomial moments, primitive-order verdicts and path-integral primitives.

use rayon::prelude::*;
use serde::Serialize;

use crate::expr::ipow;
use crate::geom::{homology_basis, BasisCurve, DomainSpec, Path, PathSegment, Region};
use crate::quadrature::{integrate, QuadratureResult};
use crate::{ComplexValue, Error, Holomorphic, Result, Tolerances};

/// Highest supported moment degree.
pub const MAX_DEGREE: usize = 64;
/// Degree cutoff used when nothing better is known.
pub const DEFAULT_K: usize = 32;

const DOMAIN_SAMPLES: usize = 512;

/// `∫ zᵏ f dz` for `k = 0..=K` over one closed curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentVector {
    pub curve: usize,
    pub values: Vec<ComplexValue>,
    /// `length × max |zᵏ f|` over quadrature nodes, per degree.
    pub scales: Vec<f64>,
}

impl MomentVector {
    pub fn degree(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_zero(&self, k: usize, tol: &Tolerances) -> bool {
        tol.is_zero(self.values[k], self.scales[k])
    }

    pub fn first_nonzero(&self, tol: &Tolerances) -> Option<usize> {
        (0..self.values.len()).find(|&k| !self.is_zero(k, tol))
    }
}

fn check_degree(k: usize) -> Result<()> {
    if k > MAX_DEGREE {
        return Err(Error::InvalidArgument(format!(
            "moment degree {k} exceeds the supported maximum {MAX_DEGREE}"
        )));
    }
    Ok(())
}

/// The single moment `∫_path zᵏ f(z) dz`.
pub fn moment<F: Holomorphic + ?Sized>(
    f: &F,
    path: &Path,
    k: usize,
    tol: &Tolerances,
) -> Result<QuadratureResult> {
    check_degree(k)?;
    integrate(&|z| Ok(ipow(z, k as i32) * f.eval(z)?), path, tol.quad)
}

/// All moments of degree `0..=k_max`; degrees are integrated in parallel.
pub fn moment_vector<F: Holomorphic + ?Sized>(
    f: &F,
    path: &Path,
    curve: usize,
    k_max: usize,
    tol: &Tolerances,
) -> Result<MomentVector> {
    check_degree(k_max)?;
    let results = (0..=k_max)
        .into_par_iter()
        .map(|k| moment(f, path, k, tol))
        .collect::<Result<Vec<_>>>()?;
    let length = path.length();
    Ok(MomentVector {
        curve,
        values: results.iter().map(|r| r.value).collect(),
        scales: results
            .iter()
            .map(|r| length * r.max_abs_integrand)
            .collect(),
    })
}

/// Maximal order of one-valued primitives supported by the moment data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MaxOrder {
    /// `φₙ` exists exactly for `n ≤ order`.
    Finite { order: usize },
    /// Every moment through degree `K` vanished, so `φₙ` exists for `n ≤ K + 1`.
    /// `definitive` is set when the pole structure shows higher moments vanish too.
    AllTested { up_to: usize, definitive: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimitiveOrderVerdict {
    pub max_order: MaxOrder,
    /// First degree with a nonzero moment on each basis curve.
    pub first_nonzero: Vec<Option<usize>>,
    pub tolerance: Tolerances,
    pub moments: Vec<MomentVector>,
    #[serde(skip)]
    pub basis: Vec<BasisCurve>,
}

impl PrimitiveOrderVerdict {
    /// Whether `φₙ` is one-valued according to this verdict.
    pub fn admits(&self, n: usize) -> bool {
        match self.max_order {
            MaxOrder::Finite { order } => n <= order,
            MaxOrder::AllTested { up_to, .. } => n <= up_to,
        }
    }

    pub fn all_vanish(&self) -> bool {
        matches!(self.max_order, MaxOrder::AllTested { .. })
    }
}

/// Largest pole order among poles inside the domain's holes, or an error if a pole
/// sits in the domain itself. `None` when the poles are not known.
fn hole_pole_order<F: Holomorphic + ?Sized>(f: &F, domain: &DomainSpec) -> Result<Option<u32>> {
    let Some(poles) = f.poles() else {
        return Ok(None);
    };
    let mut order = 0;
    for p in poles {
        match domain.classify(p.location) {
            Region::Domain => return Err(Error::PoleInDomain { pole: p.location }),
            Region::Hole(_) | Region::Boundary => order = order.max(p.order),
            Region::Outside => {}
        }
    }
    Ok(Some(order))
}

/// Measures moments through degree `k_max` on a homology basis of `domain`.
///
/// The maximal order is the smallest degree with a nonzero moment over all basis
/// curves. When none is found, the answer is definitive if the poles of `f` are known
/// and `k_max` reaches the largest pole order inside a hole.
pub fn max_primitive_order<F: Holomorphic + ?Sized>(
    f: &F,
    domain: &DomainSpec,
    k_max: usize,
    tol: &Tolerances,
) -> Result<PrimitiveOrderVerdict> {
    let pole_order = hole_pole_order(f, domain)?;
    let basis = homology_basis(domain)?;
    let moments = basis
        .iter()
        .map(|b| moment_vector(f, &b.path, b.hole, k_max, tol))
        .collect::<Result<Vec<_>>>()?;
    let first_nonzero: Vec<Option<usize>> = moments.iter().map(|m| m.first_nonzero(tol)).collect();
    let max_order = match first_nonzero.iter().flatten().min() {
        Some(&order) => MaxOrder::Finite { order },
        None => MaxOrder::AllTested {
            up_to: k_max + 1,
            definitive: pole_order.is_some_and(|p| k_max >= p as usize),
        },
    };
    Ok(PrimitiveOrderVerdict {
        max_order,
        first_nonzero,
        tolerance: *tol,
        moments,
        basis,
    })
}

/// One value of an order-`n` primitive, together with the route used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimitiveSample {
    pub order: usize,
    pub z0: ComplexValue,
    pub z: ComplexValue,
    #[serde(skip)]
    pub path: Path,
    pub value: ComplexValue,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Fails unless sampled points of `path` all lie in `domain`.
pub fn check_path_in_domain(path: &Path, domain: &DomainSpec) -> Result<()> {
    let n = DOMAIN_SAMPLES;
    (0..=n)
        .map(|i| path.point_at_fraction(i as f64 / n as f64))
        .try_for_each(|z| {
            if domain.contains(z) {
                Ok(())
            } else {
                Err(Error::OutsideDomain { point: z })
            }
        })
}

/// `φₙ(z) = 1/(n−1)! ∫_path (z−ζ)^{n−1} f(ζ) dζ` with `z` the end of `path`.
///
/// The result is single valued only when moments of degree below `n` vanish; this
/// function does not check that (see [`PrimitiveBuilder`]).
pub fn construct_primitive<F: Holomorphic + ?Sized>(
    f: &F,
    n: usize,
    path: &Path,
    domain: Option<&DomainSpec>,
    tol: &Tolerances,
) -> Result<PrimitiveSample> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "primitive order must be at least 1".into(),
        ));
    }
    check_degree(n - 1)?;
    if let Some(d) = domain {
        check_path_in_domain(path, d)?;
    }
    let z = path.end();
    let q = integrate(
        &|zeta| Ok(ipow(z - zeta, (n - 1) as i32) * f.eval(zeta)?),
        path,
        tol.quad,
    )?;
    Ok(PrimitiveSample {
        order: n,
        z0: path.start(),
        z,
        path: path.clone(),
        value: q.value / factorial(n - 1),
    })
}

/// `|φₙ via path_a − φₙ via path_b|` for two routes with common endpoints.
pub fn path_independence_check<F: Holomorphic + ?Sized>(
    f: &F,
    n: usize,
    path_a: &Path,
    path_b: &Path,
    domain: Option<&DomainSpec>,
    tol: &Tolerances,
) -> Result<f64> {
    let close = |a: ComplexValue, b: ComplexValue| (a - b).norm() <= 1e-12 * a.norm().max(1.0);
    if !close(path_a.start(), path_b.start()) || !close(path_a.end(), path_b.end()) {
        return Err(Error::InvalidPath(
            "routes must share both endpoints".into(),
        ));
    }
    let a = construct_primitive(f, n, path_a, domain, tol)?;
    let b = construct_primitive(f, n, path_b, domain, tol)?;
    Ok((a.value - b.value).norm())
}

/// Route from `z0` to any target: along the circle about `center` through `z0`
/// (counter-clockwise), then radially out or in.
pub fn circular_route(
    center: ComplexValue,
    z0: ComplexValue,
) -> impl Fn(ComplexValue) -> Result<Path> {
    let r0 = (z0 - center).norm();
    let t0 = (z0 - center).arg();
    move |z: ComplexValue| {
        let w = z - center;
        let sweep = (w.arg() - t0).rem_euclid(std::f64::consts::TAU);
        let mut segs = Vec::new();
        if sweep * r0 > 1e-14 {
            segs.push(PathSegment::arc(center, r0, t0, t0 + sweep)?);
        }
        let corner = center + ComplexValue::from_polar(r0, t0 + sweep);
        if (corner - z).norm() > 1e-14 {
            segs.push(PathSegment::line(corner, z)?);
        }
        if segs.is_empty() {
            return Err(Error::InvalidPath(
                "target coincides with base point".into(),
            ));
        }
        Path::new(segs)
    }
}

/// Largest `|(φₙ(p+h) − φₙ(p−h))/2h − φₙ₋₁(p)|` over `points`, with `φ₀ = f`.
///
/// `route(p)` must return a path in the domain from the common base point to `p`; the
/// stencil points are reached by extending that path with short straight segments.
pub fn derivative_check<F, R>(
    f: &F,
    n: usize,
    points: &[ComplexValue],
    h: f64,
    route: R,
    domain: Option<&DomainSpec>,
    tol: &Tolerances,
) -> Result<f64>
where
    F: Holomorphic + ?Sized,
    R: Fn(ComplexValue) -> Result<Path> + Sync,
{
    if n == 0 || h.is_nan() || h <= 0.0 {
        return Err(Error::InvalidArgument("need n >= 1 and h > 0".into()));
    }
    let residuals = points
        .par_iter()
        .map(|&p| {
            let base = route(p)?;
            let step = |dz: f64| -> Result<ComplexValue> {
                let ext = base.concat(&Path::polyline(&[p, p + dz])?)?;
                Ok(construct_primitive(f, n, &ext, domain, tol)?.value)
            };
            let fd = (step(h)? - step(-h)?) / (2.0 * h);
            let lower = if n == 1 {
                f.eval(p)?
            } else {
                construct_primitive(f, n - 1, &base, domain, tol)?.value
            };
            Ok((fd - lower).norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(residuals.into_iter().fold(0.0, f64::max))
}

/// Builds primitives after measuring the moment verdict once.
///
/// Requests above the certified order are still served (the resulting values carry
/// period information), but a warning is logged.
pub struct PrimitiveBuilder<'a, F: Holomorphic + ?Sized> {
    f: &'a F,
    domain: &'a DomainSpec,
    tol: Tolerances,
    verdict: PrimitiveOrderVerdict,
}

impl<'a, F: Holomorphic + ?Sized> PrimitiveBuilder<'a, F> {
    pub fn new(f: &'a F, domain: &'a DomainSpec, k_max: usize, tol: &Tolerances) -> Result<Self> {
        let verdict = max_primitive_order(f, domain, k_max, tol)?;
        Ok(Self {
            f,
            domain,
            tol: *tol,
            verdict,
        })
    }

    pub fn verdict(&self) -> &PrimitiveOrderVerdict {
        &self.verdict
    }

    pub fn construct(&self, n: usize, path: &Path) -> Result<PrimitiveSample> {
        if !self.verdict.admits(n) {
            log::warn!(
                "order {n} primitive requested but moments vanish only below {:?}; value depends on the route",
                self.verdict.max_order
            );
        }
        construct_primitive(self.f, n, path, Some(self.domain), &self.tol)
    }
}
