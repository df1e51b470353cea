use serde::Serialize;

use super::curve::SampledCurve;
use crate::expr::ipow;
use crate::quadrature::{gauss_legendre, integrate};
use crate::{ComplexValue, Error, Result, Tolerances};

/// Fewest intervals accepted by the moment and tower computations.
pub const MIN_SAMPLES: usize = 16;

/// How boundary integrals are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Adaptive quadrature on the exact path with the data function.
    Analytic,
    /// Trapezoid rule on the samples with chord increments.
    Discrete,
}

impl Method {
    /// Analytic when the curve carries its path and data function.
    pub fn best_for(curve: &SampledCurve) -> Self {
        if curve.path().is_some() && curve.density().is_some() {
            Method::Analytic
        } else {
            Method::Discrete
        }
    }
}

/// `Σ ½(g_i + g_{i+1})(z_{i+1} − z_i)` and the matching absolute sum.
pub(crate) fn trapezoid(z: &[ComplexValue], g: &[ComplexValue]) -> (ComplexValue, f64) {
    let mut sum = ComplexValue::new(0.0, 0.0);
    let mut abs = 0.0;
    for i in 0..z.len() - 1 {
        let dz = z[i + 1] - z[i];
        sum += 0.5 * (g[i] + g[i + 1]) * dz;
        abs += 0.5 * (g[i].norm() + g[i + 1].norm()) * dz.norm();
    }
    (sum, abs)
}

/// Partial trapezoid sums `G_i = Σ_{j<i} ½(g_j + g_{j+1})(z_{j+1} − z_j)`.
pub(crate) fn cumulative_trapezoid(z: &[ComplexValue], g: &[ComplexValue]) -> Vec<ComplexValue> {
    let mut out = Vec::with_capacity(z.len());
    let mut acc = ComplexValue::new(0.0, 0.0);
    out.push(acc);
    for i in 0..z.len() - 1 {
        acc += 0.5 * (g[i] + g[i + 1]) * (z[i + 1] - z[i]);
        out.push(acc);
    }
    out
}

pub(crate) fn analytic_parts(
    curve: &SampledCurve,
) -> Result<(&crate::geom::Path, &super::curve::Density)> {
    match (curve.path(), curve.density()) {
        (Some(p), Some(d)) => Ok((p, d)),
        _ => Err(Error::InvalidArgument(
            "analytic evaluation needs the exact path and the data function".into(),
        )),
    }
}

/// `∫ zᵏ f(z) dz` over the curve together with its magnitude scale.
pub fn boundary_moment_scaled(
    curve: &SampledCurve,
    k: usize,
    method: Method,
    tol: &Tolerances,
) -> Result<(ComplexValue, f64)> {
    curve.require(MIN_SAMPLES)?;
    match method {
        Method::Discrete => {
            let g: Vec<ComplexValue> = curve
                .points()
                .iter()
                .zip(curve.values())
                .map(|(&z, &f)| ipow(z, k as i32) * f)
                .collect();
            Ok(trapezoid(curve.points(), &g))
        }
        Method::Analytic => {
            let (path, density) = analytic_parts(curve)?;
            let q = integrate(&|z| Ok(ipow(z, k as i32) * density(z)), path, tol.quad)?;
            Ok((q.value, path.length() * q.max_abs_integrand))
        }
    }
}

pub fn boundary_moment(
    curve: &SampledCurve,
    k: usize,
    method: Method,
    tol: &Tolerances,
) -> Result<ComplexValue> {
    Ok(boundary_moment_scaled(curve, k, method, tol)?.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryMomentReport {
    pub method: Method,
    pub values: Vec<ComplexValue>,
    pub scales: Vec<f64>,
    pub zero: Vec<bool>,
}

impl BoundaryMomentReport {
    /// Number of leading moments flagged zero.
    pub fn leading_zeros(&self) -> usize {
        self.zero.iter().take_while(|&&z| z).count()
    }
}

pub fn boundary_moments(
    curve: &SampledCurve,
    k_max: usize,
    method: Method,
    tol: &Tolerances,
) -> Result<BoundaryMomentReport> {
    let (values, scales): (Vec<_>, Vec<_>) = (0..=k_max)
        .map(|k| boundary_moment_scaled(curve, k, method, tol))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    let zero = values
        .iter()
        .zip(&scales)
        .map(|(&v, &s)| tol.is_zero(v, s))
        .collect();
    Ok(BoundaryMomentReport {
        method,
        values,
        scales,
        zero,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TowerLevel {
    pub order: usize,
    /// Final partial sum `G(z_M)`, the period of this level.
    pub closing_defect: ComplexValue,
    pub scale: f64,
    pub one_valued: bool,
    #[serde(skip)]
    pub samples: Vec<ComplexValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimitiveTowerResult {
    pub levels: Vec<TowerLevel>,
    /// Number of one-valued levels before the first failure.
    pub depth: usize,
    /// Leading zero count of the discrete moments `0..n_max`.
    pub leading_zero_moments: usize,
    /// `depth` equals the leading zero count (both capped at `n_max`).
    pub duality_consistent: bool,
}

/// Discrete primitives of increasing order until one fails to close up.
pub fn primitive_tower(
    curve: &SampledCurve,
    n_max: usize,
    tol: &Tolerances,
) -> Result<PrimitiveTowerResult> {
    curve.require(MIN_SAMPLES)?;
    let z = curve.points();
    let mut g = curve.values().to_vec();
    let mut levels = Vec::new();
    for order in 1..=n_max {
        let samples = cumulative_trapezoid(z, &g);
        let (_, scale) = trapezoid(z, &g);
        let defect = samples[samples.len() - 1];
        let one_valued = tol.is_zero(defect, scale);
        levels.push(TowerLevel {
            order,
            closing_defect: defect,
            scale,
            one_valued,
            samples: samples.clone(),
        });
        if !one_valued {
            break;
        }
        g = samples;
    }
    let depth = levels.iter().take_while(|l| l.one_valued).count();
    let moments = boundary_moments(curve, n_max.saturating_sub(1), Method::Discrete, tol)?;
    let leading = moments.leading_zeros().min(n_max);
    Ok(PrimitiveTowerResult {
        levels,
        depth,
        leading_zero_moments: leading,
        duality_consistent: depth == leading,
    })
}

/// Integration-by-parts residual at each tower level: with `μₙ` the order-`n`
/// primitive (`μ₀ = f`), `∫ζ μₙ₋₁ dζ + ∫ μₙ dζ − ζμₙ|∂` should vanish.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IbpLevel {
    pub order: usize,
    pub residual: f64,
    /// `|ζ μₙ|∂|`, zero when level `n` is one-valued.
    pub boundary_term: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub moments: BoundaryMomentReport,
    pub tower: PrimitiveTowerResult,
    pub moments_vanish: bool,
    pub tower_one_valued: bool,
    pub consistent: bool,
    pub ibp_discrete: Vec<IbpLevel>,
    pub ibp_analytic: Option<Vec<IbpLevel>>,
}

fn ibp_discrete(curve: &SampledCurve, n_max: usize) -> Vec<IbpLevel> {
    let z = curve.points();
    let z0 = z[0];
    let mut mu = curve.values().to_vec();
    (1..=n_max)
        .map(|order| {
            let next = cumulative_trapezoid(z, &mu);
            let zmu: Vec<ComplexValue> = z.iter().zip(&mu).map(|(a, b)| a * b).collect();
            let boundary = z0 * next[next.len() - 1];
            let r = trapezoid(z, &zmu).0 + trapezoid(z, &next).0 - boundary;
            mu = next;
            IbpLevel {
                order,
                residual: r.norm(),
                boundary_term: boundary.norm(),
            }
        })
        .collect()
}

const IBP_PANELS_PER_SEGMENT: usize = 64;

/// Same identity on the exact path: the order-`n` primitive at a point is expanded
/// binomially in prefix moments `∫₀ˢ ζʲ f dζ`, each taken by nested Gauss rules.
fn ibp_analytic(curve: &SampledCurve, n_max: usize) -> Result<Vec<IbpLevel>> {
    let (path, density) = analytic_parts(curve)?;
    let rule = gauss_legendre();
    let mut nodes = Vec::new();
    let mut prefix: Vec<Vec<ComplexValue>> = Vec::new();
    let mut running = vec![ComplexValue::new(0.0, 0.0); n_max];
    let quad = |seg: &crate::geom::PathSegment, a: f64, b: f64, j: usize| {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        rule.iter()
            .map(|&(x, w)| {
                let s = mid + half * x;
                let p = seg.point(s);
                ipow(p, j as i32) * density(p) * seg.derivative(s) * (w * half)
            })
            .sum::<ComplexValue>()
    };
    for seg in path.segments() {
        for p in 0..IBP_PANELS_PER_SEGMENT {
            let a = p as f64 / IBP_PANELS_PER_SEGMENT as f64;
            let b = (p + 1) as f64 / IBP_PANELS_PER_SEGMENT as f64;
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            for &(x, w) in rule {
                let s = mid + half * x;
                let pts: Vec<ComplexValue> = (0..n_max)
                    .map(|j| running[j] + quad(seg, a, s, j))
                    .collect();
                nodes.push((seg.point(s), seg.derivative(s) * (w * half)));
                prefix.push(pts);
            }
            for (j, r) in running.iter_mut().enumerate() {
                *r += quad(seg, a, b, j);
            }
        }
    }
    let z0 = path.start();
    let mut binom = vec![vec![1.0f64; n_max + 1]; n_max + 1];
    for n in 1..=n_max {
        for j in 1..n {
            binom[n][j] = binom[n - 1][j - 1] + binom[n - 1][j];
        }
    }
    let fact = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
    // μₙ(z) = 1/(n−1)! Σ_j C(n−1, j) z^{n−1−j} (−1)^j P_j
    let mu = |n: usize, z: ComplexValue, pre: &[ComplexValue]| -> ComplexValue {
        if n == 0 {
            return density(z);
        }
        let mut s = ComplexValue::new(0.0, 0.0);
        for j in 0..n {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * binom[n - 1][j] * ipow(z, (n - 1 - j) as i32) * pre[j];
        }
        s / fact(n - 1)
    };
    Ok((1..=n_max)
        .map(|order| {
            let mut lhs = ComplexValue::new(0.0, 0.0);
            for ((z, dz), pre) in nodes.iter().zip(&prefix) {
                lhs += (z * mu(order - 1, *z, pre) + mu(order, *z, pre)) * dz;
            }
            let boundary = z0 * mu(order, z0, &running);
            IbpLevel {
                order,
                residual: (lhs - boundary).norm(),
                boundary_term: boundary.norm(),
            }
        })
        .collect())
}

/// Checks that boundary moments `0..=K` all vanish exactly when the tower is
/// one-valued through level `K+1`, and reports integration-by-parts residuals.
pub fn boundary_equivalence(
    curve: &SampledCurve,
    k_max: usize,
    n_max: usize,
    tol: &Tolerances,
) -> Result<EquivalenceReport> {
    let moments = boundary_moments(curve, k_max, Method::Discrete, tol)?;
    let tower = primitive_tower(curve, n_max.max(k_max + 1), tol)?;
    let moments_vanish = moments.zero.iter().all(|&z| z);
    let tower_one_valued = tower.depth > k_max;
    let ibp_levels = n_max.max(1);
    let ibp_analytic = match Method::best_for(curve) {
        Method::Analytic => Some(ibp_analytic(curve, ibp_levels)?),
        Method::Discrete => None,
    };
    Ok(EquivalenceReport {
        consistent: moments_vanish == tower_one_valued && tower.duality_consistent,
        moments_vanish,
        tower_one_valued,
        ibp_discrete: ibp_discrete(curve, ibp_levels),
        ibp_analytic,
        moments,
        tower,
    })
}
