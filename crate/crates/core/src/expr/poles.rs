//! Pole detection for rational expressions.
//!
//! Candidate locations come from the expression structure: products and powers keep
//! their factors separate, and only sums are expanded into a polynomial (degree cap 32)
//! whose roots are found as companion-matrix eigenvalues. Each candidate is then
//! confirmed, and its order read off, from the Laurent valuation of the whole
//! expression at that point, computed with truncated series arithmetic.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{ipow, Expr};
use crate::{ComplexValue, Error, Result};

pub const DEGREE_CAP: usize = 32;

/// Distinct pole locations closer than this (relative to `max(1, |z|)`) are merged.
const POLE_CLUSTER: f64 = 1e-8;
/// Roots of an expanded sum within this radius are tested as one multiple root.
const MULTIPLE_ROOT_RADIUS: f64 = 1e-2;
/// Taylor coefficients below this fraction of their magnitude scale count as zero.
const TAYLOR_ZERO: f64 = 1e-13;
/// Cancellation threshold for series addition.
const SERIES_CANCEL: f64 = 1e-9;
const SERIES_LEN: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleRecord {
    pub location: ComplexValue,
    pub order: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "poles", rename_all = "lowercase")]
pub enum PoleSet {
    Known(Vec<PoleRecord>),
    /// The expression is not rational; poles are not analysed.
    Unknown,
}

impl PoleSet {
    pub fn known(&self) -> Option<&[PoleRecord]> {
        match self {
            PoleSet::Known(p) => Some(p),
            PoleSet::Unknown => None,
        }
    }
}

pub fn pole_set(expr: &Expr) -> Result<PoleSet> {
    if !expr.is_rational() {
        return Ok(PoleSet::Unknown);
    }
    // Probing at a generic point rejects divisions by identically zero subexpressions.
    series_at(expr, ComplexValue::new(0.371_293_5, 0.541_879_3))?;
    let candidates = dedupe(poles_of(expr)?, POLE_CLUSTER);
    let mut poles = Vec::new();
    for c in candidates {
        if let Series::Terms { val, .. } = series_at(expr, c)? {
            if val < 0 {
                poles.push(PoleRecord {
                    location: c,
                    order: (-val) as u32,
                });
            }
        }
    }
    poles.sort_by(|a, b| {
        (a.location.re, a.location.im)
            .partial_cmp(&(b.location.re, b.location.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(PoleSet::Known(poles))
}

fn poles_of(e: &Expr) -> Result<Vec<ComplexValue>> {
    Ok(match e {
        Expr::Const(_) | Expr::Var => Vec::new(),
        Expr::Neg(a) => poles_of(a)?,
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
            let mut p = poles_of(a)?;
            p.extend(poles_of(b)?);
            p
        }
        Expr::Div(a, b) => {
            let mut p = poles_of(a)?;
            p.extend(zeros_of(b)?);
            p
        }
        Expr::Pow(a, n) if *n > 0 => poles_of(a)?,
        Expr::Pow(a, n) if *n < 0 => zeros_of(a)?,
        Expr::Pow(..) => Vec::new(),
        Expr::Exp(_) => unreachable!("pole analysis only runs on rational expressions"),
    })
}

fn zeros_of(e: &Expr) -> Result<Vec<ComplexValue>> {
    Ok(match e {
        Expr::Const(_) => Vec::new(),
        Expr::Var => vec![ComplexValue::new(0.0, 0.0)],
        Expr::Neg(a) => zeros_of(a)?,
        Expr::Add(..) | Expr::Sub(..) => {
            let (num, _) = to_rational(e)?;
            multiple_roots(&num)?
        }
        Expr::Mul(a, b) => {
            let mut z = zeros_of(a)?;
            z.extend(zeros_of(b)?);
            z
        }
        Expr::Div(a, b) => {
            let mut z = zeros_of(a)?;
            z.extend(poles_of(b)?);
            z
        }
        Expr::Pow(a, n) if *n > 0 => zeros_of(a)?,
        Expr::Pow(a, n) if *n < 0 => poles_of(a)?,
        Expr::Pow(..) => Vec::new(),
        Expr::Exp(_) => unreachable!("pole analysis only runs on rational expressions"),
    })
}

// ---------------------------------------------------------------------------
// Polynomials, coefficients stored lowest degree first.

type Poly = Vec<ComplexValue>;

fn degree(p: &Poly) -> usize {
    p.iter().rposition(|c| c.norm_sqr() != 0.0).unwrap_or(0)
}

fn trim(mut p: Poly) -> Poly {
    let d = degree(&p);
    p.truncate(d + 1);
    if p.is_empty() {
        p.push(ComplexValue::new(0.0, 0.0));
    }
    p
}

fn padd(a: &Poly, b: &Poly, sign: f64) -> Poly {
    let n = a.len().max(b.len());
    let zero = ComplexValue::new(0.0, 0.0);
    trim(
        (0..n)
            .map(|i| *a.get(i).unwrap_or(&zero) + sign * *b.get(i).unwrap_or(&zero))
            .collect(),
    )
}

fn pmul(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![ComplexValue::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn ppow(a: &Poly, n: u32) -> Result<Poly> {
    let mut out = vec![ComplexValue::new(1.0, 0.0)];
    for _ in 0..n {
        out = pmul(&out, a);
        cap(&out)?;
    }
    Ok(out)
}

fn cap(p: &Poly) -> Result<()> {
    let d = degree(p);
    if d > DEGREE_CAP {
        Err(Error::DegreeCap {
            degree: d,
            cap: DEGREE_CAP,
        })
    } else {
        Ok(())
    }
}

/// Expands a rational expression into numerator and denominator polynomials.
fn to_rational(e: &Expr) -> Result<(Poly, Poly)> {
    let one = || vec![ComplexValue::new(1.0, 0.0)];
    let out = match e {
        Expr::Const(c) => (vec![*c], one()),
        Expr::Var => (
            vec![ComplexValue::new(0.0, 0.0), ComplexValue::new(1.0, 0.0)],
            one(),
        ),
        Expr::Neg(a) => {
            let (n, d) = to_rational(a)?;
            (n.iter().map(|c| -c).collect(), d)
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let sign = if matches!(e, Expr::Add(..)) {
                1.0
            } else {
                -1.0
            };
            let (n1, d1) = to_rational(a)?;
            let (n2, d2) = to_rational(b)?;
            if d1 == d2 {
                (padd(&n1, &n2, sign), d1)
            } else {
                (padd(&pmul(&n1, &d2), &pmul(&n2, &d1), sign), pmul(&d1, &d2))
            }
        }
        Expr::Mul(a, b) => {
            let (n1, d1) = to_rational(a)?;
            let (n2, d2) = to_rational(b)?;
            (pmul(&n1, &n2), pmul(&d1, &d2))
        }
        Expr::Div(a, b) => {
            let (n1, d1) = to_rational(a)?;
            let (n2, d2) = to_rational(b)?;
            (pmul(&n1, &d2), pmul(&d1, &n2))
        }
        Expr::Pow(a, n) => {
            let (num, den) = to_rational(a)?;
            let k = n.unsigned_abs();
            if *n >= 0 {
                (ppow(&num, k)?, ppow(&den, k)?)
            } else {
                (ppow(&den, k)?, ppow(&num, k)?)
            }
        }
        Expr::Exp(_) => unreachable!("pole analysis only runs on rational expressions"),
    };
    cap(&out.0)?;
    cap(&out.1)?;
    Ok(out)
}

/// All roots of `p` with multiplicity, via the companion matrix.
fn poly_roots(p: &Poly) -> Result<Vec<ComplexValue>> {
    let scale = p.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(Vec::new());
    }
    let tiny = 1e-15 * scale;
    let hi = p.iter().rposition(|c| c.norm() > tiny).unwrap_or(0);
    let lo = p.iter().position(|c| c.norm() > tiny).unwrap_or(0);
    let mut roots = vec![ComplexValue::new(0.0, 0.0); lo];
    let q: Vec<ComplexValue> = p[lo..=hi].to_vec();
    let d = q.len() - 1;
    match d {
        0 => {}
        1 => roots.push(-q[0] / q[1]),
        _ => {
            let lead = q[d];
            let companion = DMatrix::<ComplexValue>::from_fn(d, d, |i, j| {
                if j == d - 1 {
                    -q[i] / lead
                } else if i == j + 1 {
                    ComplexValue::new(1.0, 0.0)
                } else {
                    ComplexValue::new(0.0, 0.0)
                }
            });
            let schur = companion.try_schur(1e-15, 10_000).ok_or_else(|| {
                Error::RootFinding(format!("Schur iteration did not converge (degree {d})"))
            })?;
            let (_, t) = schur.unpack();
            for i in 0..d {
                let r = t[(i, i)];
                if !(r.re.is_finite() && r.im.is_finite()) {
                    return Err(Error::RootFinding("non-finite eigenvalue".into()));
                }
                roots.push(r);
            }
        }
    }
    Ok(roots)
}

/// Taylor coefficients of `p` at `c` together with their magnitude scales.
fn taylor_at(p: &Poly, c: ComplexValue) -> Vec<(ComplexValue, f64)> {
    let n = p.len();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let mut value = ComplexValue::new(0.0, 0.0);
        let mut scale = 0.0;
        let mut binom = 1.0;
        for (i, &pi) in p.iter().enumerate().skip(j) {
            if i > j {
                binom = binom * i as f64 / (i - j) as f64;
            }
            let term = pi * binom * ipow(c, (i - j) as i32);
            value += term;
            scale += term.norm();
        }
        out.push((value, scale));
    }
    out
}

/// Roots of `p` with nearby roots grouped when the Taylor expansion certifies a
/// multiple root at the group centroid.
fn multiple_roots(p: &Poly) -> Result<Vec<ComplexValue>> {
    let roots = poly_roots(p)?;
    let mut assigned = vec![false; roots.len()];
    let mut out = Vec::new();
    for i in 0..roots.len() {
        if assigned[i] {
            continue;
        }
        let r = roots[i];
        let radius = MULTIPLE_ROOT_RADIUS * r.norm().max(1.0);
        let mut near: Vec<usize> = (0..roots.len())
            .filter(|&j| j != i && !assigned[j] && (roots[j] - r).norm() <= radius)
            .collect();
        near.sort_by(|&a, &b| {
            (roots[a] - r)
                .norm()
                .partial_cmp(&(roots[b] - r).norm())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut best = (vec![i], r);
        for m in 2..=near.len() + 1 {
            let group: Vec<usize> = std::iter::once(i)
                .chain(near[..m - 1].iter().copied())
                .collect();
            let centroid =
                group.iter().map(|&g| roots[g]).sum::<ComplexValue>() / group.len() as f64;
            let taylor = taylor_at(p, centroid);
            if taylor[..m]
                .iter()
                .all(|(v, s)| v.norm() <= TAYLOR_ZERO * s.max(f64::MIN_POSITIVE))
            {
                best = (group, centroid);
            }
        }
        for &g in &best.0 {
            assigned[g] = true;
        }
        out.push(best.1);
    }
    Ok(out)
}

/// Single-linkage merge of nearby points, returning group centroids.
fn dedupe(points: Vec<ComplexValue>, rel: f64) -> Vec<ComplexValue> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            let tol = rel * points[i].norm().max(points[j].norm()).max(1.0);
            if (points[i] - points[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b] = a;
                }
            }
        }
    }
    let mut groups: Vec<(usize, ComplexValue, usize)> = Vec::new();
    for (i, &point) in points.iter().enumerate().take(n) {
        let root = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == root) {
            Some(g) => {
                g.1 += point;
                g.2 += 1;
            }
            None => groups.push((root, point, 1)),
        }
    }
    groups
        .into_iter()
        .map(|(_, sum, count)| {
            let c = sum / count as f64;
            ComplexValue::new(snap(c.re), snap(c.im))
        })
        .collect()
}

fn snap(x: f64) -> f64 {
    if x.abs() < 1e-14 {
        0.0
    } else {
        x
    }
}

// ---------------------------------------------------------------------------
// Truncated Laurent series at a fixed point.
//
// Every coefficient carries a first-order error scale `mag` (sums of absolute values of
// the contributing terms, propagated through products and reciprocals). A coefficient
// below `SERIES_CANCEL * mag` is indistinguishable from cancellation noise and is
// treated as an exact zero.

#[derive(Debug, Clone)]
enum Series {
    Zero,
    /// `Σ coef[k] (z-c)^(val+k)` with `coef[0]` numerically nonzero.
    Terms {
        val: i64,
        coef: Vec<ComplexValue>,
        mag: Vec<f64>,
    },
}

fn negligible(c: ComplexValue, mag: f64) -> bool {
    c.norm_sqr() == 0.0 || c.norm() <= SERIES_CANCEL * mag
}

fn normalize(val: i64, mut coef: Vec<ComplexValue>, mut mag: Vec<f64>) -> Series {
    let zero = ComplexValue::new(0.0, 0.0);
    for (c, m) in coef.iter_mut().zip(mag.iter()) {
        if negligible(*c, *m) {
            *c = zero;
        }
    }
    match coef.iter().position(|c| c.norm_sqr() != 0.0) {
        None => Series::Zero,
        Some(k) => {
            coef.drain(..k);
            mag.drain(..k);
            coef.resize(SERIES_LEN, zero);
            mag.resize(SERIES_LEN, 0.0);
            Series::Terms {
                val: val + k as i64,
                coef,
                mag,
            }
        }
    }
}

fn s_const(c: ComplexValue) -> Series {
    normalize(0, vec![c], vec![c.norm()])
}

fn s_add(a: Series, b: Series, sign: f64) -> Series {
    match (a, b) {
        (x, Series::Zero) => x,
        (Series::Zero, Series::Terms { val, coef, mag }) => Series::Terms {
            val,
            coef: coef.into_iter().map(|c| sign * c).collect(),
            mag,
        },
        (
            Series::Terms {
                val: va,
                coef: ca,
                mag: ma,
            },
            Series::Terms {
                val: vb,
                coef: cb,
                mag: mb,
            },
        ) => {
            let v = va.min(vb);
            let zero = ComplexValue::new(0.0, 0.0);
            let pick = |c: &[ComplexValue], m: &[f64], idx: i64| {
                if idx >= 0 && (idx as usize) < c.len() {
                    (c[idx as usize], m[idx as usize])
                } else {
                    (zero, 0.0)
                }
            };
            let mut coef = Vec::with_capacity(SERIES_LEN);
            let mut mag = Vec::with_capacity(SERIES_LEN);
            for k in 0..SERIES_LEN as i64 {
                let (x, mx) = pick(&ca, &ma, k - (va - v));
                let (y, my) = pick(&cb, &mb, k - (vb - v));
                coef.push(x + sign * y);
                mag.push(mx + my);
            }
            normalize(v, coef, mag)
        }
    }
}

fn s_mul(a: &Series, b: &Series) -> Series {
    match (a, b) {
        (
            Series::Terms {
                val: va,
                coef: ca,
                mag: ma,
            },
            Series::Terms {
                val: vb,
                coef: cb,
                mag: mb,
            },
        ) => {
            let mut coef = vec![ComplexValue::new(0.0, 0.0); SERIES_LEN];
            let mut mag = vec![0.0; SERIES_LEN];
            for i in 0..SERIES_LEN {
                for j in 0..SERIES_LEN - i {
                    coef[i + j] += ca[i] * cb[j];
                    mag[i + j] += ca[i].norm() * mb[j] + ma[i] * cb[j].norm();
                }
            }
            normalize(va + vb, coef, mag)
        }
        _ => Series::Zero,
    }
}

fn s_inv(a: &Series) -> Result<Series> {
    match a {
        Series::Zero => Err(Error::InvalidArgument(
            "division by an identically zero expression".into(),
        )),
        Series::Terms { val, coef, mag } => {
            let inv0 = coef[0].inv();
            let mut out = vec![ComplexValue::new(0.0, 0.0); SERIES_LEN];
            let mut out_mag = vec![0.0; SERIES_LEN];
            out[0] = inv0;
            out_mag[0] = mag[0] * inv0.norm_sqr();
            for n in 1..SERIES_LEN {
                let mut acc = ComplexValue::new(0.0, 0.0);
                let mut acc_mag = 0.0;
                for k in 1..=n {
                    acc += coef[k] * out[n - k];
                    acc_mag += mag[k] * out[n - k].norm() + coef[k].norm() * out_mag[n - k];
                }
                out[n] = -inv0 * acc;
                out_mag[n] = inv0.norm() * acc_mag + out_mag[0] * acc.norm();
            }
            Ok(normalize(-val, out, out_mag))
        }
    }
}

fn s_pow(a: &Series, n: i32) -> Result<Series> {
    if n == 0 {
        return Ok(s_const(ComplexValue::new(1.0, 0.0)));
    }
    let mut b = if n < 0 { s_inv(a)? } else { a.clone() };
    let mut result = s_const(ComplexValue::new(1.0, 0.0));
    let mut e = n.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            result = s_mul(&result, &b);
        }
        e >>= 1;
        if e > 0 {
            b = s_mul(&b, &b);
        }
    }
    Ok(result)
}

fn series_at(e: &Expr, c: ComplexValue) -> Result<Series> {
    Ok(match e {
        Expr::Const(k) => s_const(*k),
        Expr::Var => normalize(0, vec![c, ComplexValue::new(1.0, 0.0)], vec![c.norm(), 1.0]),
        Expr::Neg(a) => s_add(Series::Zero, series_at(a, c)?, -1.0),
        Expr::Add(a, b) => s_add(series_at(a, c)?, series_at(b, c)?, 1.0),
        Expr::Sub(a, b) => s_add(series_at(a, c)?, series_at(b, c)?, -1.0),
        Expr::Mul(a, b) => s_mul(&series_at(a, c)?, &series_at(b, c)?),
        Expr::Div(a, b) => s_mul(&series_at(a, c)?, &s_inv(&series_at(b, c)?)?),
        Expr::Pow(a, n) => s_pow(&series_at(a, c)?, *n)?,
        Expr::Exp(_) => unreachable!("pole analysis only runs on rational expressions"),
    })
}
