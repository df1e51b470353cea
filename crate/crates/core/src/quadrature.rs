//! Adaptive Gauss–Legendre contour quadrature.
//!
//! Each segment of a [`Path`] is integrated in its own parameter with `dz = z'(s) ds`.
//! Panels are bisected until the discrepancy between one 16-point rule and two
//! half-width rules falls below the segment's share of the tolerance, which is
//! proportional to its length.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use serde::Serialize;

use crate::geom::{Path, PathSegment};
use crate::{ComplexValue, Error, Result};

/// Default cap on the total number of panels.
pub const DEFAULT_MAX_PANELS: usize = 1 << 16;

const ORDER: usize = 16;
const ROUNDOFF: f64 = 64.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: ComplexValue,
    pub error_estimate: f64,
    pub evaluations: usize,
    /// Largest `|g|` seen at any node.
    pub max_abs_integrand: f64,
}

/// Nodes and weights of the 16-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| legendre_rule(ORDER))
}

fn legendre_rule(n: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

struct Rule {
    value: ComplexValue,
    abs: f64,
    max: f64,
}

fn panel<G>(g: &G, seg: &PathSegment, s0: f64, s1: f64) -> Result<Rule>
where
    G: Fn(ComplexValue) -> Result<ComplexValue> + ?Sized,
{
    let half = 0.5 * (s1 - s0);
    let mid = 0.5 * (s1 + s0);
    let mut value = ComplexValue::new(0.0, 0.0);
    let (mut abs, mut max) = (0.0f64, 0.0f64);
    for &(x, w) in gauss_legendre() {
        let s = mid + half * x;
        let gz = g(seg.point(s))?;
        if !gz.is_finite() {
            return Err(Error::NonFinite { z: seg.point(s) });
        }
        let term = gz * seg.derivative(s) * (w * half);
        value += term;
        abs += term.norm();
        max = max.max(gz.norm());
    }
    Ok(Rule { value, abs, max })
}

struct Panel {
    s0: f64,
    s1: f64,
    left: ComplexValue,
    right: ComplexValue,
    err: f64,
    floor: f64,
}

impl Panel {
    fn excess(&self) -> f64 {
        if self.err <= self.floor {
            0.0
        } else {
            self.err
        }
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.excess()
            .total_cmp(&other.excess())
            .then(other.s0.total_cmp(&self.s0))
    }
}

struct Tally {
    evaluations: usize,
    max: f64,
    panels: usize,
    max_panels: usize,
}

fn build_panel<G>(
    g: &G,
    seg: &PathSegment,
    s0: f64,
    s1: f64,
    whole: ComplexValue,
    tally: &mut Tally,
) -> Result<Panel>
where
    G: Fn(ComplexValue) -> Result<ComplexValue> + ?Sized,
{
    let sm = 0.5 * (s0 + s1);
    let l = panel(g, seg, s0, sm)?;
    let r = panel(g, seg, sm, s1)?;
    tally.evaluations += 2 * ORDER;
    tally.max = tally.max.max(l.max).max(r.max);
    Ok(Panel {
        s0,
        s1,
        left: l.value,
        right: r.value,
        err: (l.value + r.value - whole).norm(),
        floor: ROUNDOFF * (l.abs + r.abs),
    })
}

fn integrate_segment<G>(
    g: &G,
    seg: &PathSegment,
    budget: f64,
    tally: &mut Tally,
) -> Result<(ComplexValue, f64)>
where
    G: Fn(ComplexValue) -> Result<ComplexValue> + ?Sized,
{
    let initial = match seg {
        PathSegment::Line { .. } => 1,
        PathSegment::Arc { t0, t1, .. } => ((t1 - t0).abs() / std::f64::consts::FRAC_PI_4)
            .ceil()
            .max(1.0) as usize,
    };
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    for p in 0..initial {
        let s0 = p as f64 / initial as f64;
        let s1 = (p + 1) as f64 / initial as f64;
        let whole = panel(g, seg, s0, s1)?;
        tally.evaluations += ORDER;
        tally.max = tally.max.max(whole.max);
        let built = build_panel(g, seg, s0, s1, whole.value, tally)?;
        total += built.excess();
        heap.push(built);
        tally.panels += 1;
    }
    // Running sums drift; recompute exactly every so often.
    let mut since_resum = 0;
    while total > budget {
        if tally.panels >= tally.max_panels {
            return Err(Error::BudgetExhausted {
                panels: tally.panels,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let sm = 0.5 * (worst.s0 + worst.s1);
        let left = build_panel(g, seg, worst.s0, sm, worst.left, tally)?;
        let right = build_panel(g, seg, sm, worst.s1, worst.right, tally)?;
        total += left.excess() + right.excess() - worst.excess();
        heap.push(left);
        heap.push(right);
        tally.panels += 1;
        since_resum += 1;
        if since_resum == 256 || total <= budget {
            total = heap.iter().map(Panel::excess).sum();
            since_resum = 0;
        }
    }
    let mut panels = heap.into_vec();
    panels.sort_by(|a, b| a.s0.total_cmp(&b.s0));
    let value = panels.iter().map(|p| p.left + p.right).sum();
    let err = panels.iter().map(|p| p.err).sum();
    Ok((value, err))
}

/// `∫_path g(z) dz` to absolute tolerance `tol`, with the default panel cap.
pub fn integrate<G>(g: &G, path: &Path, tol: f64) -> Result<QuadratureResult>
where
    G: Fn(ComplexValue) -> Result<ComplexValue> + ?Sized,
{
    integrate_with_cap(g, path, tol, DEFAULT_MAX_PANELS)
}

pub fn integrate_with_cap<G>(
    g: &G,
    path: &Path,
    tol: f64,
    max_panels: usize,
) -> Result<QuadratureResult>
where
    G: Fn(ComplexValue) -> Result<ComplexValue> + ?Sized,
{
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(
            "quadrature tolerance must be positive".into(),
        ));
    }
    let length = path.length();
    let mut tally = Tally {
        evaluations: 0,
        max: 0.0,
        panels: 0,
        max_panels,
    };
    let mut value = ComplexValue::new(0.0, 0.0);
    let mut error_estimate = 0.0;
    for seg in path.segments() {
        let budget = tol * seg.length() / length;
        let (v, e) = integrate_segment(g, seg, budget, &mut tally)?;
        value += v;
        error_estimate += e;
    }
    Ok(QuadratureResult {
        value,
        error_estimate,
        evaluations: tally.evaluations,
        max_abs_integrand: tally.max,
    })
}

/// Integral over the initial portion of `path` up to arclength fraction `t`.
pub fn integrate_arc_prefix<G>(g: &G, path: &Path, t: f64, tol: f64) -> Result<ComplexValue>
where
    G: Fn(ComplexValue) -> Result<ComplexValue> + ?Sized,
{
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!(
            "arclength fraction {t} is outside [0, 1]"
        )));
    }
    match path.prefix(t) {
        None => Ok(ComplexValue::new(0.0, 0.0)),
        Some(p) => Ok(integrate(g, &p, tol)?.value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::ipow;
    use std::f64::consts::PI;

    const TOL: f64 = 1e-12;

    fn c(re: f64, im: f64) -> ComplexValue {
        ComplexValue::new(re, im)
    }

    fn unit() -> Path {
        Path::circle(c(0.0, 0.0), 1.0).unwrap()
    }

    #[test]
    fn rule_integrates_degree_31_exactly() {
        let rule = gauss_legendre();
        assert_eq!(rule.len(), 16);
        assert!((rule.iter().map(|r| r.1).sum::<f64>() - 2.0).abs() < 1e-14);
        let line = Path::polyline(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let r = integrate(&|z: ComplexValue| Ok(ipow(z, 31)), &line, TOL).unwrap();
        assert!((r.value - c(1.0 / 32.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn residue_examples() {
        for n in 0..6 {
            let r = integrate(&|z: ComplexValue| Ok(ipow(z, n)), &unit(), TOL).unwrap();
            assert!(r.value.norm() <= 1e-12);
        }
        let r = integrate(&|z: ComplexValue| Ok(1.0 / z), &unit(), TOL).unwrap();
        assert!((r.value - c(0.0, 2.0 * PI)).norm() < 1e-12);
        assert!(r.error_estimate <= TOL && r.evaluations > 0);
        let r = integrate(&|z: ComplexValue| Ok(1.0 / (z * z)), &unit(), TOL).unwrap();
        assert!(r.value.norm() < 1e-12);
    }

    #[test]
    fn prefix_examples() {
        let one = |_: ComplexValue| Ok(c(1.0, 0.0));
        let sq = Path::polygon(&[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)]).unwrap();
        for t in [0.0, 0.3, 0.6, 1.0] {
            let v = integrate_arc_prefix(&one, &sq, t, TOL).unwrap();
            assert!((v - (sq.point_at_fraction(t) - sq.start())).norm() < 1e-14);
        }
        let half = integrate_arc_prefix(&|z: ComplexValue| Ok(1.0 / z), &unit(), 0.5, TOL).unwrap();
        assert!((half - c(0.0, PI)).norm() < 1e-12);
        let seg = Path::polyline(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let v = integrate_arc_prefix(&|z: ComplexValue| Ok(z), &seg, 1.0, TOL).unwrap();
        assert!((v - c(0.5, 0.0)).norm() < 1e-15);
        let full = integrate(&|z: ComplexValue| Ok(z.exp() / z), &unit(), TOL).unwrap();
        let pre =
            integrate_arc_prefix(&|z: ComplexValue| Ok(z.exp() / z), &unit(), 1.0, TOL).unwrap();
        assert!((full.value - pre).norm() < 1e-10);
    }

    #[test]
    fn additivity_and_orientation() {
        let g = |z: ComplexValue| Ok((z * 0.7).exp() / (z - c(3.0, 1.0)));
        let a = Path::polyline(&[c(0.0, 0.0), c(1.0, 1.0), c(-0.5, 2.0)]).unwrap();
        let b = Path::polyline(&[c(-0.5, 2.0), c(-1.0, -1.0)]).unwrap();
        let ab = a.concat(&b).unwrap();
        let ia = integrate(&g, &a, TOL).unwrap().value;
        let ib = integrate(&g, &b, TOL).unwrap().value;
        let iab = integrate(&g, &ab, TOL).unwrap().value;
        assert!((iab - ia - ib).norm() < 1e-12);
        let rev = integrate(&g, &ab.reversed(), TOL).unwrap().value;
        assert!((rev + iab).norm() < 1e-12);
    }

    #[test]
    fn near_singular_integrand_exhausts_budget() {
        let g = |z: ComplexValue| Ok(1.0 / (z - c(1.0 + 1e-13, 0.0)).powi(4));
        assert!(matches!(
            integrate_with_cap(&g, &unit(), 1e-12, 64),
            Err(Error::BudgetExhausted { .. })
        ));
    }

    #[test]
    fn integrand_errors_propagate() {
        let g = |z: ComplexValue| Err(Error::NonFinite { z });
        assert!(matches!(
            integrate(&g, &unit(), TOL),
            Err(Error::NonFinite { .. })
        ));
    }
}
