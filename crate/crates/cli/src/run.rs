use std::time::Instant;

use envelope_core::boundary::{
    self, boundary_equivalence, cauchy_transform, chord_arc_constant, difference_quotient_check,
    nontangential_check, Method, SampledCurve,
};
use envelope_core::extension::{self, cross_verify, Contour, Extension};
use envelope_core::geom::{rasterize, simply_connected_hull, Region};
use envelope_core::moments::{max_primitive_order, path_independence_check, MaxOrder};
use envelope_core::{ComplexValue, DomainSpec, Error, Function, Holomorphic, Tolerances};
use serde::Serialize;
use serde_json::{json, Value};

use crate::scenario::{Check, Input, Plan, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Inconsistent,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub check: &'static str,
    pub status: Status,
    pub summary: String,
    pub values: Value,
    pub tolerance_used: Tolerances,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub check: &'static str,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub checks: Vec<Timing>,
    pub total_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub scenario: ScenarioConfig,
    pub results: Vec<CheckResult>,
    pub timings: Timings,
}

impl Report {
    /// 1 if any check errored, else 2 if any disagreed, else 0.
    pub fn exit_code(&self) -> i32 {
        if self.results.iter().any(|r| r.status == Status::Error) {
            1
        } else if self
            .results
            .iter()
            .any(|r| r.status == Status::Inconsistent)
        {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("envelope {}\n", self.version);
        for (r, t) in self.results.iter().zip(&self.timings.checks) {
            let status = match r.status {
                Status::Ok => "ok",
                Status::Inconsistent => "INCONSISTENT",
                Status::Error => "ERROR",
            };
            out.push_str(&format!(
                "{:<16} {:<12} {} ({:.3}s)\n",
                r.check, status, r.summary, t.seconds
            ));
        }
        out.push_str(&format!("total {:.3}s\n", self.timings.total_seconds));
        out
    }
}

struct Outcome {
    consistent: bool,
    summary: String,
    values: Value,
}

fn outcome(consistent: bool, summary: String, values: Value) -> envelope_core::Result<Outcome> {
    Ok(Outcome {
        consistent,
        summary,
        values,
    })
}

fn error_kind(e: &Error) -> String {
    let debug = format!("{e:?}");
    debug
        .split(|c: char| !c.is_alphanumeric())
        .next()
        .unwrap_or("Error")
        .to_string()
}

fn c(z: ComplexValue) -> Value {
    json!([z.re, z.im])
}

fn max_order_text(m: &MaxOrder) -> String {
    match m {
        MaxOrder::Finite { order } => format!("max_order {order}"),
        MaxOrder::AllTested { up_to, definitive } => {
            format!("all tested orders through {up_to} (definitive: {definitive})")
        }
    }
}

fn function(plan: &Plan) -> &Function {
    plan.function
        .as_ref()
        .expect("domain scenarios carry a function")
}

fn run_moments(f: &Function, domain: &DomainSpec, plan: &Plan) -> envelope_core::Result<Outcome> {
    let verdict = max_primitive_order(f, domain, plan.k, &plan.tol)?;
    let curves: Vec<Value> = verdict
        .moments
        .iter()
        .map(|m| {
            let zero: Vec<bool> = (0..m.values.len())
                .map(|k| m.is_zero(k, &plan.tol))
                .collect();
            json!({
                "hole": m.curve,
                "values": m.values,
                "scales": m.scales,
                "zero": zero,
                "first_nonzero": m.first_nonzero(&plan.tol),
            })
        })
        .collect();
    let nonzero = verdict.first_nonzero.iter().flatten().count();
    outcome(
        true,
        format!(
            "{} basis curves, {} with a nonzero moment through degree {}",
            curves.len(),
            nonzero,
            plan.k
        ),
        json!({ "K": plan.k, "curves": curves }),
    )
}

fn run_primitive_order(
    f: &Function,
    domain: &DomainSpec,
    plan: &Plan,
) -> envelope_core::Result<Outcome> {
    let verdict = max_primitive_order(f, domain, plan.k, &plan.tol)?;
    let admitted = match verdict.max_order {
        MaxOrder::Finite { order } => order,
        MaxOrder::AllTested { up_to, .. } => up_to,
    };
    // Both halves of the first basis curve join the same two points.
    let mut checks = Vec::new();
    let mut consistent = true;
    if let Some(b) = verdict.basis.first() {
        let half = |p: &envelope_core::Path| p.prefix(0.5);
        if let (Some(a), Some(r)) = (half(&b.path), half(&b.path.reversed())) {
            for n in 1..=admitted.min(3) {
                let residual = path_independence_check(f, n, &a, &r, Some(domain), &plan.tol)?;
                let ok = residual <= plan.tol.threshold(1.0);
                consistent &= ok;
                checks.push(json!({ "order": n, "residual": residual, "one_valued": ok }));
            }
        }
    }
    outcome(
        consistent,
        max_order_text(&verdict.max_order),
        json!({
            "max_order": verdict.max_order,
            "first_nonzero": verdict.first_nonzero,
            "path_independence": checks,
        }),
    )
}

/// Hull cells that fall inside a hole, thinned to at most `count`.
fn hole_cells(
    domain: &DomainSpec,
    grid: usize,
    count: usize,
) -> envelope_core::Result<Vec<ComplexValue>> {
    let hull = simply_connected_hull(&rasterize(domain, grid)?);
    let [x0, x1, y0, y1] = hull.bbox();
    let cell = ((x1 - x0) / grid as f64).max((y1 - y0) / grid as f64);
    let cells: Vec<ComplexValue> = hull
        .inside_centers()
        .into_iter()
        .filter(|&z| matches!(domain.classify(z), Region::Hole(_)))
        .filter(|&z| domain.distance_to_boundary(z) > 2.0 * cell)
        .collect();
    let step = cells.len().div_ceil(count.max(1)).max(1);
    Ok(cells.into_iter().step_by(step).collect())
}

fn run_extension(f: &Function, domain: &DomainSpec, plan: &Plan) -> envelope_core::Result<Outcome> {
    let ext = match Extension::new(f, domain, plan.k, &plan.tol) {
        Ok(e) => e,
        Err(Error::ExtensionRefused { hole, degree }) => {
            return outcome(
                true,
                format!("refused: moment of degree {degree} on hole {hole} is nonzero"),
                json!({ "permitted": false, "hole": hole, "degree": degree }),
            )
        }
        Err(e) => return Err(e),
    };
    let points = match &plan.points {
        Some(p) => p.clone(),
        None => {
            let mut p = extension::probe_points(domain, 8);
            p.extend(hole_cells(domain, plan.grid, 32)?);
            p
        }
    };
    let mut consistent = true;
    let mut max_residual: f64 = 0.0;
    let mut samples = Vec::new();
    for w in points {
        let region = domain.classify(w);
        let value = ext.evaluate_with(w, Contour::Primary)?;
        let (reference, residual) = match region {
            Region::Domain => ("f", (value - f.eval(w)?).norm()),
            _ => ("alternate_contour", ext.contour_discrepancy(w)?),
        };
        let ok = residual <= plan.tol.threshold(1.0 + value.norm());
        consistent &= ok;
        max_residual = max_residual.max(residual);
        samples.push(json!({
            "point": c(w),
            "region": format!("{region:?}"),
            "value": c(value),
            "reference": reference,
            "residual": residual,
        }));
    }
    outcome(
        consistent,
        format!("{} points, max residual {max_residual:.3e}", samples.len()),
        json!({ "permitted": true, "max_residual": max_residual, "samples": samples }),
    )
}

fn run_cross_verify(
    f: &Function,
    domain: &DomainSpec,
    plan: &Plan,
) -> envelope_core::Result<Outcome> {
    let cv = cross_verify(f, domain, plan.k, plan.n, &plan.tol)?;
    let all = cv.moments_vanish && cv.components_vanish && cv.extension_smooth;
    let equivalent = if cv.consistent { "yes" } else { "no" };
    outcome(
        cv.consistent,
        format!(
            "equivalent: {equivalent}; moments vanish {}, tails vanish {}, extension {}",
            cv.moments_vanish, cv.components_vanish, cv.extension_smooth
        ),
        json!({
            "equivalent": equivalent,
            "all_orders": all,
            "moments_vanish": cv.moments_vanish,
            "components_vanish": cv.components_vanish,
            "extension_smooth": cv.extension_smooth,
            "max_order": cv.verdict.max_order,
            "holes": cv.holes,
            "reconstruction_residual": cv.decomposition.reconstruction_residual,
            "max_contour_discrepancy": cv.extension.max_discrepancy,
        }),
    )
}

fn run_boundary_tower(curve: &SampledCurve, plan: &Plan) -> envelope_core::Result<Outcome> {
    let eq = boundary_equivalence(curve, plan.k, plan.n_max, &plan.tol)?;
    let failed = eq.tower.levels.iter().find(|l| !l.one_valued);
    let summary = match failed {
        Some(l) => format!(
            "tower depth {}, level {} defect {:.6e}",
            eq.tower.depth,
            l.order,
            l.closing_defect.norm()
        ),
        None => format!("tower depth {}, all levels one-valued", eq.tower.depth),
    };
    outcome(
        eq.consistent,
        summary,
        json!({
            "moments_vanish": eq.moments_vanish,
            "tower_one_valued": eq.tower_one_valued,
            "leading_zero_moments": eq.tower.leading_zero_moments,
            "depth": eq.tower.depth,
            "levels": eq.tower.levels,
            "moments": eq.moments,
            "ibp_discrete": eq.ibp_discrete,
            "ibp_analytic": eq.ibp_analytic,
        }),
    )
}

fn run_cauchy(curve: &SampledCurve, plan: &Plan) -> envelope_core::Result<Outcome> {
    let method = Method::best_for(curve);
    let points = match &plan.points {
        Some(p) => p.clone(),
        None => {
            let z = &curve.points()[..curve.intervals()];
            vec![z.iter().sum::<ComplexValue>() / z.len() as f64]
        }
    };
    let moments = boundary::boundary_moments(curve, plan.k, method, &plan.tol)?;
    let analytic_data = moments.zero.iter().all(|&z| z);
    let mut consistent = true;
    let mut samples = Vec::new();
    for w in points {
        let value = cauchy_transform(curve, w, method, &plan.tol)?;
        // With vanishing moments and a data function, the transform reproduces it.
        let residual = match (analytic_data, curve.density()) {
            (true, Some(d)) => {
                let r = (value - d(w)).norm();
                consistent &= r <= plan.tol.threshold(1.0 + value.norm());
                Some(r)
            }
            _ => None,
        };
        samples.push(json!({ "point": c(w), "value": c(value), "residual": residual }));
    }
    outcome(
        consistent,
        format!("{} points, moments vanish {analytic_data}", samples.len()),
        json!({ "method": method, "moments_vanish": analytic_data, "samples": samples }),
    )
}

fn run_nontangential(curve: &SampledCurve, plan: &Plan) -> envelope_core::Result<Outcome> {
    let method = Method::best_for(curve);
    let r = nontangential_check(
        curve,
        plan.zeta_index,
        &plan.radii,
        method,
        plan.k,
        &plan.tol,
    )?;
    let last = r.residuals.last().copied().unwrap_or(f64::NAN);
    outcome(
        r.expected_fail || r.decreasing,
        format!(
            "final residual {last:.3e}, decreasing {}, expected to fail {}",
            r.decreasing, r.expected_fail
        ),
        json!({ "method": method, "report": r }),
    )
}

fn run_chord_arc(curve: &SampledCurve, plan: &Plan) -> envelope_core::Result<Outcome> {
    let constant = chord_arc_constant(curve)?;
    let dq = difference_quotient_check(curve, None, plan.zeta_index, constant, &plan.tol)?;
    outcome(
        dq.bound_holds,
        format!(
            "chord-arc constant {constant:.6}, bound holds {}, tail monotone {}",
            dq.bound_holds, dq.tail_monotone
        ),
        json!({ "chord_arc": constant, "difference_quotient": dq }),
    )
}

fn run_check(check: Check, plan: &Plan) -> envelope_core::Result<Outcome> {
    match (&plan.input, check) {
        (Input::Domain(d), Check::Moments) => run_moments(function(plan), d, plan),
        (Input::Domain(d), Check::PrimitiveOrder) => run_primitive_order(function(plan), d, plan),
        (Input::Domain(d), Check::Extension) => run_extension(function(plan), d, plan),
        (Input::Domain(d), Check::CrossVerify) => run_cross_verify(function(plan), d, plan),
        (Input::Curve(cv), Check::BoundaryTower) => run_boundary_tower(cv, plan),
        (Input::Curve(cv), Check::Cauchy) => run_cauchy(cv, plan),
        (Input::Curve(cv), Check::Nontangential) => run_nontangential(cv, plan),
        (Input::Curve(cv), Check::ChordArc) => run_chord_arc(cv, plan),
        _ => Err(Error::InvalidArgument(format!(
            "{} does not apply to this input",
            check.name()
        ))),
    }
}

/// Runs every check of a validated plan in declared order.
pub fn run_scenario(config: &ScenarioConfig, plan: &Plan) -> Report {
    let start = Instant::now();
    let mut results = Vec::new();
    let mut timings = Vec::new();
    for &check in &plan.checks {
        let t = Instant::now();
        log::info!("running {}", check.name());
        let result = match run_check(check, plan) {
            Ok(o) => CheckResult {
                check: check.name(),
                status: if o.consistent {
                    Status::Ok
                } else {
                    Status::Inconsistent
                },
                summary: o.summary,
                values: o.values,
                tolerance_used: plan.tol,
            },
            Err(e) => {
                log::warn!("{} failed: {e}", check.name());
                CheckResult {
                    check: check.name(),
                    status: Status::Error,
                    summary: e.to_string(),
                    values: json!({ "error": { "kind": error_kind(&e), "message": e.to_string() } }),
                    tolerance_used: plan.tol,
                }
            }
        };
        results.push(result);
        timings.push(Timing {
            check: check.name(),
            seconds: t.elapsed().as_secs_f64(),
        });
    }
    Report {
        version: env!("CARGO_PKG_VERSION"),
        scenario: config.clone(),
        results,
        timings: Timings {
            checks: timings,
            total_seconds: start.elapsed().as_secs_f64(),
        },
    }
}
