//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line and then
//! asserts, so `cargo test --test acceptance -- --nocapture` gives a summary table.

use std::f64::consts::{FRAC_PI_2, TAU};

use envelope_core::boundary::{
    boundary_equivalence, boundary_moments, cauchy_transform, chord_arc_constant,
    difference_quotient_check, primitive_tower, Method, SampledCurve,
};
use envelope_core::extension::{cross_verify, Extension};
use envelope_core::geom::{rasterize, simply_connected_hull};
use envelope_core::moments::{
    circular_route, construct_primitive, derivative_check, max_primitive_order, moment, MaxOrder,
};
use envelope_core::{ComplexValue, DomainSpec, Function, Path, Tolerances};
use proptest::prelude::Rng;
use proptest::test_runner::{RngAlgorithm, TestRng};

type C = ComplexValue;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn report(n: usize, ok: bool, detail: impl std::fmt::Display) {
    println!(
        "criterion {n}: {} {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
}

fn tol() -> Tolerances {
    Tolerances {
        abs: 1e-9,
        rel: 1e-10,
        quad: 1e-12,
    }
}

fn unit() -> Path {
    Path::circle(c(0.0, 0.0), 1.0).unwrap()
}

fn annulus() -> DomainSpec {
    DomainSpec::annulus(c(0.0, 0.0), 0.5, 2.0).unwrap()
}

fn two_holes() -> DomainSpec {
    DomainSpec::new(
        Some(Path::circle(c(0.0, 0.0), 3.0).unwrap()),
        vec![
            Path::circle(c(-1.0, 0.0), 0.4).unwrap(),
            Path::circle(c(1.0, 0.0), 0.4).unwrap(),
        ],
    )
    .unwrap()
}

fn rng(seed: u8) -> TestRng {
    TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32])
}

fn literal(z: C) -> String {
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("({:e}{sign}{:e}i)", z.re, z.im.abs())
}

/// Residue oracle on the unit circle: `∮ zᵏ z^{−m} dz = 2πi` iff `k = m − 1`.
fn monomial_residue(k: i32, m: i32) -> C {
    if k - m == -1 {
        c(0.0, TAU)
    } else {
        c(0.0, 0.0)
    }
}

#[test]
fn criterion_1_residue_identities() {
    let mut worst = 0.0f64;
    for m in 1..=8 {
        let f = Function::parse(&format!("z^-{m}")).unwrap();
        for k in 0..=8 {
            let got = moment(&f, &unit(), k as usize, &tol()).unwrap().value;
            worst = worst.max((got - monomial_residue(k, m)).norm());
        }
    }
    let ok = worst <= 1e-10;
    report(1, ok, format!("max abs error {worst:.2e} (limit 1e-10)"));
    assert!(ok);
}

/// First degree with a nonzero moment for `Σ cₘ z^{−m}`, from residues alone.
fn ladder_oracle(terms: &[(i32, f64)], k_max: i32) -> Option<usize> {
    (0..=k_max).find_map(|k| {
        let total: f64 = terms.iter().filter(|t| k == t.0 - 1).map(|t| t.1).sum();
        (total != 0.0).then_some(k as usize)
    })
}

#[test]
fn criterion_2_primitive_order_ladder() {
    let d = annulus();
    let mut mismatches = Vec::new();
    for m in 1..=8 {
        let expected = ladder_oracle(&[(m, 1.0)], 32).unwrap();
        assert_eq!(expected, m as usize - 1);
        let f = Function::parse(&format!("1/z^{m}")).unwrap();
        let v = max_primitive_order(&f, &d, 32, &tol()).unwrap();
        if v.max_order != (MaxOrder::Finite { order: expected }) {
            mismatches.push((m, v.max_order));
        }
    }
    let ok = mismatches.is_empty();
    report(2, ok, format!("m=1..8 mismatches {mismatches:?}"));
    assert!(ok);
}

struct Rational {
    text: String,
    /// (residue, location, order)
    terms: Vec<(C, C, i32)>,
}

fn random_rational(
    rng: &mut TestRng,
    inside: &[(C, f64)],
    outside: (f64, f64),
    n_inside: usize,
) -> Rational {
    let mut terms = Vec::new();
    for h in 0..n_inside {
        let (center, radius) = inside[h % inside.len()];
        let q = center + C::from_polar(rng.random_range(0.0..radius), rng.random_range(0.0..TAU));
        let r = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        terms.push((r, q, rng.random_range(1..=3)));
    }
    for _ in 0..rng.random_range(1..=3) {
        let q = C::from_polar(
            rng.random_range(outside.0..outside.1),
            rng.random_range(0.0..TAU),
        );
        let r = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        terms.push((r, q, rng.random_range(1..=3)));
    }
    let text = terms
        .iter()
        .map(|&(r, q, p)| format!("{}/(z-{})^{p}", literal(r), literal(q)))
        .collect::<Vec<_>>()
        .join(" + ")
        + " + z^2";
    Rational { text, terms }
}

fn binom(n: i32, k: i32) -> f64 {
    if k < 0 || k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `∮ zᵏ f dz` over a curve enclosing exactly the poles in `inside`.
fn moment_oracle(terms: &[(C, C, i32)], k: i32) -> C {
    terms
        .iter()
        .filter(|t| k >= t.2 - 1)
        .map(|&(r, q, p)| c(0.0, TAU) * r * binom(k, p - 1) * q.powi(k - p + 1))
        .sum()
}

/// `a₋ₙ` about `center` from partial fractions.
fn coefficient_oracle(terms: &[(C, C, i32)], center: C, n: i32) -> C {
    terms
        .iter()
        .filter(|t| n >= t.2)
        .map(|&(r, q, p)| r * binom(n - 1, p - 1) * (q - center).powi(n - p))
        .sum()
}

#[test]
fn criterion_3_equivalence_harness() {
    let tol = tol();
    let (k_max, n_terms) = (12, 13);
    let mut rng = rng(3);
    let mut failures = Vec::new();
    for case in 0..20 {
        let (domain, holes, outside) = if case % 2 == 0 {
            (annulus(), vec![(c(0.0, 0.0), 0.35)], (2.5, 4.0))
        } else {
            (
                two_holes(),
                vec![(c(-1.0, 0.0), 0.25), (c(1.0, 0.0), 0.25)],
                (3.5, 5.0),
            )
        };
        let poles_inside = case >= 10;
        let rat = random_rational(
            &mut rng,
            &holes,
            outside,
            if poles_inside { holes.len() } else { 0 },
        );
        let f = Function::parse(&rat.text).unwrap();
        let r = cross_verify(&f, &domain, k_max, n_terms, &tol).unwrap();
        let mut ok = r.consistent;
        if !poles_inside {
            ok &= r.moments_vanish && r.components_vanish && r.extension_smooth;
        } else {
            ok &= !r.moments_vanish && !r.components_vanish && !r.extension_smooth;
            for (j, &(center, radius)) in holes.iter().enumerate() {
                let own: Vec<_> = rat
                    .terms
                    .iter()
                    .copied()
                    .filter(|t| (t.1 - center).norm() < radius)
                    .collect();
                let k = (0..=k_max as i32)
                    .find(|&k| moment_oracle(&own, k).norm() > 1e-6)
                    .map(|k| k as usize);
                let finding = &r.holes[j];
                ok &= finding.first_nonzero_moment == k;
                ok &= finding.first_nonzero_coefficient == k.map(|k| k + 1);
                if let (Some(k), Some(a)) = (k, finding.coefficient) {
                    let want = coefficient_oracle(&own, domain.witnesses()[j], k as i32 + 1);
                    ok &= (a - want).norm() <= 1e-9 * (1.0 + want.norm());
                }
            }
        }
        if !ok {
            failures.push((case, rat.text.clone()));
        }
    }
    let ok = failures.is_empty();
    report(
        3,
        ok,
        format!("20 rationals, inconsistent cases {:?}", failures),
    );
    assert!(ok);
}

#[test]
fn criterion_4_extension_accuracy() {
    let tol = tol();
    let mut rng = rng(4);
    let (mut worst_rel, mut worst_contour) = (0.0f64, 0.0f64);
    for (domain, outside) in [(annulus(), (2.5, 4.0)), (two_holes(), (3.5, 5.0))] {
        let hull = simply_connected_hull(&rasterize(&domain, 64).unwrap());
        let cells: Vec<C> = hull
            .inside_centers()
            .into_iter()
            .filter(|&z| domain.distance_to_boundary(z) > 1e-6)
            .collect();
        let (holes, dom): (Vec<C>, Vec<C>) = cells.into_iter().partition(|&z| !domain.contains(z));
        let pick = |v: &[C], n: usize| (0..n).map(|i| v[i * v.len() / n]).collect::<Vec<_>>();
        let mut points = pick(&holes, 25);
        points.extend(pick(&dom, 25));
        for _ in 0..3 {
            let rat = random_rational(&mut rng, &[], outside, 0);
            let f = Function::parse(&rat.text).unwrap();
            let ext = Extension::new(&f, &domain, 12, &tol).unwrap();
            for &w in &points {
                let direct: C = rat
                    .terms
                    .iter()
                    .map(|&(r, q, p)| r / (w - q).powi(p))
                    .sum::<C>()
                    + w * w;
                let got = ext.evaluate(w).unwrap();
                worst_rel = worst_rel.max((got - direct).norm() / direct.norm());
                worst_contour = worst_contour.max(ext.contour_discrepancy(w).unwrap());
            }
        }
    }
    let ok = worst_rel <= 1e-8 && worst_contour <= 2e-9;
    report(
        4,
        ok,
        format!("max rel error {worst_rel:.2e} (limit 1e-8), contour discrepancy {worst_contour:.2e} (limit 2e-9)"),
    );
    assert!(ok);
}

#[test]
fn criterion_5_hull_correctness() {
    let ann = rasterize(&annulus(), 256).unwrap();
    let disc = rasterize(&DomainSpec::disc(c(0.0, 0.0), 2.0).unwrap(), 256).unwrap();
    let hull = simply_connected_hull(&ann);
    let differing = hull
        .mask()
        .iter()
        .zip(disc.mask())
        .filter(|(a, b)| a != b)
        .count();
    let mut ok = differing == 0;

    let mut rng = rng(5);
    let mut bad = Vec::new();
    for trial in 0..10 {
        let count = rng.random_range(2..=4);
        let mut holes: Vec<(C, f64)> = Vec::new();
        while holes.len() < count {
            let z = C::from_polar(rng.random_range(0.0..2.0), rng.random_range(0.0..TAU));
            let r = rng.random_range(0.15..0.5);
            if z.norm() + r < 2.8 && holes.iter().all(|&(w, s)| (z - w).norm() > r + s + 0.1) {
                holes.push((z, r));
            }
        }
        let d = DomainSpec::new(
            Some(Path::circle(c(0.0, 0.0), 3.0).unwrap()),
            holes
                .iter()
                .map(|&(z, r)| Path::circle(z, r).unwrap())
                .collect(),
        )
        .unwrap();
        let g = rasterize(&d, 96).unwrap();
        let h = simply_connected_hull(&g);
        let idempotent = simply_connected_hull(&h) == h;
        let contains = g.mask().iter().zip(h.mask()).all(|(&a, &b)| !a || b);
        // Pointwise oracle from winding numbers, away from cell-scale boundary effects.
        let (nx, ny) = h.resolution();
        let [x0, x1, ..] = h.bbox();
        let cell = (x1 - x0) / nx as f64;
        let oracle = (0..ny).all(|j| {
            (0..nx).all(|i| {
                let z = h.cell_center(i, j);
                d.distance_to_boundary(z) < cell || h.get(i, j) == d.in_hull(z)
            })
        });
        if !(idempotent && contains && oracle) {
            bad.push(trial);
        }
    }
    ok &= bad.is_empty();
    report(
        5,
        ok,
        format!("annulus hull vs disc: {differing} differing cells of 65536; failing random masks {bad:?}"),
    );
    assert!(ok);
}

#[test]
fn criterion_6_boundary_duality() {
    let tol = tol();
    let n_max = 6;
    type Data = fn(C) -> C;
    let family: Vec<(&str, Data, usize)> = vec![
        ("1", |_| c(1.0, 0.0), n_max),
        ("z", |z| z, n_max),
        ("z^2", |z| z * z, n_max),
        ("z^3", |z| z * z * z, n_max),
        ("1/z", |z| z.inv(), 0),
        ("1/z^2", |z| z.powi(-2), 1),
        ("1/z^3", |z| z.powi(-3), 2),
        ("1/z^4", |z| z.powi(-4), 3),
        ("conj(z)", |z| z.conj(), 0),
    ];
    let mut ok = true;
    let mut worst_ibp = 0.0f64;
    for &(name, g, expected) in &family {
        let curve = SampledCurve::from_path(&unit(), 512, g).unwrap();
        let tower = primitive_tower(&curve, n_max, &tol).unwrap();
        let analytic = boundary_moments(&curve, n_max - 1, Method::Analytic, &tol).unwrap();
        let leading = analytic.leading_zeros().min(n_max);
        if tower.depth != leading || tower.depth != expected {
            println!(
                "  {name}: depth {} leading zeros {leading} expected {expected}",
                tower.depth
            );
            ok = false;
        }
        let eq = boundary_equivalence(&curve, n_max - 1, n_max, &tol).unwrap();
        ok &= eq.consistent;
        for l in eq.ibp_analytic.unwrap() {
            worst_ibp = worst_ibp.max(l.residual);
        }
    }
    ok &= worst_ibp <= 1e-9;

    let warp = |s: f64| s + 0.5 * (TAU * s).sin() / TAU;
    let discrete = |m: usize| {
        let curve = SampledCurve::from_path_warped(&unit(), m, |z| z * z + z.inv(), warp).unwrap();
        boundary_equivalence(&curve, 2, 3, &tol)
            .unwrap()
            .ibp_discrete
    };
    let (coarse, fine) = (discrete(256), discrete(512));
    let ratios: Vec<f64> = coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| a.residual / b.residual)
        .collect();
    ok &= ratios.iter().all(|r| (3.5..=4.5).contains(r));
    report(
        6,
        ok,
        format!("analytic parts residual {worst_ibp:.2e} (limit 1e-9), discrete 256/512 ratios {ratios:.3?}"),
    );
    assert!(ok);
}

#[test]
fn criterion_7_cauchy_transform_oracles() {
    let tol = tol();
    let mut rng = rng(7);
    let points: Vec<C> = (0..20)
        .map(|_| {
            C::from_polar(
                0.9 * rng.random_range(0.0f64..1.0).sqrt(),
                rng.random_range(0.0..TAU),
            )
        })
        .collect();
    let mut worst = 0.0f64;
    for n in 0..=6 {
        let curve = SampledCurve::from_path(&unit(), 256, move |z| z.powi(n)).unwrap();
        for &w in &points {
            let phi = cauchy_transform(&curve, w, Method::Analytic, &tol).unwrap();
            worst = worst.max((phi - w.powi(n)).norm());
        }
    }
    let curve = SampledCurve::from_path(&unit(), 256, |z| z.conj()).unwrap();
    let mut worst_conj = 0.0f64;
    for &w in &points {
        worst_conj = worst_conj.max(
            cauchy_transform(&curve, w, Method::Analytic, &tol)
                .unwrap()
                .norm(),
        );
    }
    let ok = worst <= 1e-9 && worst_conj <= 1e-9;
    report(
        7,
        ok,
        format!("z^n residual {worst:.2e}, conj residual {worst_conj:.2e} (limit 1e-9)"),
    );
    assert!(ok);
}

#[test]
fn criterion_8_chord_arc_and_difference_quotients() {
    let tol = tol();
    let curve = SampledCurve::from_path(&unit(), 1024, |z| z).unwrap();
    let k = chord_arc_constant(&curve).unwrap();
    let mut ok = (k / FRAC_PI_2 - 1.0).abs() <= 0.02;
    let mut details = format!("chord-arc {k:.5} vs pi/2");
    type Data = fn(C) -> C;
    let data: [(&str, Data); 2] = [("z", |z| z), ("conj(z)", |z| z.conj())];
    for (name, g) in data {
        let curve = SampledCurve::from_path(&unit(), 1024, g).unwrap();
        let r = difference_quotient_check(&curve, None, 0, FRAC_PI_2, &tol).unwrap();
        ok &= r.bound_holds && r.tail_monotone;
        let last = r.steps.last().unwrap().residual;
        details += &format!(
            "; {name}: {} steps, final residual {last:.2e}",
            r.steps.len()
        );
    }
    report(8, ok, details);
    assert!(ok);
}

#[test]
fn criterion_9_derivative_checks() {
    let tol = tol();
    let d = annulus();
    let z0 = c(1.2, 0.0);
    let route = circular_route(c(0.0, 0.0), z0);
    let points: Vec<C> = (1..=20)
        .map(|i| C::from_polar(1.2, TAU * i as f64 / 21.0))
        .collect();
    let cases = [
        ("1/(z-5)", 1),
        ("1/(z-5)", 2),
        ("1/(z-5)", 3),
        ("z^3 - 2z + 1", 1),
        ("z^3 - 2z + 1", 3),
        ("(0.5+1i)z^4 + z", 2),
        ("1/z^2", 1),
    ];
    let mut worst = 0.0f64;
    for (text, n) in cases {
        let f = Function::parse(text).unwrap();
        let r = derivative_check(&f, n, &points, 1e-4, &route, Some(&d), &tol).unwrap();
        worst = worst.max(r);
    }
    // Symbolic primitives as independent values: −1/z + 1/z₀ and the polynomial one.
    let f = Function::parse("1/z^2").unwrap();
    let mut worst_value = 0.0f64;
    for &p in &points {
        let v = construct_primitive(&f, 1, &route(p).unwrap(), Some(&d), &tol)
            .unwrap()
            .value;
        worst_value = worst_value.max((v - (-1.0 / p + 1.0 / z0)).norm());
    }
    let g = Function::parse("z^3 - 2z + 1").unwrap();
    for &p in &points {
        let v = construct_primitive(&g, 1, &route(p).unwrap(), Some(&d), &tol)
            .unwrap()
            .value;
        let prim = |z: C| z.powi(4) / 4.0 - z * z + z;
        worst_value = worst_value.max((v - (prim(p) - prim(z0))).norm());
    }
    let ok = worst <= 1e-5 && worst_value <= 1e-10;
    report(
        9,
        ok,
        format!("max derivative residual {worst:.2e} (limit 1e-5), primitive value error {worst_value:.2e}"),
    );
    assert!(ok);
}
