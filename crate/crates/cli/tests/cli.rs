use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::process::Command;

use envelope_cli::{load, read_config, run_scenario, validate, ScenarioConfig, Status};
use serde_json::{json, Value};

fn circle(r: f64) -> Value {
    json!([{"kind": "arc", "center": [0, 0], "r": r, "t0": 0, "t1": TAU, "ccw": true}])
}

fn annulus() -> Value {
    json!({"outer": circle(2.0), "holes": [circle(0.5)]})
}

fn config(v: Value) -> ScenarioConfig {
    serde_json::from_value(v).unwrap()
}

fn diagnostics(v: Value) -> Vec<(String, String)> {
    match validate(&config(v), Path::new(".")) {
        Ok(_) => Vec::new(),
        Err(d) => d.into_iter().map(|d| (d.path, d.message)).collect(),
    }
}

fn run(v: Value) -> Value {
    let cfg = config(v);
    let plan = validate(&cfg, Path::new(".")).unwrap();
    serde_json::from_str(&run_scenario(&cfg, &plan).to_json()).unwrap()
}

fn write_scenario(dir: &Path, v: &Value) -> PathBuf {
    let path = dir.join("scenario.json");
    std::fs::write(&path, serde_json::to_string(v).unwrap()).unwrap();
    path
}

fn conjugate_csv(dir: &Path, m: usize) {
    let mut text = String::from("t,re_z,im_z,re_f,im_f\n");
    for i in 0..=m {
        let t = TAU * i as f64 / m as f64;
        let (x, y) = if i == m {
            (1.0, 0.0)
        } else {
            (t.cos(), t.sin())
        };
        text.push_str(&format!("{t},{x},{y},{x},{}\n", -y));
    }
    std::fs::write(dir.join("curve.csv"), text).unwrap();
}

fn envelope(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_envelope"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn missing_function_is_reported_at_its_path() {
    let d = diagnostics(json!({"domain": annulus(), "checks": ["moments"]}));
    assert_eq!(d.len(), 1);
    assert_eq!(d[0].0, "function");
}

#[test]
fn negative_degree_is_rejected() {
    let d = diagnostics(
        json!({"function": "1/z", "domain": annulus(), "checks": ["moments"], "K": -1}),
    );
    assert!(d.contains(&("K".into(), "K must be ≥ 0".into())), "{d:?}");
}

#[test]
fn boundary_check_on_domain_is_incompatible() {
    let d = diagnostics(json!({
        "function": "1/z", "domain": annulus(), "checks": ["moments", "boundary_tower"]
    }));
    assert_eq!(d.len(), 1);
    assert_eq!(d[0].0, "checks[1]");
    assert!(d[0].1.contains("curve"));
}

#[test]
fn several_problems_are_reported_together() {
    let d = diagnostics(json!({
        "function": "1/(z", "domain": annulus(), "checks": ["bogus"], "grid": 2,
        "tolerances": {"abs": 0.0}
    }));
    let paths: Vec<&str> = d.iter().map(|(p, _)| p.as_str()).collect();
    for p in ["checks[0]", "grid", "tolerances.abs", "function"] {
        assert!(paths.contains(&p), "{p} missing from {paths:?}");
    }
}

#[test]
fn unknown_fields_fail_to_parse() {
    assert!(
        serde_json::from_value::<ScenarioConfig>(json!({"function": "z", "colour": 1})).is_err()
    );
}

#[test]
fn inverse_square_has_max_order_one() {
    let r = run(json!({
        "function": "1/z^2", "domain": annulus(), "checks": ["primitive_order"], "K": 6
    }));
    let res = &r["results"][0];
    assert_eq!(res["status"], "ok");
    assert_eq!(
        res["values"]["max_order"],
        json!({"kind": "finite", "order": 1})
    );
    assert_eq!(res["values"]["path_independence"][0]["one_valued"], true);
}

#[test]
fn far_pole_is_equivalent_on_all_sides() {
    let r = run(json!({
        "function": "1/(z-5)", "domain": annulus(), "checks": ["cross_verify"], "K": 10
    }));
    let v = &r["results"][0]["values"];
    assert_eq!(r["results"][0]["status"], "ok");
    assert_eq!(v["equivalent"], "yes");
    assert_eq!(v["all_orders"], true);
}

#[test]
fn conjugate_tower_fails_at_first_level() {
    let dir = tempfile::tempdir().unwrap();
    let m = 128;
    conjugate_csv(dir.path(), m);
    let path = write_scenario(
        dir.path(),
        &json!({"curve": {"csv": "curve.csv"}, "checks": ["boundary_tower"], "K": 3}),
    );
    let cfg = read_config(&path).unwrap();
    let plan = load(&cfg, &path).unwrap();
    let report = run_scenario(&cfg, &plan);
    assert_eq!(report.results[0].status, Status::Ok);
    let levels = &report.results[0].values["levels"];
    assert_eq!(levels[0]["one_valued"], false);
    let d = &levels[0]["closing_defect"];
    let defect = (d[0].as_f64().unwrap().powi(2) + d[1].as_f64().unwrap().powi(2)).sqrt();
    // Chord sums of z̄ around the inscribed polygon.
    let oracle = m as f64 * (TAU / m as f64).sin();
    assert!((defect - oracle).abs() < 1e-12, "{defect} vs {oracle}");
    assert!((defect - TAU).abs() < 2e-3 * TAU);
}

#[test]
fn reports_are_deterministic_apart_from_timings() {
    let v = json!({
        "function": "1/(z-5) + 1/z^3", "domain": annulus(),
        "checks": ["moments", "cross_verify"], "K": 6
    });
    let mut a = run(v.clone());
    let mut b = run(v);
    a.as_object_mut().unwrap().remove("timings");
    b.as_object_mut().unwrap().remove("timings");
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}

#[test]
fn every_result_has_the_stable_fields() {
    let r = run(json!({
        "function": "1/z", "domain": annulus(), "checks": ["moments", "extension", "cross_verify"], "K": 3
    }));
    assert_eq!(r["results"].as_array().unwrap().len(), 3);
    for res in r["results"].as_array().unwrap() {
        for key in ["check", "status", "values", "tolerance_used"] {
            assert!(res.get(key).is_some(), "{key} missing");
        }
    }
    assert_eq!(r["results"][1]["values"]["permitted"], false);
    assert!(r.get("version").is_some() && r.get("scenario").is_some());
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();

    let ok = write_scenario(
        dir,
        &json!({"function": "1/(z-5)", "domain": annulus(), "checks": ["cross_verify"], "K": 8}),
    );
    let (code, stdout, _) = envelope(&["run", "--scenario", ok.to_str().unwrap()]);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["results"][0]["values"]["equivalent"], "yes");

    let pole = dir.join("pole.json");
    std::fs::write(
        &pole,
        json!({"function": "1/(z-1)", "domain": annulus(), "checks": ["moments"]}).to_string(),
    )
    .unwrap();
    let (code, _, _) = envelope(&["run", "--scenario", pole.to_str().unwrap()]);
    assert_eq!(code, 1);

    // Approaching the boundary from far to near reversed: residuals grow.
    let wrong = dir.join("wrong.json");
    std::fs::write(
        &wrong,
        json!({
            "curve": {"path": circle(1.0), "samples": 128, "data": "exp(z)"},
            "checks": ["nontangential"], "radii": [1e-4, 1e-1], "K": 4
        })
        .to_string(),
    )
    .unwrap();
    let (code, _, _) = envelope(&[
        "run",
        "--scenario",
        wrong.to_str().unwrap(),
        "--format",
        "text",
    ]);
    assert_eq!(code, 2);

    let bad = dir.join("bad.json");
    std::fs::write(
        &bad,
        json!({"domain": annulus(), "checks": ["moments"], "K": -1}).to_string(),
    )
    .unwrap();
    let (code, _, stderr) = envelope(&["validate", "--scenario", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(
        stderr.contains("function:") && stderr.contains("K must be ≥ 0"),
        "{stderr}"
    );

    let (code, stdout, _) = envelope(&["validate", "--scenario", ok.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.contains("cross_verify"));
}

#[test]
fn overrides_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let s = write_scenario(
        dir.path(),
        &json!({"function": "1/z^2", "domain": annulus(), "checks": ["moments"]}),
    );
    let out = dir.path().join("report.json");
    let (code, stdout, _) = envelope(&[
        "run",
        "--scenario",
        s.to_str().unwrap(),
        "--max-degree",
        "3",
        "--tol-abs",
        "1e-8",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(report["scenario"]["K"], 3);
    assert_eq!(report["results"][0]["tolerance_used"]["abs"], 1e-8);
    assert_eq!(
        report["results"][0]["values"]["curves"][0]["values"]
            .as_array()
            .unwrap()
            .len(),
        4
    );
}
