use std::fmt;
use std::path::{Path as FsPath, PathBuf};

use envelope_core::boundary::SampledCurve;
use envelope_core::moments::{DEFAULT_K, MAX_DEGREE};
use envelope_core::{ComplexValue, DomainSpec, Function, Holomorphic, Path, Tolerances};
use serde::{Deserialize, Serialize};

/// A scenario file as written by the user. Fields are kept loose so that
/// [`validate`] can report every problem with its field path.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveSource>,
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<i64>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta_index: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
}

/// Boundary data either from a CSV file or sampled from a path.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSource {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<i64>,
    /// Expression for the data; defaults to the scenario `function`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<String>,
    /// Use the complex conjugate of the data expression.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub conjugate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Moments,
    PrimitiveOrder,
    Extension,
    CrossVerify,
    BoundaryTower,
    Cauchy,
    Nontangential,
    ChordArc,
}

impl Check {
    pub const ALL: [Check; 8] = [
        Check::Moments,
        Check::PrimitiveOrder,
        Check::Extension,
        Check::CrossVerify,
        Check::BoundaryTower,
        Check::Cauchy,
        Check::Nontangential,
        Check::ChordArc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Moments => "moments",
            Check::PrimitiveOrder => "primitive_order",
            Check::Extension => "extension",
            Check::CrossVerify => "cross_verify",
            Check::BoundaryTower => "boundary_tower",
            Check::Cauchy => "cauchy",
            Check::Nontangential => "nontangential",
            Check::ChordArc => "chord_arc",
        }
    }

    pub fn needs_curve(self) -> bool {
        matches!(
            self,
            Check::BoundaryTower | Check::Cauchy | Check::Nontangential | Check::ChordArc
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Text,
}

/// One validation problem, located by a dotted field path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

pub enum Input {
    Domain(DomainSpec),
    Curve(SampledCurve),
}

/// A validated scenario, ready to run.
pub struct Plan {
    pub function: Option<Function>,
    pub input: Input,
    pub checks: Vec<Check>,
    pub k: usize,
    pub n_max: usize,
    pub n: usize,
    pub tol: Tolerances,
    pub grid: usize,
    pub format: Format,
    pub points: Option<Vec<ComplexValue>>,
    pub zeta_index: usize,
    pub radii: Vec<f64>,
}

pub const DEFAULT_N_MAX: usize = 6;
pub const DEFAULT_GRID: usize = 256;
pub const DEFAULT_SAMPLES: usize = 512;
pub const DEFAULT_RADII: [f64; 5] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];

struct Diagnostics(Vec<Diagnostic>);

impl Diagnostics {
    fn push(&mut self, path: impl Into<String>, message: impl fmt::Display) {
        self.0.push(Diagnostic {
            path: path.into(),
            message: message.to_string(),
        });
    }
}

fn nonneg(d: &mut Diagnostics, name: &str, v: Option<i64>, default: usize) -> usize {
    match v {
        Some(x) if x < 0 => {
            d.push(name, format!("{name} must be ≥ 0"));
            default
        }
        Some(x) => x as usize,
        None => default,
    }
}

fn data_function(d: &mut Diagnostics, path: &str, text: &str) -> Option<Function> {
    match Function::parse(text) {
        Ok(f) => Some(f),
        Err(e) => {
            d.push(path, e);
            None
        }
    }
}

fn load_curve(
    d: &mut Diagnostics,
    src: &CurveSource,
    function: Option<&str>,
    base: &FsPath,
) -> Option<SampledCurve> {
    let path = match &src.path {
        Some(v) => match serde_json::from_value::<Path>(v.clone()) {
            Ok(p) if p.is_closed() => Some(p),
            Ok(_) => {
                d.push("curve.path", "path must be closed");
                None
            }
            Err(e) => {
                d.push("curve.path", e);
                return None;
            }
        },
        None => None,
    };
    match (&src.csv, path) {
        (Some(_), Some(_)) if src.samples.is_some() => {
            d.push("curve", "give either csv or path with samples, not both");
            None
        }
        (Some(file), path) => {
            let full: PathBuf = base.join(file);
            let curve = std::fs::File::open(&full)
                .map_err(|e| format!("cannot open {}: {e}", full.display()))
                .and_then(|f| SampledCurve::read_csv(f).map_err(|e| e.to_string()));
            let curve = match curve {
                Ok(c) => c,
                Err(e) => {
                    d.push("curve.csv", e);
                    return None;
                }
            };
            match path {
                Some(p) => match curve.with_path(p) {
                    Ok(c) => Some(c),
                    Err(e) => {
                        d.push("curve.path", e);
                        None
                    }
                },
                None => Some(curve),
            }
        }
        (None, Some(p)) => {
            let m = nonneg(d, "curve.samples", src.samples, DEFAULT_SAMPLES);
            let (text, at) = match (&src.data, function) {
                (Some(t), _) => (t.as_str(), "curve.data"),
                (None, Some(t)) => (t, "function"),
                (None, None) => {
                    d.push("curve.data", "boundary data expression is required");
                    return None;
                }
            };
            let f = data_function(d, at, text)?;
            let conj = src.conjugate;
            let density = move |z: ComplexValue| {
                let v = f.eval(z).unwrap_or(ComplexValue::new(f64::NAN, f64::NAN));
                if conj {
                    v.conj()
                } else {
                    v
                }
            };
            match SampledCurve::from_path(&p, m, density) {
                Ok(c) => Some(c),
                Err(e) => {
                    d.push("curve", e);
                    None
                }
            }
        }
        (None, None) => {
            d.push("curve", "curve needs a csv file or a path");
            None
        }
    }
}

/// Checks a scenario; `base` resolves relative CSV paths. Returns every problem found.
pub fn validate(config: &ScenarioConfig, base: &FsPath) -> Result<Plan, Vec<Diagnostic>> {
    let mut d = Diagnostics(Vec::new());

    let mut checks = Vec::new();
    if config.checks.is_empty() {
        d.push("checks", "at least one check is required");
    }
    for (i, name) in config.checks.iter().enumerate() {
        match Check::ALL.iter().find(|c| c.name() == name) {
            Some(&c) => checks.push((i, c)),
            None => d.push(
                format!("checks[{i}]"),
                format!(
                    "unknown check {name:?}; expected one of {}",
                    Check::ALL.map(Check::name).join(", ")
                ),
            ),
        }
    }

    let k = nonneg(&mut d, "K", config.k, DEFAULT_K);
    if k > MAX_DEGREE {
        d.push("K", format!("K must be at most {MAX_DEGREE}"));
    }
    let n_max = nonneg(&mut d, "n_max", config.n_max, DEFAULT_N_MAX);
    let n = nonneg(&mut d, "N", config.n, k + 1);
    let grid = nonneg(&mut d, "grid", config.grid, DEFAULT_GRID);
    if grid < 8 {
        d.push("grid", "grid must be at least 8");
    }
    let zeta_index = nonneg(&mut d, "zeta_index", config.zeta_index, 0);
    let tol = config.tolerances.unwrap_or_default();
    for (name, v) in [("abs", tol.abs), ("rel", tol.rel), ("quad", tol.quad)] {
        if !(v > 0.0 && v.is_finite()) {
            d.push(format!("tolerances.{name}"), "tolerance must be positive");
        }
    }
    let format = match config.format.as_deref() {
        None | Some("json") => Format::Json,
        Some("text") => Format::Text,
        Some(other) => {
            d.push(
                "format",
                format!("unknown format {other:?}; expected json or text"),
            );
            Format::Json
        }
    };
    let radii = config.radii.clone().unwrap_or(DEFAULT_RADII.to_vec());
    if radii.is_empty() || radii.iter().any(|&r| r.is_nan() || r <= 0.0) {
        d.push(
            "radii",
            "radii must be a non-empty list of positive numbers",
        );
    }
    let points = config.points.as_ref().map(|p| {
        p.iter()
            .map(|&[re, im]| ComplexValue::new(re, im))
            .collect()
    });

    let input = match (&config.domain, &config.curve) {
        (Some(_), Some(_)) => {
            d.push("domain", "give either a domain or a curve, not both");
            None
        }
        (None, None) => {
            d.push("domain", "a domain or a curve is required");
            None
        }
        (Some(v), None) => match serde_json::from_value::<DomainSpec>(v.clone()) {
            Ok(dom) => Some(Input::Domain(dom)),
            Err(e) => {
                d.push("domain", e);
                None
            }
        },
        (None, Some(src)) => {
            load_curve(&mut d, src, config.function.as_deref(), base).map(Input::Curve)
        }
    };

    let is_curve = config.curve.is_some() && config.domain.is_none();
    for &(i, c) in &checks {
        if c.needs_curve() && !is_curve {
            d.push(
                format!("checks[{i}]"),
                format!("{} needs a curve input, not a domain", c.name()),
            );
        } else if !c.needs_curve() && is_curve {
            d.push(
                format!("checks[{i}]"),
                format!("{} needs a domain input, not a curve", c.name()),
            );
        }
    }

    let function = match &config.function {
        Some(text) => data_function(&mut d, "function", text),
        None => {
            if config.domain.is_some() {
                d.push("function", "function is required for a domain scenario");
            }
            None
        }
    };

    match input {
        Some(input) if d.0.is_empty() => Ok(Plan {
            function,
            input,
            checks: checks.into_iter().map(|(_, c)| c).collect(),
            k,
            n_max,
            n,
            tol,
            grid,
            format,
            points,
            zeta_index,
            radii,
        }),
        _ => Err(d.0),
    }
}
