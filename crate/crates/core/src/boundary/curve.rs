use std::fmt;
use std::io;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::geom::Path;
use crate::{ComplexValue, Error, Result};

const CLOSURE_TOL: f64 = 1e-12;

/// Boundary data as a function of the curve point.
pub type Density = Arc<dyn Fn(ComplexValue) -> ComplexValue + Send + Sync>;

/// A closed curve sampled at nodes `t₀ < … < t_M` with `z_M = z₀`, carrying boundary
/// data `f_i` at each node and, when known, the exact path and data function.
#[derive(Clone)]
pub struct SampledCurve {
    t: Vec<f64>,
    z: Vec<ComplexValue>,
    f: Vec<ComplexValue>,
    path: Option<Path>,
    density: Option<Density>,
}

impl fmt::Debug for SampledCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledCurve")
            .field("intervals", &self.intervals())
            .field("path", &self.path)
            .field("density", &self.density.as_ref().map(|_| "fn"))
            .finish()
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    t: f64,
    re_z: f64,
    im_z: f64,
    re_f: f64,
    im_f: f64,
}

impl SampledCurve {
    /// Builds a curve from raw nodes. The last point must repeat the first.
    pub fn from_samples(t: Vec<f64>, z: Vec<ComplexValue>, f: Vec<ComplexValue>) -> Result<Self> {
        if t.len() != z.len() || t.len() != f.len() {
            return Err(Error::InvalidCurve(
                "node, point and value counts differ".into(),
            ));
        }
        if t.len() < 4 {
            return Err(Error::InvalidCurve(
                "a closed curve needs at least 3 intervals".into(),
            ));
        }
        if let Some(i) = t.windows(2).position(|w| w[1].is_nan() || w[1] <= w[0]) {
            return Err(Error::InvalidCurve(format!(
                "parameter nodes must increase strictly (row {})",
                i + 1
            )));
        }
        let (first, last) = (z[0], z[z.len() - 1]);
        if (first - last).norm() > CLOSURE_TOL {
            return Err(Error::InvalidCurve(format!(
                "curve is not closed: first point {first}, last point {last}"
            )));
        }
        if z.iter().chain(&f).any(|v| !v.is_finite()) {
            return Err(Error::InvalidCurve("non-finite sample".into()));
        }
        Ok(Self {
            t,
            z,
            f,
            path: None,
            density: None,
        })
    }

    /// `m` intervals at equal arclength fractions of `path`, with data `density`.
    pub fn from_path<D>(path: &Path, m: usize, density: D) -> Result<Self>
    where
        D: Fn(ComplexValue) -> ComplexValue + Send + Sync + 'static,
    {
        Self::from_path_warped(path, m, density, |s| s)
    }

    /// Like [`from_path`](Self::from_path) but with nodes at fractions `warp(i/m)`;
    /// `warp` must be increasing with `warp(0) = 0` and `warp(1) = 1`.
    pub fn from_path_warped<D, W>(path: &Path, m: usize, density: D, warp: W) -> Result<Self>
    where
        D: Fn(ComplexValue) -> ComplexValue + Send + Sync + 'static,
        W: Fn(f64) -> f64,
    {
        if !path.is_closed() {
            return Err(Error::InvalidCurve("path is not closed".into()));
        }
        let t: Vec<f64> = (0..=m).map(|i| warp(i as f64 / m as f64)).collect();
        let mut z: Vec<ComplexValue> = t.iter().map(|&s| path.point_at_fraction(s)).collect();
        z[m] = z[0];
        let f = z.iter().map(|&p| density(p)).collect();
        let mut curve = Self::from_samples(t, z, f)?;
        curve.path = Some(path.clone());
        curve.density = Some(Arc::new(density));
        Ok(curve)
    }

    /// Attaches the exact path; its length must be within 1% of the polygonal length.
    pub fn with_path(mut self, path: Path) -> Result<Self> {
        let poly = self.polygon_length();
        let exact = path.length();
        if (poly - exact).abs() > 0.01 * exact {
            return Err(Error::InvalidCurve(format!(
                "sampled length {poly} differs from path length {exact} by more than 1%"
            )));
        }
        self.path = Some(path);
        Ok(self)
    }

    pub fn with_density<D>(mut self, density: D) -> Self
    where
        D: Fn(ComplexValue) -> ComplexValue + Send + Sync + 'static,
    {
        self.density = Some(Arc::new(density));
        self
    }

    /// The same curve carrying new data values.
    pub fn with_values(&self, f: Vec<ComplexValue>) -> Result<Self> {
        if f.len() != self.z.len() {
            return Err(Error::InvalidCurve(
                "value count differs from node count".into(),
            ));
        }
        Ok(Self {
            t: self.t.clone(),
            z: self.z.clone(),
            f,
            path: self.path.clone(),
            density: None,
        })
    }

    pub fn read_csv<R: io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let (mut t, mut z, mut f) = (Vec::new(), Vec::new(), Vec::new());
        for row in rdr.records() {
            let row = row?;
            if row.len() != 5 {
                return Err(Error::Csv(format!(
                    "expected 5 columns, found {} on line {}",
                    row.len(),
                    row.position().map_or(0, |p| p.line())
                )));
            }
            let v = row
                .iter()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|e| Error::Csv(format!("bad number {s:?}: {e}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            t.push(v[0]);
            z.push(ComplexValue::new(v[1], v[2]));
            f.push(ComplexValue::new(v[3], v[4]));
        }
        Self::from_samples(t, z, f)
    }

    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for i in 0..self.t.len() {
            w.serialize(Row {
                t: self.t[i],
                re_z: self.z[i].re,
                im_z: self.z[i].im,
                re_f: self.f[i].re,
                im_f: self.f[i].im,
            })?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))
    }

    /// Number of intervals `M`.
    pub fn intervals(&self) -> usize {
        self.z.len() - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.t
    }

    pub fn points(&self) -> &[ComplexValue] {
        &self.z
    }

    pub fn values(&self) -> &[ComplexValue] {
        &self.f
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_ref()
    }

    pub fn density(&self) -> Option<&Density> {
        self.density.as_ref()
    }

    pub fn polygon_length(&self) -> f64 {
        self.z.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    /// The closed polygon through the samples.
    pub fn polygon(&self) -> Result<Path> {
        Path::polygon(&self.z[..self.intervals()])
    }

    /// Index of `w` with respect to the exact path when known, else the polygon.
    pub fn winding_number(&self, w: ComplexValue) -> Result<i32> {
        match &self.path {
            Some(p) => p.winding_number(w),
            None => self.polygon()?.winding_number(w),
        }
    }

    pub fn distance_to(&self, w: ComplexValue) -> Result<f64> {
        Ok(match &self.path {
            Some(p) => p.distance_to(w),
            None => self.polygon()?.distance_to(w),
        })
    }

    /// Length of the longer sample interval adjacent to the node closest to `w`.
    pub fn local_spacing(&self, w: ComplexValue) -> f64 {
        let m = self.intervals();
        let i = (0..m)
            .min_by(|&a, &b| (self.z[a] - w).norm().total_cmp(&(self.z[b] - w).norm()))
            .unwrap_or(0);
        let prev = (self.z[i] - self.z[(i + m - 1) % m]).norm();
        let next = (self.z[i + 1] - self.z[i]).norm();
        prev.max(next)
    }

    pub(crate) fn require(&self, need: usize) -> Result<()> {
        if self.intervals() < need {
            Err(Error::InsufficientSampling {
                got: self.intervals(),
                need,
            })
        } else {
            Ok(())
        }
    }
}
