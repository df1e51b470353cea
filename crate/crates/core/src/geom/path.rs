use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::segment::PathSegment;
use crate::{ComplexValue, Error, Result};

const JOIN_TOL: f64 = 1e-12;

/// An oriented, piecewise contour of line segments and circular arcs.
///
/// Serializes as its segment list; closedness is inferred from the endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<PathSegment>", into = "Vec<PathSegment>")]
pub struct Path {
    segments: Vec<PathSegment>,
    closed: bool,
}

fn joins(a: ComplexValue, b: ComplexValue) -> bool {
    (a - b).norm() <= JOIN_TOL * a.norm().max(b.norm()).max(1.0)
}

impl TryFrom<Vec<PathSegment>> for Path {
    type Error = Error;

    fn try_from(segments: Vec<PathSegment>) -> Result<Self> {
        Path::new(segments)
    }
}

impl From<Path> for Vec<PathSegment> {
    fn from(p: Path) -> Self {
        p.segments
    }
}

impl Path {
    pub fn new(segments: Vec<PathSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidPath("path has no segments".into()));
        }
        for s in &segments {
            s.validate()?;
        }
        for (i, w) in segments.windows(2).enumerate() {
            if !joins(w[0].end(), w[1].start()) {
                return Err(Error::InvalidPath(format!(
                    "segment {} ends at {} but segment {} starts at {}",
                    i,
                    w[0].end(),
                    i + 1,
                    w[1].start()
                )));
            }
        }
        let closed = joins(segments[segments.len() - 1].end(), segments[0].start());
        Ok(Self { segments, closed })
    }

    pub fn circle(center: ComplexValue, r: f64) -> Result<Self> {
        Path::new(vec![PathSegment::arc(center, r, 0.0, TAU)?])
    }

    /// Closed polygon through `vertices` (the closing edge is added).
    pub fn polygon(vertices: &[ComplexValue]) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidPath(
                "polygon needs at least 3 vertices".into(),
            ));
        }
        let n = vertices.len();
        let segs = (0..n)
            .map(|i| PathSegment::line(vertices[i], vertices[(i + 1) % n]))
            .collect::<Result<Vec<_>>>()?;
        Path::new(segs)
    }

    pub fn polyline(vertices: &[ComplexValue]) -> Result<Self> {
        let segs = vertices
            .windows(2)
            .map(|w| PathSegment::line(w[0], w[1]))
            .collect::<Result<Vec<_>>>()?;
        Path::new(segs)
    }

    pub fn segments(&self) -> &[PathSegment] {
        &self.segments
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn start(&self) -> ComplexValue {
        self.segments[0].start()
    }

    pub fn end(&self) -> ComplexValue {
        self.segments[self.segments.len() - 1].end()
    }

    /// Exact length: `|b - a|` per line, `r · extent` per arc.
    pub fn length(&self) -> f64 {
        self.segments.iter().map(|s| s.length()).sum()
    }

    pub fn reversed(&self) -> Self {
        Self {
            segments: self.segments.iter().rev().map(|s| s.reversed()).collect(),
            closed: self.closed,
        }
    }

    pub fn concat(&self, other: &Path) -> Result<Self> {
        let mut segs = self.segments.clone();
        segs.extend_from_slice(&other.segments);
        Path::new(segs)
    }

    /// Locates arclength fraction `t ∈ [0, 1]` as (segment index, local parameter).
    fn locate(&self, t: f64) -> (usize, f64) {
        let total = self.length();
        let target = t.clamp(0.0, 1.0) * total;
        let mut acc = 0.0;
        for (i, s) in self.segments.iter().enumerate() {
            let len = s.length();
            if target <= acc + len || i + 1 == self.segments.len() {
                let local = if len > 0.0 {
                    ((target - acc) / len).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                return (i, local);
            }
            acc += len;
        }
        unreachable!("paths are never empty")
    }

    pub fn point_at_fraction(&self, t: f64) -> ComplexValue {
        let (i, s) = self.locate(t);
        self.segments[i].point(s)
    }

    pub fn derivative_at_fraction(&self, t: f64) -> ComplexValue {
        let (i, s) = self.locate(t);
        self.segments[i].derivative(s)
    }

    /// The initial sub-path up to arclength fraction `t`; `None` when `t` is 0.
    pub fn prefix(&self, t: f64) -> Option<Path> {
        if t <= 0.0 {
            return None;
        }
        if t >= 1.0 {
            return Some(self.clone());
        }
        let (i, s) = self.locate(t);
        let mut segs = self.segments[..i].to_vec();
        if s > 0.0 {
            segs.push(self.segments[i].sub(0.0, s));
        }
        if segs.is_empty() {
            return None;
        }
        Some(Path {
            closed: false,
            segments: segs,
        })
    }

    pub fn distance_to(&self, p: ComplexValue) -> f64 {
        self.segments
            .iter()
            .map(|s| s.distance_to(p))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn nearest_point(&self, p: ComplexValue) -> ComplexValue {
        self.segments
            .iter()
            .map(|s| s.nearest_point(p))
            .min_by(|a, b| (a - p).norm().total_cmp(&(b - p).norm()))
            .expect("paths are never empty")
    }

    pub fn max_distance_from(&self, p: ComplexValue) -> f64 {
        self.segments
            .iter()
            .map(|s| s.max_distance_from(p))
            .fold(0.0, f64::max)
    }

    /// Signed area enclosed by a closed path; positive for counter-clockwise.
    pub fn signed_area(&self) -> f64 {
        0.5 * self
            .segments
            .iter()
            .map(|s| s.conj_integral())
            .sum::<ComplexValue>()
            .im
    }

    pub fn bbox(&self) -> [f64; 4] {
        self.segments.iter().fold(
            [
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
            ],
            |acc, s| {
                let b = s.bbox();
                [
                    acc[0].min(b[0]),
                    acc[1].max(b[1]),
                    acc[2].min(b[2]),
                    acc[3].max(b[3]),
                ]
            },
        )
    }

    /// `n` points at equal arclength fractions `i / n`, `i = 0..n`.
    pub fn sample(&self, n: usize) -> Vec<ComplexValue> {
        (0..n)
            .map(|i| self.point_at_fraction(i as f64 / n as f64))
            .collect()
    }

    /// Index `Ind(path, point)`: the summed argument increments divided by 2π.
    ///
    /// Fails when the point is within `1e-9 · length` of the path or when the total is
    /// not within 0.01 of an integer.
    pub fn winding_number(&self, point: ComplexValue) -> Result<i32> {
        if !self.closed {
            return Err(Error::InvalidPath(
                "winding number needs a closed path".into(),
            ));
        }
        if self.distance_to(point) <= 1e-9 * self.length() {
            return Err(Error::PointOnPath { point });
        }
        let turns: f64 = self
            .segments
            .iter()
            .map(|s| s.arg_increment(point))
            .sum::<f64>()
            / TAU;
        let rounded = turns.round();
        let residual = (turns - rounded).abs();
        if residual >= 0.01 {
            return Err(Error::WindingResidual { point, residual });
        }
        Ok(rounded as i32)
    }
}
