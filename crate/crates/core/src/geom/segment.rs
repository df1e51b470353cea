use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::{ComplexValue, Error, Result, I};

/// One piece of a contour, parametrized over `s ∈ [0, 1]`.
///
/// Arcs run from angle `t0` to `t1`; `ccw` must agree with the sign of `t1 - t0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PathSegment {
    Line {
        a: ComplexValue,
        b: ComplexValue,
    },
    Arc {
        center: ComplexValue,
        r: f64,
        t0: f64,
        t1: f64,
        ccw: bool,
    },
}

fn wrap_positive(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y.is_finite() {
        y
    } else {
        0.0
    }
}

impl PathSegment {
    pub fn line(a: ComplexValue, b: ComplexValue) -> Result<Self> {
        let s = PathSegment::Line { a, b };
        s.validate()?;
        Ok(s)
    }

    pub fn arc(center: ComplexValue, r: f64, t0: f64, t1: f64) -> Result<Self> {
        let s = PathSegment::Arc {
            center,
            r,
            t0,
            t1,
            ccw: t1 > t0,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PathSegment::Line { a, b } => {
                if !(a.re.is_finite() && a.im.is_finite() && b.re.is_finite() && b.im.is_finite()) {
                    return Err(Error::InvalidPath("non-finite line endpoint".into()));
                }
                if a == b {
                    return Err(Error::InvalidPath(format!("degenerate line at {a}")));
                }
            }
            PathSegment::Arc {
                center,
                r,
                t0,
                t1,
                ccw,
            } => {
                if !(center.re.is_finite()
                    && center.im.is_finite()
                    && t0.is_finite()
                    && t1.is_finite())
                {
                    return Err(Error::InvalidPath("non-finite arc parameter".into()));
                }
                if !(r > 0.0 && r.is_finite()) {
                    return Err(Error::InvalidPath(format!(
                        "arc radius {r} must be positive"
                    )));
                }
                let extent = (t1 - t0).abs();
                if !(extent > 0.0 && extent <= TAU * (1.0 + 1e-12)) {
                    return Err(Error::InvalidPath(format!(
                        "arc angular extent {extent} outside (0, 2π]"
                    )));
                }
                if ccw != (t1 > t0) {
                    return Err(Error::InvalidPath(
                        "arc orientation flag disagrees with t0 → t1".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn point(&self, s: f64) -> ComplexValue {
        match *self {
            PathSegment::Line { a, b } => a + (b - a) * s,
            PathSegment::Arc {
                center, r, t0, t1, ..
            } => center + ComplexValue::from_polar(r, t0 + s * (t1 - t0)),
        }
    }

    /// `dz/ds`.
    pub fn derivative(&self, s: f64) -> ComplexValue {
        match *self {
            PathSegment::Line { a, b } => b - a,
            PathSegment::Arc { r, t0, t1, .. } => {
                I * ComplexValue::from_polar(r * (t1 - t0), t0 + s * (t1 - t0))
            }
        }
    }

    pub fn start(&self) -> ComplexValue {
        self.point(0.0)
    }

    pub fn end(&self) -> ComplexValue {
        self.point(1.0)
    }

    pub fn length(&self) -> f64 {
        match *self {
            PathSegment::Line { a, b } => (b - a).norm(),
            PathSegment::Arc { r, t0, t1, .. } => r * (t1 - t0).abs(),
        }
    }

    pub fn reversed(&self) -> Self {
        match *self {
            PathSegment::Line { a, b } => PathSegment::Line { a: b, b: a },
            PathSegment::Arc {
                center,
                r,
                t0,
                t1,
                ccw,
            } => PathSegment::Arc {
                center,
                r,
                t0: t1,
                t1: t0,
                ccw: !ccw,
            },
        }
    }

    /// The sub-segment over parameters `[s0, s1]`, `s0 < s1`.
    pub fn sub(&self, s0: f64, s1: f64) -> Self {
        match *self {
            PathSegment::Line { .. } => PathSegment::Line {
                a: self.point(s0),
                b: self.point(s1),
            },
            PathSegment::Arc {
                center,
                r,
                t0,
                t1,
                ccw,
            } => PathSegment::Arc {
                center,
                r,
                t0: t0 + s0 * (t1 - t0),
                t1: t0 + s1 * (t1 - t0),
                ccw,
            },
        }
    }

    /// Whether angle `phi` is swept by the arc, and the parameter where it is.
    fn arc_parameter_of_angle(t0: f64, t1: f64, phi: f64) -> Option<f64> {
        let extent = (t1 - t0).abs();
        let offset = if t1 > t0 {
            wrap_positive(phi - t0)
        } else {
            wrap_positive(t0 - phi)
        };
        (offset <= extent).then(|| offset / extent)
    }

    /// The point of the segment closest to `p`.
    pub fn nearest_point(&self, p: ComplexValue) -> ComplexValue {
        match *self {
            PathSegment::Line { a, b } => {
                let d = b - a;
                let s = (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
                a + d * s
            }
            PathSegment::Arc {
                center, r, t0, t1, ..
            } => {
                let v = p - center;
                if v.norm() == 0.0 {
                    return self.start();
                }
                match Self::arc_parameter_of_angle(t0, t1, v.arg()) {
                    Some(_) => center + v * (r / v.norm()),
                    None if (self.start() - p).norm() <= (self.end() - p).norm() => self.start(),
                    None => self.end(),
                }
            }
        }
    }

    pub fn distance_to(&self, p: ComplexValue) -> f64 {
        match *self {
            PathSegment::Arc {
                center, r, t0, t1, ..
            } if Self::arc_parameter_of_angle(t0, t1, (p - center).arg()).is_some() => {
                ((p - center).norm() - r).abs()
            }
            _ => (self.nearest_point(p) - p).norm(),
        }
    }

    pub fn max_distance_from(&self, p: ComplexValue) -> f64 {
        let ends = (self.start() - p).norm().max((self.end() - p).norm());
        match *self {
            PathSegment::Line { .. } => ends,
            PathSegment::Arc {
                center, r, t0, t1, ..
            } => {
                let v = center - p;
                let far = if v.norm() == 0.0 { 0.0 } else { v.arg() };
                if v.norm() == 0.0 || Self::arc_parameter_of_angle(t0, t1, far).is_some() {
                    v.norm() + r
                } else {
                    ends
                }
            }
        }
    }

    /// Increment of `arg(z - p)` along the segment; `p` must not lie on it.
    pub fn arg_increment(&self, p: ComplexValue) -> f64 {
        match *self {
            PathSegment::Line { a, b } => ((b - p) / (a - p)).arg(),
            PathSegment::Arc { .. } => self.arc_increment(p, 0.0, 1.0, 0),
        }
    }

    fn arc_increment(&self, p: ComplexValue, s0: f64, s1: f64, depth: u32) -> f64 {
        let piece = self.sub(s0, s1);
        let dmin = piece.distance_to(p);
        // A piece of length L at distance ≥ d sweeps at most L/d radians around p.
        if piece.length() <= 1.5 * dmin || depth > 60 {
            return ((piece.end() - p) / (piece.start() - p)).arg();
        }
        let mid = 0.5 * (s0 + s1);
        self.arc_increment(p, s0, mid, depth + 1) + self.arc_increment(p, mid, s1, depth + 1)
    }

    /// Axis-aligned bounding box `[xmin, xmax, ymin, ymax]`.
    pub fn bbox(&self) -> [f64; 4] {
        let mut pts = vec![self.start(), self.end()];
        if let PathSegment::Arc {
            center, r, t0, t1, ..
        } = *self
        {
            for k in 0..4 {
                let phi = k as f64 * PI / 2.0;
                if Self::arc_parameter_of_angle(t0, t1, phi).is_some() {
                    pts.push(center + ComplexValue::from_polar(r, phi));
                }
            }
        }
        let mut b = [
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        ];
        for z in pts {
            b[0] = b[0].min(z.re);
            b[1] = b[1].max(z.re);
            b[2] = b[2].min(z.im);
            b[3] = b[3].max(z.im);
        }
        b
    }

    /// `∫ conj(z) dz` over the segment, used for signed areas.
    pub(crate) fn conj_integral(&self) -> ComplexValue {
        match *self {
            PathSegment::Line { a, b } => {
                let d = b - a;
                (a.conj() + d.conj() * 0.5) * d
            }
            PathSegment::Arc {
                center, r, t0, t1, ..
            } => {
                center.conj()
                    * r
                    * (ComplexValue::from_polar(1.0, t1) - ComplexValue::from_polar(1.0, t0))
                    + I * r * r * (t1 - t0)
            }
        }
    }
}
