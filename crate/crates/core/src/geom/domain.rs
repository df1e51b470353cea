use serde::{Deserialize, Serialize};

use super::path::Path;
use crate::{ComplexValue, Error, Result};

const SEPARATION: f64 = 1e-9;
const BOUNDARY_SAMPLES: usize = 256;

/// Where a point sits relative to a [`DomainSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "region", content = "hole")]
pub enum Region {
    Domain,
    Hole(usize),
    Outside,
    Boundary,
}

#[derive(Deserialize, Serialize)]
struct RawDomain {
    outer: Option<Path>,
    #[serde(default)]
    holes: Vec<Path>,
}

/// A finitely connected domain: the inside of `outer` (or the whole plane when
/// `outer` is `None`) with the closed interiors of `holes` removed.
///
/// All boundaries are stored counter-clockwise. Construction checks that holes lie
/// strictly inside `outer`, are pairwise exterior, and keep a distance of at least
/// `1e-9` from every other boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDomain", into = "RawDomain")]
pub struct DomainSpec {
    outer: Option<Path>,
    holes: Vec<Path>,
    witnesses: Vec<ComplexValue>,
}

impl TryFrom<RawDomain> for DomainSpec {
    type Error = Error;

    fn try_from(raw: RawDomain) -> Result<Self> {
        DomainSpec::new(raw.outer, raw.holes)
    }
}

impl From<DomainSpec> for RawDomain {
    fn from(d: DomainSpec) -> Self {
        RawDomain {
            outer: d.outer,
            holes: d.holes,
        }
    }
}

fn check_boundary(p: &Path, what: &str) -> Result<()> {
    if !p.is_closed() {
        return Err(Error::InvalidDomain(format!("{what} is not closed")));
    }
    if p.signed_area() <= 0.0 {
        return Err(Error::InvalidDomain(format!(
            "{what} must be positively oriented"
        )));
    }
    Ok(())
}

impl DomainSpec {
    pub fn new(outer: Option<Path>, holes: Vec<Path>) -> Result<Self> {
        if let Some(o) = &outer {
            check_boundary(o, "outer boundary")?;
        }
        for (j, h) in holes.iter().enumerate() {
            check_boundary(h, &format!("hole {j}"))?;
            let pts = h.sample(BOUNDARY_SAMPLES);
            if let Some(o) = &outer {
                let gap = pts
                    .iter()
                    .map(|&z| o.distance_to(z))
                    .fold(f64::INFINITY, f64::min);
                if gap <= SEPARATION {
                    return Err(Error::InvalidDomain(format!(
                        "hole {j} touches the outer boundary"
                    )));
                }
                if pts.iter().any(|&z| o.winding_number(z).ok() != Some(1)) {
                    return Err(Error::InvalidDomain(format!(
                        "hole {j} is not inside the outer boundary"
                    )));
                }
            }
            for (i, other) in holes.iter().enumerate() {
                if i == j {
                    continue;
                }
                let gap = pts
                    .iter()
                    .map(|&z| other.distance_to(z))
                    .fold(f64::INFINITY, f64::min);
                if gap <= SEPARATION {
                    return Err(Error::InvalidDomain(format!("holes {i} and {j} touch")));
                }
                if pts.iter().any(|&z| other.winding_number(z).ok() != Some(0)) {
                    return Err(Error::InvalidDomain(format!("holes {i} and {j} overlap")));
                }
            }
        }
        let witnesses = holes
            .iter()
            .map(interior_witness)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            outer,
            holes,
            witnesses,
        })
    }

    /// The annulus `r_in < |z - center| < r_out`.
    pub fn annulus(center: ComplexValue, r_in: f64, r_out: f64) -> Result<Self> {
        Self::new(
            Some(Path::circle(center, r_out)?),
            vec![Path::circle(center, r_in)?],
        )
    }

    pub fn disc(center: ComplexValue, r: f64) -> Result<Self> {
        Self::new(Some(Path::circle(center, r)?), Vec::new())
    }

    pub fn outer(&self) -> Option<&Path> {
        self.outer.as_ref()
    }

    pub fn holes(&self) -> &[Path] {
        &self.holes
    }

    /// A point strictly inside each hole, used as its Laurent centre.
    pub fn witnesses(&self) -> &[ComplexValue] {
        &self.witnesses
    }

    pub fn boundaries(&self) -> impl Iterator<Item = &Path> {
        self.outer.iter().chain(self.holes.iter())
    }

    pub fn distance_to_boundary(&self, z: ComplexValue) -> f64 {
        self.boundaries()
            .map(|p| p.distance_to(z))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn classify(&self, z: ComplexValue) -> Region {
        if let Some(o) = &self.outer {
            match o.winding_number(z) {
                Ok(1) => {}
                Ok(_) => return Region::Outside,
                Err(_) => return Region::Boundary,
            }
        }
        for (j, h) in self.holes.iter().enumerate() {
            match h.winding_number(z) {
                Ok(0) => {}
                Ok(_) => return Region::Hole(j),
                Err(_) => return Region::Boundary,
            }
        }
        Region::Domain
    }

    pub fn contains(&self, z: ComplexValue) -> bool {
        self.classify(z) == Region::Domain
    }

    /// Membership in the simply connected hull: the domain together with its holes.
    pub fn in_hull(&self, z: ComplexValue) -> bool {
        matches!(self.classify(z), Region::Domain | Region::Hole(_))
    }

    /// Bounding box `[xmin, xmax, ymin, ymax]` of all boundaries.
    pub fn bbox(&self) -> Option<[f64; 4]> {
        self.boundaries().map(|p| p.bbox()).reduce(|a, b| {
            [
                a[0].min(b[0]),
                a[1].max(b[1]),
                a[2].min(b[2]),
                a[3].max(b[3]),
            ]
        })
    }
}

/// Area centroid when it lies well inside, otherwise the best point of a coarse search.
fn interior_witness(hole: &Path) -> Result<ComplexValue> {
    let pts = hole.sample(BOUNDARY_SAMPLES);
    let n = pts.len();
    let (mut a, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (p, q) = (pts[i], pts[(i + 1) % n]);
        let cross = p.re * q.im - q.re * p.im;
        a += cross;
        cx += (p.re + q.re) * cross;
        cy += (p.im + q.im) * cross;
    }
    let centroid = ComplexValue::new(cx / (3.0 * a), cy / (3.0 * a));

    let [x0, x1, y0, y1] = hole.bbox();
    const N: usize = 48;
    let mut best = None::<(f64, ComplexValue)>;
    for i in 0..N {
        for j in 0..N {
            let z = ComplexValue::new(
                x0 + (x1 - x0) * (i as f64 + 0.5) / N as f64,
                y0 + (y1 - y0) * (j as f64 + 0.5) / N as f64,
            );
            if hole.winding_number(z).ok() == Some(1) {
                let d = hole.distance_to(z);
                if best.is_none_or(|(bd, _)| d > bd) {
                    best = Some((d, z));
                }
            }
        }
    }
    let (best_d, best_z) = best.ok_or_else(|| {
        Error::InvalidDomain("hole interior is too thin to locate a witness point".into())
    })?;
    if centroid.is_finite()
        && hole.winding_number(centroid).ok() == Some(1)
        && hole.distance_to(centroid) >= 0.5 * best_d
    {
        Ok(centroid)
    } else {
        Ok(best_z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> ComplexValue {
        ComplexValue::new(re, im)
    }

    #[test]
    fn annulus_classification() {
        let d = DomainSpec::annulus(c(0.0, 0.0), 0.5, 2.0).unwrap();
        assert_eq!(d.classify(c(1.0, 0.0)), Region::Domain);
        assert_eq!(d.classify(c(0.1, 0.1)), Region::Hole(0));
        assert_eq!(d.classify(c(3.0, 0.0)), Region::Outside);
        assert_eq!(d.classify(c(2.0, 0.0)), Region::Boundary);
        assert!(d.witnesses()[0].norm() < 1e-12);
        assert!(d.in_hull(c(0.0, 0.0)));
    }

    #[test]
    fn invalid_layouts_are_rejected() {
        let outer = Path::circle(c(0.0, 0.0), 1.0).unwrap();
        let poking_out = Path::circle(c(0.9, 0.0), 0.3).unwrap();
        assert!(DomainSpec::new(Some(outer.clone()), vec![poking_out]).is_err());
        let a = Path::circle(c(-0.1, 0.0), 0.3).unwrap();
        let b = Path::circle(c(0.1, 0.0), 0.3).unwrap();
        assert!(DomainSpec::new(Some(outer.clone()), vec![a, b]).is_err());
        assert!(DomainSpec::new(Some(outer.reversed()), vec![]).is_err());
        let tangent = Path::circle(c(0.5, 0.0), 0.5).unwrap();
        assert!(DomainSpec::new(Some(outer), vec![tangent]).is_err());
    }

    #[test]
    fn nonconvex_hole_witness_is_inside() {
        let l_shape = Path::polygon(&[
            c(0.0, 0.0),
            c(2.0, 0.0),
            c(2.0, 0.2),
            c(0.2, 0.2),
            c(0.2, 2.0),
            c(0.0, 2.0),
        ])
        .unwrap();
        let d =
            DomainSpec::new(Some(Path::circle(c(1.0, 1.0), 3.0).unwrap()), vec![l_shape]).unwrap();
        assert_eq!(d.classify(d.witnesses()[0]), Region::Hole(0));
    }

    #[test]
    fn json_shape() {
        let j = r#"{"outer":[{"kind":"arc","center":[0,0],"r":2,"t0":0,"t1":6.283185307179586,"ccw":true}],
                    "holes":[[{"kind":"arc","center":[0,0],"r":0.5,"t0":0,"t1":6.283185307179586,"ccw":true}]]}"#;
        let d: DomainSpec = serde_json::from_str(j).unwrap();
        assert_eq!(d.holes().len(), 1);
        let unbounded: DomainSpec = serde_json::from_str(r#"{"outer":null,"holes":[]}"#).unwrap();
        assert!(unbounded.contains(c(100.0, 0.0)));
    }
}
