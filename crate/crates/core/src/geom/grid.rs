use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;

use super::domain::DomainSpec;
use crate::{ComplexValue, Error, Result};

const MIN_RESOLUTION: usize = 8;

/// A cell mask over an axis-aligned box; cell `(i, j)` is stored at `j * nx + i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridDomain {
    bbox: [u64; 4],
    nx: usize,
    ny: usize,
    mask: Vec<bool>,
}

impl GridDomain {
    pub fn new(bbox: [f64; 4], nx: usize, ny: usize, mask: Vec<bool>) -> Result<Self> {
        if nx < MIN_RESOLUTION || ny < MIN_RESOLUTION {
            return Err(Error::InvalidArgument(format!(
                "grid resolution must be at least {MIN_RESOLUTION} per axis"
            )));
        }
        if mask.len() != nx * ny {
            return Err(Error::InvalidArgument(
                "mask size does not match resolution".into(),
            ));
        }
        if !(bbox[0] < bbox[1] && bbox[2] < bbox[3]) || bbox.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("degenerate bounding box".into()));
        }
        Ok(Self {
            bbox: bbox.map(f64::to_bits),
            nx,
            ny,
            mask,
        })
    }

    pub fn bbox(&self) -> [f64; 4] {
        self.bbox.map(f64::from_bits)
    }

    pub fn resolution(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.mask[j * self.nx + i]
    }

    pub fn count_inside(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn cell_center(&self, i: usize, j: usize) -> ComplexValue {
        let [x0, x1, y0, y1] = self.bbox();
        ComplexValue::new(
            x0 + (x1 - x0) * (i as f64 + 0.5) / self.nx as f64,
            y0 + (y1 - y0) * (j as f64 + 0.5) / self.ny as f64,
        )
    }

    /// The cell containing `z`, if any.
    pub fn cell_of(&self, z: ComplexValue) -> Option<(usize, usize)> {
        let [x0, x1, y0, y1] = self.bbox();
        let fx = (z.re - x0) / (x1 - x0) * self.nx as f64;
        let fy = (z.im - y0) / (y1 - y0) * self.ny as f64;
        if fx < 0.0 || fy < 0.0 || fx >= self.nx as f64 || fy >= self.ny as f64 {
            return None;
        }
        Some((fx as usize, fy as usize))
    }

    pub fn contains(&self, z: ComplexValue) -> bool {
        self.cell_of(z).is_some_and(|(i, j)| self.get(i, j))
    }

    /// Centres of all inside cells, row by row.
    pub fn inside_centers(&self) -> Vec<ComplexValue> {
        (0..self.ny)
            .flat_map(|j| (0..self.nx).map(move |i| (i, j)))
            .filter(|&(i, j)| self.get(i, j))
            .map(|(i, j)| self.cell_center(i, j))
            .collect()
    }
}

/// Rasterizes `domain` on a `resolution × resolution` grid.
///
/// The box is the outer boundary's bounding box padded by 5% per side; for an
/// unbounded domain the holes' box is padded by 50%.
pub fn rasterize(domain: &DomainSpec, resolution: usize) -> Result<GridDomain> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidArgument(format!(
            "grid resolution must be at least {MIN_RESOLUTION}"
        )));
    }
    let (raw, pad) = match domain.outer() {
        Some(o) => (o.bbox(), 0.05),
        None => (
            domain
                .bbox()
                .ok_or_else(|| Error::InvalidDomain("unbounded domain without holes".into()))?,
            0.5,
        ),
    };
    let px = pad * (raw[1] - raw[0]).max(f64::MIN_POSITIVE);
    let py = pad * (raw[3] - raw[2]).max(f64::MIN_POSITIVE);
    let bbox = [raw[0] - px, raw[1] + px, raw[2] - py, raw[3] + py];
    let probe = GridDomain::new(
        bbox,
        resolution,
        resolution,
        vec![false; resolution * resolution],
    )?;
    let mask: Vec<bool> = (0..resolution)
        .into_par_iter()
        .flat_map_iter(|j| {
            let probe = &probe;
            (0..resolution).map(move |i| domain.contains(probe.cell_center(i, j)))
        })
        .collect();
    GridDomain::new(bbox, resolution, resolution, mask)
}

/// Complement of the component of infinity.
///
/// Outside cells reachable from the box border through 4-neighbour steps form the
/// component of infinity; every other cell belongs to the hull.
pub fn simply_connected_hull(grid: &GridDomain) -> GridDomain {
    let (nx, ny) = (grid.nx, grid.ny);
    let mut reached = vec![false; nx * ny];
    let mut queue = VecDeque::new();
    let seed = |i: usize, j: usize, reached: &mut Vec<bool>, queue: &mut VecDeque<_>| {
        let k = j * nx + i;
        if !grid.mask[k] && !reached[k] {
            reached[k] = true;
            queue.push_back((i, j));
        }
    };
    for i in 0..nx {
        seed(i, 0, &mut reached, &mut queue);
        seed(i, ny - 1, &mut reached, &mut queue);
    }
    for j in 0..ny {
        seed(0, j, &mut reached, &mut queue);
        seed(nx - 1, j, &mut reached, &mut queue);
    }
    while let Some((i, j)) = queue.pop_front() {
        if i > 0 {
            seed(i - 1, j, &mut reached, &mut queue);
        }
        if i + 1 < nx {
            seed(i + 1, j, &mut reached, &mut queue);
        }
        if j > 0 {
            seed(i, j - 1, &mut reached, &mut queue);
        }
        if j + 1 < ny {
            seed(i, j + 1, &mut reached, &mut queue);
        }
    }
    GridDomain {
        bbox: grid.bbox,
        nx,
        ny,
        mask: reached.into_iter().map(|r| !r).collect(),
    }
}
