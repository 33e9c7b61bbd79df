//! Discrete Radon projection of a bilevel strip along parallel lines.
//!
//! For an angle `t` to the X-axis, the line through pixel `(row, col)` meets
//! row 0 at `col - row * cot(t)`. Every pixel is assigned to the line whose
//! rounded intercept it has, so for a fixed angle the lines partition the
//! image and the projected mass always equals the ink count.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imageio::BinaryImage;
use crate::par::Execution;
use crate::slant::AngleGrid;

/// Angle in degrees, strictly between 0 and 180.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct AngleDeg(f64);

impl AngleDeg {
    pub fn new(degrees: f64) -> Result<Self> {
        if degrees > 0.0 && degrees < 180.0 {
            Ok(Self(degrees))
        } else {
            Err(Error::BadAngle(degrees))
        }
    }

    pub fn degrees(self) -> f64 {
        self.0
    }

    pub fn cot(self) -> f64 {
        let r = self.0.to_radians();
        r.cos() / r.sin()
    }
}

impl TryFrom<f64> for AngleDeg {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<AngleDeg> for f64 {
    fn from(a: AngleDeg) -> f64 {
        a.0
    }
}

impl fmt::Display for AngleDeg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}°", self.0)
    }
}

/// Per-row part of the intercept computation: `row * cot` split into its
/// integer floor and fractional remainder in `[0, 1)`.
#[derive(Debug, Clone, Copy)]
struct RowShift {
    floor: i64,
    frac: f64,
}

impl RowShift {
    fn new(row: usize, cot: f64) -> Self {
        let p = row as f64 * cot;
        let floor = p.floor();
        Self { floor: floor as i64, frac: p - floor }
    }

    /// `round(col - row * cot)`, half away from zero, evaluated exactly with
    /// respect to the product `row * cot`.
    fn offset(self, col: i64) -> i64 {
        let m = col - self.floor;
        if self.frac < 0.5 {
            m
        } else if self.frac > 0.5 {
            m - 1
        } else if m > 0 {
            // m - 0.5 is positive: away from zero rounds up
            m
        } else {
            m - 1
        }
    }
}

/// Index of the line (x-intercept at row 0) that pixel `(row, col)` belongs
/// to at angle `t`: `round(col - row * cot t)`, ties away from zero.
pub fn offset_index(row: usize, col: usize, t: AngleDeg) -> i64 {
    RowShift::new(row, t.cot()).offset(col as i64)
}

/// [`offset_index`] for columns that may lie left of the image.
pub(crate) fn offset_index_signed(row: usize, col: i64, t: AngleDeg) -> i64 {
    RowShift::new(row, t.cot()).offset(col)
}

/// Ink mass per line offset at one angle.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionProfile {
    pub angle: AngleDeg,
    /// Offset of `raw[0]`.
    pub offset_min: i64,
    pub raw: Vec<u64>,
    /// `raw / mass`.
    pub normalized: Vec<f64>,
    pub mass: u64,
}

impl ProjectionProfile {
    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    /// Offsets with non-zero mass.
    pub fn occupied(&self) -> usize {
        self.raw.iter().filter(|&&n| n > 0).count()
    }
}

pub(crate) fn project_points(points: &[(usize, usize)], t: AngleDeg) -> Result<ProjectionProfile> {
    if points.is_empty() {
        return Err(Error::EmptyImage);
    }
    let cot = t.cot();
    let mut offsets = Vec::with_capacity(points.len());
    // points arrive row-major, so the row shift changes rarely
    let mut cached: Option<(usize, RowShift)> = None;
    for &(row, col) in points {
        let shift = match cached {
            Some((r, s)) if r == row => s,
            _ => {
                let s = RowShift::new(row, cot);
                cached = Some((row, s));
                s
            }
        };
        offsets.push(shift.offset(col as i64));
    }
    let lo = *offsets.iter().min().expect("non-empty");
    let hi = *offsets.iter().max().expect("non-empty");
    let mut raw = vec![0u64; (hi - lo + 1) as usize];
    for x in offsets {
        raw[(x - lo) as usize] += 1;
    }
    let mass = points.len() as u64;
    let normalized = raw.iter().map(|&n| n as f64 / mass as f64).collect();
    Ok(ProjectionProfile { angle: t, offset_min: lo, raw, normalized, mass })
}

/// Project the ink of `m` onto the line family at angle `t`.
///
/// The profile spans the occupied offsets only; `offset_min` records where it
/// starts.
pub fn project(m: &BinaryImage, t: AngleDeg) -> Result<ProjectionProfile> {
    project_points(&m.ink_pixels(), t)
}

/// Check that every projection over `grid` carries exactly the ink count.
///
/// Always true given the partition rule; kept as a self-test hook.
pub fn mass_check(m: &BinaryImage, grid: &AngleGrid) -> Result<bool> {
    mass_check_with(m, grid, Execution::default())
}

pub fn mass_check_with(m: &BinaryImage, grid: &AngleGrid, exec: Execution) -> Result<bool> {
    let points = m.ink_pixels();
    let ink = points.len() as u64;
    let ok = exec.try_map(&grid.angles(), |&t| {
        project_points(&points, t).map(|p| p.raw.iter().sum::<u64>() == ink && p.mass == ink)
    })?;
    Ok(ok.into_iter().all(|b| b))
}
