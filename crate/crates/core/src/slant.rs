//! Entropy of the projection profile as a function of angle, and the
//! "generalized slant" of a strip: the angle where that entropy is smallest.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imageio::{reshape_strip, BinaryImage};
use crate::par::Execution;
use crate::radon::{project_points, AngleDeg, ProjectionProfile};

/// Minimum width/height ratio of the reshaped strip.
pub const MIN_ASPECT: usize = 5;

const NORMALIZATION_TOL: f64 = 1e-9;

/// Uniform angle grid `start, start + step, ...` up to and including `stop`
/// when it falls on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleGrid {
    start: f64,
    stop: f64,
    step: f64,
}

impl AngleGrid {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(start > 0.0 && start < stop && stop < 180.0) {
            return Err(Error::BadGrid(format!("need 0 < start < stop < 180, got {start}:{stop}")));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::BadGrid(format!("step {step} must be positive")));
        }
        Ok(Self { start, stop, step })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn stop(&self) -> f64 {
        self.stop
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn span(&self) -> f64 {
        self.stop - self.start
    }

    pub fn len(&self) -> usize {
        ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn angles(&self) -> Vec<AngleDeg> {
        (0..self.len())
            .map(|i| AngleDeg::new(self.start + i as f64 * self.step).expect("grid inside (0, 180)"))
            .collect()
    }
}

impl Default for AngleGrid {
    fn default() -> Self {
        Self { start: 30.0, stop: 150.0, step: 1.0 }
    }
}

impl fmt::Display for AngleGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

impl FromStr for AngleGrid {
    type Err = Error;

    /// `start:stop:step` in degrees.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::BadGrid(format!("{s:?} is not start:stop:step")))?;
        match parts[..] {
            [start, stop, step] => Self::new(start, stop, step),
            _ => Err(Error::BadGrid(format!("{s:?} is not start:stop:step"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyCurve {
    pub angles: Vec<f64>,
    /// Entropy in nats at each angle.
    pub values: Vec<f64>,
    pub sub_strip_height: usize,
    /// Profile length at each angle (the entropy upper bound is its log).
    pub profile_lens: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlantEstimate {
    /// Refined angle in degrees.
    pub angle: f64,
    pub grid_angle: f64,
    pub entropy_at_min: f64,
}

/// Shannon entropy (nats) of the normalized profile; empty bins contribute 0.
pub fn entropy(p: &ProjectionProfile) -> Result<f64> {
    entropy_of(&p.normalized)
}

pub(crate) fn entropy_of(f: &[f64]) -> Result<f64> {
    let sum: f64 = f.iter().sum();
    let normalized = (sum - 1.0).abs() <= NORMALIZATION_TOL;
    if !normalized || f.iter().any(|&v| v < 0.0) {
        return Err(Error::NotNormalized(sum));
    }
    Ok(f.iter().filter(|&&v| v > 0.0).fold(0.0, |acc, &v| acc - v * v.ln()))
}

/// Entropy of the projection of the reshaped strip at every grid angle.
///
/// The strip is first cut into bands of `sub_strip_height` rows joined side
/// by side; the result must be at least [`MIN_ASPECT`] times wider than tall.
pub fn entropy_curve(m: &BinaryImage, grid: &AngleGrid, sub_strip_height: usize) -> Result<EntropyCurve> {
    entropy_curve_with(m, grid, sub_strip_height, Execution::default())
}

pub fn entropy_curve_with(
    m: &BinaryImage,
    grid: &AngleGrid,
    sub_strip_height: usize,
    exec: Execution,
) -> Result<EntropyCurve> {
    let joined = reshape_strip(m, sub_strip_height)?;
    if joined.cols() < MIN_ASPECT * joined.rows() {
        return Err(Error::AspectTooSquare { width: joined.cols(), height: joined.rows() });
    }
    let points = joined.ink_pixels();
    if points.is_empty() {
        return Err(Error::EmptyImage);
    }
    let angles = grid.angles();
    let per_angle = exec.try_map(&angles, |&t| {
        let p = project_points(&points, t)?;
        Ok::<_, Error>((entropy(&p)?, p.len()))
    })?;
    let (values, profile_lens) = per_angle.into_iter().unzip();
    Ok(EntropyCurve { angles: angles.into_iter().map(f64::from).collect(), values, sub_strip_height, profile_lens })
}

/// Grid argmin of the curve (ties to the smallest angle) refined by the
/// vertex of the parabola through it and its two neighbors.
///
/// The refinement is clamped to one grid step either side and skipped at the
/// curve ends or where the three points are not convex.
pub fn estimate_slant(curve: &EntropyCurve) -> Result<SlantEstimate> {
    let v = &curve.values;
    if v.len() < 3 || curve.angles.len() != v.len() {
        return Err(Error::CurveTooShort(v.len().min(curve.angles.len())));
    }
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x < v[best] {
            best = i;
        }
    }
    let grid_angle = curve.angles[best];
    let mut angle = grid_angle;
    if best > 0 && best + 1 < v.len() {
        let (v0, v1, v2) = (v[best - 1], v[best], v[best + 1]);
        let step = curve.angles[best + 1] - grid_angle;
        let denom = v0 - 2.0 * v1 + v2;
        if denom > 0.0 {
            let shift = 0.5 * (v0 - v2) / denom;
            angle = grid_angle + step * shift.clamp(-1.0, 1.0);
        }
    }
    Ok(SlantEstimate { angle, grid_angle, entropy_at_min: v[best] })
}
