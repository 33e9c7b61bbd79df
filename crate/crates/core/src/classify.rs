//! Per-strip feature vectors and a provisional distance for nearest-neighbor
//! ranking.
//!
//! The distance is a plain weighted sum of three terms and makes no claim of
//! being a principled metric between entropy or autocorrelation curves:
//!
//! ```text
//! d(a, b) = w_slant * |slant_a - slant_b| / grid_span
//!         + w_entropy * rms(entropy_a - entropy_b)
//!         + w_autocorr * rms(autocorr_a - autocorr_b)
//! ```

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imageio::{Binarization, BinaryImage};
use crate::par::Execution;
use crate::seqfeat::{step_sweep_with, AutocorrMatrix, DEFAULT_STEPS};
use crate::slant::{entropy_curve_with, estimate_slant, AngleGrid, SlantEstimate};

pub const FORMAT_VERSION: u32 = 1;

/// Everything that determines a feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractConfig {
    pub grid: AngleGrid,
    /// Sub-strip heights; the first one is used for the stored slant and
    /// entropy curve.
    pub heights: Vec<usize>,
    pub steps: Vec<usize>,
    /// Recorded in the fingerprint; applied by the caller when loading.
    pub binarization: Binarization,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        Self {
            grid: AngleGrid::default(),
            heights: vec![30, 50],
            steps: DEFAULT_STEPS.to_vec(),
            binarization: Binarization::Otsu,
        }
    }
}

impl ExtractConfig {
    pub fn primary_height(&self) -> Result<usize> {
        self.heights.first().copied().ok_or_else(|| Error::InvalidConfig("no sub-strip heights".into()))
    }

    pub fn fingerprint(&self) -> String {
        let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        format!(
            "grid={};heights={};steps={};binarize={}",
            self.grid,
            join(&self.heights),
            join(&self.steps),
            self.binarization
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub version: u32,
    pub config_fingerprint: String,
    pub slant: SlantEstimate,
    pub entropy_angles: Vec<f64>,
    pub entropy_values: Vec<f64>,
    pub autocorr: AutocorrMatrix,
}

impl FeatureVector {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("feature vectors always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let fv: FeatureVector = serde_json::from_str(text).map_err(|e| Error::BadFeatureFile(e.to_string()))?;
        if fv.version != FORMAT_VERSION {
            return Err(Error::BadFeatureFile(format!("unsupported version {}", fv.version)));
        }
        if fv.entropy_angles.len() != fv.entropy_values.len() {
            return Err(Error::BadFeatureFile("entropy angles and values differ in length".into()));
        }
        if fv.autocorr.steps.len() != fv.autocorr.curves.len() {
            return Err(Error::BadFeatureFile("autocorrelation steps and curves differ in length".into()));
        }
        Ok(fv)
    }
}

pub fn feature_vector(m: &BinaryImage, cfg: &ExtractConfig) -> Result<FeatureVector> {
    feature_vector_with(m, cfg, Execution::default())
}

pub fn feature_vector_with(m: &BinaryImage, cfg: &ExtractConfig, exec: Execution) -> Result<FeatureVector> {
    let height = cfg.primary_height()?;
    let curve = entropy_curve_with(m, &cfg.grid, height, exec).map_err(|e| Error::stage("entropy curve", e))?;
    let slant = estimate_slant(&curve).map_err(|e| Error::stage("slant", e))?;
    let autocorr = step_sweep_with(m, &cfg.steps, exec).map_err(|e| Error::stage("step sweep", e))?;
    Ok(FeatureVector {
        version: FORMAT_VERSION,
        config_fingerprint: cfg.fingerprint(),
        slant,
        entropy_angles: curve.angles,
        entropy_values: curve.values,
        autocorr,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub slant: f64,
    pub entropy: f64,
    pub autocorr: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Self { slant: 1.0, entropy: 1.0, autocorr: 1.0 }
    }
}

impl Weights {
    pub fn scaled(self, k: f64) -> Self {
        Self { slant: self.slant * k, entropy: self.entropy * k, autocorr: self.autocorr * k }
    }
}

fn rms<'a>(a: impl Iterator<Item = &'a f64>, b: impl Iterator<Item = &'a f64>) -> f64 {
    let (mut sum, mut n) = (0.0, 0usize);
    for (x, y) in a.zip(b) {
        sum += (x - y) * (x - y);
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).sqrt()
    }
}

/// Angular span used to scale the slant term, read back from a fingerprint.
fn grid_span(fingerprint: &str) -> f64 {
    fingerprint
        .split(';')
        .find_map(|kv| kv.strip_prefix("grid="))
        .and_then(|g| g.parse::<AngleGrid>().ok())
        .map(|g| g.span())
        .unwrap_or(120.0)
}

pub fn distance(a: &FeatureVector, b: &FeatureVector) -> Result<f64> {
    distance_weighted(a, b, Weights::default())
}

pub fn distance_weighted(a: &FeatureVector, b: &FeatureVector, w: Weights) -> Result<f64> {
    if a.config_fingerprint != b.config_fingerprint {
        return Err(Error::ConfigMismatch(a.config_fingerprint.clone(), b.config_fingerprint.clone()));
    }
    let slant = (a.slant.angle - b.slant.angle).abs() / grid_span(&a.config_fingerprint);
    let entropy = rms(a.entropy_values.iter(), b.entropy_values.iter());
    let autocorr = rms(a.autocorr.curves.iter().flatten(), b.autocorr.curves.iter().flatten());
    Ok(w.slant * slant + w.entropy * entropy + w.autocorr * autocorr)
}

/// Gallery entries ranked by ascending distance to `query`, ties by id.
pub fn nearest(query: &FeatureVector, gallery: &[(String, FeatureVector)]) -> Result<Vec<(String, f64)>> {
    nearest_with(query, gallery, Weights::default(), Execution::default())
}

pub fn nearest_with(
    query: &FeatureVector,
    gallery: &[(String, FeatureVector)],
    weights: Weights,
    exec: Execution,
) -> Result<Vec<(String, f64)>> {
    if gallery.is_empty() {
        return Err(Error::EmptyGallery);
    }
    let mut ranked =
        exec.try_map(gallery, |(id, fv)| distance_weighted(query, fv, weights).map(|d| (id.clone(), d)))?;
    ranked.sort_by(|a, b| match a.1.total_cmp(&b.1) {
        Ordering::Equal => a.0.cmp(&b.0),
        o => o,
    });
    Ok(ranked)
}
