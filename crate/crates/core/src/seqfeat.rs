//! Column-occupancy sequence of the joined sub-strips and its
//! autocorrelation, swept over several sub-strip heights ("steps").

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imageio::{reshape_strip, BinaryImage};
use crate::par::Execution;

/// Number of lag samples each curve is resampled to in an [`AutocorrMatrix`].
pub const RESAMPLED_LEN: usize = 128;

pub const DEFAULT_STEPS: [usize; 6] = [5, 10, 15, 20, 25, 30];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSequence {
    pub bits: Vec<u8>,
    pub step: usize,
    pub source_cols: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AutocorrCurve {
    /// Lags `0..=max_lag`.
    pub lags: Vec<usize>,
    pub values: Vec<f64>,
    pub step: usize,
}

impl AutocorrCurve {
    pub fn max_lag(&self) -> usize {
        self.lags.len() - 1
    }

    /// Linear interpolation onto `n` evenly spaced lags covering `[0, max_lag]`.
    pub fn resample(&self, n: usize) -> Vec<f64> {
        let max_lag = self.max_lag();
        if n == 1 {
            return vec![self.values[0]];
        }
        (0..n)
            .map(|j| {
                let x = j as f64 * max_lag as f64 / (n - 1) as f64;
                let i = (x.floor() as usize).min(max_lag);
                if i == max_lag {
                    return self.values[max_lag];
                }
                let frac = x - i as f64;
                self.values[i] + frac * (self.values[i + 1] - self.values[i])
            })
            .collect()
    }
}

/// One resampled autocorrelation row per step, rows in ascending step order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutocorrMatrix {
    pub steps: Vec<usize>,
    pub curves: Vec<Vec<f64>>,
}

/// Per-column ink bit of the strip reshaped into bands of `step` rows:
/// 1 iff the column holds at least `step / 2` ink pixels.
pub fn column_bits(m: &BinaryImage, step: usize) -> Result<BitSequence> {
    let joined = reshape_strip(m, step)?;
    let mut sums = vec![0usize; joined.cols()];
    for row in joined.bits().chunks_exact(joined.cols()) {
        for (s, &b) in sums.iter_mut().zip(row) {
            *s += b as usize;
        }
    }
    // Val < step/2 -> 0, else 1; in integers so Val == step/2 gives 1
    let bits = sums.into_iter().map(|val| u8::from(2 * val >= step)).collect();
    Ok(BitSequence { bits, step, source_cols: m.cols() })
}

/// Mean-removed autocorrelation normalized by the lag-0 term, for lags
/// `0..=N/2` (biased estimator: every lag divides by the full-length sum).
///
/// Bits are 0/1, so with mean `m = S/N` the lag-k numerator expands to
/// `C_k - m (H_k + T_k) + (N - k) m^2`, where `C_k` counts co-occurring ones
/// and `H_k`, `T_k` are the ones in the head `[0, N-k)` and tail `[k, N)`.
/// Scaled by `N^2` everything is an integer; `C_k` comes from word popcounts,
/// which keeps long sequences (N ~ 10^5) cheap.
pub fn autocorrelation(s: &BitSequence) -> Result<AutocorrCurve> {
    let n = s.bits.len();
    if n < 4 {
        return Err(Error::TooShort(n));
    }
    let mut words = vec![0u64; n.div_ceil(64) + 1];
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0i128);
    for (i, &b) in s.bits.iter().enumerate() {
        words[i / 64] |= u64::from(b & 1) << (i % 64);
        prefix.push(prefix[i] + i128::from(b & 1));
    }
    let ones = prefix[n];
    let big_n = n as i128;
    if ones == 0 || ones == big_n {
        return Err(Error::ZeroVariance);
    }
    let energy = (big_n * ones * (big_n - ones)) as f64;
    let max_lag = n / 2;
    let mut values = Vec::with_capacity(max_lag + 1);
    values.push(1.0);
    for k in 1..=max_lag {
        let c = i128::from(co_occurrences(&words, k));
        let head_tail = prefix[n - k] + (ones - prefix[k]);
        let num = big_n * big_n * c - big_n * ones * head_tail + (n - k) as i128 * ones * ones;
        values.push(num as f64 / energy);
    }
    Ok(AutocorrCurve { lags: (0..=max_lag).collect(), values, step: s.step })
}

/// `sum_i x_i x_{i+k}` over a bitset whose last word is zero padding.
fn co_occurrences(words: &[u64], k: usize) -> u64 {
    let (q, r) = (k / 64, k % 64);
    let len = words.len() - 1;
    let mut total = 0u64;
    for i in 0..len.saturating_sub(q) {
        let shifted = if r == 0 { words[i + q] } else { (words[i + q] >> r) | (words[i + q + 1] << (64 - r)) };
        total += u64::from((words[i] & shifted).count_ones());
    }
    total
}

/// Autocorrelation for each step, resampled to [`RESAMPLED_LEN`] lags.
pub fn step_sweep(m: &BinaryImage, steps: &[usize]) -> Result<AutocorrMatrix> {
    step_sweep_with(m, steps, Execution::default())
}

pub fn step_sweep_with(m: &BinaryImage, steps: &[usize], exec: Execution) -> Result<AutocorrMatrix> {
    if steps.is_empty() {
        return Err(Error::InvalidConfig("empty step list".into()));
    }
    let mut steps = steps.to_vec();
    steps.sort_unstable();
    steps.dedup();
    let curves = exec.try_map(&steps, |&step| {
        column_bits(m, step)
            .and_then(|s| autocorrelation(&s))
            .map(|c| c.resample(RESAMPLED_LEN))
            .map_err(|e| Error::at_step(step, e))
    })?;
    Ok(AutocorrMatrix { steps, curves })
}
