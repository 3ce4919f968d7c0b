//! Sample-average action-value estimation in incremental form.

use crate::error::{ensure_finite, invalid, Error, Result};
use crate::policy::ActionValues;

/// Running mean of the rewards observed for each action.
///
/// Untouched actions report exactly 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleAverageEstimator {
    counts: Vec<u64>,
    means: Vec<f64>,
}

impl SampleAverageEstimator {
    pub fn new(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(invalid("n", "estimator needs at least one action"));
        }
        Ok(Self {
            counts: vec![0; n],
            means: vec![0.0; n],
        })
    }

    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }

    /// Folds `reward` into the mean of `action` (0-based): `Q += (r - Q) / n_a`.
    pub fn update(&mut self, action: usize, reward: f64) -> Result<()> {
        if action >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: action,
                len: self.len(),
            });
        }
        ensure_finite("reward", reward)?;
        self.counts[action] += 1;
        let mean = &mut self.means[action];
        *mean += (reward - *mean) / self.counts[action] as f64;
        Ok(())
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn values(&self) -> ActionValues {
        ActionValues::new(self.means.clone()).expect("means stay finite under finite rewards")
    }

    pub fn reset(&mut self) {
        self.counts.fill(0);
        self.means.fill(0.0);
    }
}
