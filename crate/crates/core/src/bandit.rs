//! Stationary n-armed Gaussian bandit testbed.
//!
//! Arm means are drawn from N(0, 1) per task; each pull returns a reward drawn
//! from N(mean, 1).

use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};

pub const TASK_CSV_HEADER: &str = "arm_index,true_value,is_optimal";

#[derive(Debug, Clone, PartialEq)]
pub struct BanditTask {
    true_values: Vec<f64>,
    optimal_action: usize,
}

impl BanditTask {
    /// Task with explicit arm means. The optimal action is the first maximizer.
    pub fn from_values(true_values: Vec<f64>) -> Result<Self> {
        if true_values.is_empty() {
            return Err(Error::Empty("arm set"));
        }
        let mut optimal_action = 0;
        for (a, &v) in true_values.iter().enumerate() {
            crate::error::ensure_finite("true value", v)?;
            if v > true_values[optimal_action] {
                optimal_action = a;
            }
        }
        Ok(Self {
            true_values,
            optimal_action,
        })
    }

    /// Draws a fresh task with `n` arms whose means are i.i.d. N(0, 1).
    pub fn generate<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n < 1 {
            return Err(invalid("n_arms", "bandit needs at least one arm"));
        }
        let values = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        Self::from_values(values)
    }

    pub fn len(&self) -> usize {
        self.true_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.true_values.is_empty()
    }

    pub fn true_values(&self) -> &[f64] {
        &self.true_values
    }

    pub fn optimal_action(&self) -> usize {
        self.optimal_action
    }

    /// Reward for pulling `action` (0-based).
    pub fn pull<R: Rng + ?Sized>(&self, action: usize, rng: &mut R) -> Result<f64> {
        let mean = *self.true_values.get(action).ok_or(Error::IndexOutOfRange {
            index: action,
            len: self.len(),
        })?;
        let noise: f64 = StandardNormal.sample(rng);
        Ok(mean + noise)
    }

    pub fn is_optimal(&self, action: usize) -> bool {
        action == self.optimal_action
    }

    /// `arm_index,true_value,is_optimal` rows, 1-based arm index.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(TASK_CSV_HEADER);
        out.push('\n');
        for (a, v) in self.true_values.iter().enumerate() {
            let _ = writeln!(out, "{},{v},{}", a + 1, self.is_optimal(a));
        }
        out
    }
}
