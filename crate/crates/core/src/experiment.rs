//! Monte-Carlo benchmark over many independent bandit runs.
//!
//! Run `r` draws its task from the task stream of `(base_seed, r)`, shared by
//! every policy, and each policy plays it with its own play stream
//! `(base_seed, r, policy_index)`. Runs execute in parallel in fixed-size
//! batches; per-run results are folded into the curves in ascending run order,
//! so output does not depend on the worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bandit::BanditTask;
use crate::error::{invalid, Error, Result};
use crate::estimate::SampleAverageEstimator;
use crate::policy::{sample_action, BoundsMode, PolicySpec};
use crate::seed;

const RUN_BATCH: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_arms: usize,
    pub runs: usize,
    pub plays: usize,
    pub base_seed: u64,
    pub policies: Vec<PolicySpec>,
}

impl ExperimentConfig {
    /// Ten arms, 1000 runs of 1000 plays, fuzzy(xi = 0.04) against softmax(tau = 0.1).
    pub fn benchmark_default() -> Self {
        Self {
            n_arms: 10,
            runs: 1000,
            plays: 1000,
            base_seed: 42,
            policies: vec![PolicySpec::fuzzy(0.04), PolicySpec::softmax(0.1)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_arms < 2 {
            return Err(invalid("n_arms", format!("must be >= 2, got {}", self.n_arms)));
        }
        if self.runs < 1 {
            return Err(invalid("runs", "must be >= 1"));
        }
        if self.plays < 1 {
            return Err(invalid("plays", "must be >= 1"));
        }
        if self.policies.is_empty() {
            return Err(invalid("policies", "at least one policy is required"));
        }
        for p in &self.policies {
            p.validate()?;
        }
        Ok(())
    }
}

/// One step of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlayRecord {
    pub action: usize,
    pub reward: f64,
    pub optimal: bool,
}

/// Plays `policy` on `task` for `plays` steps, learning with sample averages.
pub fn run_single<R: rand::Rng + ?Sized>(
    task: &BanditTask,
    policy: &PolicySpec,
    plays: usize,
    rng: &mut R,
) -> Result<Vec<PlayRecord>> {
    if plays < 1 {
        return Err(invalid("plays", "must be >= 1"));
    }
    let mut estimator = SampleAverageEstimator::new(task.len())?;
    let mut records = Vec::with_capacity(plays);
    for _ in 0..plays {
        let dist = policy.distribution(&estimator.values())?;
        let action = sample_action(&dist, rng);
        let reward = task.pull(action, rng)?;
        estimator.update(action, reward)?;
        records.push(PlayRecord {
            action,
            reward,
            optimal: task.is_optimal(action),
        });
    }
    Ok(records)
}

/// Per-play averages across runs for one policy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LearningCurve {
    pub policy: PolicySpec,
    /// Percentage of runs that pulled the optimal arm, per play.
    pub pct_optimal: Vec<f64>,
    pub avg_reward: Vec<f64>,
}

impl LearningCurve {
    pub fn len(&self) -> usize {
        self.pct_optimal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pct_optimal.is_empty()
    }
}

/// Max / mean / median digest of a %-optimal curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub maximum: f64,
    pub mean: f64,
    pub median: f64,
    pub max_minus_median: f64,
}

/// Median uses the mean of the two central order statistics for even lengths.
pub fn summarize(values: &[f64]) -> Result<SummaryStats> {
    if values.is_empty() {
        return Err(Error::Empty("curve"));
    }
    if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "curve value",
            value: bad,
        });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = sorted.len();
    let median = if k % 2 == 1 {
        sorted[k / 2]
    } else {
        0.5 * (sorted[k / 2 - 1] + sorted[k / 2])
    };
    let maximum = sorted[k - 1];
    let mean = values.iter().sum::<f64>() / k as f64;
    Ok(SummaryStats {
        maximum,
        mean,
        median,
        max_minus_median: maximum - median,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub curves: Vec<LearningCurve>,
    pub summaries: Vec<SummaryStats>,
}

struct RunOutcome {
    // [policy][play]
    optimal: Vec<Vec<bool>>,
    rewards: Vec<Vec<f64>>,
}

fn play_run(config: &ExperimentConfig, run: usize) -> Result<RunOutcome> {
    let task = BanditTask::generate(config.n_arms, &mut seed::task_rng(config.base_seed, run as u64))?;
    let mut optimal = Vec::with_capacity(config.policies.len());
    let mut rewards = Vec::with_capacity(config.policies.len());
    for (p, policy) in config.policies.iter().enumerate() {
        let mut rng = seed::play_rng(config.base_seed, run as u64, p as u64);
        let records = run_single(&task, policy, config.plays, &mut rng)?;
        optimal.push(records.iter().map(|r| r.optimal).collect());
        rewards.push(records.iter().map(|r| r.reward).collect());
    }
    Ok(RunOutcome { optimal, rewards })
}

/// Runs the benchmark on the current rayon pool.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let n_policies = config.policies.len();
    let mut optimal_counts = vec![vec![0u64; config.plays]; n_policies];
    let mut reward_sums = vec![vec![0.0f64; config.plays]; n_policies];

    let mut start = 0;
    while start < config.runs {
        let end = (start + RUN_BATCH).min(config.runs);
        let outcomes: Vec<RunOutcome> = (start..end)
            .into_par_iter()
            .map(|run| play_run(config, run))
            .collect::<Result<_>>()?;
        for outcome in outcomes {
            for p in 0..n_policies {
                for (t, &hit) in outcome.optimal[p].iter().enumerate() {
                    optimal_counts[p][t] += hit as u64;
                }
                for (sum, r) in reward_sums[p].iter_mut().zip(&outcome.rewards[p]) {
                    *sum += r;
                }
            }
        }
        start = end;
    }

    let runs = config.runs as f64;
    let curves: Vec<LearningCurve> = config
        .policies
        .iter()
        .zip(optimal_counts.iter().zip(&reward_sums))
        .map(|(policy, (counts, sums))| LearningCurve {
            policy: *policy,
            pct_optimal: counts.iter().map(|&c| 100.0 * c as f64 / runs).collect(),
            avg_reward: sums.iter().map(|s| s / runs).collect(),
        })
        .collect();
    let summaries = curves
        .iter()
        .map(|c| summarize(&c.pct_optimal))
        .collect::<Result<_>>()?;
    Ok(ExperimentResult { curves, summaries })
}

/// Runs the benchmark on a dedicated pool of `threads` workers (0 = rayon default).
pub fn run_experiment_with_threads(
    config: &ExperimentConfig,
    threads: usize,
) -> Result<ExperimentResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| invalid("threads", e.to_string()))?;
    pool.install(|| run_experiment(config))
}

/// Policy family swept over one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepKind {
    Fuzzy { bounds: BoundsMode },
    Softmax,
    EpsilonGreedy,
}

impl SweepKind {
    pub fn with_parameter(self, value: f64) -> PolicySpec {
        match self {
            SweepKind::Fuzzy { bounds } => PolicySpec::Fuzzy { xi: value, bounds },
            SweepKind::Softmax => PolicySpec::Softmax { tau: value },
            SweepKind::EpsilonGreedy => PolicySpec::EpsilonGreedy { epsilon: value },
        }
    }

    pub fn name(self) -> &'static str {
        self.with_parameter(0.0).kind()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub kind: SweepKind,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub policy: PolicySpec,
    pub parameter: f64,
    pub summary: SummaryStats,
    pub curve: LearningCurve,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Per swept kind, the index into `rows` with the highest mean %-optimal
    /// (first wins on ties).
    pub best: Vec<usize>,
}

/// One experiment per grid point. Every grid point reuses `base`'s seed, run
/// count and horizon, so all points face the same tasks. `base.policies` is
/// ignored.
pub fn sweep(base: &ExperimentConfig, grid: &[SweepAxis], threads: usize) -> Result<SweepResult> {
    if grid.iter().all(|axis| axis.values.is_empty()) {
        return Err(invalid("grid", "parameter grid is empty"));
    }
    let mut rows = Vec::new();
    let mut best = Vec::new();
    for axis in grid.iter().filter(|a| !a.values.is_empty()) {
        let first = rows.len();
        for &value in &axis.values {
            let policy = axis.kind.with_parameter(value);
            let config = ExperimentConfig {
                policies: vec![policy],
                ..base.clone()
            };
            let mut result = run_experiment_with_threads(&config, threads)?;
            rows.push(SweepRow {
                policy,
                parameter: value,
                summary: result.summaries[0],
                curve: result.curves.swap_remove(0),
            });
        }
        let winner = (first..rows.len())
            .reduce(|a, b| {
                if rows[b].summary.mean > rows[a].summary.mean {
                    b
                } else {
                    a
                }
            })
            .expect("axis has values");
        best.push(winner);
    }
    Ok(SweepResult { rows, best })
}

/// First 0-based play at which `curve` reaches `fraction` of the mean over its
/// final tenth. Returns `None` if it never does.
pub fn settling_play(curve: &[f64], fraction: f64) -> Option<usize> {
    if curve.is_empty() {
        return None;
    }
    let tail = (curve.len() / 10).max(1);
    let plateau = curve[curve.len() - tail..].iter().sum::<f64>() / tail as f64;
    curve.iter().position(|&v| v >= fraction * plateau)
}
