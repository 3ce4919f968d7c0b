//! Fuzzy action selection for value-based reinforcement learning, baseline
//! policies, and an n-armed bandit benchmark harness.
//!
//! The pieces follow the decision loop of a learning agent:
//!
//! * [`estimate`]: sample-average action values.
//! * [`fuzzy`]: the rule base that maps an action value to a preference.
//! * [`policy`]: preferences to a probability distribution, plus softmax,
//!   epsilon-greedy, greedy and uniform baselines and inverse-CDF sampling.
//! * [`bandit`]: the Gaussian n-armed testbed.
//! * [`experiment`]: many seeded runs aggregated into learning curves and
//!   max / mean / median summaries.
//! * [`report`]: config parsing and CSV / JSON / SVG output.

pub mod bandit;
pub mod error;
pub mod estimate;
pub mod experiment;
pub mod fuzzy;
pub mod policy;
pub mod report;
pub mod seed;

pub use bandit::BanditTask;
pub use error::{Error, Result};
pub use estimate::SampleAverageEstimator;
pub use experiment::{
    run_experiment, run_experiment_with_threads, run_single, summarize, sweep, ExperimentConfig,
    ExperimentResult, LearningCurve, PlayRecord, SummaryStats, SweepAxis, SweepKind, SweepResult,
    SweepRow,
};
pub use fuzzy::{build_rule_base, gaussian_membership, infer, output_center, FuzzyRuleBase, GaussianMf};
pub use policy::{
    epsilon_greedy_policy, fuzzy_policy, greedy_action, normalize, sample_action, softmax_policy,
    ActionValues, BoundsMode, PolicyDistribution, PolicySpec,
};
