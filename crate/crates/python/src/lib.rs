//! Python bindings for `fuzzy_bandit`.
//!
//! Action indices are 0-based on both sides. Random draws go through an
//! explicit [`Rng`] object so Python callers control seeding.

use fuzzy_bandit::policy::{self, BoundsMode};
use fuzzy_bandit::{report, ActionValues, PolicyDistribution};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn py_err(e: fuzzy_bandit::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn action_values(q: Vec<f64>) -> PyResult<ActionValues> {
    ActionValues::new(q).map_err(py_err)
}

fn bounds(alpha: Option<f64>, beta: Option<f64>) -> PyResult<BoundsMode> {
    match (alpha, beta) {
        (None, None) => Ok(BoundsMode::Adaptive),
        (Some(alpha), Some(beta)) => Ok(BoundsMode::Fixed { alpha, beta }),
        _ => Err(PyValueError::new_err("alpha and beta must be given together")),
    }
}

fn distribution(probs: Vec<f64>) -> PyResult<PolicyDistribution> {
    // renormalizing keeps validation in one place; a valid input is unchanged
    policy::normalize(&probs).map_err(py_err)
}

/// Seeded ChaCha8 generator.
#[pyclass(module = "fuzzy_bandit_py")]
struct Rng(ChaCha8Rng);

#[pymethods]
impl Rng {
    #[new]
    fn new(seed: u64) -> Self {
        Rng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Generator for stream `tag` of (base_seed, run, policy), as used by experiments.
    #[staticmethod]
    fn stream(base_seed: u64, run: u64, policy: u64, tag: u64) -> Self {
        Rng(fuzzy_bandit::seed::stream_rng(base_seed, run, policy, tag))
    }
}

#[pyclass(module = "fuzzy_bandit_py", name = "FuzzyRuleBase")]
struct PyRuleBase(fuzzy_bandit::FuzzyRuleBase);

#[pymethods]
impl PyRuleBase {
    #[new]
    fn new(n: usize, alpha: f64, beta: f64, xi: f64) -> PyResult<Self> {
        fuzzy_bandit::build_rule_base(n, alpha, beta, xi)
            .map(PyRuleBase)
            .map_err(py_err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta()
    }

    #[getter]
    fn xi(&self) -> f64 {
        self.0.xi()
    }

    #[getter]
    fn sigma_x(&self) -> f64 {
        self.0.sigma_x()
    }

    #[getter]
    fn sigma_y(&self) -> f64 {
        self.0.sigma_y()
    }

    #[getter]
    fn input_centers(&self) -> Vec<f64> {
        self.0.input_centers().to_vec()
    }

    #[getter]
    fn output_centers(&self) -> Vec<f64> {
        self.0.output_centers().to_vec()
    }

    fn infer(&self, q: f64) -> PyResult<f64> {
        self.0.infer(q).map_err(py_err)
    }

    /// Membership curves as CSV text (`rule_index,variable,grid_value,membership`).
    #[pyo3(signature = (resolution = 201))]
    fn membership_csv(&self, resolution: usize) -> PyResult<String> {
        self.0
            .membership_curves(resolution)
            .map(|c| c.to_csv())
            .map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "FuzzyRuleBase(n={}, alpha={}, beta={}, xi={})",
            self.0.len(),
            self.0.alpha(),
            self.0.beta(),
            self.0.xi()
        )
    }
}

#[pyclass(module = "fuzzy_bandit_py", name = "SampleAverageEstimator")]
struct PyEstimator(fuzzy_bandit::SampleAverageEstimator);

#[pymethods]
impl PyEstimator {
    #[new]
    fn new(n: usize) -> PyResult<Self> {
        fuzzy_bandit::SampleAverageEstimator::new(n)
            .map(PyEstimator)
            .map_err(py_err)
    }

    fn update(&mut self, action: usize, reward: f64) -> PyResult<()> {
        self.0.update(action, reward).map_err(py_err)
    }

    #[getter]
    fn counts(&self) -> Vec<u64> {
        self.0.counts().to_vec()
    }

    #[getter]
    fn means(&self) -> Vec<f64> {
        self.0.means().to_vec()
    }

    fn reset(&mut self) {
        self.0.reset();
    }
}

#[pyclass(module = "fuzzy_bandit_py", name = "BanditTask")]
struct PyTask(fuzzy_bandit::BanditTask);

#[pymethods]
impl PyTask {
    #[new]
    fn new(true_values: Vec<f64>) -> PyResult<Self> {
        fuzzy_bandit::BanditTask::from_values(true_values)
            .map(PyTask)
            .map_err(py_err)
    }

    /// Draws arm values from N(0, 1).
    #[staticmethod]
    fn generate(n: usize, rng: &mut Rng) -> PyResult<Self> {
        fuzzy_bandit::BanditTask::generate(n, &mut rng.0)
            .map(PyTask)
            .map_err(py_err)
    }

    #[getter]
    fn true_values(&self) -> Vec<f64> {
        self.0.true_values().to_vec()
    }

    #[getter]
    fn optimal_action(&self) -> usize {
        self.0.optimal_action()
    }

    fn pull(&self, action: usize, rng: &mut Rng) -> PyResult<f64> {
        self.0.pull(action, &mut rng.0).map_err(py_err)
    }

    fn is_optimal(&self, action: usize) -> bool {
        self.0.is_optimal(action)
    }
}

/// Center of output set `rule` (0-based) in an `n`-rule base.
#[pyfunction]
fn output_center(xi: f64, rule: usize, n: usize) -> PyResult<f64> {
    fuzzy_bandit::output_center(xi, rule, n).map_err(py_err)
}

#[pyfunction]
fn normalize(t_values: Vec<f64>) -> PyResult<Vec<f64>> {
    policy::normalize(&t_values)
        .map(PolicyDistribution::into_inner)
        .map_err(py_err)
}

/// Fuzzy policy; pass both `alpha` and `beta` for fixed bounds.
#[pyfunction]
#[pyo3(signature = (q, xi, alpha = None, beta = None))]
fn fuzzy_policy(q: Vec<f64>, xi: f64, alpha: Option<f64>, beta: Option<f64>) -> PyResult<Vec<f64>> {
    policy::fuzzy_policy(&action_values(q)?, xi, bounds(alpha, beta)?)
        .map(PolicyDistribution::into_inner)
        .map_err(py_err)
}

#[pyfunction]
fn softmax_policy(q: Vec<f64>, tau: f64) -> PyResult<Vec<f64>> {
    policy::softmax_policy(&action_values(q)?, tau)
        .map(PolicyDistribution::into_inner)
        .map_err(py_err)
}

#[pyfunction]
fn epsilon_greedy_policy(q: Vec<f64>, epsilon: f64) -> PyResult<Vec<f64>> {
    policy::epsilon_greedy_policy(&action_values(q)?, epsilon)
        .map(PolicyDistribution::into_inner)
        .map_err(py_err)
}

#[pyfunction]
fn greedy_action(q: Vec<f64>, rng: &mut Rng) -> PyResult<usize> {
    Ok(policy::greedy_action(&action_values(q)?, &mut rng.0))
}

#[pyfunction]
fn sample_action(probs: Vec<f64>, rng: &mut Rng) -> PyResult<usize> {
    Ok(policy::sample_action(&distribution(probs)?, &mut rng.0))
}

/// Inverse-CDF lookup for a given uniform draw `u` in [0, 1).
#[pyfunction]
fn sample_action_with(probs: Vec<f64>, u: f64) -> PyResult<usize> {
    Ok(policy::sample_action_with(&distribution(probs)?, u))
}

/// Max / mean / median of a curve.
#[pyfunction]
fn summarize<'py>(py: Python<'py>, values: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
    let s = fuzzy_bandit::summarize(&values).map_err(py_err)?;
    stats_dict(py, &s)
}

fn stats_dict<'py>(py: Python<'py>, s: &fuzzy_bandit::SummaryStats) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("maximum", s.maximum)?;
    d.set_item("mean", s.mean)?;
    d.set_item("median", s.median)?;
    d.set_item("max_minus_median", s.max_minus_median)?;
    Ok(d)
}

/// Runs an experiment from a JSON config and returns one dict per policy
/// with its label, curves and summary. `threads = 0` uses all cores.
#[pyfunction]
#[pyo3(signature = (config_json, threads = 0))]
fn run_experiment<'py>(py: Python<'py>, config_json: &str, threads: usize) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let config = report::parse_config(config_json).map_err(py_err)?;
    let result = py
        .detach(|| fuzzy_bandit::run_experiment_with_threads(&config, threads))
        .map_err(py_err)?;
    let mut out = Vec::with_capacity(result.curves.len());
    for (curve, stats) in result.curves.iter().zip(&result.summaries) {
        let d = PyDict::new(py);
        d.set_item("policy", curve.policy.label())?;
        d.set_item("pct_optimal", curve.pct_optimal.clone())?;
        d.set_item("avg_reward", curve.avg_reward.clone())?;
        d.set_item("summary", stats_dict(py, stats)?)?;
        out.push(d);
    }
    Ok(out)
}

#[pymodule]
fn fuzzy_bandit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Rng>()?;
    m.add_class::<PyRuleBase>()?;
    m.add_class::<PyEstimator>()?;
    m.add_class::<PyTask>()?;
    m.add_function(wrap_pyfunction!(output_center, m)?)?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(fuzzy_policy, m)?)?;
    m.add_function(wrap_pyfunction!(softmax_policy, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon_greedy_policy, m)?)?;
    m.add_function(wrap_pyfunction!(greedy_action, m)?)?;
    m.add_function(wrap_pyfunction!(sample_action, m)?)?;
    m.add_function(wrap_pyfunction!(sample_action_with, m)?)?;
    m.add_function(wrap_pyfunction!(summarize, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
