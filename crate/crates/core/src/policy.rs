//! Action-selection policies.
//!
//! Every policy maps an [`ActionValues`] vector to a [`PolicyDistribution`]
//! that is non-negative, sums to one, and never ranks a lower-valued action
//! above a higher-valued one. Sampling from the distribution is a separate
//! step ([`sample_action`]) so the same inverse-CDF draw serves every policy.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, invalid, Error, Result};
use crate::fuzzy::FuzzyRuleBase;

/// Current action-value estimates, one per action. All entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionValues(Vec<f64>);

impl ActionValues {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("action-value vector"));
        }
        for &v in &values {
            ensure_finite("action value", v)?;
        }
        Ok(Self(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    fn min_max(&self) -> (f64, f64) {
        self.0
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    fn argmax_set(&self) -> Vec<usize> {
        let (_, hi) = self.min_max();
        self.0
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v == hi)
            .map(|(i, _)| i)
            .collect()
    }
}

impl TryFrom<Vec<f64>> for ActionValues {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl AsRef<[f64]> for ActionValues {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Probability vector over actions.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyDistribution(Vec<f64>);

impl PolicyDistribution {
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty("action set"));
        }
        Ok(Self(vec![1.0 / n as f64; n]))
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for PolicyDistribution {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Divides non-negative preference values by their sum.
pub fn normalize(t_values: &[f64]) -> Result<PolicyDistribution> {
    if t_values.is_empty() {
        return Err(Error::Empty("preference vector"));
    }
    let mut total = 0.0;
    for &t in t_values {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Degenerate(format!(
                "preference values must be finite and >= 0, got {t}"
            )));
        }
        total += t;
    }
    if total <= 0.0 {
        return Err(Error::Degenerate("all preference values are zero".into()));
    }
    Ok(PolicyDistribution(
        t_values.iter().map(|&t| t / total).collect(),
    ))
}

/// How the fuzzy policy chooses the value range `[alpha, beta]` its rule base covers.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum BoundsMode {
    /// Rebuild per decision with `alpha = min Q`, `beta = max Q`.
    #[default]
    Adaptive,
    /// Use a fixed range for every decision.
    Fixed { alpha: f64, beta: f64 },
}

impl BoundsMode {
    fn validate(&self) -> Result<()> {
        if let BoundsMode::Fixed { alpha, beta } = *self {
            ensure_finite("alpha", alpha)?;
            ensure_finite("beta", beta)?;
            if alpha >= beta {
                return Err(invalid(
                    "bounds",
                    format!("fixed bounds need alpha < beta, got [{alpha}, {beta}]"),
                ));
            }
        }
        Ok(())
    }
}

/// Serialized as `"adaptive"` or `{"alpha": a, "beta": b}`.
impl Serialize for BoundsMode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Fixed {
            alpha: f64,
            beta: f64,
        }
        match *self {
            BoundsMode::Adaptive => s.serialize_str("adaptive"),
            BoundsMode::Fixed { alpha, beta } => Fixed { alpha, beta }.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for BoundsMode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Name(String),
            Fixed { alpha: f64, beta: f64 },
        }
        match Repr::deserialize(d)? {
            Repr::Name(name) if name == "adaptive" => Ok(BoundsMode::Adaptive),
            Repr::Name(name) => Err(serde::de::Error::custom(format!(
                "unknown bounds mode `{name}`, expected \"adaptive\" or {{\"alpha\", \"beta\"}}"
            ))),
            Repr::Fixed { alpha, beta } => Ok(BoundsMode::Fixed { alpha, beta }),
        }
    }
}

/// A policy kind together with its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicySpec {
    Fuzzy {
        xi: f64,
        #[serde(default)]
        bounds: BoundsMode,
    },
    Softmax {
        tau: f64,
    },
    EpsilonGreedy {
        epsilon: f64,
    },
    Greedy,
    Uniform,
}

impl PolicySpec {
    pub fn fuzzy(xi: f64) -> Self {
        PolicySpec::Fuzzy {
            xi,
            bounds: BoundsMode::Adaptive,
        }
    }

    pub fn softmax(tau: f64) -> Self {
        PolicySpec::Softmax { tau }
    }

    pub fn epsilon_greedy(epsilon: f64) -> Self {
        PolicySpec::EpsilonGreedy { epsilon }
    }

    /// Short kind name as used in config files and CSV output.
    pub fn kind(&self) -> &'static str {
        match self {
            PolicySpec::Fuzzy { .. } => "fuzzy",
            PolicySpec::Softmax { .. } => "softmax",
            PolicySpec::EpsilonGreedy { .. } => "epsilon_greedy",
            PolicySpec::Greedy => "greedy",
            PolicySpec::Uniform => "uniform",
        }
    }

    /// The kind's tunable parameter, if it has one.
    pub fn parameter(&self) -> Option<f64> {
        match *self {
            PolicySpec::Fuzzy { xi, .. } => Some(xi),
            PolicySpec::Softmax { tau } => Some(tau),
            PolicySpec::EpsilonGreedy { epsilon } => Some(epsilon),
            PolicySpec::Greedy | PolicySpec::Uniform => None,
        }
    }

    /// Human-readable label, e.g. `fuzzy(xi=0.04)`.
    pub fn label(&self) -> String {
        match *self {
            PolicySpec::Fuzzy {
                xi,
                bounds: BoundsMode::Adaptive,
            } => format!("fuzzy(xi={xi})"),
            PolicySpec::Fuzzy {
                xi,
                bounds: BoundsMode::Fixed { alpha, beta },
            } => format!("fuzzy(xi={xi};bounds=[{alpha};{beta}])"),
            PolicySpec::Softmax { tau } => format!("softmax(tau={tau})"),
            PolicySpec::EpsilonGreedy { epsilon } => format!("epsilon_greedy(epsilon={epsilon})"),
            PolicySpec::Greedy => "greedy".into(),
            PolicySpec::Uniform => "uniform".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PolicySpec::Fuzzy { xi, bounds } => {
                if !(0.0..=1.0).contains(&xi) {
                    return Err(invalid("xi", format!("must lie in [0, 1], got {xi}")));
                }
                bounds.validate()
            }
            PolicySpec::Softmax { tau } => {
                if tau > 0.0 && tau.is_finite() {
                    Ok(())
                } else {
                    Err(invalid("tau", format!("must be finite and > 0, got {tau}")))
                }
            }
            PolicySpec::EpsilonGreedy { epsilon } => {
                if (0.0..=1.0).contains(&epsilon) {
                    Ok(())
                } else {
                    Err(invalid("epsilon", format!("must lie in [0, 1], got {epsilon}")))
                }
            }
            PolicySpec::Greedy | PolicySpec::Uniform => Ok(()),
        }
    }

    /// Distribution this policy assigns to the given estimates.
    pub fn distribution(&self, q: &ActionValues) -> Result<PolicyDistribution> {
        match *self {
            PolicySpec::Fuzzy { xi, bounds } => fuzzy_policy(q, xi, bounds),
            PolicySpec::Softmax { tau } => softmax_policy(q, tau),
            PolicySpec::EpsilonGreedy { epsilon } => epsilon_greedy_policy(q, epsilon),
            PolicySpec::Greedy => epsilon_greedy_policy(q, 0.0),
            PolicySpec::Uniform => PolicyDistribution::uniform(q.len()),
        }
    }
}

/// Fuzzy policy: map each estimate through the rule base, then normalize.
///
/// With adaptive bounds an all-equal `q` has no range to cover and yields the
/// uniform distribution. With fixed bounds, estimates far enough below `alpha`
/// can all map to exactly zero; that case also falls back to uniform.
pub fn fuzzy_policy(q: &ActionValues, xi: f64, bounds: BoundsMode) -> Result<PolicyDistribution> {
    let n = q.len();
    if n < 2 {
        return Err(invalid("n", format!("fuzzy policy needs at least 2 actions, got {n}")));
    }
    let (alpha, beta) = match bounds {
        BoundsMode::Adaptive => {
            let (lo, hi) = q.min_max();
            if lo == hi {
                PolicySpec::fuzzy(xi).validate()?;
                return PolicyDistribution::uniform(n);
            }
            (lo, hi)
        }
        BoundsMode::Fixed { alpha, beta } => (alpha, beta),
    };
    let rb = FuzzyRuleBase::new(n, alpha, beta, xi)?;
    let t = q
        .as_slice()
        .iter()
        .map(|&v| rb.infer(v))
        .collect::<Result<Vec<_>>>()?;
    if t.iter().all(|&x| x == 0.0) {
        return PolicyDistribution::uniform(n);
    }
    normalize(&t)
}

/// Boltzmann policy `exp(Q(a)/tau) / sum_b exp(Q(b)/tau)`, evaluated after
/// subtracting `max Q`.
pub fn softmax_policy(q: &ActionValues, tau: f64) -> Result<PolicyDistribution> {
    PolicySpec::softmax(tau).validate()?;
    let (_, hi) = q.min_max();
    let weights: Vec<f64> = q
        .as_slice()
        .iter()
        .map(|&v| ((v - hi) / tau).exp())
        .collect();
    normalize(&weights)
}

/// Epsilon-greedy: every action gets `epsilon / n`; the maximizers share the
/// remaining `1 - epsilon` equally.
pub fn epsilon_greedy_policy(q: &ActionValues, epsilon: f64) -> Result<PolicyDistribution> {
    PolicySpec::epsilon_greedy(epsilon).validate()?;
    let n = q.len() as f64;
    let best = q.argmax_set();
    let floor = epsilon / n;
    let bonus = (1.0 - epsilon) / best.len() as f64;
    let mut probs = vec![floor; q.len()];
    for a in best {
        probs[a] += bonus;
    }
    Ok(PolicyDistribution(probs))
}

/// A maximizing action, ties broken uniformly with `rng`.
pub fn greedy_action<R: Rng + ?Sized>(q: &ActionValues, rng: &mut R) -> usize {
    let best = q.argmax_set();
    if best.len() == 1 {
        best[0]
    } else {
        best[rng.random_range(0..best.len())]
    }
}

/// Draws an action by inverse CDF from one uniform variate.
pub fn sample_action<R: Rng + ?Sized>(dist: &PolicyDistribution, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    sample_action_with(dist, u)
}

/// Inverse-CDF lookup for a given `u` in `[0, 1)`.
///
/// Returns the first index whose cumulative probability exceeds `u`. The last
/// positive-probability action absorbs any rounding shortfall, as if the final
/// cumulative sum were exactly 1.
pub fn sample_action_with(dist: &PolicyDistribution, u: f64) -> usize {
    let mut cumulative = 0.0;
    let mut last_positive = 0;
    for (a, &p) in dist.0.iter().enumerate() {
        if p > 0.0 {
            cumulative += p;
            last_positive = a;
            if u < cumulative {
                return a;
            }
        }
    }
    last_positive
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(v: &[f64]) -> ActionValues {
        ActionValues::new(v.to_vec()).unwrap()
    }

    fn assert_probs(d: &PolicyDistribution, expected: &[f64], tol: f64) {
        assert_eq!(d.len(), expected.len());
        for (p, e) in d.probs().iter().zip(expected) {
            assert!((p - e).abs() <= tol, "{:?} vs {:?}", d.probs(), expected);
        }
    }

    #[test]
    fn action_values_reject_bad_input() {
        assert!(ActionValues::new(vec![]).is_err());
        assert!(ActionValues::new(vec![0.0, f64::NAN]).is_err());
        assert!(ActionValues::new(vec![f64::NEG_INFINITY]).is_err());
    }

    #[test]
    fn normalize_examples() {
        assert_probs(&normalize(&[1.0; 4]).unwrap(), &[0.25; 4], 0.0);
        assert_probs(&normalize(&[0.0, 0.0, 2.0]).unwrap(), &[0.0, 0.0, 1.0], 0.0);
        assert_probs(
            &normalize(&[1.0, 2.0, 3.0, 4.0]).unwrap(),
            &[0.1, 0.2, 0.3, 0.4],
            1e-15,
        );
        assert!(normalize(&[0.0, 0.0]).is_err());
        assert!(normalize(&[1.0, -0.5]).is_err());
        assert!(normalize(&[]).is_err());
    }

    #[test]
    fn fuzzy_equal_values_is_uniform() {
        for xi in [0.0, 0.04, 0.5, 1.0] {
            let d = fuzzy_policy(&q(&[0.3, 0.3, 0.3]), xi, BoundsMode::Adaptive).unwrap();
            assert_probs(&d, &[1.0 / 3.0; 3], 0.0);
        }
    }

    #[test]
    fn fuzzy_two_actions_greedy_dominant() {
        let d = fuzzy_policy(&q(&[0.0, 1.0]), 0.0, BoundsMode::Adaptive).unwrap();
        // sigma_x = 1/5, so the cross weight is w = e^-25; T_1 = w/(1+w), T_2 = 1/(1+w)
        let w = (-25.0f64).exp();
        let (t1, t2) = (w / (1.0 + w), 1.0 / (1.0 + w));
        let expected = t1 / (t1 + t2);
        assert!((d.probs()[0] - expected).abs() < 1e-20);
        assert!(d.probs()[0] < 2e-11);
        assert!(d.probs()[1] > 1.0 - 2e-11);


        // adaptive bounds make the cross weight scale-free
        let d = fuzzy_policy(&q(&[-1.0, 1.0]), 0.0, BoundsMode::Adaptive).unwrap();
        assert!((d.probs()[0] - expected).abs() < 1e-20);
    }

    #[test]
    fn fuzzy_plateau_half_vs_one() {
        let v = q(&[0.3, -1.2, 0.8, 0.81, 2.0]);
        let a = fuzzy_policy(&v, 0.5, BoundsMode::Adaptive).unwrap();
        let b = fuzzy_policy(&v, 1.0, BoundsMode::Adaptive).unwrap();
        assert_probs(&a, b.probs(), 1e-12);
    }

    #[test]
    fn fuzzy_errors() {
        assert!(fuzzy_policy(&q(&[1.0]), 0.1, BoundsMode::Adaptive).is_err());
        assert!(fuzzy_policy(&q(&[1.0, 2.0]), 1.5, BoundsMode::Adaptive).is_err());
        assert!(fuzzy_policy(&q(&[1.0, 1.0]), -0.5, BoundsMode::Adaptive).is_err());
    }

    #[test]
    fn fuzzy_fixed_bounds_far_outside_range() {
        let bounds = BoundsMode::Fixed {
            alpha: 0.0,
            beta: 1.0,
        };
        let d = fuzzy_policy(&q(&[-1e4, -2e4, -3e4]), 0.1, bounds).unwrap();
        assert_probs(&d, &[1.0 / 3.0; 3], 1e-15);
        let d = fuzzy_policy(&q(&[0.0, 1.0, 0.5]), 0.1, bounds).unwrap();
        assert!(d.probs()[1] > d.probs()[2] && d.probs()[2] >= d.probs()[0]);
    }

    #[test]
    fn softmax_examples() {
        assert_probs(&softmax_policy(&q(&[3.0; 5]), 0.7).unwrap(), &[0.2; 5], 1e-15);
        assert_probs(
            &softmax_policy(&q(&[0.0, 2f64.ln()]), 1.0).unwrap(),
            &[1.0 / 3.0, 2.0 / 3.0],
            1e-15,
        );
        assert_probs(&softmax_policy(&q(&[0.0, 1.0]), 1e6).unwrap(), &[0.5, 0.5], 1e-6);
        assert!(softmax_policy(&q(&[0.0]), 0.0).is_err());
        assert!(softmax_policy(&q(&[0.0]), -1.0).is_err());
    }

    #[test]
    fn softmax_prefers_higher_values() {
        let d = softmax_policy(&q(&[0.0, 1.0, 0.5]), 0.1).unwrap();
        assert!(d.probs()[1] > d.probs()[2] && d.probs()[2] > d.probs()[0]);
    }

    #[test]
    fn epsilon_greedy_examples() {
        let v = q(&[1.0, 0.0, 0.0, 0.0]);
        assert_probs(&epsilon_greedy_policy(&v, 0.0).unwrap(), &[1.0, 0.0, 0.0, 0.0], 0.0);
        assert_probs(&epsilon_greedy_policy(&v, 1.0).unwrap(), &[0.25; 4], 0.0);
        assert_probs(
            &epsilon_greedy_policy(&q(&[2.0, 2.0, 0.0, 0.0]), 0.2).unwrap(),
            &[0.45, 0.45, 0.05, 0.05],
            1e-15,
        );
        assert!(epsilon_greedy_policy(&v, 1.1).is_err());
    }

    #[test]
    fn greedy_action_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(greedy_action(&q(&[0.0, 3.0, 1.0]), &mut rng), 1);
        assert_eq!(greedy_action(&q(&[5.0]), &mut rng), 0);
        let ties = q(&[1.0, 1.0]);
        let draws = 100_000;
        let ones = (0..draws)
            .filter(|_| greedy_action(&ties, &mut rng) == 1)
            .count();
        assert!((ones as f64 / draws as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn sample_action_examples() {
        let point = normalize(&[0.0, 1.0, 0.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((0..1000).all(|_| sample_action(&point, &mut rng) == 1));

        let half = normalize(&[0.5, 0.5]).unwrap();
        assert_eq!(sample_action_with(&half, 0.25), 0);
        assert_eq!(sample_action_with(&half, 0.75), 1);
        // rounding shortfall lands on the last action with mass
        let tail = PolicyDistribution(vec![0.3, 0.3, 0.3999999, 0.0]);
        assert_eq!(sample_action_with(&tail, 0.99999999), 2);
        assert_eq!(sample_action_with(&normalize(&[0.0, 1.0]).unwrap(), 0.0), 1);
    }

    #[test]
    fn spec_serde_shapes() {
        let s: PolicySpec =
            serde_json::from_str(r#"{"kind": "fuzzy", "xi": 0.04, "bounds": "adaptive"}"#).unwrap();
        assert_eq!(s, PolicySpec::fuzzy(0.04));
        let s: PolicySpec = serde_json::from_str(r#"{"kind": "fuzzy", "xi": 0.2}"#).unwrap();
        assert_eq!(s, PolicySpec::fuzzy(0.2));
        let s: PolicySpec = serde_json::from_str(
            r#"{"kind": "fuzzy", "xi": 0.2, "bounds": {"alpha": -1, "beta": 2}}"#,
        )
        .unwrap();
        assert_eq!(
            s,
            PolicySpec::Fuzzy {
                xi: 0.2,
                bounds: BoundsMode::Fixed {
                    alpha: -1.0,
                    beta: 2.0
                }
            }
        );
        let s: PolicySpec = serde_json::from_str(r#"{"kind": "softmax", "tau": 0.1}"#).unwrap();
        assert_eq!(s, PolicySpec::softmax(0.1));
        let s: PolicySpec = serde_json::from_str(r#"{"kind": "uniform"}"#).unwrap();
        assert_eq!(s, PolicySpec::Uniform);
        assert!(serde_json::from_str::<PolicySpec>(r#"{"kind": "softmax"}"#).is_err());
        assert!(serde_json::from_str::<PolicySpec>(r#"{"kind": "fuzzy", "xi": 0.1, "bounds": "global"}"#).is_err());
        assert_eq!(
            serde_json::to_string(&PolicySpec::fuzzy(0.04)).unwrap(),
            r#"{"kind":"fuzzy","xi":0.04,"bounds":"adaptive"}"#
        );
    }
}
