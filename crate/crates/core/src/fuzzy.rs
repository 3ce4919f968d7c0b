//! Single-input single-output fuzzy system used as the value-to-preference
//! transformation of the fuzzy policy.
//!
//! The system has one rule per action. Rule `j` (0-based here) reads
//! "if Q is A_j then T is B_j", with Gaussian input sets A_j spread uniformly
//! over `[alpha, beta]` and Gaussian output sets B_j whose centers are set by
//! the exploration knob `xi`. Product inference, a singleton fuzzifier and a
//! center-average defuzzifier reduce inference to a weighted mean of the output
//! centers:
//!
//! ```text
//! T(q) = sum_j o_j * w_j(q) / sum_j w_j(q),   w_j(q) = exp(-((q - I_j) / sigma_x)^2)
//! ```
//!
//! `sigma_y` only shapes the exported output membership curves; the
//! center-average defuzzifier never reads it.

use std::fmt::Write as _;

use crate::error::{ensure_finite, invalid, Result};

/// Width of the Gaussian bump that modulates the output centers, `0.15 * sqrt(2)`.
pub const XI_BUMP_WIDTH: f64 = 0.15 * std::f64::consts::SQRT_2;

/// Header of the membership-curve CSV.
pub const MEMBERSHIP_CSV_HEADER: &str = "rule_index,variable,grid_value,membership";

/// Gaussian membership function `exp(-((x - center) / sigma)^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMf {
    center: f64,
    sigma: f64,
}

impl GaussianMf {
    pub fn new(center: f64, sigma: f64) -> Result<Self> {
        ensure_finite("membership center", center)?;
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(invalid("sigma", format!("must be finite and > 0, got {sigma}")));
        }
        Ok(Self { center, sigma })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Membership degree of `x`. Errors on non-finite input.
    pub fn degree(&self, x: f64) -> Result<f64> {
        ensure_finite("membership input", x)?;
        Ok(self.degree_unchecked(x))
    }

    #[inline]
    fn degree_unchecked(&self, x: f64) -> f64 {
        let z = (x - self.center) / self.sigma;
        (-z * z).exp()
    }
}

/// Free-function form of [`GaussianMf::degree`].
pub fn gaussian_membership(x: f64, mf: &GaussianMf) -> Result<f64> {
    mf.degree(x)
}

/// `g(xi) = exp(-((xi - 0.5) / (0.15 * sqrt 2))^2)`, peaking at `xi = 0.5`.
pub fn xi_bump(xi: f64) -> f64 {
    let z = (xi - 0.5) / XI_BUMP_WIDTH;
    (-z * z).exp()
}

fn check_xi(xi: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&xi) {
        Ok(xi)
    } else {
        Err(invalid("xi", format!("must lie in [0, 1], got {xi}")))
    }
}

fn check_rule_count(n: usize) -> Result<usize> {
    if n >= 2 {
        Ok(n)
    } else {
        Err(invalid("n", format!("rule base needs at least 2 rules, got {n}")))
    }
}

/// Center of the output membership function of rule `rule` (0-based) in an
/// `n`-rule base.
///
/// Every rule below the top one gets `rule / (2 (n - 1)) * g(xi)`; the top rule
/// gets `max(1 - xi, g(xi) / 2)`.
pub fn output_center(xi: f64, rule: usize, n: usize) -> Result<f64> {
    check_xi(xi)?;
    check_rule_count(n)?;
    if rule >= n {
        return Err(crate::Error::IndexOutOfRange { index: rule, len: n });
    }
    let g = xi_bump(xi);
    Ok(if rule == n - 1 {
        (1.0 - xi).max(0.5 * g)
    } else {
        rule as f64 / (2.0 * (n - 1) as f64) * g
    })
}

/// The n-rule fuzzy system. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyRuleBase {
    alpha: f64,
    beta: f64,
    xi: f64,
    input_centers: Vec<f64>,
    sigma_x: f64,
    output_centers: Vec<f64>,
    sigma_y: f64,
}

impl FuzzyRuleBase {
    /// Builds the rule base for `n` actions whose values range over
    /// `[alpha, beta]`, tuned by `xi`.
    pub fn new(n: usize, alpha: f64, beta: f64, xi: f64) -> Result<Self> {
        check_rule_count(n)?;
        ensure_finite("alpha", alpha)?;
        ensure_finite("beta", beta)?;
        if alpha >= beta {
            return Err(invalid(
                "alpha",
                format!("lower bound must be below upper bound, got [{alpha}, {beta}]"),
            ));
        }
        check_xi(xi)?;

        let span = (n - 1) as f64;
        let input_centers = (0..n)
            .map(|j| {
                if j == 0 {
                    alpha
                } else if j == n - 1 {
                    beta
                } else {
                    (alpha * (span - j as f64) + beta * j as f64) / span
                }
            })
            .collect();
        let output_centers = (0..n)
            .map(|j| output_center(xi, j, n))
            .collect::<Result<Vec<_>>>()?;

        Ok(Self {
            alpha,
            beta,
            xi,
            input_centers,
            sigma_x: (beta - alpha) / (3 * n - 1) as f64,
            output_centers,
            sigma_y: 1.0 / (2 * n - 1) as f64,
        })
    }

    /// Replaces the output centers. Used to probe scale and constancy
    /// properties of the defuzzifier; the centers must be finite.
    pub fn with_output_centers(mut self, centers: Vec<f64>) -> Result<Self> {
        if centers.len() != self.len() {
            return Err(invalid(
                "output_centers",
                format!("expected {} entries, got {}", self.len(), centers.len()),
            ));
        }
        for &c in &centers {
            ensure_finite("output center", c)?;
        }
        self.output_centers = centers;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.input_centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.input_centers.is_empty()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn input_centers(&self) -> &[f64] {
        &self.input_centers
    }

    pub fn output_centers(&self) -> &[f64] {
        &self.output_centers
    }

    pub fn sigma_x(&self) -> f64 {
        self.sigma_x
    }

    pub fn sigma_y(&self) -> f64 {
        self.sigma_y
    }

    pub fn input_mf(&self, rule: usize) -> GaussianMf {
        GaussianMf {
            center: self.input_centers[rule],
            sigma: self.sigma_x,
        }
    }

    pub fn output_mf(&self, rule: usize) -> GaussianMf {
        GaussianMf {
            center: self.output_centers[rule],
            sigma: self.sigma_y,
        }
    }

    /// Center-average defuzzified output for a crisp input `q`.
    ///
    /// Inputs outside `[alpha, beta]` are accepted. The exponents are shifted
    /// by their maximum before exponentiation so that far-away inputs never
    /// underflow every weight; the shift cancels in the ratio. Summation runs
    /// in rule order, so results are bit-stable for a given rule base.
    pub fn infer(&self, q: f64) -> Result<f64> {
        ensure_finite("fuzzy input", q)?;
        let exponent = |c: f64| {
            let z = (q - c) / self.sigma_x;
            -z * z
        };
        let peak = self
            .input_centers
            .iter()
            .map(|&c| exponent(c))
            .fold(f64::NEG_INFINITY, f64::max);

        let mut num = 0.0;
        let mut den = 0.0;
        for (&c, &o) in self.input_centers.iter().zip(&self.output_centers) {
            let w = (exponent(c) - peak).exp();
            num += o * w;
            den += w;
        }
        Ok(num / den)
    }

    /// Samples every input and output membership function on a uniform grid.
    pub fn membership_curves(&self, resolution: usize) -> Result<MembershipCurves> {
        if resolution < 2 {
            return Err(invalid(
                "resolution",
                format!("need at least 2 samples, got {resolution}"),
            ));
        }
        let input_grid = uniform_grid(self.alpha, self.beta, resolution);
        let output_grid = uniform_grid(0.0, 1.0, resolution);
        let sample = |mf: GaussianMf, grid: &[f64]| -> Vec<f64> {
            grid.iter().map(|&x| mf.degree_unchecked(x)).collect()
        };
        let n = self.len();
        Ok(MembershipCurves {
            input: (0..n)
                .map(|j| sample(self.input_mf(j), &input_grid))
                .collect(),
            output: (0..n)
                .map(|j| sample(self.output_mf(j), &output_grid))
                .collect(),
            input_centers: self.input_centers.clone(),
            output_centers: self.output_centers.clone(),
            input_grid,
            output_grid,
        })
    }
}

/// Free-function form of [`FuzzyRuleBase::new`].
pub fn build_rule_base(n: usize, alpha: f64, beta: f64, xi: f64) -> Result<FuzzyRuleBase> {
    FuzzyRuleBase::new(n, alpha, beta, xi)
}

/// Free-function form of [`FuzzyRuleBase::infer`].
pub fn infer(rb: &FuzzyRuleBase, q: f64) -> Result<f64> {
    rb.infer(q)
}

/// `resolution` evenly spaced points from `lo` to `hi`, endpoints exact.
pub fn uniform_grid(lo: f64, hi: f64, resolution: usize) -> Vec<f64> {
    let last = resolution - 1;
    (0..resolution)
        .map(|i| {
            if i == last {
                hi
            } else {
                lo + (hi - lo) * i as f64 / last as f64
            }
        })
        .collect()
}

/// Sampled membership curves of a rule base, per rule.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipCurves {
    pub input_grid: Vec<f64>,
    pub output_grid: Vec<f64>,
    pub input_centers: Vec<f64>,
    pub output_centers: Vec<f64>,
    /// `input[j][k]` is rule j's input membership at `input_grid[k]`.
    pub input: Vec<Vec<f64>>,
    /// `output[j][k]` is rule j's output membership at `output_grid[k]`.
    pub output: Vec<Vec<f64>>,
}

impl MembershipCurves {
    /// CSV with one row per sample; `rule_index` is 1-based, input rows first.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(MEMBERSHIP_CSV_HEADER);
        out.push('\n');
        for (tag, grid, curves) in [
            ("in", &self.input_grid, &self.input),
            ("out", &self.output_grid, &self.output),
        ] {
            for (j, curve) in curves.iter().enumerate() {
                for (x, m) in grid.iter().zip(curve) {
                    let _ = writeln!(out, "{},{tag},{x},{m}", j + 1);
                }
            }
        }
        out
    }
}
