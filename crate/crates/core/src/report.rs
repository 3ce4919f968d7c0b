//! Config parsing and result serialization.
//!
//! File formats:
//!
//! * `curve.csv`: `play,policy,pct_optimal,avg_reward`, one row per
//!   (play, policy), plays ascending then policy order. `play` is 1-based.
//! * `summary.json`: per policy `maximum`, `mean`, `median`,
//!   `max_minus_median`, rounded to 4 decimals.
//! * `sweep.csv`: `policy,parameter,maximum,mean,median,max_minus_median`.
//! * `manifest.json`: resolved config, tool version, timestamps, outputs.
//!
//! CSV numbers use the shortest representation that round-trips.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::experiment::{ExperimentConfig, ExperimentResult, SummaryStats, SweepResult};
use crate::fuzzy::MembershipCurves;

pub const CURVE_CSV_HEADER: &str = "play,policy,pct_optimal,avg_reward";
pub const SWEEP_CSV_HEADER: &str = "policy,parameter,maximum,mean,median,max_minus_median";

/// Parses and validates an experiment config document.
///
/// Error messages name the offending key.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let config: ExperimentConfig =
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    config.validate().map_err(|e| Error::Config(e.to_string()))?;
    Ok(config)
}

pub fn config_to_json(config: &ExperimentConfig) -> String {
    serde_json::to_string_pretty(config).expect("config serializes")
}

pub fn curve_csv(result: &ExperimentResult) -> String {
    let mut out = String::from(CURVE_CSV_HEADER);
    out.push('\n');
    let labels: Vec<String> = result.curves.iter().map(|c| c.policy.label()).collect();
    let plays = result.curves.first().map_or(0, |c| c.len());
    for t in 0..plays {
        for (curve, label) in result.curves.iter().zip(&labels) {
            let _ = writeln!(
                out,
                "{},{label},{},{}",
                t + 1,
                curve.pct_optimal[t],
                curve.avg_reward[t]
            );
        }
    }
    out
}

/// One series read back from a curve CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSeries {
    pub policy: String,
    pub plays: Vec<u64>,
    pub pct_optimal: Vec<f64>,
    pub avg_reward: Vec<f64>,
}

/// Reads a curve CSV back into per-policy series, in order of first appearance.
pub fn parse_curve_csv(text: &str) -> Result<Vec<CurveSeries>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == CURVE_CSV_HEADER => {}
        Some((_, header)) => {
            return Err(Error::Config(format!(
                "curve CSV header must be `{CURVE_CSV_HEADER}`, got `{header}`"
            )))
        }
        None => return Err(Error::Config("curve CSV is empty".into())),
    }
    let mut series: Vec<CurveSeries> = Vec::new();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |what: &str| Error::Config(format!("curve CSV line {}: {what}", lineno + 1));
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(bad("expected 4 fields"));
        }
        let play: u64 = fields[0].trim().parse().map_err(|_| bad("bad play"))?;
        let pct: f64 = fields[2].trim().parse().map_err(|_| bad("bad pct_optimal"))?;
        let reward: f64 = fields[3].trim().parse().map_err(|_| bad("bad avg_reward"))?;
        if !pct.is_finite() || !reward.is_finite() {
            return Err(bad("non-finite value"));
        }
        let name = fields[1].trim();
        let idx = match series.iter().position(|s| s.policy == name) {
            Some(i) => i,
            None => {
                series.push(CurveSeries {
                    policy: name.to_string(),
                    plays: Vec::new(),
                    pct_optimal: Vec::new(),
                    avg_reward: Vec::new(),
                });
                series.len() - 1
            }
        };
        let s = &mut series[idx];
        s.plays.push(play);
        s.pct_optimal.push(pct);
        s.avg_reward.push(reward);
    }
    if series.is_empty() {
        return Err(Error::Config("curve CSV has no data rows".into()));
    }
    Ok(series)
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

fn stats_json(s: &SummaryStats) -> Value {
    json!({
        "maximum": round4(s.maximum),
        "mean": round4(s.mean),
        "median": round4(s.median),
        "max_minus_median": round4(s.max_minus_median),
    })
}

pub fn summary_json(result: &ExperimentResult) -> Value {
    let policies: Vec<Value> = result
        .curves
        .iter()
        .zip(&result.summaries)
        .map(|(curve, s)| {
            let mut entry = stats_json(s);
            entry["policy"] = json!(curve.policy.label());
            entry["spec"] = serde_json::to_value(curve.policy).expect("policy serializes");
            entry
        })
        .collect();
    json!({ "policies": policies })
}

pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in &result.rows {
        let s = &row.summary;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            row.policy.kind(),
            row.parameter,
            s.maximum,
            s.mean,
            s.median,
            s.max_minus_median
        );
    }
    out
}

pub fn sweep_best_json(result: &SweepResult) -> Value {
    let best: Vec<Value> = result
        .best
        .iter()
        .map(|&i| {
            let row = &result.rows[i];
            let mut entry = stats_json(&row.summary);
            entry["policy"] = json!(row.policy.kind());
            entry["parameter"] = json!(row.parameter);
            entry
        })
        .collect();
    json!({ "best": best })
}

/// Record of one CLI invocation, sufficient to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub tool_version: String,
    /// Unix time in milliseconds.
    pub started_at_ms: u128,
    pub finished_at_ms: u128,
    pub outputs: Vec<String>,
}

/// Multi-series line chart rendered as standalone SVG.
#[derive(Debug, Clone, PartialEq)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<(String, Vec<(f64, f64)>)>,
    /// Fixed y range; derived from the data when `None`.
    pub y_range: Option<(f64, f64)>,
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn padded_range(lo: f64, hi: f64) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

impl LineChart {
    pub fn to_svg(&self) -> String {
        const W: f64 = 800.0;
        const H: f64 = 500.0;
        const LEFT: f64 = 70.0;
        const RIGHT: f64 = 200.0;
        const TOP: f64 = 40.0;
        const BOTTOM: f64 = 60.0;
        let plot_w = W - LEFT - RIGHT;
        let plot_h = H - TOP - BOTTOM;

        let points = self.series.iter().flat_map(|(_, p)| p.iter());
        let (mut x_lo, mut x_hi, mut y_lo, mut y_hi) =
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in points {
            x_lo = x_lo.min(x);
            x_hi = x_hi.max(x);
            y_lo = y_lo.min(y);
            y_hi = y_hi.max(y);
        }
        let (x_lo, x_hi) = padded_range(x_lo, x_hi);
        let (y_lo, y_hi) = self.y_range.unwrap_or_else(|| padded_range(y_lo, y_hi));
        let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
        let sy = |y: f64| TOP + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">
<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            LEFT + plot_w / 2.0,
            escape_xml(&self.title)
        );

        // axes and ticks
        let _ = writeln!(
            svg,
            r#"<line x1="{LEFT}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>
<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{y0}" stroke="black"/>"#,
            y0 = TOP + plot_h,
            x1 = LEFT + plot_w
        );
        for i in 0..=5 {
            let f = i as f64 / 5.0;
            let xv = x_lo + f * (x_hi - x_lo);
            let yv = y_lo + f * (y_hi - y_lo);
            let (px, py) = (sx(xv), sy(yv));
            let _ = writeln!(
                svg,
                r##"<line x1="{px:.2}" y1="{b}" x2="{px:.2}" y2="{b5}" stroke="black"/>
<text x="{px:.2}" y="{bt}" text-anchor="middle">{}</text>
<line x1="{l5}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/>
<line x1="{LEFT}" y1="{py:.2}" x2="{r}" y2="{py:.2}" stroke="#dddddd"/>
<text x="{lt}" y="{pyt:.2}" text-anchor="end">{}</text>"##,
                tick_label(xv),
                tick_label(yv),
                b = TOP + plot_h,
                b5 = TOP + plot_h + 5.0,
                bt = TOP + plot_h + 20.0,
                l5 = LEFT - 5.0,
                r = LEFT + plot_w,
                lt = LEFT - 8.0,
                pyt = py + 4.0,
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>
<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
            LEFT + plot_w / 2.0,
            H - 15.0,
            escape_xml(&self.x_label),
            TOP + plot_h / 2.0,
            TOP + plot_h / 2.0,
            escape_xml(&self.y_label)
        );

        for (i, (name, pts)) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let mut coords = String::new();
            for &(x, y) in pts {
                let _ = write!(coords, "{:.2},{:.2} ", sx(x), sy(y));
            }
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                coords.trim_end()
            );
            if pts.len() == 1 {
                let (x, y) = pts[0];
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                    sx(x),
                    sy(y)
                );
            }
            let ly = TOP + 10.0 + 18.0 * i as f64;
            let lx = LEFT + plot_w + 15.0;
            let _ = writeln!(
                svg,
                r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>
<text x="{}" y="{}">{}</text>"#,
                lx + 20.0,
                lx + 26.0,
                ly + 4.0,
                escape_xml(name)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

fn tick_label(v: f64) -> String {
    let r = (v * 100.0).round() / 100.0;
    if r == r.trunc() {
        format!("{}", r as i64)
    } else {
        format!("{r}")
    }
}

pub fn curve_chart(series: &[CurveSeries]) -> LineChart {
    LineChart {
        title: "Optimal action rate".into(),
        x_label: "play".into(),
        y_label: "% optimal action".into(),
        series: series
            .iter()
            .map(|s| {
                let pts = s
                    .plays
                    .iter()
                    .zip(&s.pct_optimal)
                    .map(|(&t, &p)| (t as f64, p))
                    .collect();
                (s.policy.clone(), pts)
            })
            .collect(),
        y_range: Some((0.0, 100.0)),
    }
}

/// Overlay of the output membership functions, one series per rule.
pub fn output_membership_chart(curves: &MembershipCurves, xi: f64) -> LineChart {
    LineChart {
        title: format!("Output membership functions, xi = {xi}"),
        x_label: "output".into(),
        y_label: "membership".into(),
        series: curves
            .output
            .iter()
            .enumerate()
            .map(|(j, mu)| {
                let pts = curves.output_grid.iter().copied().zip(mu.iter().copied()).collect();
                (format!("rule {}", j + 1), pts)
            })
            .collect(),
        y_range: Some((0.0, 1.0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{run_experiment, summarize, LearningCurve};
    use crate::policy::PolicySpec;

    fn tiny_result() -> ExperimentResult {
        let curves = vec![
            LearningCurve {
                policy: PolicySpec::fuzzy(0.04),
                pct_optimal: vec![10.0, 20.5],
                avg_reward: vec![0.1, 0.25],
            },
            LearningCurve {
                policy: PolicySpec::softmax(0.1),
                pct_optimal: vec![12.0, 30.0],
                avg_reward: vec![-0.5, 1.0],
            },
        ];
        let summaries = curves.iter().map(|c| summarize(&c.pct_optimal).unwrap()).collect();
        ExperimentResult { curves, summaries }
    }

    #[test]
    fn curve_csv_layout() {
        let csv = curve_csv(&tiny_result());
        assert_eq!(
            csv,
            "play,policy,pct_optimal,avg_reward\n\
             1,fuzzy(xi=0.04),10,0.1\n\
             1,softmax(tau=0.1),12,-0.5\n\
             2,fuzzy(xi=0.04),20.5,0.25\n\
             2,softmax(tau=0.1),30,1\n"
        );
        let parsed = parse_curve_csv(&csv).unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[0].policy, "fuzzy(xi=0.04)");
        assert_eq!(parsed[1].pct_optimal, vec![12.0, 30.0]);
    }

    #[test]
    fn curve_csv_rejects_garbage() {
        assert!(parse_curve_csv("").is_err());
        assert!(parse_curve_csv("a,b,c\n1,2,3\n").is_err());
        assert!(parse_curve_csv("play,policy,pct_optimal,avg_reward\n").is_err());
        assert!(parse_curve_csv("play,policy,pct_optimal,avg_reward\n1,x,abc,0\n").is_err());
        assert!(parse_curve_csv("play,policy,pct_optimal,avg_reward\n1,x,3\n").is_err());
    }

    #[test]
    fn summary_rounds_to_four_places() {
        let mut result = tiny_result();
        result.summaries[0].mean = 1.0 / 3.0;
        let v = summary_json(&result);
        let p = &v["policies"][0];
        assert_eq!(p["mean"], json!(0.3333));
        assert_eq!(p["policy"], json!("fuzzy(xi=0.04)"));
        assert_eq!(p["spec"]["kind"], json!("fuzzy"));
        for key in ["maximum", "mean", "median", "max_minus_median"] {
            assert!(v["policies"][1][key].is_number());
        }
    }

    #[test]
    fn config_errors_name_the_key() {
        let missing = r#"{"n_arms": 10, "plays": 5, "base_seed": 1, "policies": [{"kind": "uniform"}]}"#;
        let err = parse_config(missing).unwrap_err().to_string();
        assert!(err.contains("runs"), "{err}");
        let bad_xi = r#"{"n_arms": 10, "runs": 2, "plays": 5, "base_seed": 1, "policies": [{"kind": "fuzzy", "xi": 1.2}]}"#;
        let err = parse_config(bad_xi).unwrap_err().to_string();
        assert!(err.contains("xi"), "{err}");
        let extra = r#"{"n_arms": 10, "runs": 2, "plays": 5, "base_seed": 1, "policies": [], "foo": 1}"#;
        assert!(parse_config(extra).unwrap_err().to_string().contains("foo"));
    }

    #[test]
    fn config_round_trip() {
        let c = ExperimentConfig::benchmark_default();
        assert_eq!(parse_config(&config_to_json(&c)).unwrap(), c);
    }

    #[test]
    fn sweep_csv_rows() {
        let base = ExperimentConfig {
            n_arms: 4,
            runs: 3,
            plays: 4,
            base_seed: 0,
            policies: vec![PolicySpec::Uniform],
        };
        let grid = [crate::experiment::SweepAxis {
            kind: crate::experiment::SweepKind::Softmax,
            values: vec![0.1, 0.2],
        }];
        let result = crate::experiment::sweep(&base, &grid, 1).unwrap();
        let csv = sweep_csv(&result);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(SWEEP_CSV_HEADER));
        assert!(lines.next().unwrap().starts_with("softmax,0.1,"));
        assert_eq!(lines.count(), 1);
        assert_eq!(sweep_best_json(&result)["best"].as_array().unwrap().len(), 1);
    }

    #[test]
    fn svg_has_one_polyline_per_series() {
        let config = ExperimentConfig {
            n_arms: 3,
            runs: 2,
            plays: 5,
            base_seed: 1,
            policies: vec![PolicySpec::Greedy, PolicySpec::Uniform],
        };
        let result = run_experiment(&config).unwrap();
        let series = parse_curve_csv(&curve_csv(&result)).unwrap();
        let svg = curve_chart(&series).to_svg();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn svg_escapes_labels() {
        let chart = LineChart {
            title: "a < b & c".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![("s\"1".into(), vec![(0.0, 0.0)])],
            y_range: None,
        };
        let svg = chart.to_svg();
        assert!(svg.contains("a &lt; b &amp; c"));
        assert!(svg.contains("s&quot;1"));
    }
}
