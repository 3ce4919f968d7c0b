use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use fuzzy_bandit::experiment::{run_experiment_with_threads, sweep, SweepAxis, SweepKind};
use fuzzy_bandit::fuzzy::FuzzyRuleBase;
use fuzzy_bandit::report::{self, RunManifest};
use fuzzy_bandit::{BoundsMode, ExperimentConfig, PolicySpec};

use crate::grid::parse_grid;
use crate::{MembershipArgs, Overrides, PlotArgs, RunArgs, SweepArgs};

pub const THREADS_ENV: &str = "FUZZY_BANDIT_THREADS";

#[derive(Debug)]
pub enum CliError {
    /// Bad config, flags, or input data. Exit code 1.
    Config(String),
    /// Filesystem failure. Exit code 2.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "error: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

impl From<fuzzy_bandit::Error> for CliError {
    fn from(e: fuzzy_bandit::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> CliResult {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

fn threads() -> CliResult<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{THREADS_ENV} must be a non-negative integer, got `{v}`"))),
        _ => Ok(0),
    }
}

fn load_config(path: &Path, overrides: &Overrides) -> CliResult<ExperimentConfig> {
    let text = read(path)?;
    // overrides are applied before validation so a flag can fix a bad key
    let mut doc: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if let Some(obj) = doc.as_object_mut() {
        let mut set = |key: &str, v: Option<u64>| {
            if let Some(v) = v {
                obj.insert(key.to_string(), v.into());
            }
        };
        set("base_seed", overrides.seed);
        set("runs", overrides.runs.map(|v| v as u64));
        set("plays", overrides.plays.map(|v| v as u64));
        set("n_arms", overrides.arms.map(|v| v as u64));
    }
    Ok(report::parse_config(&doc.to_string())?)
}

fn to_json(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn run(args: &RunArgs) -> CliResult {
    let started = now_ms();
    let config = load_config(&args.config, &args.overrides)?;
    let threads = threads()?;
    let result = run_experiment_with_threads(&config, threads)?;

    let curve_path = args.out.join("curve.csv");
    let summary_path = args.out.join("summary.json");
    let manifest_path = args.out.join("manifest.json");
    write(&curve_path, &report::curve_csv(&result))?;
    write(&summary_path, &to_json(&report::summary_json(&result)))?;

    for (curve, s) in result.curves.iter().zip(&result.summaries) {
        println!(
            "{:<32} max {:>7.2}  mean {:>7.2}  median {:>7.2}  max-median {:>6.2}",
            curve.policy.label(),
            s.maximum,
            s.mean,
            s.median,
            s.max_minus_median
        );
    }
    write_manifest(&manifest_path, config, started, vec![curve_path, summary_path])
}

fn write_manifest(path: &Path, config: ExperimentConfig, started: u128, mut outputs: Vec<PathBuf>) -> CliResult {
    outputs.push(path.to_path_buf());
    let manifest = RunManifest {
        config,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        started_at_ms: started,
        finished_at_ms: now_ms(),
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
    };
    write(path, &to_json(&manifest))
}

pub fn sweep_cmd(args: &SweepArgs) -> CliResult {
    let started = now_ms();
    let base = load_config(&args.config, &args.overrides)?;
    let fuzzy_bounds = base
        .policies
        .iter()
        .find_map(|p| match p {
            PolicySpec::Fuzzy { bounds, .. } => Some(*bounds),
            _ => None,
        })
        .unwrap_or(BoundsMode::Adaptive);

    let mut grid = Vec::new();
    for (flag, kind, spec) in [
        ("--xi", SweepKind::Fuzzy { bounds: fuzzy_bounds }, &args.xi),
        ("--tau", SweepKind::Softmax, &args.tau),
        ("--epsilon", SweepKind::EpsilonGreedy, &args.epsilon),
    ] {
        if let Some(spec) = spec {
            let values = parse_grid(spec).map_err(|e| CliError::Config(format!("{flag}: {e}")))?;
            for &v in &values {
                kind.with_parameter(v)
                    .validate()
                    .map_err(|e| CliError::Config(format!("{flag}: {e}")))?;
            }
            grid.push(SweepAxis { kind, values });
        }
    }
    if grid.is_empty() {
        return Err(CliError::Config(
            "empty grid: give at least one of --xi, --tau, --epsilon".into(),
        ));
    }

    let result = sweep(&base, &grid, threads()?)?;
    let sweep_path = args.out.join("sweep.csv");
    let best_path = args.out.join("sweep_best.json");
    write(&sweep_path, &report::sweep_csv(&result))?;
    write(&best_path, &to_json(&report::sweep_best_json(&result)))?;
    for &i in &result.best {
        let row = &result.rows[i];
        println!(
            "best {}: parameter {} (mean {:.2}, median {:.2})",
            row.policy.kind(),
            row.parameter,
            row.summary.mean,
            row.summary.median
        );
    }
    write_manifest(
        &args.out.join("manifest.json"),
        base,
        started,
        vec![sweep_path, best_path],
    )
}

pub fn membership(args: &MembershipArgs) -> CliResult {
    let rb = FuzzyRuleBase::new(args.arms, args.alpha, args.beta, args.xi)?;
    let curves = rb.membership_curves(args.resolution)?;
    write(&args.out, &curves.to_csv())?;
    if args.svg {
        let svg_path = args.out.with_extension("svg");
        write(&svg_path, &report::output_membership_chart(&curves, args.xi).to_svg())?;
    }
    let centers: Vec<String> = rb.output_centers().iter().map(|c| format!("{c:.6}")).collect();
    println!("output centers: [{}]", centers.join(", "));
    Ok(())
}

pub fn plot(args: &PlotArgs) -> CliResult {
    let text = read(&args.curve)?;
    let series = report::parse_curve_csv(&text)?;
    write(&args.out, &report::curve_chart(&series).to_svg())
}
