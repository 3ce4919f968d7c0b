//! Runs the default ten-arm comparison and prints the summary table.

use fuzzy_bandit::experiment::settling_play;
use fuzzy_bandit::{run_experiment, ExperimentConfig};

fn main() -> fuzzy_bandit::Result<()> {
    let config = ExperimentConfig::benchmark_default();
    let start = std::time::Instant::now();
    let result = run_experiment(&config)?;
    println!(
        "{:<28} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "policy", "max", "mean", "median", "max-med", "settle"
    );
    for (curve, s) in result.curves.iter().zip(&result.summaries) {
        println!(
            "{:<28} {:>8.2} {:>8.2} {:>8.2} {:>8.2} {:>8}",
            curve.policy.label(),
            s.maximum,
            s.mean,
            s.median,
            s.max_minus_median,
            settling_play(&curve.pct_optimal, 0.9).map_or(-1, |t| t as i64 + 1),
        );
    }
    eprintln!("elapsed: {:.2?}", start.elapsed());
    Ok(())
}
