use privmarket::experiments::{concentration_trials, equal_wager_profile};
use privmarket::scoring::{Brier, Outcome};
use privmarket::wagering::privacy_params;
use serde::Serialize;

use crate::output::{prepare_dir, write_csv, write_json};
use crate::{CliError, ExperimentConfig, Report};

const DEFAULT_BETTORS: [usize; 3] = [10, 100, 1000];
const DEFAULT_TRIALS: usize = 10_000;
const MIN_TRIALS: usize = 1_000;

#[derive(Debug, Serialize)]
struct CsvRow {
    n: usize,
    bound: f64,
    violation_rate: f64,
    delta: f64,
}

#[derive(Debug, Serialize)]
struct SummaryRow {
    n: usize,
    bound: f64,
    violation_rate: f64,
    allowed_rate: f64,
    rms_deviation: f64,
    /// `rms_deviation · √n`, flat when deviations shrink like `1/√n`.
    scaled_rms_deviation: f64,
}

#[derive(Debug, Serialize)]
struct Summary {
    seed: u64,
    epsilon: f64,
    delta: f64,
    trials: usize,
    rows: Vec<SummaryRow>,
}

/// Equal-wager concentration trials for every `n` in the sweep; writes
/// `concentration.csv` and `concentration.json`.
pub fn cmd_concentration(config: &ExperimentConfig) -> Result<Report, CliError> {
    config.validate()?;
    let trials = config.trials_at_least(DEFAULT_TRIALS, MIN_TRIALS)?;
    let params = privacy_params(config.epsilon)?;
    let mut csv_rows = Vec::new();
    let mut summary_rows = Vec::new();
    for n in config.bettor_sweep(&DEFAULT_BETTORS) {
        let profile = equal_wager_profile(n)?;
        let row = concentration_trials(
            &profile,
            &Brier,
            Outcome::Yes,
            &params,
            config.delta,
            trials,
            config.seed,
        )?;
        csv_rows.push(CsvRow {
            n,
            bound: row.bound,
            violation_rate: row.violation_rate,
            delta: row.delta,
        });
        summary_rows.push(SummaryRow {
            n,
            bound: row.bound,
            violation_rate: row.violation_rate,
            allowed_rate: row.allowed_rate(trials),
            rms_deviation: row.rms_deviation,
            scaled_rms_deviation: row.rms_deviation * (n as f64).sqrt(),
        });
    }

    prepare_dir(&config.out)?;
    let mut report = Report::default();
    report
        .files
        .push(write_csv(&config.out, "concentration.csv", &csv_rows)?);
    for row in &summary_rows {
        report.check(row.violation_rate <= row.allowed_rate, || {
            format!(
                "n = {}: violation rate {} exceeds {}",
                row.n, row.violation_rate, row.allowed_rate
            )
        });
    }
    let summary = Summary {
        seed: config.seed,
        epsilon: params.epsilon,
        delta: config.delta,
        trials,
        rows: summary_rows,
    };
    report
        .files
        .push(write_json(&config.out, "concentration.json", &summary)?);
    Ok(report)
}
