use privmarket::adversary::{privacy_probe, ProbeEstimate};
use privmarket::cost_market::Lmsr;
use privmarket::noisy_market::{MarketConfig, NoiseKind};
use serde::Serialize;

use crate::output::{float_or_sentinel, prepare_dir, write_csv, write_json};
use crate::{CliError, ExperimentConfig, Report};

const DEFAULT_ROUNDS: [usize; 3] = [64, 256, 1024];
const MIN_TRIALS: usize = 10_000;

#[derive(Debug, Serialize)]
struct CsvRow {
    t: usize,
    p1: f64,
    p2: f64,
    implied_eps: f64,
    ci_low: f64,
    ci_high: f64,
}

#[derive(Debug, Serialize)]
struct SummaryRow {
    t: usize,
    conditioned: usize,
    #[serde(serialize_with = "float_or_sentinel")]
    p1: f64,
    #[serde(serialize_with = "float_or_sentinel")]
    p2: f64,
    #[serde(serialize_with = "float_or_sentinel")]
    implied_eps: f64,
    #[serde(serialize_with = "float_or_sentinel")]
    ci_low: f64,
    #[serde(serialize_with = "float_or_sentinel")]
    ci_high: f64,
    /// `ln t`, the reference schedule the implied floor is compared against.
    log_t: f64,
    note: Option<String>,
}

#[derive(Debug, Serialize)]
struct Summary {
    seed: u64,
    noise: NoiseKind,
    trade_bound: f64,
    target: f64,
    trials: usize,
    rows: Vec<SummaryRow>,
}

fn summary_row(t: usize, estimate: &ProbeEstimate) -> SummaryRow {
    SummaryRow {
        t,
        conditioned: estimate.conditioned,
        p1: estimate.p1.estimate(),
        p2: estimate.p2.estimate(),
        implied_eps: estimate.implied_epsilon,
        ci_low: estimate.implied_epsilon_ci.low,
        ci_high: estimate.implied_epsilon_ci.high,
        log_t: (t as f64).ln(),
        note: None,
    }
}

/// Implied privacy floors at each probe round; writes `privacy_probe.csv`
/// and `privacy_probe.json`. Rounds without enough conditioning events are
/// reported as `nan` rows with a note instead of failing the run.
pub fn cmd_privacy_probe(config: &ExperimentConfig) -> Result<Report, CliError> {
    config.validate()?;
    let trials = config.trials_at_least(MIN_TRIALS, MIN_TRIALS)?;
    let cost = Lmsr::new(config.b, config.a)?;
    let market = MarketConfig::new(config.k)?
        .with_fee(config.fee)?
        .with_min_unit(config.min_unit)?;
    let noise = config.noise_kind();

    let mut csv_rows = Vec::new();
    let mut summary_rows = Vec::new();
    for t in config.rounds_or(&DEFAULT_ROUNDS) {
        match privacy_probe(&cost, noise, market, config.qstar, t, trials, config.seed) {
            Ok(estimate) => {
                let row = summary_row(t, &estimate);
                csv_rows.push(CsvRow {
                    t,
                    p1: row.p1,
                    p2: row.p2,
                    implied_eps: row.implied_eps,
                    ci_low: row.ci_low,
                    ci_high: row.ci_high,
                });
                summary_rows.push(row);
            }
            Err(err @ privmarket::Error::InsufficientEvents { .. }) => {
                csv_rows.push(CsvRow {
                    t,
                    p1: f64::NAN,
                    p2: f64::NAN,
                    implied_eps: f64::NAN,
                    ci_low: f64::NAN,
                    ci_high: f64::NAN,
                });
                summary_rows.push(SummaryRow {
                    t,
                    conditioned: 0,
                    p1: f64::NAN,
                    p2: f64::NAN,
                    implied_eps: f64::NAN,
                    ci_low: f64::NAN,
                    ci_high: f64::NAN,
                    log_t: (t as f64).ln(),
                    note: Some(err.to_string()),
                });
            }
            Err(err) => return Err(err.into()),
        }
    }

    prepare_dir(&config.out)?;
    let mut report = Report::default();
    report
        .files
        .push(write_csv(&config.out, "privacy_probe.csv", &csv_rows)?);
    let summary = Summary {
        seed: config.seed,
        noise,
        trade_bound: config.k,
        target: config.qstar,
        trials,
        rows: summary_rows,
    };
    report
        .files
        .push(write_json(&config.out, "privacy_probe.json", &summary)?);
    Ok(report)
}
