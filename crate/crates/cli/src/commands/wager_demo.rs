use privmarket::scoring::{Brier, Outcome};
use privmarket::stats::trial_rng;
use privmarket::wagering::{
    expected_private_profits, privacy_params, private_profits, wswm_profits, WagerProfile,
};
use rand::Rng;
use serde::Serialize;

use crate::output::{prepare_dir, write_csv, write_json};
use crate::{CliError, ExperimentConfig, Report};

const DEFAULT_BETTORS: usize = 5;

#[derive(Debug, Serialize)]
struct ProfitRow {
    bettor: usize,
    report: f64,
    wager: f64,
    wswm_profit: f64,
    private_expected: f64,
    private_realized: f64,
}

#[derive(Debug, Serialize)]
struct Summary {
    seed: u64,
    n: usize,
    epsilon: f64,
    alpha: f64,
    beta: f64,
    outcome: u8,
    wswm_balance_residual: f64,
    private_expected_balance_residual: f64,
    private_realized_total: f64,
    max_expected_vs_scaled_wswm_gap: f64,
    min_loss_floor_margin: f64,
}

/// Draws a random profile, runs both mechanisms on it and writes
/// `profits.csv` and `wager_demo.json`.
pub fn cmd_wager_demo(config: &ExperimentConfig) -> Result<Report, CliError> {
    config.validate()?;
    let n = config.bettors(DEFAULT_BETTORS);
    let params = privacy_params(config.epsilon)?;
    let mut rng = trial_rng(config.seed, &[0]);
    let reports: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let wagers: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..10.0)).collect();
    let outcome = Outcome::from_bool(rng.random_bool(0.5));
    let profile = WagerProfile::new(reports, wagers)?;

    let wswm = wswm_profits(&profile, &Brier, outcome);
    let expected = expected_private_profits(&profile, &Brier, outcome, &params);
    let realized = private_profits(&profile, &Brier, outcome, &params, &mut rng);

    let rows: Vec<ProfitRow> = (0..n)
        .map(|i| ProfitRow {
            bettor: i,
            report: profile.reports()[i],
            wager: profile.wagers()[i],
            wswm_profit: wswm[i],
            private_expected: expected[i],
            private_realized: realized[i],
        })
        .collect();
    let lemma1_gap = (0..n)
        .map(|i| (expected[i] - params.alpha * wswm[i]).abs())
        .fold(0.0, f64::max);
    let floor_margin = (0..n)
        .map(|i| realized[i] + profile.wagers()[i])
        .fold(f64::INFINITY, f64::min);
    let summary = Summary {
        seed: config.seed,
        n,
        epsilon: params.epsilon,
        alpha: params.alpha,
        beta: params.beta,
        outcome: outcome.indicator() as u8,
        wswm_balance_residual: wswm.total(),
        private_expected_balance_residual: expected.total(),
        private_realized_total: realized.total(),
        max_expected_vs_scaled_wswm_gap: lemma1_gap,
        min_loss_floor_margin: floor_margin,
    };

    prepare_dir(&config.out)?;
    let mut report = Report::default();
    report
        .files
        .push(write_csv(&config.out, "profits.csv", &rows)?);
    report
        .files
        .push(write_json(&config.out, "wager_demo.json", &summary)?);
    report.check(summary.wswm_balance_residual.abs() <= 1e-12, || {
        format!(
            "weighted-score profits sum to {}",
            summary.wswm_balance_residual
        )
    });
    report.check(
        summary.private_expected_balance_residual.abs() <= 1e-12,
        || {
            format!(
                "expected private profits sum to {}",
                summary.private_expected_balance_residual
            )
        },
    );
    report.check(lemma1_gap <= 1e-12, || {
        format!("expected private profits differ from α·WSWM by {lemma1_gap}")
    });
    report.check(floor_margin >= -1e-12, || {
        format!("a bettor lost more than her wager (margin {floor_margin})")
    });
    Ok(report)
}
