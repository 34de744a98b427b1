use privmarket::dp_audit::{budget_balance_privacy_tension, joint_dp_certificate, ENUMERATION_CAP};
use privmarket::scoring::{Brier, Outcome};
use privmarket::stats::trial_rng;
use privmarket::wagering::{privacy_params, WagerProfile};
use rand::Rng;
use serde::Serialize;

use crate::output::{float_or_sentinel, prepare_dir, write_csv, write_json};
use crate::{CliError, ExperimentConfig, Report};

const DEFAULT_BETTORS: usize = 4;
/// Reports swept for both the audited bettor's value and its alternative.
const REPORT_SWEEP: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
const RATIO_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Serialize)]
struct AuditRow {
    bettor: usize,
    report: f64,
    alt_report: f64,
    outcome: u8,
    ratio: f64,
    bound: f64,
}

#[derive(Debug, Serialize)]
struct Summary {
    seed: u64,
    n: usize,
    epsilon: f64,
    bound: f64,
    cases: usize,
    max_ratio: f64,
    cases_over_bound: usize,
    base_reports: Vec<f64>,
    wagers: Vec<f64>,
    /// Same neighbors under the budget-balanced mechanism.
    #[serde(serialize_with = "float_or_sentinel")]
    wswm_ratio_extremal: f64,
    private_ratio_extremal: f64,
}

/// Certifies the joint privacy ratio over a sweep of `(i, p_i, p_i′, ω)` on a
/// random profile and writes `dp_audit.csv` and `dp_audit.json`.
pub fn cmd_dp_audit(config: &ExperimentConfig) -> Result<Report, CliError> {
    config.validate()?;
    let n = config.bettors(DEFAULT_BETTORS);
    if n > ENUMERATION_CAP {
        return Err(CliError::config(format!(
            "dp-audit enumerates 2^n atoms and needs n <= {ENUMERATION_CAP}, got {n}"
        )));
    }
    let params = privacy_params(config.epsilon)?;
    let bound = params.epsilon.exp();
    let mut rng = trial_rng(config.seed, &[0]);
    let reports: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let wagers: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..5.0)).collect();
    let profile = WagerProfile::new(reports, wagers)?;

    let mut rows = Vec::new();
    for bettor in 0..n {
        for &report in &REPORT_SWEEP {
            let base = profile.with_report(bettor, report)?;
            for &alt_report in &REPORT_SWEEP {
                for outcome in Outcome::BOTH {
                    let cert =
                        joint_dp_certificate(&base, bettor, alt_report, &Brier, outcome, &params)?;
                    rows.push(AuditRow {
                        bettor,
                        report,
                        alt_report,
                        outcome: outcome.indicator() as u8,
                        ratio: cert.ratio,
                        bound,
                    });
                }
            }
        }
    }

    let extremal = profile.with_report(0, 1.0)?;
    let tension = budget_balance_privacy_tension(&extremal, 0, 0.0, &Brier, Outcome::Yes, &params)?;
    let over = rows
        .iter()
        .filter(|r| r.ratio > bound + RATIO_TOLERANCE)
        .count();
    let summary = Summary {
        seed: config.seed,
        n,
        epsilon: params.epsilon,
        bound,
        cases: rows.len(),
        max_ratio: rows.iter().map(|r| r.ratio).fold(1.0, f64::max),
        cases_over_bound: over,
        base_reports: profile.reports().to_vec(),
        wagers: profile.wagers().to_vec(),
        wswm_ratio_extremal: tension.wswm_ratio,
        private_ratio_extremal: tension.private_ratio,
    };

    prepare_dir(&config.out)?;
    let mut report = Report::default();
    report
        .files
        .push(write_csv(&config.out, "dp_audit.csv", &rows)?);
    report
        .files
        .push(write_json(&config.out, "dp_audit.json", &summary)?);
    report.check(over == 0, || {
        format!(
            "{over} cases exceed e^ε = {bound} (max ratio {})",
            summary.max_ratio
        )
    });
    Ok(report)
}
