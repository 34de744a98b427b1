use std::fs::File;

use privmarket::adversary::TargetStrategy;
use privmarket::cost_market::Lmsr;
use privmarket::experiments::{loss_curve, TargetSetup};
use privmarket::noisy_market::{simulate, MarketConfig, NoiseKind, SimulationRng};
use privmarket::stats::derive_seed;
use serde::Serialize;

use crate::output::{prepare_dir, write_csv, write_json};
use crate::{CliError, ExperimentConfig, Report};

const DEFAULT_ROUNDS: [usize; 4] = [256, 1024, 4096, 8192];
const DEFAULT_TRIALS: usize = 1_000;
const MIN_TRIALS: usize = 2;
const SAMPLE_LEDGER: &str = "ledger.csv";

#[derive(Debug, Serialize)]
struct CsvRow {
    #[serde(rename = "T")]
    rounds: usize,
    mean_loss: f64,
    ci_low: f64,
    ci_high: f64,
    lemma3_bound: f64,
}

#[derive(Debug, Serialize)]
struct SummaryRow {
    rounds: usize,
    mean_loss: f64,
    loss_std_error: f64,
    lemma3_bound: f64,
    far_frequency_sum: f64,
    gap_std_error: f64,
    mean_trader_profit: f64,
    min_trade_profit: f64,
    max_loss: f64,
}

#[derive(Debug, Serialize)]
struct Summary {
    seed: u64,
    noise: NoiseKind,
    liquidity: f64,
    shift: f64,
    trade_bound: f64,
    target: f64,
    gamma: f64,
    chi: f64,
    fee: f64,
    min_unit: f64,
    trials: usize,
    worst_case_noiseless_loss: f64,
    rows: Vec<SummaryRow>,
}

/// Maker loss against the target strategy across the horizon schedule;
/// writes `loss_curve.csv`, `loss_curve.json` and one sample `ledger.csv`.
pub fn cmd_loss_curve(config: &ExperimentConfig) -> Result<Report, CliError> {
    config.validate()?;
    let trials = config.trials_at_least(DEFAULT_TRIALS, MIN_TRIALS)?;
    let schedule = config.rounds_or(&DEFAULT_ROUNDS);
    let cost = Lmsr::new(config.b, config.a)?;
    let market = MarketConfig::new(config.k)?
        .with_fee(config.fee)?
        .with_min_unit(config.min_unit)?;
    let setup = TargetSetup {
        noise: config.noise_kind(),
        config: market,
        target: config.qstar,
        radius: config.gamma(),
    };
    let curve = loss_curve(&cost, &setup, &schedule, trials, config.seed)?;

    prepare_dir(&config.out)?;
    let mut report = Report::default();
    let rows: Vec<CsvRow> = curve
        .iter()
        .map(|p| CsvRow {
            rounds: p.rounds,
            mean_loss: p.mean_loss,
            ci_low: p.loss_ci.low,
            ci_high: p.loss_ci.high,
            lemma3_bound: p.lemma3.bound,
        })
        .collect();
    report
        .files
        .push(write_csv(&config.out, "loss_curve.csv", &rows)?);

    let sample = simulate(
        &mut TargetStrategy::new(config.qstar, config.k)?,
        setup.noise.build()?,
        &cost,
        market,
        schedule[0],
        &mut SimulationRng::from_seed(derive_seed(config.seed, &[u64::MAX])),
    )?;
    let path = config.out.join(SAMPLE_LEDGER);
    sample.write_csv(File::create(&path)?)?;
    report.files.push(path);

    let noiseless_bound = cost.worst_case_loss();
    for point in &curve {
        let slack = 4.0 * point.gap_std_error;
        report.check(point.mean_loss >= point.lemma3.bound - slack, || {
            format!(
                "T = {}: mean loss {} below the lower bound {} − 4σ",
                point.rounds, point.mean_loss, point.lemma3.bound
            )
        });
        report.check(point.lemma3.min_profit >= -1e-12, || {
            format!(
                "T = {}: a target trade had expected profit {}",
                point.rounds, point.lemma3.min_profit
            )
        });
        if config.min_unit == 0.0 {
            report.check(point.lemma3.min_far_excess >= -1e-9, || {
                format!(
                    "T = {}: a far trade earned {} less than χ",
                    point.rounds, -point.lemma3.min_far_excess
                )
            });
        }
        if setup.noise == NoiseKind::None && config.a == 0.0 {
            report.check(point.max_loss <= noiseless_bound + 1e-9, || {
                format!(
                    "T = {}: noiseless loss {} exceeds b·ln 2 = {noiseless_bound}",
                    point.rounds, point.max_loss
                )
            });
        }
    }

    let summary = Summary {
        seed: config.seed,
        noise: setup.noise,
        liquidity: config.b,
        shift: config.a,
        trade_bound: config.k,
        target: config.qstar,
        gamma: setup.radius,
        chi: curve[0].lemma3.chi,
        fee: config.fee,
        min_unit: config.min_unit,
        trials,
        worst_case_noiseless_loss: noiseless_bound,
        rows: curve
            .iter()
            .map(|p| SummaryRow {
                rounds: p.rounds,
                mean_loss: p.mean_loss,
                loss_std_error: p.loss_std_error,
                lemma3_bound: p.lemma3.bound,
                far_frequency_sum: p.lemma3.far_frequency_sum,
                gap_std_error: p.gap_std_error,
                mean_trader_profit: p.lemma3.mean_trader_profit,
                min_trade_profit: p.lemma3.min_profit,
                max_loss: p.max_loss,
            })
            .collect(),
    };
    report
        .files
        .push(write_json(&config.out, "loss_curve.json", &summary)?);
    Ok(report)
}
