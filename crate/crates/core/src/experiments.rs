//! Monte Carlo drivers. Every trial owns a generator derived from the base
//! seed and its indices, trials run on the rayon pool, and results are
//! reduced in trial order, so outputs do not depend on the thread count.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::adversary::{Lemma3Estimate, TargetStrategy, TraceSummary};
use crate::cost_market::{chi, CostFunction};
use crate::error::{Error, Result};
use crate::noisy_market::{simulate, MarketConfig, NoiseKind, SimulationRng};
use crate::scoring::{Outcome, ScoringRule};
use crate::stats::{derive_seed, trial_rng, Interval, Proportion, RunningStats};
use crate::wagering::{
    concentration_bound, expected_private_profits, private_profits, PrivacyParams, WagerProfile,
};

/// Setup shared by every trace of a target-strategy experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TargetSetup {
    pub noise: NoiseKind,
    pub config: MarketConfig,
    pub target: f64,
    /// `γ` for the loss lower bound.
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceOutcome {
    pub outcome: Outcome,
    pub loss: f64,
    pub summary: TraceSummary,
}

/// Runs `trials` target-strategy traces of `rounds` rounds. The outcome of
/// each trace is drawn from `C′(q*)` on a stream the market never sees.
pub fn target_traces<C: CostFunction + ?Sized>(
    cost: &C,
    setup: &TargetSetup,
    rounds: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<TraceOutcome>> {
    let chi = chi(cost, setup.target, setup.radius)?;
    let belief = cost.price(setup.target);
    (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let trial_seed = derive_seed(seed, &[rounds as u64, trial]);
            let mut strategy = TargetStrategy::new(setup.target, setup.config.trade_bound)?;
            let ledger = simulate(
                &mut strategy,
                setup.noise.build()?,
                cost,
                setup.config,
                rounds,
                &mut SimulationRng::from_seed(trial_seed),
            )?;
            let outcome = Outcome::from_bool(trial_rng(trial_seed, &[2]).random_bool(belief));
            Ok(TraceOutcome {
                outcome,
                loss: ledger.maker_loss(outcome),
                summary: TraceSummary::from_ledger(&ledger, cost, setup.target, setup.radius, chi),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LossCurvePoint {
    pub rounds: usize,
    pub mean_loss: f64,
    pub loss_std_error: f64,
    pub loss_ci: Interval,
    pub lemma3: Lemma3Estimate,
    /// Standard error of the per-trace gap `L_T − χ·(far rounds)`.
    pub gap_std_error: f64,
    pub max_loss: f64,
}

/// Mean maker loss against the target strategy at every horizon in
/// `schedule`, next to the lower bound estimated from the same traces.
pub fn loss_curve<C: CostFunction + ?Sized>(
    cost: &C,
    setup: &TargetSetup,
    schedule: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<LossCurvePoint>> {
    if schedule.is_empty() {
        return Err(Error::Empty("round schedule"));
    }
    if trials < 2 {
        return Err(Error::Domain {
            name: "trials",
            value: trials as f64,
            expected: ">= 2",
        });
    }
    let chi = chi(cost, setup.target, setup.radius)?;
    schedule
        .iter()
        .map(|&rounds| {
            let traces = target_traces(cost, setup, rounds, trials, seed)?;
            let losses: RunningStats = traces.iter().map(|t| t.loss).collect();
            let gap: RunningStats = traces
                .iter()
                .map(|t| t.loss - chi * t.summary.far_rounds as f64)
                .collect();
            let summaries: Vec<TraceSummary> = traces.iter().map(|t| t.summary).collect();
            Ok(LossCurvePoint {
                rounds,
                mean_loss: losses.mean(),
                loss_std_error: losses.std_error(),
                loss_ci: losses.ci95(),
                lemma3: Lemma3Estimate::from_summaries(chi, &summaries)?,
                gap_std_error: gap.std_error(),
                max_loss: traces
                    .iter()
                    .map(|t| t.loss)
                    .fold(f64::NEG_INFINITY, f64::max),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationRow {
    pub n: usize,
    /// Bound for a unit wager.
    pub bound: f64,
    pub delta: f64,
    /// Fraction of (trial, bettor) pairs outside the bound.
    pub violation_rate: f64,
    pub violations: Proportion,
    /// Root mean square of `(Π_i − E[Π_i]) / m_i` over trials and bettors.
    pub rms_deviation: f64,
}

impl ConcentrationRow {
    /// `δ + 3·√(δ(1 − δ)/trials)`.
    pub fn allowed_rate(&self, trials: usize) -> f64 {
        self.delta + 3.0 * (self.delta * (1.0 - self.delta) / trials as f64).sqrt()
    }
}

/// Equal unit wagers with reports spread evenly over `(0, 1)`: `p_i = (i + ½)/n`.
pub fn equal_wager_profile(n: usize) -> Result<WagerProfile> {
    WagerProfile::new(
        (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect(),
        vec![1.0; n],
    )
}

/// Samples the private mechanism `trials` times and measures how often each
/// bettor's realized profit leaves the concentration bound.
pub fn concentration_trials<R: ScoringRule + ?Sized>(
    profile: &WagerProfile,
    rule: &R,
    outcome: Outcome,
    params: &PrivacyParams,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<ConcentrationRow> {
    let bounds = concentration_bound(profile.wagers(), params, delta)?;
    let expected = expected_private_profits(profile, rule, outcome, params);
    let per_trial: Vec<(usize, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, &[profile.len() as u64, trial]);
            let realized = private_profits(profile, rule, outcome, params, &mut rng);
            let mut violations = 0;
            let mut squares = 0.0;
            for (i, (&m, &b)) in profile.wagers().iter().zip(&bounds).enumerate() {
                let deviation = realized[i] - expected[i];
                if deviation.abs() > b {
                    violations += 1;
                }
                if m > 0.0 {
                    squares += (deviation / m).powi(2);
                }
            }
            (violations, squares)
        })
        .collect();
    let pairs = trials * profile.len();
    let violations = Proportion::new(per_trial.iter().map(|t| t.0).sum(), pairs);
    let squares: f64 = per_trial.iter().map(|t| t.1).sum();
    let wagered = profile.wagers().iter().filter(|&&m| m > 0.0).count();
    let unit = concentration_bound(&vec![1.0; profile.len()], params, delta)?[0];
    Ok(ConcentrationRow {
        n: profile.len(),
        bound: unit,
        delta,
        violation_rate: violations.estimate(),
        violations,
        rms_deviation: (squares / (trials * wagered) as f64).sqrt(),
    })
}
