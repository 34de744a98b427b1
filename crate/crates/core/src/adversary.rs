//! Single-trader adversaries against the noisy market maker.
//!
//! The target strategy pushes the noisy state back to a fixed `q*` every
//! round. If the outcome is drawn with probability `C′(q*)`, each of its trades
//! has nonnegative expected profit, and at least `χ` whenever the noisy state
//! started `γ` or more away from `q*`. The maker pays for all of it.

use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::cost_market::{chi, CostFunction};
use crate::error::{check_positive, Error, Result};
use crate::noisy_market::{
    simulate, MarketConfig, NoiseKind, SimulationRng, Strategy, TradeLedger, TraderView,
};
use crate::stats::{derive_seed, Interval, Proportion, RunningStats};

/// Conditioning events needed before a probe estimate is reported.
pub const MIN_CONDITIONING_EVENTS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TargetStrategy {
    pub target: f64,
    pub trade_bound: f64,
}

impl TargetStrategy {
    pub fn new(target: f64, trade_bound: f64) -> Result<Self> {
        Ok(Self {
            target,
            trade_bound: check_positive("trade bound k", trade_bound)?,
        })
    }

    /// `min{q* − q′, k}` when `q′ ≤ q*`, else `−min{q′ − q*, k}`.
    pub fn trade_from(&self, noisy_state: f64) -> f64 {
        if noisy_state <= self.target {
            (self.target - noisy_state).min(self.trade_bound)
        } else {
            -(noisy_state - self.target).min(self.trade_bound)
        }
    }
}

impl Strategy for TargetStrategy {
    fn describe(&self) -> String {
        format!("target(q*={}, k={})", self.target, self.trade_bound)
    }

    fn decide(&mut self, view: TraderView<'_>, _: &mut dyn RngCore) -> f64 {
        self.trade_from(view.current_noisy_state())
    }
}

/// Plays the target strategy except in one round, where it tries to move the
/// noisy state to `q̂ = q* + k/2` instead.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationStrategy {
    pub base: TargetStrategy,
    pub round: usize,
    pub alternate_target: f64,
}

impl DeviationStrategy {
    pub fn new(target: f64, trade_bound: f64, round: usize) -> Result<Self> {
        if round == 0 {
            return Err(Error::Domain {
                name: "deviation round",
                value: 0.0,
                expected: ">= 1",
            });
        }
        let base = TargetStrategy::new(target, trade_bound)?;
        Ok(Self {
            base,
            round,
            alternate_target: target + trade_bound / 2.0,
        })
    }

    pub fn trade_at(&self, round: usize, noisy_state: f64) -> f64 {
        if round != self.round {
            return self.base.trade_from(noisy_state);
        }
        let jump = self.alternate_target - noisy_state;
        // out of reach: stand still
        if jump.abs() <= self.base.trade_bound {
            jump
        } else {
            0.0
        }
    }
}

impl Strategy for DeviationStrategy {
    fn describe(&self) -> String {
        format!(
            "deviation(q*={}, q^={}, round={})",
            self.base.target, self.alternate_target, self.round
        )
    }

    fn decide(&mut self, view: TraderView<'_>, _: &mut dyn RngCore) -> f64 {
        self.trade_at(view.round, view.current_noisy_state())
    }
}

/// Trader's expected profit (and the maker's expected loss) from buying `x`
/// at noisy state `q′` when the outcome is drawn from `C′(q*)`:
/// `π = C′(q*)·x − C(q′ + x) + C(q′)`.
pub fn per_trade_expected_profit<C: CostFunction + ?Sized>(
    cost: &C,
    target: f64,
    noisy_state: f64,
    trade: f64,
) -> f64 {
    cost.price(target) * trade - cost.trade_cost(noisy_state, trade)
}

/// Per-trace quantities the loss bound needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceSummary {
    /// `Σ_t π_t`.
    pub trader_profit: f64,
    /// Rounds with `|q′_t − q*| ≥ γ`.
    pub far_rounds: usize,
    /// Smallest `π_t` over all rounds.
    pub min_profit: f64,
    /// Smallest `π_t − χ` over rounds that started at least `γ` away.
    pub min_far_excess: f64,
}

impl TraceSummary {
    pub fn from_ledger<C: CostFunction + ?Sized>(
        ledger: &TradeLedger,
        cost: &C,
        target: f64,
        radius: f64,
        chi: f64,
    ) -> Self {
        let mut summary = TraceSummary {
            trader_profit: 0.0,
            far_rounds: 0,
            min_profit: f64::INFINITY,
            min_far_excess: f64::INFINITY,
        };
        for row in &ledger.rows {
            let profit = per_trade_expected_profit(cost, target, row.qprime, row.x);
            summary.trader_profit += profit;
            summary.min_profit = summary.min_profit.min(profit);
            if (row.qprime - target).abs() >= radius {
                summary.far_rounds += 1;
                summary.min_far_excess = summary.min_far_excess.min(profit - chi);
            }
        }
        summary
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma3Estimate {
    pub chi: f64,
    /// `Σ_t` empirical frequency of `|q′_t − q*| ≥ γ`.
    pub far_frequency_sum: f64,
    /// `χ · far_frequency_sum`.
    pub bound: f64,
    /// Mean over traces of `Σ_t π_t`.
    pub mean_trader_profit: f64,
    pub trader_profit_std_error: f64,
    /// Standard error of the per-trace gap `Σ_t π_t − χ·(far rounds)`.
    pub gap_std_error: f64,
    pub min_profit: f64,
    pub min_far_excess: f64,
    pub traces: usize,
}

impl Lemma3Estimate {
    pub fn from_summaries(chi: f64, summaries: &[TraceSummary]) -> Result<Self> {
        if summaries.is_empty() {
            return Err(Error::Empty("trace set"));
        }
        let far: RunningStats = summaries.iter().map(|s| s.far_rounds as f64).collect();
        let profit: RunningStats = summaries.iter().map(|s| s.trader_profit).collect();
        let gap: RunningStats = summaries
            .iter()
            .map(|s| s.trader_profit - chi * s.far_rounds as f64)
            .collect();
        Ok(Self {
            chi,
            far_frequency_sum: far.mean(),
            bound: chi * far.mean(),
            mean_trader_profit: profit.mean(),
            trader_profit_std_error: profit.std_error(),
            gap_std_error: gap.std_error(),
            min_profit: summaries
                .iter()
                .map(|s| s.min_profit)
                .fold(f64::INFINITY, f64::min),
            min_far_excess: summaries
                .iter()
                .map(|s| s.min_far_excess)
                .fold(f64::INFINITY, f64::min),
            traces: summaries.len(),
        })
    }
}

/// `χ(C, q*, γ) · Σ_t freq(|q′_t − q*| ≥ γ)` over target-strategy traces,
/// alongside the realized mean of `Σ_t π_t`.
pub fn lemma3_lower_bound<C: CostFunction + ?Sized>(
    traces: &[TradeLedger],
    target: f64,
    radius: f64,
    cost: &C,
) -> Result<Lemma3Estimate> {
    let chi = chi(cost, target, radius)?;
    if let Some(first) = traces.first() {
        if traces.iter().any(|t| t.rounds() != first.rounds()) {
            return Err(Error::Profile("traces must share one horizon".into()));
        }
    }
    let summaries: Vec<TraceSummary> = traces
        .iter()
        .map(|t| TraceSummary::from_ledger(t, cost, target, radius, chi))
        .collect();
    Lemma3Estimate::from_summaries(chi, &summaries)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeEstimate {
    pub round: usize,
    pub trials: usize,
    /// Trials with `q′_t̂ ∈ R*`.
    pub conditioned: usize,
    /// `Pr(q′_{t̂+1} ∈ R* | target, q′_t̂ ∈ R*)`.
    pub p1: Proportion,
    /// `Pr(q′_{t̂+1} ∈ R* | deviation at t̂, q′_t̂ ∈ R*)`.
    pub p2: Proportion,
    /// Floor on `ε(t̂)` implied by `p1` with `δ = 0`; `+∞` when `p1 = 1`.
    pub implied_epsilon: f64,
    pub implied_epsilon_ci: Interval,
}

/// `max(0, ln(p / (1 − p)))`: the smallest ε compatible with
/// `Pr(q′_{t̂+1} ∉ R*) ≥ 1/(1 + e^ε)`.
pub fn implied_epsilon(p1: f64) -> f64 {
    if p1 >= 1.0 {
        f64::INFINITY
    } else {
        (p1 / (1.0 - p1)).ln().max(0.0)
    }
}

/// Monte Carlo estimate of how far apart the target strategy and its one-round
/// deviation leave the next noisy state, as an implied privacy floor.
///
/// `R* = (q* − k/4, q* + k/4)`, `q̂ = q* + k/2`. Both strategies share the noise
/// stream of each trial, so their traces agree through round `t̂ − 1`.
pub fn privacy_probe<C: CostFunction + ?Sized>(
    cost: &C,
    noise: NoiseKind,
    config: MarketConfig,
    target: f64,
    round: usize,
    trials: usize,
    seed: u64,
) -> Result<ProbeEstimate> {
    if round == 0 {
        return Err(Error::Domain {
            name: "probe round",
            value: 0.0,
            expected: ">= 1",
        });
    }
    let k = config.trade_bound;
    let in_region = |q: f64| (q - target).abs() < k / 4.0;
    let outcomes: Vec<Option<(bool, bool)>> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| -> Result<Option<(bool, bool)>> {
            let trial_seed = derive_seed(seed, &[round as u64, trial]);
            let mut honest = TargetStrategy::new(target, k)?;
            let base = simulate(
                &mut honest,
                noise.build()?,
                cost,
                config,
                round,
                &mut SimulationRng::from_seed(trial_seed),
            )?;
            if !in_region(base.rows[round - 1].qprime) {
                return Ok(None);
            }
            let mut deviant = DeviationStrategy::new(target, k, round)?;
            let deviated = simulate(
                &mut deviant,
                noise.build()?,
                cost,
                config,
                round,
                &mut SimulationRng::from_seed(trial_seed),
            )?;
            debug_assert_eq!(
                base.rows[round - 1].qprime.to_bits(),
                deviated.rows[round - 1].qprime.to_bits()
            );
            Ok(Some((
                in_region(base.final_state.noisy_state()),
                in_region(deviated.final_state.noisy_state()),
            )))
        })
        .collect::<Result<_>>()?;

    let conditioned: Vec<(bool, bool)> = outcomes.into_iter().flatten().collect();
    if conditioned.len() < MIN_CONDITIONING_EVENTS {
        return Err(Error::InsufficientEvents {
            observed: conditioned.len(),
            required: MIN_CONDITIONING_EVENTS,
        });
    }
    let p1 = Proportion::new(
        conditioned.iter().filter(|c| c.0).count(),
        conditioned.len(),
    );
    let p2 = Proportion::new(
        conditioned.iter().filter(|c| c.1).count(),
        conditioned.len(),
    );
    let ci = p1.ci95();
    Ok(ProbeEstimate {
        round,
        trials,
        conditioned: conditioned.len(),
        p1,
        p2,
        implied_epsilon: implied_epsilon(p1.estimate()),
        implied_epsilon_ci: Interval {
            low: implied_epsilon(ci.low),
            high: implied_epsilon(ci.high),
        },
    })
}
