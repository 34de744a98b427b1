//! Noisy cost-function market maker.
//!
//! Trades are priced at a noisy state `q′_t = q_t + η_t` and limited to
//! `|x_t| ≤ k`. Noise processes never see the trade of the round whose
//! successor noise they are drawing: `η_{t+1}` is drawn before `x_t` is
//! appended to the history handed to the process.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;

use rand::{Rng, RngCore};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::cost_market::CostFunction;
use crate::error::{check_positive, Error, Result};
use crate::scoring::Outcome;
use crate::stats::trial_rng;

/// What a noise process may look at when drawing `η_index`.
#[derive(Debug, Clone, Copy)]
pub struct NoiseHistory<'a> {
    /// `x_1, …, x_{index−2}`: the most recent trade is withheld.
    pub trades: &'a [f64],
    /// `η_1, …, η_{index−1}`.
    pub noises: &'a [f64],
}

pub trait NoiseProcess: Send {
    fn describe(&self) -> String;

    /// Draws `η_index` (1-based).
    fn draw(&mut self, index: usize, history: NoiseHistory<'_>, rng: &mut dyn RngCore) -> f64;
}

/// Symmetric two-sided exponential (Laplace) draw with mean 0 and `E|η| = scale`.
pub fn two_sided_exponential<G: Rng + ?Sized>(scale: f64, rng: &mut G) -> f64 {
    let magnitude: f64 = rng.sample(Exp1);
    if rng.random::<bool>() {
        scale * magnitude
    } else {
        -scale * magnitude
    }
}

/// `η ≡ 0`: the market reduces to the standard cost-function market maker.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroNoise;

impl NoiseProcess for ZeroNoise {
    fn describe(&self) -> String {
        "none".into()
    }

    fn draw(&mut self, _: usize, _: NoiseHistory<'_>, _: &mut dyn RngCore) -> f64 {
        0.0
    }
}

/// Independent two-sided exponential noise every round.
#[derive(Debug, Clone, Copy)]
pub struct FreshNoise {
    scale: f64,
}

impl FreshNoise {
    pub fn new(scale: f64) -> Result<Self> {
        Ok(Self {
            scale: check_positive("noise scale", scale)?,
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

impl NoiseProcess for FreshNoise {
    fn describe(&self) -> String {
        format!("fresh(scale={})", self.scale)
    }

    fn draw(&mut self, _: usize, _: NoiseHistory<'_>, rng: &mut dyn RngCore) -> f64 {
        two_sided_exponential(self.scale, rng)
    }
}

/// Noise correlated across time through a dyadic tree of cached terms.
///
/// Every dyadic interval `[(c−1)·2^j + 1, c·2^j]` owns one two-sided
/// exponential term, drawn the first time the interval becomes active and
/// reused afterwards. `η_t` is the sum of the terms of the intervals that
/// contain `t`, at levels `j = 0, …, ⌊log₂ t⌋`.
#[derive(Debug, Clone)]
pub struct TreeCounterNoise {
    scale: f64,
    terms: HashMap<(u32, u64), f64>,
}

impl TreeCounterNoise {
    /// Per-interval scale `2k/ε′` for a trade bound `k` and per-level budget `ε′`.
    pub fn new(level_epsilon: f64, trade_bound: f64) -> Result<Self> {
        let level_epsilon = check_positive("per-level epsilon", level_epsilon)?;
        let trade_bound = check_positive("trade bound k", trade_bound)?;
        Self::with_scale(2.0 * trade_bound / level_epsilon)
    }

    pub fn with_scale(scale: f64) -> Result<Self> {
        Ok(Self {
            scale: check_positive("noise scale", scale)?,
            terms: HashMap::new(),
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `(level, block)` of every interval whose term enters `η_index`.
    pub fn active_intervals(index: usize) -> Vec<(u32, u64)> {
        assert!(index >= 1, "noise indices are 1-based");
        let t = index as u64;
        (0..=t.ilog2())
            .map(|j| (j, t.div_ceil(1u64 << j)))
            .collect()
    }
}

impl NoiseProcess for TreeCounterNoise {
    fn describe(&self) -> String {
        format!("tree(scale={})", self.scale)
    }

    fn draw(&mut self, index: usize, _: NoiseHistory<'_>, rng: &mut dyn RngCore) -> f64 {
        let scale = self.scale;
        Self::active_intervals(index)
            .into_iter()
            .map(|key| {
                *self
                    .terms
                    .entry(key)
                    .or_insert_with(|| two_sided_exponential(scale, rng))
            })
            .sum()
    }
}

/// Serializable description of the shipped noise processes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NoiseKind {
    None,
    Fresh { scale: f64 },
    Tree { scale: f64 },
}

impl NoiseKind {
    pub fn build(&self) -> Result<Box<dyn NoiseProcess>> {
        Ok(match *self {
            NoiseKind::None => Box::new(ZeroNoise),
            NoiseKind::Fresh { scale } => Box::new(FreshNoise::new(scale)?),
            NoiseKind::Tree { scale } => Box::new(TreeCounterNoise::with_scale(scale)?),
        })
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseKind::None => write!(f, "none"),
            NoiseKind::Fresh { scale } => write!(f, "fresh({scale})"),
            NoiseKind::Tree { scale } => write!(f, "tree({scale})"),
        }
    }
}

/// What a trader sees before choosing `x_t`.
#[derive(Debug, Clone, Copy)]
pub struct TraderView<'a> {
    /// 1-based round index `t`.
    pub round: usize,
    /// `x_1, …, x_{t−1}`.
    pub trades: &'a [f64],
    /// `q′_1, …, q′_t`.
    pub noisy_states: &'a [f64],
}

impl TraderView<'_> {
    pub fn current_noisy_state(&self) -> f64 {
        *self
            .noisy_states
            .last()
            .expect("a trader always sees the current noisy state")
    }
}

/// A (possibly randomized) mapping from the public history to a trade.
pub trait Strategy: Send {
    fn describe(&self) -> String;

    fn decide(&mut self, view: TraderView<'_>, rng: &mut dyn RngCore) -> f64;
}

/// Trades nothing, ever.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdleStrategy;

impl Strategy for IdleStrategy {
    fn describe(&self) -> String {
        "idle".into()
    }

    fn decide(&mut self, _: TraderView<'_>, _: &mut dyn RngCore) -> f64 {
        0.0
    }
}

/// Replays a fixed list of trades, then stays idle.
#[derive(Debug, Clone, Default)]
pub struct ScriptedStrategy {
    trades: Vec<f64>,
}

impl ScriptedStrategy {
    pub fn new(trades: Vec<f64>) -> Self {
        Self { trades }
    }
}

impl Strategy for ScriptedStrategy {
    fn describe(&self) -> String {
        format!("scripted({} trades)", self.trades.len())
    }

    fn decide(&mut self, view: TraderView<'_>, _: &mut dyn RngCore) -> f64 {
        self.trades.get(view.round - 1).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketConfig {
    /// Per-round trade bound `k`.
    pub trade_bound: f64,
    /// Charge added to every executed (nonzero) trade.
    pub fee: f64,
    /// When positive, trades are rounded toward zero to a multiple of this unit.
    pub min_unit: f64,
}

impl MarketConfig {
    pub fn new(trade_bound: f64) -> Result<Self> {
        Ok(Self {
            trade_bound: check_positive("trade bound k", trade_bound)?,
            fee: 0.0,
            min_unit: 0.0,
        })
    }

    pub fn with_fee(mut self, fee: f64) -> Result<Self> {
        if !(fee >= 0.0 && fee.is_finite()) {
            return Err(Error::Domain {
                name: "fee",
                value: fee,
                expected: "finite and >= 0",
            });
        }
        self.fee = fee;
        Ok(self)
    }

    pub fn with_min_unit(mut self, unit: f64) -> Result<Self> {
        if !(unit >= 0.0 && unit.is_finite()) {
            return Err(Error::Domain {
                name: "min unit",
                value: unit,
                expected: "finite and >= 0",
            });
        }
        self.min_unit = unit;
        Ok(self)
    }

    /// Rounds toward zero to a multiple of `min_unit`; never grows `|x|`.
    pub fn round_trade(&self, x: f64) -> f64 {
        if self.min_unit > 0.0 {
            (x / self.min_unit).trunc() * self.min_unit
        } else {
            x
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoisyMarketState {
    /// 1-based index of the round about to be played.
    pub round: usize,
    /// True state `q_t`.
    pub true_state: f64,
    /// Noise `η_t`.
    pub noise: f64,
}

impl NoisyMarketState {
    /// `q′_t = q_t + η_t`.
    pub fn noisy_state(&self) -> f64 {
        self.true_state + self.noise
    }
}

/// One executed round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub t: usize,
    pub x: f64,
    pub q: f64,
    pub eta: f64,
    pub qprime: f64,
    pub payment: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TradeLedger {
    pub rows: Vec<LedgerRow>,
    pub fee: f64,
    /// State after the last round: `q_{T+1}`, `η_{T+1}`.
    pub final_state: NoisyMarketState,
}

impl TradeLedger {
    pub fn rounds(&self) -> usize {
        self.rows.len()
    }

    pub fn total_payments(&self) -> f64 {
        self.rows.iter().map(|r| r.payment).sum()
    }

    /// `L_T = q_{T+1}·1(ω = 1) − Σ_t payment_t`; fees reduce the loss.
    pub fn maker_loss(&self, outcome: Outcome) -> f64 {
        self.final_state.true_state * outcome.indicator() - self.total_payments()
    }

    /// Writes the `t,x,q,eta,qprime,payment` table with a header row.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        for row in &self.rows {
            out.serialize(row)?;
        }
        if self.rows.is_empty() {
            out.write_record(["t", "x", "q", "eta", "qprime", "payment"])?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn maker_loss(ledger: &TradeLedger, outcome: Outcome) -> f64 {
    ledger.maker_loss(outcome)
}

/// Independent random streams for the market's noise and the trader.
#[derive(Debug, Clone)]
pub struct SimulationRng {
    pub noise: ChaCha8Rng,
    pub trader: ChaCha8Rng,
}

impl SimulationRng {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            noise: trial_rng(seed, &[0]),
            trader: trial_rng(seed, &[1]),
        }
    }
}

pub struct NoisyMarket<'c, C: CostFunction + ?Sized> {
    cost: &'c C,
    config: MarketConfig,
    noise: Box<dyn NoiseProcess>,
    state: NoisyMarketState,
    trades: Vec<f64>,
    noises: Vec<f64>,
}

impl<'c, C: CostFunction + ?Sized> NoisyMarket<'c, C> {
    /// Starts at `q_1 = 0` and draws `η_1`.
    pub fn open(
        cost: &'c C,
        config: MarketConfig,
        mut noise: Box<dyn NoiseProcess>,
        rng: &mut dyn RngCore,
    ) -> Self {
        let first = noise.draw(
            1,
            NoiseHistory {
                trades: &[],
                noises: &[],
            },
            rng,
        );
        Self {
            cost,
            config,
            noise,
            state: NoisyMarketState {
                round: 1,
                true_state: 0.0,
                noise: first,
            },
            trades: Vec::new(),
            noises: vec![first],
        }
    }

    pub fn state(&self) -> NoisyMarketState {
        self.state
    }

    pub fn config(&self) -> &MarketConfig {
        &self.config
    }

    pub fn trades(&self) -> &[f64] {
        &self.trades
    }

    pub fn noises(&self) -> &[f64] {
        &self.noises
    }

    /// Executes trade `x` at the current noisy state, then draws the next noise.
    pub fn step(&mut self, x: f64, rng: &mut dyn RngCore) -> Result<LedgerRow> {
        let t = self.state.round;
        if x.is_nan() || x.abs() > self.config.trade_bound {
            return Err(Error::TradeTooLarge {
                round: t,
                trade: x,
                k: self.config.trade_bound,
            });
        }
        let qprime = self.state.noisy_state();
        let payment = if x == 0.0 {
            0.0
        } else {
            self.cost.trade_cost(qprime, x) + self.config.fee
        };
        let row = LedgerRow {
            t,
            x,
            q: self.state.true_state,
            eta: self.state.noise,
            qprime,
            payment,
        };

        // self.trades still ends at x_{t−1} here
        let next = self.noise.draw(
            t + 1,
            NoiseHistory {
                trades: &self.trades[..t - 1],
                noises: &self.noises,
            },
            rng,
        );
        self.trades.push(x);
        self.noises.push(next);
        self.state = NoisyMarketState {
            round: t + 1,
            true_state: self.state.true_state + x,
            noise: next,
        };
        Ok(row)
    }
}

/// Plays `rounds` rounds of `strategy` against a fresh noisy market.
pub fn simulate<C: CostFunction + ?Sized>(
    strategy: &mut dyn Strategy,
    noise: Box<dyn NoiseProcess>,
    cost: &C,
    config: MarketConfig,
    rounds: usize,
    rng: &mut SimulationRng,
) -> Result<TradeLedger> {
    if rounds == 0 {
        return Err(Error::Empty("round schedule"));
    }
    let mut market = NoisyMarket::open(cost, config, noise, &mut rng.noise);
    let mut noisy_states = vec![market.state().noisy_state()];
    let mut rows = Vec::with_capacity(rounds);
    for t in 1..=rounds {
        let desired = strategy.decide(
            TraderView {
                round: t,
                trades: market.trades(),
                noisy_states: &noisy_states,
            },
            &mut rng.trader,
        );
        if desired.is_nan() || desired.abs() > config.trade_bound {
            return Err(Error::TradeTooLarge {
                round: t,
                trade: desired,
                k: config.trade_bound,
            });
        }
        rows.push(market.step(config.round_trade(desired), &mut rng.noise)?);
        noisy_states.push(market.state().noisy_state());
    }
    Ok(TradeLedger {
        rows,
        fee: config.fee,
        final_state: market.state(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost_market::{run_standard_market, Lmsr};
    use crate::stats::RunningStats;
    use rand::SeedableRng;

    fn lmsr() -> Lmsr {
        Lmsr::new(100.0, 0.0).unwrap()
    }

    #[test]
    fn fresh_noise_moments() {
        let scale = 2.5;
        let mut noise = FreshNoise::new(scale).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let empty = NoiseHistory {
            trades: &[],
            noises: &[],
        };
        let draws: Vec<f64> = (1..=1_000_000)
            .map(|t| noise.draw(t, empty, &mut rng))
            .collect();
        let mean: RunningStats = draws.iter().copied().collect();
        let abs: RunningStats = draws.iter().map(|d| d.abs()).collect();
        assert!(mean.mean().abs() < 4.0 * scale / 1e3);
        assert!((abs.mean() - scale).abs() < 4.0 * abs.std_error());
        assert!(FreshNoise::new(0.0).is_err());
    }

    #[test]
    fn different_seeds_give_different_paths() {
        let run = |seed| {
            let mut noise = FreshNoise::new(1.0).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let empty = NoiseHistory {
                trades: &[],
                noises: &[],
            };
            (1..=10)
                .map(|t| noise.draw(t, empty, &mut rng))
                .collect::<Vec<_>>()
        };
        assert_ne!(run(1), run(2));
        assert_eq!(run(1), run(1));
    }

    #[test]
    fn tree_cover_sizes() {
        for m in 0..12u32 {
            let t = 1usize << m;
            assert_eq!(TreeCounterNoise::active_intervals(t).len(), m as usize + 1);
        }
        assert_eq!(
            TreeCounterNoise::active_intervals(6),
            vec![(0, 6), (1, 3), (2, 2)]
        );
        // consecutive indices share every interval above the level where they split
        let a = TreeCounterNoise::active_intervals(5);
        let b = TreeCounterNoise::active_intervals(6);
        assert_eq!(a[2..], b[2..]);
    }

    #[test]
    fn tree_noise_reuses_cached_terms() {
        let mut noise = TreeCounterNoise::new(1.0, 2.0).unwrap();
        assert_eq!(noise.scale(), 4.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let empty = NoiseHistory {
            trades: &[],
            noises: &[],
        };
        let first = noise.draw(4, empty, &mut rng);
        let again = noise.draw(4, empty, &mut rng);
        assert_eq!(first, again);
        assert!(TreeCounterNoise::new(0.0, 1.0).is_err());
    }

    #[test]
    fn tree_noise_magnitude_grows_logarithmically() {
        let paths = 1000;
        let horizon = 1usize << 10;
        let checkpoints = [1usize << 2, 1 << 6, 1 << 10];
        let mut abs = vec![RunningStats::new(); checkpoints.len()];
        for path in 0..paths {
            let mut noise = TreeCounterNoise::with_scale(1.0).unwrap();
            let mut rng = trial_rng(17, &[path]);
            let empty = NoiseHistory {
                trades: &[],
                noises: &[],
            };
            for t in 1..=horizon {
                let eta = noise.draw(t, empty, &mut rng);
                if let Some(slot) = checkpoints.iter().position(|&c| c == t) {
                    abs[slot].push(eta.abs());
                }
            }
        }
        // E|η_t| is bounded by (log₂ t + 1)·scale and increases with t
        for (stats, &t) in abs.iter().zip(&checkpoints) {
            assert!(stats.mean() <= (t.ilog2() + 1) as f64);
        }
        assert!(abs[0].mean() < abs[2].mean());
    }

    #[test]
    fn zero_trade_pays_nothing_even_with_fee() {
        let c = lmsr();
        let config = MarketConfig::new(5.0).unwrap().with_fee(0.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut market = NoisyMarket::open(
            &c,
            config,
            Box::new(FreshNoise::new(1.0).unwrap()),
            &mut rng,
        );
        assert_eq!(market.step(0.0, &mut rng).unwrap().payment, 0.0);
    }

    #[test]
    fn fee_is_additive() {
        let c = lmsr();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let plain = MarketConfig::new(5.0).unwrap();
        let charged = plain.with_fee(0.25).unwrap();
        let p0 = NoisyMarket::open(&c, plain, Box::new(ZeroNoise), &mut rng)
            .step(3.0, &mut rng)
            .unwrap()
            .payment;
        let p1 = NoisyMarket::open(&c, charged, Box::new(ZeroNoise), &mut rng)
            .step(3.0, &mut rng)
            .unwrap()
            .payment;
        assert!((p1 - p0 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn oversized_trades_are_rejected() {
        let c = lmsr();
        let config = MarketConfig::new(5.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut market = NoisyMarket::open(&c, config, Box::new(ZeroNoise), &mut rng);
        assert!(matches!(
            market.step(5.5, &mut rng),
            Err(Error::TradeTooLarge { .. })
        ));
        assert!(market.step(f64::NAN, &mut rng).is_err());
        assert!(market.step(-5.0, &mut rng).is_ok());

        let mut greedy = ScriptedStrategy::new(vec![1.0, 9.0]);
        let err = simulate(
            &mut greedy,
            Box::new(ZeroNoise),
            &c,
            config,
            3,
            &mut SimulationRng::from_seed(1),
        )
        .unwrap_err();
        assert!(matches!(err, Error::TradeTooLarge { round: 2, .. }));
    }

    #[test]
    fn zero_noise_reduces_to_standard_market() {
        let c = lmsr();
        let trades = vec![3.0, -1.5, 4.25, 0.0, -5.0, 2.0];
        let config = MarketConfig::new(5.0).unwrap();
        let ledger = simulate(
            &mut ScriptedStrategy::new(trades.clone()),
            Box::new(ZeroNoise),
            &c,
            config,
            trades.len(),
            &mut SimulationRng::from_seed(4),
        )
        .unwrap();
        for outcome in Outcome::BOTH {
            let (standard, loss) = run_standard_market(&trades, &c, outcome);
            assert_eq!(standard.final_state, ledger.final_state.true_state);
            for (row, round) in ledger.rows.iter().zip(&standard.rounds) {
                assert_eq!(row.x, round.trade);
                assert_eq!(row.q, round.state);
                assert_eq!(row.qprime, round.state);
                assert_eq!(row.eta, 0.0);
                assert_eq!(row.payment, round.payment);
            }
            assert!((ledger.maker_loss(outcome) - loss).abs() < 1e-9);
        }
    }

    #[test]
    fn idle_trader_leaves_state_untouched() {
        let c = lmsr();
        let ledger = simulate(
            &mut IdleStrategy,
            Box::new(FreshNoise::new(3.0).unwrap()),
            &c,
            MarketConfig::new(5.0).unwrap(),
            50,
            &mut SimulationRng::from_seed(8),
        )
        .unwrap();
        assert!(ledger.rows.iter().all(|r| r.payment == 0.0 && r.x == 0.0));
        assert_eq!(ledger.final_state.true_state, 0.0);
        assert_eq!(ledger.maker_loss(Outcome::Yes), 0.0);
    }

    #[test]
    fn noisy_state_identity_holds_every_round() {
        let c = lmsr();
        let ledger = simulate(
            &mut ScriptedStrategy::new(vec![1.0, -2.0, 4.0, 0.5]),
            NoiseKind::Tree { scale: 2.0 }.build().unwrap(),
            &c,
            MarketConfig::new(5.0).unwrap(),
            4,
            &mut SimulationRng::from_seed(2),
        )
        .unwrap();
        assert_eq!(ledger.rows[0].q, 0.0);
        for row in &ledger.rows {
            assert_eq!(row.qprime, row.q + row.eta);
        }
        assert_eq!(ledger.final_state.true_state, 3.5);
    }

    #[test]
    fn min_unit_rounds_toward_zero() {
        let config = MarketConfig::new(10.0).unwrap().with_min_unit(0.5).unwrap();
        assert_eq!(config.round_trade(1.7), 1.5);
        assert_eq!(config.round_trade(-1.7), -1.5);
        assert_eq!(config.round_trade(0.49), 0.0);
        assert_eq!(config.round_trade(-10.0), -10.0);
    }

    #[test]
    fn sub_unit_trades_cost_nothing() {
        let c = lmsr();
        let config = MarketConfig::new(10.0)
            .unwrap()
            .with_fee(0.1)
            .unwrap()
            .with_min_unit(1.0)
            .unwrap();
        let ledger = simulate(
            &mut ScriptedStrategy::new(vec![0.4, -0.99, 2.5, 0.0]),
            Box::new(ZeroNoise),
            &c,
            config,
            4,
            &mut SimulationRng::from_seed(0),
        )
        .unwrap();
        let executed: Vec<f64> = ledger.rows.iter().map(|r| r.x).collect();
        assert_eq!(executed, vec![0.0, 0.0, 2.0, 0.0]);
        assert_eq!(ledger.rows[0].payment, 0.0);
        assert_eq!(ledger.rows[1].payment, 0.0);
        assert!(ledger.rows[2].payment > 0.1);
    }

    #[test]
    fn ledger_csv_layout() {
        let c = lmsr();
        let ledger = simulate(
            &mut ScriptedStrategy::new(vec![1.0, -0.5]),
            Box::new(ZeroNoise),
            &c,
            MarketConfig::new(5.0).unwrap(),
            2,
            &mut SimulationRng::from_seed(0),
        )
        .unwrap();
        let mut buf = Vec::new();
        ledger.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,x,q,eta,qprime,payment"));
        assert!(lines.next().unwrap().starts_with("1,1.0,0.0,0.0,0.0,"));
        assert!(lines.next().unwrap().starts_with("2,-0.5,1.0,0.0,1.0,"));
        assert_eq!(lines.next(), None);
    }
}
