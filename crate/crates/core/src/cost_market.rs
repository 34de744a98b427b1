//! Cost-function market makers over a single binary security.

use serde::Serialize;

use crate::error::{check_positive, Error, Result};
use crate::scoring::Outcome;

/// A convex potential pricing trades: buying `x` shares at state `q` costs
/// `C(q + x) − C(q)`, and the instantaneous price is `C′(q)`.
pub trait CostFunction: Send + Sync {
    fn cost(&self, q: f64) -> f64;

    fn price(&self, q: f64) -> f64;

    fn trade_cost(&self, q: f64, x: f64) -> f64 {
        if x == 0.0 {
            0.0
        } else {
            self.cost(q + x) - self.cost(q)
        }
    }

    /// `D_C(p, q) = C(p) − C(q) − C′(q)(p − q)`.
    fn bregman(&self, p: f64, q: f64) -> f64 {
        if p == q {
            0.0
        } else {
            self.cost(p) - self.cost(q) - self.price(q) * (p - q)
        }
    }
}

impl<C: CostFunction + ?Sized> CostFunction for &C {
    fn cost(&self, q: f64) -> f64 {
        (**self).cost(q)
    }

    fn price(&self, q: f64) -> f64 {
        (**self).price(q)
    }

    fn trade_cost(&self, q: f64, x: f64) -> f64 {
        (**self).trade_cost(q, x)
    }

    fn bregman(&self, p: f64, q: f64) -> f64 {
        (**self).bregman(p, q)
    }
}

/// Logarithmic market scoring rule, `C(q) = b·ln(e^{(q+a)/b} + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lmsr {
    liquidity: f64,
    shift: f64,
}

impl Lmsr {
    pub fn new(liquidity: f64, shift: f64) -> Result<Self> {
        let liquidity = check_positive("liquidity b", liquidity)?;
        if !shift.is_finite() {
            return Err(Error::Domain {
                name: "shift a",
                value: shift,
                expected: "finite",
            });
        }
        Ok(Self { liquidity, shift })
    }

    pub fn liquidity(&self) -> f64 {
        self.liquidity
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Worst-case loss of the standard market maker when `a = 0`.
    pub fn worst_case_loss(&self) -> f64 {
        self.liquidity * std::f64::consts::LN_2
    }

    fn logit(&self, q: f64) -> f64 {
        (q + self.shift) / self.liquidity
    }
}

/// `ln(1 + e^z)` without overflow for large `|z|`.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl CostFunction for Lmsr {
    fn cost(&self, q: f64) -> f64 {
        self.liquidity * softplus(self.logit(q))
    }

    fn price(&self, q: f64) -> f64 {
        logistic(self.logit(q))
    }

    /// `b·(ln(1 + σ·(e^Δ − 1)) − σ·Δ)` with `σ = C′(q)` and `Δ = (p − q)/b`,
    /// the Bernoulli cumulant generating function minus its linear term.
    /// Avoids the cancellation of the generic formula at large `|q|`.
    fn bregman(&self, p: f64, q: f64) -> f64 {
        if p == q {
            return 0.0;
        }
        let (zp, zq) = (self.logit(p), self.logit(q));
        // D is symmetric under z ↦ −z; keep σ ≤ ½
        let (delta, sigma) = if zq > 0.0 {
            (zq - zp, logistic(-zq))
        } else {
            (zp - zq, logistic(zq))
        };
        let excess = if delta.abs() < 1e-3 {
            let v = sigma * (1.0 - sigma);
            let skew = 1.0 - 2.0 * sigma;
            let kurt = 1.0 - 6.0 * v;
            v * delta * delta * (0.5 + delta * (skew / 6.0 + delta * kurt / 24.0))
        } else {
            (sigma * delta.exp_m1()).ln_1p() - sigma * delta
        };
        // convexity makes D nonnegative; anything below is rounding
        self.liquidity * excess.max(0.0)
    }
}

pub fn lmsr_cost(q: f64, liquidity: f64, shift: f64) -> Result<f64> {
    Ok(Lmsr::new(liquidity, shift)?.cost(q))
}

pub fn lmsr_price(q: f64, liquidity: f64, shift: f64) -> Result<f64> {
    Ok(Lmsr::new(liquidity, shift)?.price(q))
}

/// `χ = min{D_C(q* + γ, q*), D_C(q* − γ, q*)}`, the guaranteed expected profit
/// of a target-strategy trade made from at least `γ` away from `q*`.
pub fn chi<C: CostFunction + ?Sized>(cost: &C, target: f64, radius: f64) -> Result<f64> {
    check_positive("gamma", radius)?;
    let value = cost
        .bregman(target + radius, target)
        .min(cost.bregman(target - radius, target));
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::LinearRegion(value))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarketRound {
    pub trade: f64,
    /// State before the trade.
    pub state: f64,
    pub payment: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MarketLedger {
    pub rounds: Vec<MarketRound>,
    pub final_state: f64,
}

impl MarketLedger {
    pub fn total_payments(&self) -> f64 {
        self.rounds.iter().map(|r| r.payment).sum()
    }

    /// `q_{T+1}·1(ω = 1) − Σ payments`.
    pub fn maker_loss(&self, outcome: Outcome) -> f64 {
        self.final_state * outcome.indicator() - self.total_payments()
    }
}

/// Runs the noiseless market maker from `q = 0` over `trades` and returns the
/// ledger together with `q_{T+1}·1(ω = 1) − (C(q_{T+1}) − C(0))`.
pub fn run_standard_market<C: CostFunction + ?Sized>(
    trades: &[f64],
    cost: &C,
    outcome: Outcome,
) -> (MarketLedger, f64) {
    let mut ledger = MarketLedger::default();
    let mut state = 0.0;
    for &trade in trades {
        ledger.rounds.push(MarketRound {
            trade,
            state,
            payment: cost.trade_cost(state, trade),
        });
        state += trade;
    }
    ledger.final_state = state;
    let loss = state * outcome.indicator() - (cost.cost(state) - cost.cost(0.0));
    (ledger, loss)
}
