use std::sync::{Arc, Mutex};

use privmarket::cost_market::Lmsr;
use privmarket::noisy_market::{
    simulate, MarketConfig, NoiseHistory, NoiseKind, NoiseProcess, NoisyMarket, ScriptedStrategy,
    SimulationRng,
};
use privmarket::stats::trial_rng;
use rand::RngCore;

type Seen = Arc<Mutex<Vec<(usize, Vec<f64>)>>>;

/// Wraps a real noise process and records every history it is shown.
struct Spy {
    inner: Box<dyn NoiseProcess>,
    seen: Seen,
}

impl NoiseProcess for Spy {
    fn describe(&self) -> String {
        format!("spy({})", self.inner.describe())
    }

    fn draw(&mut self, index: usize, history: NoiseHistory<'_>, rng: &mut dyn RngCore) -> f64 {
        self.seen
            .lock()
            .unwrap()
            .push((index, history.trades.to_vec()));
        self.inner.draw(index, history, rng)
    }
}

fn noises_for(trades: &[f64], kind: NoiseKind, seed: u64) -> Vec<f64> {
    let cost = Lmsr::new(50.0, 0.0).unwrap();
    let config = MarketConfig::new(10.0).unwrap();
    let mut rng = trial_rng(seed, &[]);
    let mut market = NoisyMarket::open(&cost, config, kind.build().unwrap(), &mut rng);
    for &x in trades {
        market.step(x, &mut rng).unwrap();
    }
    market.noises().to_vec()
}

#[test]
fn next_noise_is_bit_identical_when_only_the_current_trade_differs() {
    for kind in [
        NoiseKind::Fresh { scale: 3.0 },
        NoiseKind::Tree { scale: 3.0 },
    ] {
        for t in [1usize, 2, 7, 16, 33] {
            let mut a: Vec<f64> = (0..t).map(|i| ((i * 7) % 19) as f64 - 9.0).collect();
            let mut b = a.clone();
            b[t - 1] = -a[t - 1] + 0.5;
            let na = noises_for(&a, kind, 11);
            let nb = noises_for(&b, kind, 11);
            // η_1..η_{t+1} were all drawn before x_t could matter
            assert_eq!(na.len(), t + 1);
            for (x, y) in na.iter().zip(&nb) {
                assert_eq!(x.to_bits(), y.to_bits(), "{kind} at t = {t}");
            }
            a.push(1.0);
            b.push(1.0);
            assert_eq!(noises_for(&a, kind, 11)[t].to_bits(), na[t].to_bits());
        }
    }
}

#[test]
fn noise_draws_only_see_strictly_earlier_trades() {
    let seen = Arc::new(Mutex::new(Vec::new()));
    let spy = Spy {
        inner: NoiseKind::Tree { scale: 2.0 }.build().unwrap(),
        seen: Arc::clone(&seen),
    };
    let trades: Vec<f64> = (1..=20).map(|i| i as f64 / 4.0).collect();
    let cost = Lmsr::new(30.0, 0.0).unwrap();
    simulate(
        &mut ScriptedStrategy::new(trades.clone()),
        Box::new(spy),
        &cost,
        MarketConfig::new(10.0).unwrap(),
        trades.len(),
        &mut SimulationRng::from_seed(5),
    )
    .unwrap();
    let seen = seen.lock().unwrap();
    assert_eq!(seen.len(), trades.len() + 1);
    for (index, history) in seen.iter() {
        // η_index may depend on x_1..x_{index−2} at most
        assert_eq!(history.as_slice(), &trades[..index.saturating_sub(2)]);
    }
}
