//! One-shot wagering: the weighted-score mechanism and its private variant.
//!
//! The private mechanism replaces every bettor's score in the wager-weighted
//! average by an independent two-point indicator whose mean is `α·s`. Each
//! bettor is still paid against her own exact score (scaled by `α`), so a
//! bettor's profit is a function of the public noisy aggregate and her own
//! report only.

use rand::Rng;
use serde::Serialize;

use crate::error::{check_positive, check_probability, Error, Result};
use crate::scoring::{expected_score_unchecked, Outcome, ScoringRule};

/// Reports and wagers of all bettors on one binary event.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WagerProfile {
    reports: Vec<f64>,
    wagers: Vec<f64>,
}

impl WagerProfile {
    pub fn new(reports: Vec<f64>, wagers: Vec<f64>) -> Result<Self> {
        if reports.is_empty() {
            return Err(Error::Profile("at least one bettor is required".into()));
        }
        if reports.len() != wagers.len() {
            return Err(Error::Profile(format!(
                "{} reports but {} wagers",
                reports.len(),
                wagers.len()
            )));
        }
        for &p in &reports {
            check_probability("report", p)?;
        }
        for &m in &wagers {
            if !(m >= 0.0 && m.is_finite()) {
                return Err(Error::Domain {
                    name: "wager",
                    value: m,
                    expected: "finite and >= 0",
                });
            }
        }
        if wagers.iter().all(|&m| m == 0.0) {
            return Err(Error::ZeroTotalWager);
        }
        Ok(Self { reports, wagers })
    }

    pub fn len(&self) -> usize {
        self.reports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reports.is_empty()
    }

    pub fn reports(&self) -> &[f64] {
        &self.reports
    }

    pub fn wagers(&self) -> &[f64] {
        &self.wagers
    }

    pub fn total_wager(&self) -> f64 {
        self.wagers.iter().sum()
    }

    pub fn check_bettor(&self, bettor: usize) -> Result<()> {
        if bettor < self.len() {
            Ok(())
        } else {
            Err(Error::BettorIndex {
                index: bettor,
                n: self.len(),
            })
        }
    }

    /// Copy of this profile with bettor `bettor` reporting `report` instead.
    pub fn with_report(&self, bettor: usize, report: f64) -> Result<Self> {
        self.check_bettor(bettor)?;
        check_probability("report", report)?;
        let mut next = self.clone();
        next.reports[bettor] = report;
        Ok(next)
    }

    /// Copy of this profile with bettor `bettor` wagering `wager` instead.
    pub fn with_wager(&self, bettor: usize, wager: f64) -> Result<Self> {
        self.check_bettor(bettor)?;
        let mut wagers = self.wagers.clone();
        wagers[bettor] = wager;
        Self::new(self.reports.clone(), wagers)
    }

    /// Reorders bettors so that new position `k` holds old bettor `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        if order.len() != self.len() {
            return Err(Error::Profile("permutation has the wrong length".into()));
        }
        for &j in order {
            if j >= self.len() || std::mem::replace(&mut seen[j], true) {
                return Err(Error::Profile("not a permutation".into()));
            }
        }
        Ok(Self {
            reports: order.iter().map(|&j| self.reports[j]).collect(),
            wagers: order.iter().map(|&j| self.wagers[j]).collect(),
        })
    }
}

/// `α = 1 − e^{−ε}` and `β = e^{−ε}` for a privacy level `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrivacyParams {
    pub epsilon: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl PrivacyParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        let epsilon = check_positive("epsilon", epsilon)?;
        let beta = (-epsilon).exp();
        Ok(Self {
            epsilon,
            // -expm1 keeps α accurate for small ε
            alpha: -(-epsilon).exp_m1(),
            beta,
        })
    }

    /// Probability that the indicator takes the value 1 given score `score`.
    pub fn hit_probability(&self, score: f64) -> f64 {
        (self.alpha * score + self.beta) / (1.0 + self.beta)
    }
}

pub fn privacy_params(epsilon: f64) -> Result<PrivacyParams> {
    PrivacyParams::new(epsilon)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProfitKind {
    Realized,
    Expected,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfitVector {
    pub profits: Vec<f64>,
    pub kind: ProfitKind,
}

impl ProfitVector {
    pub fn total(&self) -> f64 {
        self.profits.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.profits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profits.is_empty()
    }
}

impl std::ops::Index<usize> for ProfitVector {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.profits[index]
    }
}

/// One bettor's realized noisy score: `1` when `hit`, `−β` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScoreIndicator {
    pub bettor: usize,
    pub hit: bool,
}

impl ScoreIndicator {
    pub fn value(&self, params: &PrivacyParams) -> f64 {
        if self.hit {
            1.0
        } else {
            -params.beta
        }
    }
}

fn scores<R: ScoringRule + ?Sized>(profile: &WagerProfile, rule: &R, outcome: Outcome) -> Vec<f64> {
    profile
        .reports
        .iter()
        .map(|&p| rule.score_unchecked(p, outcome))
        .collect()
}

fn weighted_mean(wagers: &[f64], values: &[f64]) -> f64 {
    let total: f64 = wagers.iter().sum();
    wagers.iter().zip(values).map(|(m, v)| m * v).sum::<f64>() / total
}

/// Weighted-score wagering: `Π_i = m_i (s(p_i, ω) − Σ m_j s(p_j, ω) / Σ m_j)`.
pub fn wswm_profits<R: ScoringRule + ?Sized>(
    profile: &WagerProfile,
    rule: &R,
    outcome: Outcome,
) -> ProfitVector {
    let scores = scores(profile, rule, outcome);
    let mean = weighted_mean(&profile.wagers, &scores);
    ProfitVector {
        profits: profile
            .wagers
            .iter()
            .zip(&scores)
            .map(|(m, s)| m * (s - mean))
            .collect(),
        kind: ProfitKind::Realized,
    }
}

pub fn sample_indicator<R: ScoringRule + ?Sized, G: Rng + ?Sized>(
    rule: &R,
    bettor: usize,
    report: f64,
    outcome: Outcome,
    params: &PrivacyParams,
    rng: &mut G,
) -> Result<ScoreIndicator> {
    let score = rule.evaluate(report, outcome)?;
    Ok(ScoreIndicator {
        bettor,
        hit: rng.random_bool(params.hit_probability(score)),
    })
}

/// Private-mechanism profits for a fixed realization of all indicators.
///
/// `hits[j]` says whether bettor `j`'s indicator came out as 1.
pub fn private_profits_given<R: ScoringRule + ?Sized>(
    profile: &WagerProfile,
    rule: &R,
    outcome: Outcome,
    params: &PrivacyParams,
    hits: &[bool],
) -> ProfitVector {
    debug_assert_eq!(hits.len(), profile.len());
    let values: Vec<f64> = hits
        .iter()
        .map(|&hit| if hit { 1.0 } else { -params.beta })
        .collect();
    let aggregate = weighted_mean(&profile.wagers, &values);
    ProfitVector {
        profits: profile
            .wagers
            .iter()
            .zip(&profile.reports)
            .map(|(m, &p)| m * (params.alpha * rule.score_unchecked(p, outcome) - aggregate))
            .collect(),
        kind: ProfitKind::Realized,
    }
}

/// Draws one indicator per bettor and pays `Π_i = m_i (α s(p_i, ω) − Σ m_j x_j / Σ m_j)`.
pub fn private_profits<R: ScoringRule + ?Sized, G: Rng + ?Sized>(
    profile: &WagerProfile,
    rule: &R,
    outcome: Outcome,
    params: &PrivacyParams,
    rng: &mut G,
) -> ProfitVector {
    let hits: Vec<bool> = profile
        .reports
        .iter()
        .map(|&p| rng.random_bool(params.hit_probability(rule.score_unchecked(p, outcome))))
        .collect();
    private_profits_given(profile, rule, outcome, params, &hits)
}

/// Closed-form mean of [`private_profits`]: the weighted-score mechanism run
/// with the rule `α·s`.
pub fn expected_private_profits<R: ScoringRule + ?Sized>(
    profile: &WagerProfile,
    rule: &R,
    outcome: Outcome,
    params: &PrivacyParams,
) -> ProfitVector {
    let scaled: Vec<f64> = scores(profile, rule, outcome)
        .into_iter()
        .map(|s| params.alpha * s)
        .collect();
    let mean = weighted_mean(&profile.wagers, &scaled);
    ProfitVector {
        profits: profile
            .wagers
            .iter()
            .zip(&scaled)
            .map(|(m, s)| m * (s - mean))
            .collect(),
        kind: ProfitKind::Expected,
    }
}

/// Bettor `bettor`'s expected profit under the private mechanism when the
/// outcome is drawn from `belief`.
pub fn expected_profit<R: ScoringRule + ?Sized>(
    profile: &WagerProfile,
    rule: &R,
    bettor: usize,
    belief: f64,
    params: &PrivacyParams,
) -> Result<f64> {
    profile.check_bettor(bettor)?;
    let belief = check_probability("belief", belief)?;
    let total = profile.total_wager();
    let expected: Vec<f64> = profile
        .reports
        .iter()
        .map(|&p| params.alpha * expected_score_unchecked(rule, p, belief))
        .collect();
    let mean = profile
        .wagers
        .iter()
        .zip(&expected)
        .map(|(m, s)| m * s)
        .sum::<f64>()
        / total;
    Ok(profile.wagers[bettor] * (expected[bettor] - mean))
}

/// Expected profit of `bettor` for every candidate report in `grid`, others fixed.
pub fn expected_profit_curve<R: ScoringRule + ?Sized>(
    profile: &WagerProfile,
    rule: &R,
    bettor: usize,
    belief: f64,
    params: &PrivacyParams,
    grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if grid.is_empty() {
        return Err(Error::Empty("report grid"));
    }
    profile.check_bettor(bettor)?;
    grid.iter()
        .map(|&r| {
            let candidate = profile.with_report(bettor, r)?;
            Ok((
                r,
                expected_profit(&candidate, rule, bettor, belief, params)?,
            ))
        })
        .collect()
}

/// Per-bettor deviation bound that holds for all bettors simultaneously with
/// probability at least `1 − δ`:
/// `m_i (‖m‖₂/‖m‖₁)(1 + β) √(ln(2/δ)/2)`.
pub fn concentration_bound(wagers: &[f64], params: &PrivacyParams, delta: f64) -> Result<Vec<f64>> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Domain {
            name: "delta",
            value: delta,
            expected: "(0, 1]",
        });
    }
    let l1: f64 = wagers.iter().map(|m| m.abs()).sum();
    if l1 == 0.0 {
        return Err(Error::ZeroTotalWager);
    }
    let l2 = wagers.iter().map(|m| m * m).sum::<f64>().sqrt();
    let width = (l2 / l1) * (1.0 + params.beta) * ((2.0 / delta).ln() / 2.0).sqrt();
    Ok(wagers.iter().map(|m| m * width).collect())
}

/// Scale `(L/U)(1 − e^{−ε/n})` that a mechanism hiding wagers in `[L, U]`
/// would be forced down to. Diagnostic only.
pub fn private_wager_alpha(floor: f64, cap: f64, bettors: usize, epsilon: f64) -> Result<f64> {
    check_positive("wager floor", floor)?;
    check_positive("epsilon", epsilon)?;
    if cap < floor || !cap.is_finite() {
        return Err(Error::Domain {
            name: "wager cap",
            value: cap,
            expected: ">= wager floor",
        });
    }
    if bettors == 0 {
        return Err(Error::Domain {
            name: "bettors",
            value: 0.0,
            expected: ">= 1",
        });
    }
    Ok((floor / cap) * -(-epsilon / bettors as f64).exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::{unit_grid, Brier, Scaled};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_bettors() -> WagerProfile {
        WagerProfile::new(vec![0.8, 0.2], vec![1.0, 1.0]).unwrap()
    }

    #[test]
    fn wswm_hand_example() {
        let pi = wswm_profits(&two_bettors(), &Brier, Outcome::Yes);
        assert!((pi[0] - 0.30).abs() < 1e-12);
        assert!((pi[1] + 0.30).abs() < 1e-12);
    }

    #[test]
    fn wswm_identical_reports_and_single_bettor_pay_nothing() {
        let same = WagerProfile::new(vec![0.4; 3], vec![1.0, 2.0, 3.0]).unwrap();
        assert!(wswm_profits(&same, &Brier, Outcome::No)
            .profits
            .iter()
            .all(|&p| p.abs() < 1e-15));
        let alone = WagerProfile::new(vec![0.9], vec![5.0]).unwrap();
        assert_eq!(
            wswm_profits(&alone, &Brier, Outcome::Yes).profits,
            vec![0.0]
        );
    }

    #[test]
    fn profile_validation() {
        assert!(matches!(
            WagerProfile::new(vec![0.5, 0.5], vec![0.0, 0.0]),
            Err(Error::ZeroTotalWager)
        ));
        assert!(WagerProfile::new(vec![0.5], vec![1.0, 1.0]).is_err());
        assert!(WagerProfile::new(vec![1.5], vec![1.0]).is_err());
        assert!(WagerProfile::new(vec![0.5], vec![-1.0]).is_err());
        assert!(WagerProfile::new(vec![], vec![]).is_err());
        // a bettor may sit out
        assert!(WagerProfile::new(vec![0.5, 0.1], vec![0.0, 1.0]).is_ok());
    }

    #[test]
    fn privacy_params_examples() {
        let one = privacy_params(1.0).unwrap();
        assert!((one.alpha - 0.632).abs() < 1e-3);
        let ln2 = privacy_params(std::f64::consts::LN_2).unwrap();
        assert!((ln2.alpha - 0.5).abs() < 1e-15);
        assert!((ln2.beta - 0.5).abs() < 1e-15);
        let tiny = privacy_params(1e-12).unwrap();
        assert!(tiny.alpha > 0.0 && tiny.alpha < 1e-11);
        assert!(privacy_params(0.0).is_err());
        assert!(privacy_params(-1.0).is_err());
    }

    #[test]
    fn indicator_probabilities_at_extreme_scores() {
        let params = privacy_params(1.3).unwrap();
        let b = params.beta;
        assert!((params.hit_probability(1.0) - 1.0 / (1.0 + b)).abs() < 1e-15);
        assert!((params.hit_probability(0.0) - b / (1.0 + b)).abs() < 1e-15);
    }

    #[test]
    fn indicator_mean_is_alpha_score() {
        let params = privacy_params(0.7).unwrap();
        for s in [0.0, 0.25, 0.6, 1.0] {
            let h = params.hit_probability(s);
            let mean = h - params.beta * (1.0 - h);
            assert!((mean - params.alpha * s).abs() < 1e-15);
        }
    }

    #[test]
    fn expected_profits_two_bettor_example() {
        let params = privacy_params(1.0).unwrap();
        let e = expected_private_profits(&two_bettors(), &Brier, Outcome::Yes, &params);
        assert!((e[0] - 0.189_636_167_648_567).abs() < 1e-12);
        assert!((e[1] + 0.189_636_167_648_567).abs() < 1e-12);
        assert!(e.total().abs() < 1e-15);
    }

    #[test]
    fn expectation_surrogate_reproduces_scaled_wswm() {
        let params = privacy_params(1.0).unwrap();
        let profile = WagerProfile::new(vec![0.1, 0.7, 0.55], vec![2.0, 0.5, 1.0]).unwrap();
        let scaled = Scaled::new(Brier, params.alpha).unwrap();
        let via_rule = wswm_profits(&profile, &scaled, Outcome::No);
        let closed = expected_private_profits(&profile, &Brier, Outcome::No, &params);
        for i in 0..3 {
            assert!((via_rule[i] - closed[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn single_bettor_realized_profit() {
        let params = privacy_params(1.0).unwrap();
        let profile = WagerProfile::new(vec![0.3], vec![2.0]).unwrap();
        let s = Brier.score_unchecked(0.3, Outcome::Yes);
        let pi = private_profits_given(&profile, &Brier, Outcome::Yes, &params, &[true]);
        assert!((pi[0] - 2.0 * (params.alpha * s - 1.0)).abs() < 1e-15);
        assert!(pi[0] >= -2.0);
    }

    #[test]
    fn monte_carlo_budget_balance() {
        let params = privacy_params(1.0).unwrap();
        let profile = WagerProfile::new(vec![0.9, 0.4, 0.1], vec![1.0, 3.0, 2.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let runs = 1_000_000;
        let mut stats = crate::stats::RunningStats::new();
        for _ in 0..runs {
            stats.push(private_profits(&profile, &Brier, Outcome::Yes, &params, &mut rng).total());
        }
        assert!(stats.mean().abs() < 4.0 * stats.std_error(), "{stats:?}");
    }

    #[test]
    fn profit_curve_edge_cases() {
        let params = privacy_params(1.0).unwrap();
        let grid = unit_grid(100);
        let profile = WagerProfile::new(vec![0.2, 0.7, 0.4], vec![0.0, 1.0, 2.0]).unwrap();
        let flat = expected_profit_curve(&profile, &Brier, 0, 0.3, &params, &grid).unwrap();
        assert!(flat.iter().all(|&(_, v)| v == 0.0));
        assert!(expected_profit_curve(&profile, &Brier, 0, 0.3, &params, &[]).is_err());
        assert!(expected_profit_curve(&profile, &Brier, 7, 0.3, &params, &grid).is_err());

        let curve = expected_profit_curve(&profile, &Brier, 1, 0.3, &params, &grid).unwrap();
        let (best, _) = curve
            .iter()
            .copied()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert!((best - 0.3).abs() < 1e-12);
    }

    #[test]
    fn concentration_bound_examples() {
        let params = privacy_params(1.0).unwrap();
        let delta = 0.05;
        let root = ((2.0f64 / delta).ln() / 2.0).sqrt();
        let single = concentration_bound(&[1.0], &params, delta).unwrap();
        assert!((single[0] - (1.0 + params.beta) * root).abs() < 1e-15);

        let n = 16;
        let equal = concentration_bound(&vec![1.0; n], &params, delta).unwrap();
        assert!((equal[0] - (1.0 + params.beta) * root / 4.0).abs() < 1e-15);

        let (lo, hi) = (0.5, 2.0);
        let wagers = [0.5, 2.0, 1.0, 1.7, 0.9];
        let corollary = hi / ((wagers.len() as f64).sqrt() * lo) * (1.0 + params.beta) * root;
        for (m, b) in wagers
            .iter()
            .zip(concentration_bound(&wagers, &params, delta).unwrap())
        {
            assert!(b <= m * corollary + 1e-15);
        }

        assert!(concentration_bound(&[0.0, 0.0], &params, delta).is_err());
        assert!(concentration_bound(&[1.0], &params, 0.0).is_err());
    }

    #[test]
    fn private_wager_alpha_examples() {
        let alpha = privacy_params(0.8).unwrap().alpha;
        assert!((private_wager_alpha(3.0, 3.0, 1, 0.8).unwrap() - alpha).abs() < 1e-15);
        let v = private_wager_alpha(1.0, 2.0, 10, 1.0).unwrap();
        assert!((v - 0.047_581_290_982_020_22).abs() < 1e-15);
        assert!(private_wager_alpha(1.0, 2.0, 1_000_000_000, 1.0).unwrap() < 1e-9);
        assert!(private_wager_alpha(2.0, 1.0, 3, 1.0).is_err());
        assert!(private_wager_alpha(1.0, 2.0, 0, 1.0).is_err());
    }

    fn arb_profile() -> impl Strategy<Value = WagerProfile> {
        (1usize..8).prop_flat_map(|n| {
            (
                proptest::collection::vec(0.0f64..=1.0, n),
                proptest::collection::vec(0.01f64..10.0, n),
            )
                .prop_map(|(p, m)| WagerProfile::new(p, m).unwrap())
        })
    }

    proptest! {
        #[test]
        fn wswm_is_budget_balanced(profile in arb_profile(), yes in any::<bool>()) {
            let pi = wswm_profits(&profile, &Brier, Outcome::from_bool(yes));
            prop_assert!(pi.total().abs() <= 1e-12);
        }

        #[test]
        fn realized_private_profit_respects_loss_floor(
            profile in arb_profile(),
            yes in any::<bool>(),
            eps in 0.05f64..4.0,
            seed in any::<u64>(),
        ) {
            let params = privacy_params(eps).unwrap();
            let outcome = Outcome::from_bool(yes);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pi = private_profits(&profile, &Brier, outcome, &params, &mut rng);
            for (i, (&m, &p)) in profile.wagers().iter().zip(profile.reports()).enumerate() {
                let s = Brier.score_unchecked(p, outcome);
                prop_assert!(pi[i] >= -m - 1e-12);
                prop_assert!(pi[i] >= m * (params.alpha * s - 1.0) - 1e-12);
                prop_assert!(pi[i] <= m * (params.alpha * s + params.beta) + 1e-12);
            }
        }

        #[test]
        fn expected_private_is_alpha_times_wswm(
            profile in arb_profile(),
            yes in any::<bool>(),
            eps in 0.05f64..4.0,
        ) {
            let params = privacy_params(eps).unwrap();
            let outcome = Outcome::from_bool(yes);
            let e = expected_private_profits(&profile, &Brier, outcome, &params);
            let w = wswm_profits(&profile, &Brier, outcome);
            for i in 0..profile.len() {
                prop_assert!((e[i] - params.alpha * w[i]).abs() <= 1e-12);
            }
        }
    }
}
