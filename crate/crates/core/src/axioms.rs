//! Property checks for wagering mechanisms on a single fuzzed instance.
//!
//! Every check returns a [`Verdict`]: `worst` is the largest violation found
//! (zero when none), or the smallest margin for the checks that need one.
//! Checks cover the weighted-score mechanism and, wherever the property is
//! only claimed in expectation, the closed-form expected profits of the
//! private mechanism.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::dp_audit::exact_profit_distribution;
use crate::error::Result;
use crate::scoring::{unit_grid, Outcome, ScoringRule};
use crate::wagering::{
    expected_private_profits, expected_profit, expected_profit_curve, private_profits,
    wswm_profits, PrivacyParams, WagerProfile,
};

/// Absolute tolerance for identities that hold exactly in real arithmetic.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;
/// Required gap between the truthful report and the runner-up on the grid.
pub const TRUTHFUL_MARGIN: f64 = 1e-9;
/// Report grid for the truthfulness check.
pub const REPORT_GRID_STEPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    pub worst: f64,
}

impl Verdict {
    fn at_most(violation: f64, tolerance: f64) -> Self {
        Self {
            holds: violation <= tolerance,
            worst: violation,
        }
    }
}

/// One fuzzed wagering scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomInstance {
    pub profile: WagerProfile,
    pub params: PrivacyParams,
    /// Bettor whose report, wager or identity the check perturbs.
    pub bettor: usize,
    /// That bettor's belief, always a point of the report grid.
    pub belief: f64,
    /// Another report for the same bettor.
    pub alternate: f64,
    /// Multiplier `> 1` applied to the bettor's wager.
    pub wager_growth: f64,
    /// Share of the bettor's wager kept by the first of two sybils.
    pub split: f64,
}

impl AxiomInstance {
    /// `n ∈ [2, max_bettors]`, reports uniform on `[0, 1]`, wagers uniform on
    /// `[0.1, 10]`, `ε` uniform on `[0.1, 3]`.
    pub fn random<G: Rng + ?Sized>(rng: &mut G, max_bettors: usize) -> Result<Self> {
        let n = rng.random_range(2..=max_bettors.max(2));
        let reports = (0..n).map(|_| rng.random::<f64>()).collect();
        let wagers = (0..n).map(|_| rng.random_range(0.1..=10.0)).collect();
        let bettor = rng.random_range(0..n);
        let belief = rng.random_range(0..=REPORT_GRID_STEPS) as f64 / REPORT_GRID_STEPS as f64;
        Ok(Self {
            profile: WagerProfile::new(reports, wagers)?,
            params: PrivacyParams::new(rng.random_range(0.1..=3.0))?,
            bettor,
            belief,
            alternate: rng.random(),
            wager_growth: rng.random_range(1.01..=4.0),
            split: rng.random_range(0.05..=0.95),
        })
    }
}

fn abs_sum(values: &[f64]) -> f64 {
    values.iter().sum::<f64>().abs()
}

/// `Σ_i Π_i = 0` for the weighted-score mechanism under both outcomes.
pub fn budget_balance<R: ScoringRule + ?Sized>(rule: &R, inst: &AxiomInstance) -> Verdict {
    let worst = Outcome::BOTH
        .iter()
        .map(|&o| abs_sum(&wswm_profits(&inst.profile, rule, o).profits))
        .fold(0.0, f64::max);
    Verdict::at_most(worst, IDENTITY_TOLERANCE)
}

/// `Σ_i E[Π_i] = 0` for the private mechanism under both outcomes.
pub fn expected_budget_balance<R: ScoringRule + ?Sized>(rule: &R, inst: &AxiomInstance) -> Verdict {
    let worst = Outcome::BOTH
        .iter()
        .map(|&o| abs_sum(&expected_private_profits(&inst.profile, rule, o, &inst.params).profits))
        .fold(0.0, f64::max);
    Verdict::at_most(worst, IDENTITY_TOLERANCE)
}

/// Reporting the belief is the unique maximizer of expected profit on the
/// report grid. `worst` is the gap to the best untruthful grid report.
pub fn truthfulness<R: ScoringRule + ?Sized>(rule: &R, inst: &AxiomInstance) -> Result<Verdict> {
    let grid = unit_grid(REPORT_GRID_STEPS);
    let curve = expected_profit_curve(
        &inst.profile,
        rule,
        inst.bettor,
        inst.belief,
        &inst.params,
        &grid,
    )?;
    let truthful = (inst.belief * REPORT_GRID_STEPS as f64).round() as usize;
    let best_other = curve
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != truthful)
        .map(|(_, &(_, v))| v)
        .fold(f64::NEG_INFINITY, f64::max);
    let margin = curve[truthful].1 - best_other;
    Ok(Verdict {
        holds: margin > TRUTHFUL_MARGIN,
        worst: margin,
    })
}

/// A truthful bettor expects a nonnegative profit. `worst` is the shortfall.
pub fn individual_rationality<R: ScoringRule + ?Sized>(
    rule: &R,
    inst: &AxiomInstance,
) -> Result<Verdict> {
    let truthful = inst.profile.with_report(inst.bettor, inst.belief)?;
    let profit = expected_profit(&truthful, rule, inst.bettor, inst.belief, &inst.params)?;
    Ok(Verdict::at_most((-profit).max(0.0), IDENTITY_TOLERANCE))
}

/// Largest amount by which another bettor moved in the same direction as
/// the perturbed one.
fn same_direction(before: &[f64], after: &[f64], bettor: usize) -> f64 {
    let own = after[bettor] - before[bettor];
    if own == 0.0 {
        return 0.0;
    }
    before
        .iter()
        .zip(after)
        .enumerate()
        .filter(|&(j, _)| j != bettor)
        .map(|(_, (b, a))| ((a - b) * own.signum()).max(0.0))
        .fold(0.0, f64::max)
}

/// When one bettor changes her report and her profit rises (falls), nobody
/// else's profit rises (falls). Checked on realized weighted-score profits
/// and on expected private profits.
pub fn normality<R: ScoringRule + ?Sized>(rule: &R, inst: &AxiomInstance) -> Result<Verdict> {
    let moved = inst.profile.with_report(inst.bettor, inst.alternate)?;
    let mut worst: f64 = 0.0;
    for o in Outcome::BOTH {
        let before = wswm_profits(&inst.profile, rule, o).profits;
        let after = wswm_profits(&moved, rule, o).profits;
        worst = worst.max(same_direction(&before, &after, inst.bettor));
        let before = expected_private_profits(&inst.profile, rule, o, &inst.params).profits;
        let after = expected_private_profits(&moved, rule, o, &inst.params).profits;
        worst = worst.max(same_direction(&before, &after, inst.bettor));
    }
    Ok(Verdict::at_most(worst, IDENTITY_TOLERANCE))
}

/// Splitting a bettor into two identities with the same report and the same
/// total wager changes neither their combined profit nor anyone else's.
pub fn sybilproofness<R: ScoringRule + ?Sized>(rule: &R, inst: &AxiomInstance) -> Result<Verdict> {
    let i = inst.bettor;
    let m = inst.profile.wagers()[i];
    let mut reports = inst.profile.reports().to_vec();
    let mut wagers = inst.profile.wagers().to_vec();
    wagers[i] = m * inst.split;
    reports.push(reports[i]);
    wagers.push(m * (1.0 - inst.split));
    let split = WagerProfile::new(reports, wagers)?;
    let n = inst.profile.len();

    let mismatch = |whole: &[f64], parts: &[f64]| -> f64 {
        (0..n)
            .map(|j| {
                let part = if j == i {
                    parts[j] + parts[n]
                } else {
                    parts[j]
                };
                (whole[j] - part).abs()
            })
            .fold(0.0, f64::max)
    };
    let mut worst: f64 = 0.0;
    for o in Outcome::BOTH {
        worst = worst.max(mismatch(
            &wswm_profits(&inst.profile, rule, o).profits,
            &wswm_profits(&split, rule, o).profits,
        ));
        worst = worst.max(mismatch(
            &expected_private_profits(&inst.profile, rule, o, &inst.params).profits,
            &expected_private_profits(&split, rule, o, &inst.params).profits,
        ));
    }
    Ok(Verdict::at_most(worst, IDENTITY_TOLERANCE))
}

/// Raising a wager keeps the sign of the bettor's profit and strictly grows
/// its magnitude whenever it was nonzero. `worst` is the largest shrinkage
/// or sign flip.
pub fn monotonicity<R: ScoringRule + ?Sized>(rule: &R, inst: &AxiomInstance) -> Result<Verdict> {
    let i = inst.bettor;
    let grown = inst
        .profile
        .with_wager(i, inst.profile.wagers()[i] * inst.wager_growth)?;
    let mut worst: f64 = 0.0;
    let mut strict = true;
    let mut compare = |before: f64, after: f64| {
        if before.abs() <= IDENTITY_TOLERANCE {
            return;
        }
        if after.signum() != before.signum() {
            worst = worst.max(after.abs() + before.abs());
            strict = false;
        } else {
            worst = worst.max(before.abs() - after.abs());
            strict &= after.abs() > before.abs();
        }
    };
    for o in Outcome::BOTH {
        compare(
            wswm_profits(&inst.profile, rule, o).profits[i],
            wswm_profits(&grown, rule, o).profits[i],
        );
        compare(
            expected_private_profits(&inst.profile, rule, o, &inst.params).profits[i],
            expected_private_profits(&grown, rule, o, &inst.params).profits[i],
        );
    }
    Ok(Verdict {
        holds: strict,
        worst: worst.max(0.0),
    })
}

/// Relabeling bettors relabels the exact joint profit distribution of the
/// private mechanism, atom by atom. Needs `n` within the enumeration cap.
pub fn anonymity<R: ScoringRule + ?Sized, G: Rng + ?Sized>(
    rule: &R,
    inst: &AxiomInstance,
    rng: &mut G,
) -> Result<Verdict> {
    let n = inst.profile.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let permuted = inst.profile.permuted(&order)?;
    let mut worst: f64 = 0.0;
    for o in Outcome::BOTH {
        let d = exact_profit_distribution(&inst.profile, rule, o, &inst.params)?;
        let d_perm = exact_profit_distribution(&permuted, rule, o, &inst.params)?;
        for (atom, p) in d_perm.iter() {
            // new bit k is old bit order[k]
            let original = (0..n).fold(0u32, |acc, k| acc | (atom.hits >> k & 1) << order[k]);
            let p_orig = d
                .probability_of_hits(original)
                .expect("atoms are indexed by mask");
            worst = worst.max((p - p_orig).abs());
            let orig_profits = &d.support()[original as usize].profits;
            for (k, &v) in atom.profits.iter().enumerate() {
                worst = worst.max((v - orig_profits[order[k]]).abs());
            }
        }
        let w = wswm_profits(&inst.profile, rule, o).profits;
        let w_perm = wswm_profits(&permuted, rule, o).profits;
        for (k, &v) in w_perm.iter().enumerate() {
            worst = worst.max((v - w[order[k]]).abs());
        }
    }
    Ok(Verdict::at_most(worst, IDENTITY_TOLERANCE))
}

/// `Π_i ≥ −m_i` on `runs` sampled private outcomes per outcome, and on the
/// weighted-score profits. `worst` is the deepest dip below the floor.
pub fn loss_floor<R: ScoringRule + ?Sized, G: Rng + ?Sized>(
    rule: &R,
    inst: &AxiomInstance,
    runs: usize,
    rng: &mut G,
) -> Verdict {
    let wagers = inst.profile.wagers();
    let dip = |profits: &[f64]| -> f64 {
        profits
            .iter()
            .zip(wagers)
            .map(|(p, m)| (-m - p).max(0.0))
            .fold(0.0, f64::max)
    };
    let mut worst: f64 = 0.0;
    for o in Outcome::BOTH {
        worst = worst.max(dip(&wswm_profits(&inst.profile, rule, o).profits));
        for _ in 0..runs {
            worst = worst.max(dip(&private_profits(
                &inst.profile,
                rule,
                o,
                &inst.params,
                rng,
            )
            .profits));
        }
    }
    // the floor is exact: no tolerance
    Verdict::at_most(worst, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::Brier;
    use crate::stats::trial_rng;

    fn instance() -> AxiomInstance {
        AxiomInstance {
            profile: WagerProfile::new(vec![0.2, 0.7, 0.9], vec![1.0, 3.0, 0.5]).unwrap(),
            params: PrivacyParams::new(1.0).unwrap(),
            bettor: 1,
            belief: 0.6,
            alternate: 0.1,
            wager_growth: 2.0,
            split: 0.3,
        }
    }

    #[test]
    fn all_checks_pass_on_a_fixed_instance() {
        let inst = instance();
        let mut rng = trial_rng(3, &[]);
        assert!(budget_balance(&Brier, &inst).holds);
        assert!(expected_budget_balance(&Brier, &inst).holds);
        assert!(truthfulness(&Brier, &inst).unwrap().holds);
        assert!(individual_rationality(&Brier, &inst).unwrap().holds);
        assert!(normality(&Brier, &inst).unwrap().holds);
        assert!(sybilproofness(&Brier, &inst).unwrap().holds);
        assert!(monotonicity(&Brier, &inst).unwrap().holds);
        assert!(anonymity(&Brier, &inst, &mut rng).unwrap().holds);
        assert!(loss_floor(&Brier, &inst, 200, &mut rng).holds);
    }

    #[test]
    fn truthfulness_detects_a_flat_rule() {
        struct Flat;
        impl ScoringRule for Flat {
            fn name(&self) -> &'static str {
                "flat"
            }
            fn score_unchecked(&self, _: f64, _: Outcome) -> f64 {
                0.5
            }
        }
        assert!(!truthfulness(&Flat, &instance()).unwrap().holds);
    }

    #[test]
    fn normality_ignores_an_unchanged_bettor() {
        assert_eq!(same_direction(&[1.0, 2.0], &[1.0, 3.0], 0), 0.0);
        assert_eq!(same_direction(&[1.0, 2.0], &[2.0, 3.0], 0), 1.0);
        assert_eq!(same_direction(&[1.0, 2.0], &[2.0, 1.0], 0), 0.0);
    }
}
