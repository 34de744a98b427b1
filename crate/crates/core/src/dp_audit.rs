//! Exact privacy audits by enumerating every indicator realization.
//!
//! For pure ε-DP over a finite support the supremum over events of the
//! probability ratio is attained at a single atom, so certification reduces
//! to comparing atom probabilities in both directions. Profit-vector atoms
//! are keyed by the indicator bit vector that produced them, never by
//! floating-point profit equality.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scoring::{Outcome, ScoringRule};
use crate::wagering::{private_profits_given, wswm_profits, PrivacyParams, WagerProfile};

/// Largest bettor count for which the `2^n` atoms are enumerated.
pub const ENUMERATION_CAP: usize = 15;

const MASS_TOLERANCE: f64 = 1e-12;

/// Finite distribution with distinct support points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteDistribution<K> {
    support: Vec<K>,
    probabilities: Vec<f64>,
}

impl<K: PartialEq> DiscreteDistribution<K> {
    pub fn new(support: Vec<K>, probabilities: Vec<f64>) -> Result<Self> {
        if support.len() != probabilities.len() {
            return Err(Error::Profile(
                "support and probabilities differ in length".into(),
            ));
        }
        if support.is_empty() {
            return Err(Error::Empty("distribution support"));
        }
        if let Some(&p) = probabilities.iter().find(|&&p| p.is_nan() || p < 0.0) {
            return Err(Error::Domain {
                name: "probability",
                value: p,
                expected: ">= 0",
            });
        }
        let mass: f64 = probabilities.iter().sum();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::Domain {
                name: "total probability mass",
                value: mass,
                expected: "1 within 1e-12",
            });
        }
        for (i, a) in support.iter().enumerate() {
            if support[i + 1..].contains(a) {
                return Err(Error::Profile("support entries must be distinct".into()));
            }
        }
        Ok(Self {
            support,
            probabilities,
        })
    }
}

impl<K> DiscreteDistribution<K> {
    pub fn support(&self) -> &[K] {
        &self.support
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, f64)> {
        self.support.iter().zip(self.probabilities.iter().copied())
    }
}

impl DiscreteDistribution<f64> {
    pub fn mean(&self) -> f64 {
        self.iter().map(|(v, p)| v * p).sum()
    }
}

/// One realization of the private mechanism: bit `j` of `hits` is set when
/// bettor `j`'s indicator came out as 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfitAtom {
    pub hits: u32,
    pub profits: Vec<f64>,
}

pub type ProfitDistribution = DiscreteDistribution<ProfitAtom>;

impl ProfitDistribution {
    /// Componentwise expectation, summed in atom order.
    pub fn mean_profits(&self) -> Vec<f64> {
        let n = self.support.first().map_or(0, |a| a.profits.len());
        let mut mean = vec![0.0; n];
        for (atom, p) in self.iter() {
            for (acc, v) in mean.iter_mut().zip(&atom.profits) {
                *acc += p * v;
            }
        }
        mean
    }

    pub fn probability_of_hits(&self, hits: u32) -> Option<f64> {
        // atoms are stored in mask order
        let p = *self.probabilities.get(hits as usize)?;
        (self.support[hits as usize].hits == hits).then_some(p)
    }
}

/// Exact pmf of one bettor's indicator: `1 ↦ (αs+β)/(1+β)`, `−β ↦ (1−αs)/(1+β)`.
pub fn indicator_distribution<R: ScoringRule + ?Sized>(
    rule: &R,
    report: f64,
    outcome: Outcome,
    params: &PrivacyParams,
) -> Result<DiscreteDistribution<f64>> {
    let hit = params.hit_probability(rule.evaluate(report, outcome)?);
    DiscreteDistribution::new(vec![1.0, -params.beta], vec![hit, 1.0 - hit])
}

fn max_ratio_both_ways(a: &[f64], b: &[f64]) -> (f64, usize) {
    let mut worst = (1.0, 0);
    for (idx, (&pa, &pb)) in a.iter().zip(b).enumerate() {
        let ratio = (pa / pb).max(pb / pa);
        if ratio > worst.0 {
            worst = (ratio, idx);
        }
    }
    worst
}

/// Largest likelihood ratio between the indicator pmfs under `report` and
/// `alternate`, taken over both support points and both directions.
pub fn indicator_dp_ratio<R: ScoringRule + ?Sized>(
    rule: &R,
    report: f64,
    alternate: f64,
    outcome: Outcome,
    params: &PrivacyParams,
) -> Result<f64> {
    let d = indicator_distribution(rule, report, outcome, params)?;
    let d_alt = indicator_distribution(rule, alternate, outcome, params)?;
    Ok(max_ratio_both_ways(d.probabilities(), d_alt.probabilities()).0)
}

fn check_cap(n: usize) -> Result<()> {
    if n > ENUMERATION_CAP {
        Err(Error::EnumerationCap {
            n,
            cap: ENUMERATION_CAP,
        })
    } else {
        Ok(())
    }
}

fn hit_probabilities<R: ScoringRule + ?Sized>(
    profile: &WagerProfile,
    rule: &R,
    outcome: Outcome,
    params: &PrivacyParams,
) -> Vec<f64> {
    profile
        .reports()
        .iter()
        .map(|&p| params.hit_probability(rule.score_unchecked(p, outcome)))
        .collect()
}

fn mask_probability(hit_probs: &[f64], mask: u32) -> f64 {
    hit_probs
        .iter()
        .enumerate()
        .map(|(j, &h)| if mask >> j & 1 == 1 { h } else { 1.0 - h })
        .product()
}

fn mask_bits(mask: u32, n: usize) -> Vec<bool> {
    (0..n).map(|j| mask >> j & 1 == 1).collect()
}

/// Joint pmf of the profit vector, one atom per indicator vector, in mask order.
pub fn exact_profit_distribution<R: ScoringRule + ?Sized>(
    profile: &WagerProfile,
    rule: &R,
    outcome: Outcome,
    params: &PrivacyParams,
) -> Result<ProfitDistribution> {
    let n = profile.len();
    check_cap(n)?;
    let hit_probs = hit_probabilities(profile, rule, outcome, params);
    let (support, probabilities): (Vec<_>, Vec<_>) = (0..1u32 << n)
        .into_par_iter()
        .map(|mask| {
            let hits = mask_bits(mask, n);
            let profits = private_profits_given(profile, rule, outcome, params, &hits).profits;
            (
                ProfitAtom {
                    hits: mask,
                    profits,
                },
                mask_probability(&hit_probs, mask),
            )
        })
        .unzip();
    // atoms carry distinct masks by construction; skip the quadratic check
    let mass: f64 = probabilities.iter().sum();
    if (mass - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::Domain {
            name: "total probability mass",
            value: mass,
            expected: "1 within 1e-12",
        });
    }
    Ok(DiscreteDistribution {
        support,
        probabilities,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointDpCertificate {
    /// Worst atom ratio over both directions.
    pub ratio: f64,
    /// Indicator vector attaining `ratio`.
    pub worst_hits: u32,
    pub epsilon: f64,
}

impl JointDpCertificate {
    /// `ratio ≤ e^ε + tolerance`.
    pub fn holds(&self, tolerance: f64) -> bool {
        self.ratio <= self.epsilon.exp() + tolerance
    }
}

/// Exhaustively compares the distribution of everyone else's profits when
/// `bettor` reports her profile value versus `alternate`.
pub fn joint_dp_certificate<R: ScoringRule + ?Sized>(
    profile: &WagerProfile,
    bettor: usize,
    alternate: f64,
    rule: &R,
    outcome: Outcome,
    params: &PrivacyParams,
) -> Result<JointDpCertificate> {
    profile.check_bettor(bettor)?;
    let neighbor = profile.with_report(bettor, alternate)?;
    let d = exact_profit_distribution(profile, rule, outcome, params)?;
    let d_alt = exact_profit_distribution(&neighbor, rule, outcome, params)?;

    // Both hypotheses map an indicator vector to the same Π_{−i}; only the
    // atom weights differ.
    debug_assert!(d.support().iter().zip(d_alt.support()).all(|(a, b)| {
        a.profits
            .iter()
            .zip(&b.profits)
            .enumerate()
            .all(|(j, (x, y))| j == bettor || x.to_bits() == y.to_bits())
    }));

    let (ratio, idx) = max_ratio_both_ways(d.probabilities(), d_alt.probabilities());
    Ok(JointDpCertificate {
        ratio,
        worst_hits: d.support()[idx].hits,
        epsilon: params.epsilon,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TensionReport {
    /// Ratio for the exactly budget-balanced mechanism: 1 when the neighbors
    /// induce the same deterministic `Π_{−i}`, infinite otherwise.
    pub wswm_ratio: f64,
    /// Certified ratio of the private mechanism on the same neighbors.
    pub private_ratio: f64,
    pub epsilon: f64,
}

/// Contrasts the deterministic weighted-score mechanism, which reveals any
/// change in `bettor`'s report through the others' profits, with the
/// private mechanism on the same pair of neighboring profiles.
pub fn budget_balance_privacy_tension<R: ScoringRule + ?Sized>(
    profile: &WagerProfile,
    bettor: usize,
    alternate: f64,
    rule: &R,
    outcome: Outcome,
    params: &PrivacyParams,
) -> Result<TensionReport> {
    profile.check_bettor(bettor)?;
    let neighbor = profile.with_report(bettor, alternate)?;
    let others = |profile: &WagerProfile| -> Vec<u64> {
        wswm_profits(profile, rule, outcome)
            .profits
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != bettor)
            .map(|(_, v)| v.to_bits())
            .collect()
    };
    let wswm_ratio = if others(profile) == others(&neighbor) {
        1.0
    } else {
        // each side puts all its mass on an atom the other never produces
        f64::INFINITY
    };
    let private_ratio =
        joint_dp_certificate(profile, bettor, alternate, rule, outcome, params)?.ratio;
    Ok(TensionReport {
        wswm_ratio,
        private_ratio,
        epsilon: params.epsilon,
    })
}
