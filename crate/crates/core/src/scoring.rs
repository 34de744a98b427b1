//! Bounded proper scoring rules for binary events.
//!
//! Every rule here maps a report `p ∈ [0, 1]` and a realized outcome to a
//! score in `[0, 1]`. The wagering mechanisms only rely on that range and on
//! strict properness, so any rule satisfying both can be plugged in.

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Result};

/// Realized state of a binary event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    No,
    Yes,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::No, Outcome::Yes];

    pub fn from_bool(happened: bool) -> Self {
        if happened {
            Outcome::Yes
        } else {
            Outcome::No
        }
    }

    pub fn is_yes(self) -> bool {
        self == Outcome::Yes
    }

    /// The indicator `1(ω = 1)`.
    pub fn indicator(self) -> f64 {
        match self {
            Outcome::No => 0.0,
            Outcome::Yes => 1.0,
        }
    }

    /// Probability of this outcome when the event happens with probability `belief`.
    pub fn likelihood(self, belief: f64) -> f64 {
        match self {
            Outcome::No => 1.0 - belief,
            Outcome::Yes => belief,
        }
    }
}

pub trait ScoringRule: Send + Sync {
    fn name(&self) -> &str;

    /// Score without domain checks. Callers must pass `report ∈ [0, 1]`.
    fn score_unchecked(&self, report: f64, outcome: Outcome) -> f64;

    fn evaluate(&self, report: f64, outcome: Outcome) -> Result<f64> {
        let report = check_probability("report", report)?;
        Ok(self.score_unchecked(report, outcome))
    }
}

/// Quadratic rule `1 − (p − ω)²`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Brier;

impl ScoringRule for Brier {
    fn name(&self) -> &str {
        "brier"
    }

    fn score_unchecked(&self, report: f64, outcome: Outcome) -> f64 {
        let miss = report - outcome.indicator();
        1.0 - miss * miss
    }
}

/// A rule multiplied by a constant in `(0, 1]`, which keeps the range inside `[0, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct Scaled<R> {
    inner: R,
    factor: f64,
}

impl<R: ScoringRule> Scaled<R> {
    pub fn new(inner: R, factor: f64) -> Result<Self> {
        if factor > 0.0 && factor <= 1.0 {
            Ok(Self { inner, factor })
        } else {
            Err(crate::Error::Domain {
                name: "scale factor",
                value: factor,
                expected: "(0, 1]",
            })
        }
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }
}

impl<R: ScoringRule> ScoringRule for Scaled<R> {
    fn name(&self) -> &str {
        "scaled"
    }

    fn score_unchecked(&self, report: f64, outcome: Outcome) -> f64 {
        self.factor * self.inner.score_unchecked(report, outcome)
    }
}

impl<R: ScoringRule + ?Sized> ScoringRule for &R {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn score_unchecked(&self, report: f64, outcome: Outcome) -> f64 {
        (**self).score_unchecked(report, outcome)
    }
}

pub fn brier_score(report: f64, outcome: Outcome) -> Result<f64> {
    Brier.evaluate(report, outcome)
}

/// `E_{ω∼belief}[s(report, ω)]`.
pub fn expected_score<R: ScoringRule + ?Sized>(rule: &R, report: f64, belief: f64) -> Result<f64> {
    let report = check_probability("report", report)?;
    let belief = check_probability("belief", belief)?;
    Ok(expected_score_unchecked(rule, report, belief))
}

pub(crate) fn expected_score_unchecked<R: ScoringRule + ?Sized>(
    rule: &R,
    report: f64,
    belief: f64,
) -> f64 {
    belief * rule.score_unchecked(report, Outcome::Yes)
        + (1.0 - belief) * rule.score_unchecked(report, Outcome::No)
}

/// Evenly spaced grid `0, step, 2·step, …, 1` (inclusive of both ends).
pub fn unit_grid(steps: usize) -> Vec<f64> {
    (0..=steps).map(|i| i as f64 / steps as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn brier_examples() {
        assert_eq!(brier_score(1.0, Outcome::Yes).unwrap(), 1.0);
        assert_eq!(brier_score(0.5, Outcome::Yes).unwrap(), 0.75);
        assert!((brier_score(0.2, Outcome::No).unwrap() - 0.96).abs() < 1e-15);
    }

    #[test]
    fn brier_rejects_out_of_range() {
        assert!(brier_score(1.2, Outcome::Yes).is_err());
        assert!(brier_score(-0.01, Outcome::No).is_err());
        assert!(brier_score(f64::NAN, Outcome::No).is_err());
    }

    #[test]
    fn expected_score_examples() {
        assert_eq!(expected_score(&Brier, 0.5, 0.5).unwrap(), 0.75);
        // 0.7·s(0.3, 1) + 0.3·s(0.3, 0) = 0.7·0.51 + 0.3·0.91
        let v = expected_score(&Brier, 0.3, 0.7).unwrap();
        assert!((v - 0.63).abs() < 1e-12, "{v}");
        let truthful = expected_score(&Brier, 0.3, 0.3).unwrap();
        assert!((truthful - 0.79).abs() < 1e-12, "{truthful}");
        assert!(expected_score(&Brier, 0.3, 1.5).is_err());
    }

    #[test]
    fn grid_argmax_is_the_belief() {
        let grid = unit_grid(100);
        let belief = 0.6;
        let best = grid
            .iter()
            .copied()
            .max_by(|a, b| {
                expected_score(&Brier, *a, belief)
                    .unwrap()
                    .total_cmp(&expected_score(&Brier, *b, belief).unwrap())
            })
            .unwrap();
        assert!((best - 0.6).abs() < 1e-12);
    }

    #[test]
    fn strict_properness_on_grid() {
        let grid = unit_grid(100);
        for &belief in &grid {
            let truthful = expected_score(&Brier, belief, belief).unwrap();
            for &other in grid.iter().filter(|&&q| q != belief) {
                assert!(truthful > expected_score(&Brier, other, belief).unwrap());
            }
        }
    }

    #[test]
    fn scaled_rule_factor_bounds() {
        assert!(Scaled::new(Brier, 0.0).is_err());
        assert!(Scaled::new(Brier, 1.5).is_err());
        let half = Scaled::new(Brier, 0.5).unwrap();
        assert_eq!(half.score_unchecked(1.0, Outcome::Yes), 0.5);
    }

    proptest! {
        #[test]
        fn brier_range(p in 0.0f64..=1.0, yes in any::<bool>()) {
            let s = brier_score(p, Outcome::from_bool(yes)).unwrap();
            prop_assert!((0.0..=1.0).contains(&s));
        }
    }
}
