use std::path::PathBuf;

use clap::{Args, ValueEnum};
use privmarket::noisy_market::NoiseKind;
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseChoice {
    None,
    Fresh,
    Tree,
}

/// Flags shared by every subcommand. Values left unset fall back to the
/// subcommand's own defaults.
#[derive(Debug, Clone, Args, Serialize)]
pub struct ExperimentConfig {
    /// Base seed; every output is a function of it.
    #[arg(long)]
    pub seed: u64,

    /// Bettor count, or a comma-separated list for `concentration`.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,

    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,

    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,

    /// LMSR liquidity.
    #[arg(long, default_value_t = 100.0)]
    pub b: f64,

    /// LMSR shift.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,

    /// Per-round trade bound.
    #[arg(long, default_value_t = 10.0)]
    pub k: f64,

    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub qstar: f64,

    /// Radius for the loss lower bound; defaults to k/4.
    #[arg(long)]
    pub gamma: Option<f64>,

    /// Comma-separated, strictly increasing horizons (or probe rounds).
    #[arg(long, value_delimiter = ',')]
    pub rounds: Option<Vec<usize>>,

    #[arg(long)]
    pub trials: Option<usize>,

    #[arg(long, value_enum, default_value_t = NoiseChoice::Fresh)]
    pub noise: NoiseChoice,

    /// Scale of each two-sided exponential noise term; defaults to 2k/ε.
    #[arg(long)]
    pub noise_scale: Option<f64>,

    #[arg(long, default_value_t = 0.0)]
    pub fee: f64,

    #[arg(long, default_value_t = 0.0)]
    pub min_unit: f64,

    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

impl ExperimentConfig {
    pub fn with_seed(seed: u64, out: impl Into<PathBuf>) -> Self {
        Self {
            seed,
            n: None,
            epsilon: 1.0,
            delta: 0.05,
            b: 100.0,
            a: 0.0,
            k: 10.0,
            qstar: 0.0,
            gamma: None,
            rounds: None,
            trials: None,
            noise: NoiseChoice::Fresh,
            noise_scale: None,
            fee: 0.0,
            min_unit: 0.0,
            out: out.into(),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        positive("epsilon", self.epsilon)?;
        positive("b", self.b)?;
        positive("k", self.k)?;
        finite("a", self.a)?;
        finite("qstar", self.qstar)?;
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(CliError::config(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        let gamma = self.gamma();
        if !(gamma > 0.0 && gamma <= self.k) {
            return Err(CliError::config(format!(
                "gamma must lie in (0, k], got {gamma}"
            )));
        }
        if let Some(scale) = self.noise_scale {
            positive("noise-scale", scale)?;
        }
        if !(self.fee >= 0.0 && self.fee.is_finite()) {
            return Err(CliError::config("fee must be finite and >= 0"));
        }
        if !(self.min_unit >= 0.0 && self.min_unit.is_finite()) {
            return Err(CliError::config("min-unit must be finite and >= 0"));
        }
        if let Some(ns) = &self.n {
            if ns.is_empty() || ns.contains(&0) {
                return Err(CliError::config("n must be a list of positive counts"));
            }
        }
        if let Some(rounds) = &self.rounds {
            if rounds.is_empty() || rounds[0] == 0 || rounds.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CliError::config(
                    "rounds must be positive and strictly increasing",
                ));
            }
        }
        Ok(())
    }

    pub fn gamma(&self) -> f64 {
        self.gamma.unwrap_or(self.k / 4.0)
    }

    pub fn noise_scale(&self) -> f64 {
        self.noise_scale.unwrap_or(2.0 * self.k / self.epsilon)
    }

    pub fn noise_kind(&self) -> NoiseKind {
        match self.noise {
            NoiseChoice::None => NoiseKind::None,
            NoiseChoice::Fresh => NoiseKind::Fresh {
                scale: self.noise_scale(),
            },
            NoiseChoice::Tree => NoiseKind::Tree {
                scale: self.noise_scale(),
            },
        }
    }

    pub fn bettors(&self, default: usize) -> usize {
        self.n.as_ref().map_or(default, |ns| ns[0])
    }

    pub fn bettor_sweep(&self, default: &[usize]) -> Vec<usize> {
        self.n.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn rounds_or(&self, default: &[usize]) -> Vec<usize> {
        self.rounds.clone().unwrap_or_else(|| default.to_vec())
    }

    /// Trial count, rejecting anything below `minimum`.
    pub fn trials_at_least(&self, default: usize, minimum: usize) -> Result<usize, CliError> {
        let trials = self.trials.unwrap_or(default);
        if trials < minimum {
            return Err(CliError::config(format!(
                "trials must be at least {minimum}, got {trials}"
            )));
        }
        Ok(trials)
    }
}

fn positive(name: &str, value: f64) -> Result<(), CliError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(format!(
            "{name} must be finite and > 0, got {value}"
        )))
    }
}

fn finite(name: &str, value: f64) -> Result<(), CliError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(format!("{name} must be finite")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig::with_seed(1, ".")
    }

    #[test]
    fn defaults_validate_and_derive_gamma_and_scale() {
        let c = base();
        c.validate().unwrap();
        assert_eq!(c.gamma(), 2.5);
        assert_eq!(c.noise_kind(), NoiseKind::Fresh { scale: 20.0 });
    }

    #[test]
    fn bad_values_are_configuration_errors() {
        let cases: [fn(&mut ExperimentConfig); 6] = [
            |c| c.epsilon = 0.0,
            |c| c.delta = 1.0,
            |c| c.gamma = Some(11.0),
            |c| c.fee = -1.0,
            |c| c.rounds = Some(vec![8, 8]),
            |c| c.n = Some(vec![3, 0]),
        ];
        for mutate in cases {
            let mut c = base();
            mutate(&mut c);
            let err = c.validate().unwrap_err();
            assert_eq!(err.exit_code(), 2, "{err}");
        }
    }

    #[test]
    fn trial_floor_is_enforced() {
        let mut c = base();
        assert_eq!(c.trials_at_least(50, 10).unwrap(), 50);
        c.trials = Some(5);
        assert!(c.trials_at_least(50, 10).is_err());
    }
}
