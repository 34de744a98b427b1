use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("profile is malformed: {0}")]
    Profile(String),

    #[error("total wager is zero; the weighted average score is undefined")]
    ZeroTotalWager,

    #[error("bettor index {index} out of range for {n} bettors")]
    BettorIndex { index: usize, n: usize },

    #[error("exact enumeration over {n} bettors exceeds the cap of {cap}")]
    EnumerationCap { n: usize, cap: usize },

    #[error("round {round}: trade {trade} exceeds the trade bound k = {k}")]
    TradeTooLarge { round: usize, trade: f64, k: f64 },

    #[error("chi = {0} is not positive; the cost function is linear around the target")]
    LinearRegion(f64),

    #[error("insufficient conditioning events: {observed} observed, {required} required")]
    InsufficientEvents { observed: usize, required: usize },

    #[error("empty {0}")]
    Empty(&'static str),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            expected: "[0, 1]",
        })
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            expected: "finite and > 0",
        })
    }
}
