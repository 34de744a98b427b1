//! Private wagering mechanisms and noisy cost-function market makers.
//!
//! The crate has two halves. [`wagering`] and [`dp_audit`] cover one-shot
//! wagering: the weighted-score mechanism, its private variant built on
//! randomized score indicators, and exact enumeration audits of the privacy
//! guarantee. [`cost_market`], [`noisy_market`] and [`adversary`] cover
//! repeated trading against a cost-function market maker, with and without
//! noise on the published state, and the trader that profits from that
//! noise. [`experiments`] holds the Monte Carlo drivers shared by the CLI
//! and the acceptance tests, and [`axioms`] the property checks both rely on.

pub mod adversary;
pub mod axioms;
pub mod cost_market;
pub mod dp_audit;
mod error;
pub mod experiments;
pub mod noisy_market;
pub mod scoring;
pub mod stats;
pub mod wagering;

pub use error::{Error, Result};
