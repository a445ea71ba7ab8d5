//! Deterministic proof-of-stake sandbox for studying bribery markets.
//!
//! The crate is organized as a stack:
//!
//! * [`crypto`] — aggregate signatures over a pairing abstraction (real
//!   BLS12-381 or a fast exponent-tracking mock) plus a Merkle accumulator;
//! * [`chain`] — a slot-driven beacon-chain simulation: proposals,
//!   attestations, latest-message-driven fork choice with proposer boost,
//!   seed mixing, and duty rewards, all logged to a replayable transcript;
//! * [`contracts`] — escrowed bribery contracts that pay for attestations,
//!   voluntary exits, and seed manipulation, verified on-contract;
//! * [`attacks`] — orchestration that drives the chain and the contracts
//!   through commitment attacks and checks outcomes against closed-form
//!   feasibility predicates in exact rational arithmetic;
//! * [`econ`] — validator-incentive analysis: reward curves, discounting,
//!   the exit-game equilibrium, and sweep helpers behind the heatmaps.

#![warn(missing_docs)]

pub mod attacks;
pub mod chain;
pub mod contracts;
pub mod crypto;
pub mod econ;
pub mod types;

pub use crypto::{pairing_evaluations, reset_pairing_evaluations, PairingSuite};
pub use types::{Address, Weight, Wei};
