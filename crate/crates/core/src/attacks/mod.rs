//! Attack orchestration: scripted reorg and seed-bias executions.
//!
//! This layer drives the chain simulation and the bribery contracts
//! through complete attack timelines and checks what actually happens
//! against the closed-form feasibility predicates:
//!
//! * [`pattern`] parses fork patterns (`"H A^2"`) into executable shapes;
//! * [`feasibility`] evaluates the success predicates in exact rationals;
//! * [`scenario`] builds per-slot committees of virtual attesters whose
//!   class weights sum to the exact stake fractions under study;
//! * [`reorg`] runs the two reorg timelines end to end — blocks proposed,
//!   hidden and released, votes cast per behavior class, bribes offered
//!   and claimed — and reports decision weights and outcomes;
//! * [`randao`] enumerates seed-bias outcomes and runs the bias auction
//!   against real headers.

pub mod feasibility;
pub mod pattern;
pub mod randao;
pub mod reorg;
pub mod scenario;

pub use feasibility::{
    bribed_fraction, exante_decision_weights, exante_feasible, expost_decision_weights,
    expost_feasible,
};
pub use pattern::{pattern_for, AttackKind, ForkPattern, PatternError, Run, Side};
pub use randao::{randao_enumerate, run_bias_auction, AuctionReport, BiasPlan, OutcomeRow};
pub use reorg::{
    reorg_agreement_grid, run_attack, run_attack_with_chain, run_exante, run_expost,
    AttackReport, GridCell, ScenarioParams, SlotWeights,
};
pub use scenario::{
    apportion_committee, build_scenario_chain, ClassifiedCommittee, CommitteeSpec, ScenarioChain,
    WeightMode,
};

use thiserror::Error;

use crate::chain::{ChainError, TranscriptEvent};
use crate::contracts::ContractError;
use crate::crypto::CryptoError;

/// Failures surfaced by attack orchestration. A reorg attack that merely
/// *fails to win* is not an error — failure is data in the report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AttackError {
    /// Unparseable or unsupported fork pattern.
    #[error("fork pattern: {0}")]
    Pattern(#[from] PatternError),
    /// The simulated chain rejected a scripted step.
    #[error("chain: {0}")]
    Chain(#[from] ChainError),
    /// A contract rejected a scripted call.
    #[error("contract: {0}")]
    Contract(#[from] ContractError),
    /// Key or signature machinery failed.
    #[error("crypto: {0}")]
    Crypto(#[from] CryptoError),
    /// A stake fraction or similar parameter is outside its range.
    #[error("{name} must lie in [{low}, {high}], got {got}")]
    ParameterOutOfRange {
        /// Parameter name.
        name: &'static str,
        /// Lower bound (inclusive).
        low: String,
        /// Upper bound (inclusive).
        high: String,
        /// Offending value.
        got: String,
    },
    /// Too few virtual attesters to represent every present class.
    #[error("committee of {got} cannot seat {needed} represented classes")]
    CommitteeTooSmall {
        /// Classes with nonzero stake.
        needed: usize,
        /// Requested committee size.
        got: usize,
    },
    /// Seed-bias enumeration over more tail slots than the configured cap.
    #[error("tail of {k} slots exceeds the enumeration cap {cap}")]
    EnumerationCapExceeded {
        /// Requested tail length.
        k: usize,
        /// Configured cap.
        cap: usize,
    },
    /// The bias auction requires at least one bid.
    #[error("auction needs at least one bid")]
    NoBids,
    /// A tail longer than the epoch cannot be auctioned.
    #[error("tail of {k} slots does not fit an epoch of {slots_per_epoch} slots")]
    TailDoesNotFit {
        /// Requested tail length.
        k: usize,
        /// Epoch length.
        slots_per_epoch: u64,
    },
}

/// Scan a transcript for slashable behavior: two attestations by one
/// validator for the same duty slot, or two blocks by one proposer at the
/// same height. The attacks here must never require either.
pub fn slashable_offenses(events: &[TranscriptEvent]) -> Vec<String> {
    use std::collections::BTreeSet;
    let mut votes: BTreeSet<(u64, u64)> = BTreeSet::new();
    let mut proposals: BTreeSet<(u64, u64)> = BTreeSet::new();
    let mut offenses = Vec::new();
    for event in events {
        let offense = match event {
            TranscriptEvent::Attest { slot, validator, .. } => (!votes
                .insert((*validator, *slot)))
            .then(|| format!("validator {validator} attested twice for slot {slot}")),
            TranscriptEvent::Propose { proposer, height, .. }
            | TranscriptEvent::ProposePrivate { proposer, height, .. } => (!proposals
                .insert((*proposer, *height)))
            .then(|| format!("proposer {proposer} built two blocks at height {height}")),
            _ => None,
        };
        offenses.extend(offense);
    }
    offenses
}
