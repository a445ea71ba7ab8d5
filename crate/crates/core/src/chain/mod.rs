//! A deterministic, slot-driven model of a proof-of-stake beacon chain.
//!
//! The simulation advances an explicit clock through 12-second slots. In
//! each slot a scheduled proposer may publish a block (or withhold it), and
//! committee members attest to the head their local view selects. Fork
//! choice follows latest attestation messages greedily from genesis, with a
//! proposer boost credited to a timely block while its slot is current. A
//! view is "the blocks and attestations published by a given time", which
//! lets an orchestrator model private block building and delayed releases
//! without forking the state.
//!
//! All weight arithmetic is exact rational arithmetic, so outcomes equal
//! closed-form predictions bit-for-bit rather than within a float epsilon.

mod block;
mod fork_choice;
mod rewards;
mod sim;
mod transcript;
mod validators;

pub use block::{AttestationData, BlockHeader, Checkpoint, CHAIN_HASH_LEN};
pub use fork_choice::{fork_choice_head, subtree_weight, ChainView};
pub use rewards::{
    attestation_reward_fraction, head_weight, source_weight, target_weight,
    MAX_INCLUSION_DELAY_SLOTS, TIMELY_SOURCE_DELAY_SLOTS,
};
pub use sim::{contribution_hash, randao_epoch_bytes, voluntary_exit_bytes, SimChain};
pub use transcript::{write_jsonl, TranscriptEvent};
pub use validators::{
    round_robin_committee_sizes, CommitteeSchedule, Validator, ValidatorClass, ValidatorSet,
};

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::types::{weight, Weight};

/// A slot index (12 seconds each, 32 per epoch by default).
pub type Slot = u64;

/// An epoch index.
pub type Epoch = u64;

/// A block root: the SHA-256 commitment to a header.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct BlockRoot(pub [u8; 32]);

impl BlockRoot {
    /// The all-zero root (parent of genesis).
    pub const ZERO: BlockRoot = BlockRoot([0u8; 32]);

    /// Full lowercase hex.
    pub fn to_hex(self) -> String {
        hex::encode(self.0)
    }
}

impl fmt::Debug for BlockRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BlockRoot({}..)", &self.to_hex()[..8])
    }
}

impl fmt::Display for BlockRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl From<BlockRoot> for String {
    fn from(r: BlockRoot) -> String {
        r.to_hex()
    }
}

impl TryFrom<String> for BlockRoot {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        let bytes = hex::decode(&s).map_err(|e| format!("invalid root hex: {e}"))?;
        let arr: [u8; 32] = bytes
            .try_into()
            .map_err(|_| "root must be 32 bytes".to_string())?;
        Ok(BlockRoot(arr))
    }
}

/// Protocol constants for a simulated chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    /// Slots per epoch (mainnet: 32).
    pub slots_per_epoch: u64,
    /// Seconds per slot (mainnet: 12).
    pub seconds_per_slot: u64,
    /// Seconds into a slot by which blocks must arrive to count as timely
    /// and at which committee members evaluate fork choice (mainnet: 4).
    pub proposal_window_seconds: u64,
    /// Proposer boost as a fraction of one committee's total weight
    /// (mainnet: 40%).
    #[serde(with = "crate::types::weight_serde")]
    pub proposer_boost: Weight,
    /// How many recent block heights the `blockhash`-style lookup serves
    /// (execution layer: 8191).
    pub blockhash_window: u64,
    /// Wall-clock seconds at slot 0.
    pub genesis_time: u64,
    /// Seed mix in force before any reveal is processed.
    pub genesis_seed: [u8; 32],
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            slots_per_epoch: 32,
            seconds_per_slot: 12,
            proposal_window_seconds: 4,
            proposer_boost: weight(2, 5),
            blockhash_window: 8191,
            genesis_time: 0,
            genesis_seed: [0u8; 32],
        }
    }
}

impl ChainConfig {
    /// First second of a slot.
    pub fn slot_start(&self, slot: Slot) -> u64 {
        self.genesis_time + slot * self.seconds_per_slot
    }

    /// The deadline within `slot` at which attesters act and timeliness is
    /// judged.
    pub fn attestation_deadline(&self, slot: Slot) -> u64 {
        self.slot_start(slot) + self.proposal_window_seconds
    }

    /// Slot containing an absolute timestamp (clamped to genesis).
    pub fn slot_at(&self, time: u64) -> Slot {
        time.saturating_sub(self.genesis_time) / self.seconds_per_slot
    }

    /// Epoch containing a slot.
    pub fn epoch_of(&self, slot: Slot) -> Epoch {
        slot / self.slots_per_epoch
    }

    /// First slot of an epoch.
    pub fn epoch_start_slot(&self, epoch: Epoch) -> Slot {
        epoch * self.slots_per_epoch
    }
}

/// Errors from chain operations. Every rejected transition names its cause.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    /// The slot's scheduled proposer differs from the acting validator.
    #[error("slot {slot} belongs to proposer {expected}, not {got}")]
    WrongProposer {
        /// Slot being proposed.
        slot: Slot,
        /// Scheduled proposer index.
        expected: u64,
        /// Acting validator index.
        got: u64,
    },
    /// No proposer was scheduled for the slot.
    #[error("no proposer scheduled for slot {slot}")]
    NoProposerScheduled {
        /// The slot in question.
        slot: Slot,
    },
    /// Parent root does not resolve to a known block.
    #[error("unknown parent block {parent}")]
    UnknownParent {
        /// The missing parent root.
        parent: BlockRoot,
    },
    /// Attestation head does not resolve to a known block.
    #[error("attestation names unknown block {root}")]
    UnknownBlock {
        /// The missing root.
        root: BlockRoot,
    },
    /// A block's slot must strictly exceed its parent's.
    #[error("slot {slot} does not follow parent slot {parent_slot}")]
    SlotNotAfterParent {
        /// Proposed slot.
        slot: Slot,
        /// Parent's slot.
        parent_slot: Slot,
    },
    /// The proposer already produced a block in this slot (slashable).
    #[error("proposer {proposer} already proposed in slot {slot}")]
    EquivocatingProposal {
        /// Equivocating proposer.
        proposer: u64,
        /// The slot.
        slot: Slot,
    },
    /// The validator is not a member of the slot's committee.
    #[error("validator {validator} is not in the committee for slot {slot}")]
    NotInCommittee {
        /// Acting validator.
        validator: u64,
        /// The slot.
        slot: Slot,
    },
    /// The validator already attested in this slot (slashable).
    #[error("validator {validator} already attested in slot {slot}")]
    DoubleVote {
        /// Acting validator.
        validator: u64,
        /// The slot.
        slot: Slot,
    },
    /// Unknown validator index.
    #[error("unknown validator {validator}")]
    UnknownValidator {
        /// The index.
        validator: u64,
    },
    /// The validator has exited or was never activated.
    #[error("validator {validator} is not active")]
    InactiveValidator {
        /// The index.
        validator: u64,
    },
    /// The validator already has a queued or completed exit.
    #[error("validator {validator} already exited")]
    AlreadyExited {
        /// The index.
        validator: u64,
    },
    /// The simulation clock only moves forward.
    #[error("cannot move clock backwards from {now} to {requested}")]
    TimeTravel {
        /// Current clock.
        now: u64,
        /// Requested clock.
        requested: u64,
    },
    /// A signing operation failed (propagated from the crypto layer).
    #[error("signing failed: {0}")]
    Crypto(#[from] crate::crypto::CryptoError),
}
