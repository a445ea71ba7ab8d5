//! Wire types: block headers and attestation data, with canonical byte
//! encodings for hashing and signing.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{BlockRoot, Epoch, Slot};

/// Length of the chain's hash commitments in bytes.
pub const CHAIN_HASH_LEN: usize = 32;

/// A block header. The sandbox has no execution payload; `body_root`
/// commits to whatever the producer chose to include (zero when empty).
///
/// `timestamp` is determined by the protocol as
/// `genesis_time + slot * seconds_per_slot`, which is what lets a contract
/// recover a block's slot from a header it is shown.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockHeader {
    /// Slot the block was produced for.
    pub slot: Slot,
    /// Distance from genesis (genesis is height 0).
    pub height: u64,
    /// Parent block root.
    pub parent: BlockRoot,
    /// Index of the proposing validator (`u64::MAX` for genesis).
    pub proposer: u64,
    /// Protocol timestamp of the slot.
    pub timestamp: u64,
    /// The proposer's seed-reveal signature over the epoch number, hex of
    /// the suite's G2 encoding. Empty for genesis.
    pub randao_reveal: String,
    /// Commitment to the block body (zero root when empty).
    pub body_root: BlockRoot,
}

impl BlockHeader {
    /// Canonical byte encoding (fixed field order, fixed-width integers).
    pub fn encode(&self) -> Vec<u8> {
        let reveal = self.randao_reveal.as_bytes();
        let mut out = Vec::with_capacity(8 * 4 + 32 * 2 + reveal.len() + 16);
        out.extend_from_slice(b"block-header");
        out.extend_from_slice(&self.slot.to_le_bytes());
        out.extend_from_slice(&self.height.to_le_bytes());
        out.extend_from_slice(&self.parent.0);
        out.extend_from_slice(&self.proposer.to_le_bytes());
        out.extend_from_slice(&self.timestamp.to_le_bytes());
        out.extend_from_slice(&(reveal.len() as u64).to_le_bytes());
        out.extend_from_slice(reveal);
        out.extend_from_slice(&self.body_root.0);
        out
    }

    /// The block root: SHA-256 of the canonical encoding.
    pub fn root(&self) -> BlockRoot {
        let mut h = Sha256::new();
        h.update(self.encode());
        BlockRoot(h.finalize().into())
    }
}

/// An epoch boundary reference.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Checkpoint {
    /// The epoch this checkpoint summarizes.
    pub epoch: Epoch,
    /// Root of the chain's latest block at or before the epoch's first slot.
    pub root: BlockRoot,
}

/// What an attester signs. Deliberately excludes any committee index, so
/// every committee member voting the same head in the same slot signs
/// byte-identical data and their signatures aggregate under one message.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AttestationData {
    /// Slot of the duty.
    pub slot: Slot,
    /// Head block the attester votes for.
    pub head: BlockRoot,
    /// Source checkpoint (justification vote).
    pub source: Checkpoint,
    /// Target checkpoint (current epoch boundary).
    pub target: Checkpoint,
}

impl AttestationData {
    /// Canonical signing bytes, domain-separated from other message kinds.
    pub fn signing_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 8 * 3 + 32 * 3);
        out.extend_from_slice(b"attestation");
        out.extend_from_slice(&self.slot.to_le_bytes());
        out.extend_from_slice(&self.head.0);
        out.extend_from_slice(&self.source.epoch.to_le_bytes());
        out.extend_from_slice(&self.source.root.0);
        out.extend_from_slice(&self.target.epoch.to_le_bytes());
        out.extend_from_slice(&self.target.root.0);
        out
    }
}
