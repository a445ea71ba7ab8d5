//! Escrowed bribery contracts, modeled as deterministic state machines.
//!
//! Three contracts share one administrative core (deposit, withdraw, set
//! the per-claim bribe amount — owner-only, with committed funds
//! encumbered so they cannot be pulled out from under an open offer):
//!
//! * [`PayToAttest`](pay_to_attest::PayToAttest) buys attestations: it pays
//!   on presentation of an aggregate signature over agreed attestation
//!   data (or, in the open variant, over any attestation to a block the
//!   paying proposer produced), before a deadline, exactly once per offer.
//! * [`PayToExit`](pay_to_exit::PayToExit) buys voluntary exits: it pays a
//!   validator's withdrawal address on proof of deposit membership plus a
//!   signed exit message, exactly once per validator index.
//! * [`PayToBias`](pay_to_bias::PayToBias) auctions a seed-bias
//!   configuration: bidders fund their preferred publish/withhold pattern
//!   for the tail slots of an epoch, and the proposer collects the winning
//!   side's total only by proving, from height-indexed canonical hashes,
//!   that exactly the winning pattern was executed.
//!
//! Every rejected call returns a distinct error variant; verification
//! failures are never silent.

pub mod pay_to_attest;
pub mod pay_to_bias;
pub mod pay_to_exit;

pub use pay_to_attest::{AttestOffer, OfferTerms, OpenClaim, PayToAttest};
pub use pay_to_bias::{BiasAuction, BiasBid, PayToBias, TailConfig};
pub use pay_to_exit::{ExitClaim, ExitOffer, PayToExit};

use thiserror::Error;

use crate::chain::{BlockRoot, ChainConfig, Epoch, SimChain, Slot};
use crate::crypto::merkle::Digest32;
use crate::crypto::{CryptoError, PairingSuite};
use crate::types::{Address, Wei};

/// What a contract can observe of the chain it runs on: the clock, the
/// recent height-indexed canonical hashes, and the validator deposit set.
pub trait BeaconReader {
    /// Current execution timestamp (absolute seconds).
    fn now(&self) -> u64;
    /// Protocol constants (slot length, epoch length, genesis time).
    fn protocol(&self) -> &ChainConfig;
    /// Canonical block root at `height`, if within the recency window.
    fn blockhash(&self, height: u64) -> Option<BlockRoot>;
    /// Root of the validator deposit accumulator.
    fn deposit_root(&self) -> Digest32;
    /// Withdrawal address registered for a validator.
    fn withdrawal_address(&self, validator: u64) -> Option<Address>;
}

impl<S: PairingSuite> BeaconReader for SimChain<S> {
    fn now(&self) -> u64 {
        SimChain::now(self)
    }

    fn protocol(&self) -> &ChainConfig {
        &self.config
    }

    fn blockhash(&self, height: u64) -> Option<BlockRoot> {
        SimChain::blockhash(self, height)
    }

    fn deposit_root(&self) -> Digest32 {
        self.validators().deposit_tree().root()
    }

    fn withdrawal_address(&self, validator: u64) -> Option<Address> {
        self.validator(validator).map(|v| v.withdrawal.clone())
    }
}

/// Rejection reasons across all three contracts. Each failed precondition
/// maps to exactly one variant so tests can pin the cause.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractError {
    /// Administrative call from a non-owner.
    #[error("caller {caller} is not the contract owner")]
    NotOwner {
        /// Offending caller.
        caller: Address,
    },
    /// Offer creation or claim needs more free escrow than is available.
    #[error("escrow has {available} free wei, {needed} needed")]
    InsufficientEscrow {
        /// Wei required.
        needed: Wei,
        /// Free (unencumbered) wei available.
        available: Wei,
    },
    /// Withdrawal beyond the unencumbered balance.
    #[error("withdrawal of {requested} exceeds free balance {free}")]
    OverdrawnWithdrawal {
        /// Requested amount.
        requested: Wei,
        /// Free balance.
        free: Wei,
    },
    /// No offer with this id.
    #[error("unknown offer {id}")]
    UnknownOffer {
        /// Offer id.
        id: u64,
    },
    /// Claim arrived at or after the deadline.
    #[error("offer expired: deadline {deadline}, now {now}")]
    OfferExpired {
        /// Claim deadline (exclusive).
        deadline: u64,
        /// Claim time.
        now: u64,
    },
    /// The offer was already claimed (replay).
    #[error("offer {id} already claimed")]
    AlreadyClaimed {
        /// Offer id.
        id: u64,
    },
    /// Aggregate or individual signature failed verification.
    #[error("signature verification failed")]
    InvalidSignature,
    /// Claim form (fixed-message vs. open) does not match the offer terms.
    #[error("claim form does not match the offer terms")]
    ClaimTermsMismatch,
    /// Open-variant claim: header does not hash to the attested root.
    #[error("header does not match the attested block root")]
    WrongBlockCommitment,
    /// Open-variant claim: block's reveal is not by the paying proposer.
    #[error("attested block was not produced by the offering proposer")]
    NotBriberBlock,
    /// A header's timestamp does not correspond to its claimed slot.
    #[error("header timestamp {timestamp} does not match slot {slot}")]
    TimestampMismatch {
        /// Claimed slot.
        slot: Slot,
        /// Header timestamp.
        timestamp: u64,
    },
    /// No exit offer is currently armed.
    #[error("no active exit offer")]
    NoActiveOffer,
    /// This validator index already claimed the exit bribe.
    #[error("validator {validator} already claimed an exit bribe")]
    DoubleExitClaim {
        /// Claiming validator.
        validator: u64,
    },
    /// The deposit-membership proof failed.
    #[error("deposit membership proof failed for validator {validator}")]
    InvalidMerkleProof {
        /// Claiming validator.
        validator: u64,
    },
    /// Exit message epoch predates the offer.
    #[error("exit epoch {exit_epoch} is before the offer epoch {required}")]
    StaleExitEpoch {
        /// Epoch in the signed exit.
        exit_epoch: Epoch,
        /// Minimum accepted epoch.
        required: Epoch,
    },
    /// The reader knows no such validator.
    #[error("validator {validator} has no registered withdrawal address")]
    UnknownWithdrawalAddress {
        /// Claiming validator.
        validator: u64,
    },
    /// No auction exists for this epoch.
    #[error("no seed auction for epoch {epoch}")]
    UnknownAuction {
        /// Requested epoch.
        epoch: Epoch,
    },
    /// An auction for this epoch already exists.
    #[error("a seed auction for epoch {epoch} already exists")]
    AuctionExists {
        /// Requested epoch.
        epoch: Epoch,
    },
    /// Bid arrived after the tail region began executing.
    #[error("bidding for epoch {epoch} closed at {closes}, now {now}")]
    BiddingClosed {
        /// Auction epoch.
        epoch: Epoch,
        /// Close time (exclusive).
        closes: u64,
        /// Bid time.
        now: u64,
    },
    /// The auction was already settled or refunded.
    #[error("auction for epoch {epoch} already settled")]
    AuctionSettled {
        /// Auction epoch.
        epoch: Epoch,
    },
    /// An auction needs at least one tail slot.
    #[error("auction tail must contain at least one slot")]
    EmptyTail,
    /// The tail cannot exceed the epoch it sits in.
    #[error("auction tail of {k} slots exceeds the maximum {max}")]
    TailTooLong {
        /// Requested tail length.
        k: usize,
        /// Longest allowed tail.
        max: usize,
    },
    /// An offered seed contribution does not verify.
    #[error("seed contribution for tail position {position} does not verify")]
    BadContribution {
        /// Zero-based position within the tail.
        position: usize,
    },
    /// Bid config length does not match the auction's tail length.
    #[error("config has {got} bits, auction tail has {expected}")]
    ConfigLengthMismatch {
        /// Bits supplied.
        got: usize,
        /// Bits required.
        expected: usize,
    },
    /// Bids must move money.
    #[error("bid amount must be positive")]
    ZeroBid,
    /// A proof header's hash is not served at its height (stale, orphaned,
    /// or fabricated).
    #[error("no canonical hash available for height {height} matching the header")]
    HeaderHashMismatch {
        /// Claimed height.
        height: u64,
    },
    /// Adjacent proof headers do not link parent-to-child.
    #[error("proof headers do not form a parent-child chain")]
    BrokenHeaderLinkage,
    /// The proof chain does not span the whole tail region.
    #[error("proof does not cover the tail region (missing around slot {slot})")]
    InsufficientCoverage {
        /// A tail-region slot the proof fails to bracket.
        slot: Slot,
    },
    /// The executed pattern differs from the auction winner.
    #[error("executed configuration {executed} differs from winning {winning}")]
    ExecutedConfigMismatch {
        /// Pattern proven from headers.
        executed: String,
        /// Pattern the market bought.
        winning: String,
    },
    /// Refunds only open once the claim deadline passes unclaimed.
    #[error("refunds open at {deadline}, now {now}")]
    RefundTooEarly {
        /// Claim deadline.
        deadline: u64,
        /// Call time.
        now: u64,
    },
    /// Underlying cryptographic failure (decode errors and the like).
    #[error("crypto error: {0}")]
    Crypto(#[from] CryptoError),
}

/// Balance snapshot for transcript logging.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EscrowSnapshot {
    /// Total wei held.
    pub balance: Wei,
    /// Portion committed to open offers or held for bidders.
    pub encumbered: Wei,
}

/// Funds management shared by all three contracts.
///
/// Conservation invariant (checked by [`Escrow::conservation_holds`] and
/// fuzzed in tests): everything ever deposited equals current balance plus
/// everything ever withdrawn, paid out, or refunded.
#[derive(Debug, Clone)]
pub struct Escrow {
    owner: Address,
    balance: Wei,
    encumbered: Wei,
    bribe_amount: Wei,
    total_deposited: Wei,
    total_withdrawn: Wei,
    total_paid_out: Wei,
    total_refunded: Wei,
}

impl Escrow {
    /// New empty escrow owned by `owner`.
    pub fn new(owner: Address) -> Self {
        Escrow {
            owner,
            balance: 0,
            encumbered: 0,
            bribe_amount: 0,
            total_deposited: 0,
            total_withdrawn: 0,
            total_paid_out: 0,
            total_refunded: 0,
        }
    }

    /// The owning address.
    pub fn owner(&self) -> &Address {
        &self.owner
    }

    pub(crate) fn require_owner(&self, caller: &Address) -> Result<(), ContractError> {
        if *caller != self.owner {
            return Err(ContractError::NotOwner {
                caller: caller.clone(),
            });
        }
        Ok(())
    }

    /// Owner puts funds in.
    pub fn deposit(&mut self, caller: &Address, amount: Wei) -> Result<(), ContractError> {
        self.require_owner(caller)?;
        self.balance += amount;
        self.total_deposited += amount;
        Ok(())
    }

    /// Owner takes free (unencumbered) funds out.
    pub fn withdraw(&mut self, caller: &Address, amount: Wei) -> Result<(), ContractError> {
        self.require_owner(caller)?;
        let free = self.free_balance();
        if amount > free {
            return Err(ContractError::OverdrawnWithdrawal {
                requested: amount,
                free,
            });
        }
        self.balance -= amount;
        self.total_withdrawn += amount;
        Ok(())
    }

    /// Owner sets the per-claim bribe amount for future offers.
    pub fn set_bribe_amount(&mut self, caller: &Address, amount: Wei) -> Result<(), ContractError> {
        self.require_owner(caller)?;
        self.bribe_amount = amount;
        Ok(())
    }

    /// Current per-claim bribe amount.
    pub fn bribe_amount(&self) -> Wei {
        self.bribe_amount
    }

    /// Total held wei.
    pub fn balance(&self) -> Wei {
        self.balance
    }

    /// Wei not committed to any open offer.
    pub fn free_balance(&self) -> Wei {
        self.balance - self.encumbered
    }

    /// Wei committed to open offers (or held for auction bidders).
    pub fn encumbered(&self) -> Wei {
        self.encumbered
    }

    /// Snapshot for logging.
    pub fn snapshot(&self) -> EscrowSnapshot {
        EscrowSnapshot {
            balance: self.balance,
            encumbered: self.encumbered,
        }
    }

    /// Commit free funds to an offer.
    pub(crate) fn encumber(&mut self, amount: Wei) -> Result<(), ContractError> {
        let free = self.free_balance();
        if amount > free {
            return Err(ContractError::InsufficientEscrow {
                needed: amount,
                available: free,
            });
        }
        self.encumbered += amount;
        Ok(())
    }

    /// Third-party funds held by the contract (auction bids): immediately
    /// encumbered so the owner cannot withdraw them.
    pub(crate) fn deposit_held(&mut self, amount: Wei) {
        self.balance += amount;
        self.total_deposited += amount;
        self.encumbered += amount;
    }

    /// Pay committed funds out to a claimant.
    pub(crate) fn pay_out(&mut self, amount: Wei) {
        debug_assert!(amount <= self.encumbered, "payouts come from commitments");
        self.encumbered -= amount;
        self.balance -= amount;
        self.total_paid_out += amount;
    }

    /// Return committed funds to their depositor.
    pub(crate) fn refund(&mut self, amount: Wei) {
        debug_assert!(amount <= self.encumbered, "refunds come from commitments");
        self.encumbered -= amount;
        self.balance -= amount;
        self.total_refunded += amount;
    }

    /// Release a commitment without moving money (expired offer).
    pub(crate) fn release(&mut self, amount: Wei) {
        debug_assert!(amount <= self.encumbered);
        self.encumbered -= amount;
    }

    /// The books balance: deposits in equal balance plus everything that
    /// ever left.
    pub fn conservation_holds(&self) -> bool {
        self.total_deposited
            == self.balance + self.total_withdrawn + self.total_paid_out + self.total_refunded
            && self.encumbered <= self.balance
    }
}
