//! An auction over seed-bias configurations.
//!
//! A proposer who controls the last `k` proposal slots of an epoch — the
//! tail — controls `2^k` possible epoch seeds: each tail slot can carry its
//! block (contributing its pre-committed seed reveal) or be left empty.
//! This contract lets that proposer sell the choice.
//!
//! The proposer opens the auction by publishing the `k` seed reveals
//! themselves (verifiable against the proposers' keys, and fixed in advance
//! — reveals are signatures over the epoch number alone, so they cannot be
//! ground). Bidders then fund publish/withhold patterns; bids on the same
//! pattern stack. Bidding closes when the tail begins. After the tail has
//! executed, the proposer collects the winning side's total by proving —
//! with a parent-linked chain of headers checked against height-indexed
//! canonical hashes — that the realized pattern equals the winning bid.
//! Losing bids are refunded at settlement; if the proposer never proves
//! execution, everyone is refunded after the claim deadline.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chain::{randao_epoch_bytes, BlockHeader, ChainConfig, Epoch, Slot};
use crate::crypto::{verify, PairingSuite, PublicKey, Signature};
use crate::types::{Address, Wei};

use super::{BeaconReader, ContractError, Escrow, EscrowSnapshot};

/// A publish/withhold pattern over the tail slots of an epoch.
///
/// Position 0 is the earliest tail slot; `true` means the slot's block is
/// withheld. Patterns order like unsigned integers read most-significant
/// bit first, so `Ord` on the pattern agrees with [`TailConfig::to_index`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TailConfig {
    withhold: Vec<bool>,
}

impl TailConfig {
    /// The pattern that publishes every tail block.
    pub fn publish_all(k: usize) -> Self {
        TailConfig {
            withhold: vec![false; k],
        }
    }

    /// Pattern from its integer index: bit `k-1-i` of `index` is position
    /// `i`, so counting `0..2^k` enumerates patterns in `Ord` order.
    pub fn from_index(index: u64, k: usize) -> Self {
        assert!(k < 64 && index < (1u64 << k), "config index out of range");
        TailConfig {
            withhold: (0..k).map(|i| (index >> (k - 1 - i)) & 1 == 1).collect(),
        }
    }

    /// Integer index of the pattern (inverse of [`TailConfig::from_index`]).
    pub fn to_index(&self) -> u64 {
        self.withhold
            .iter()
            .fold(0u64, |acc, &bit| (acc << 1) | u64::from(bit))
    }

    /// Pattern from a string of `0` (publish) and `1` (withhold)
    /// characters, earliest tail slot first.
    pub fn parse_bits(s: &str) -> Option<Self> {
        if s.is_empty() {
            return None;
        }
        let mut withhold = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => withhold.push(false),
                '1' => withhold.push(true),
                _ => return None,
            }
        }
        Some(TailConfig { withhold })
    }

    /// The pattern as a `0`/`1` string, earliest tail slot first.
    pub fn bit_string(&self) -> String {
        self.withhold
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }

    /// Number of tail slots the pattern covers.
    pub fn len(&self) -> usize {
        self.withhold.len()
    }

    /// True for a zero-length pattern.
    pub fn is_empty(&self) -> bool {
        self.withhold.is_empty()
    }

    /// Whether tail position `i` is withheld.
    pub fn withholds(&self, i: usize) -> bool {
        self.withhold[i]
    }

    /// Iterate over positions, `true` = withhold.
    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.withhold.iter().copied()
    }
}

impl std::fmt::Display for TailConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.bit_string())
    }
}

/// One bid: money behind a pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiasBid {
    /// Who paid (and who gets refunded if the pattern loses).
    pub bidder: Address,
    /// Pattern the bidder wants executed.
    pub config: TailConfig,
    /// Wei escrowed behind the pattern.
    pub amount: Wei,
}

/// Auction state for one epoch.
#[derive(Debug, Clone)]
pub struct BiasAuction<S: PairingSuite> {
    /// Epoch whose seed is for sale.
    pub epoch: Epoch,
    /// First slot of the tail region.
    pub tail_start_slot: Slot,
    /// Pre-committed seed reveal of each tail slot's proposer, earliest
    /// first, each verified at offer time against the proposer's key.
    pub contributions: Vec<(PublicKey<S>, Signature<S>)>,
    /// Bids are rejected from this time on (the tail starts executing).
    pub bidding_closes: u64,
    /// Execution proofs are accepted strictly before this time; refunds
    /// open at it.
    pub deadline: u64,
    /// All accepted bids, in arrival order.
    pub bids: Vec<BiasBid>,
    /// Set once the auction paid out or refunded.
    pub settled: bool,
}

impl<S: PairingSuite> BiasAuction<S> {
    /// Tail length.
    pub fn k(&self) -> usize {
        self.contributions.len()
    }

    /// Last slot of the tail region (the epoch's final slot).
    pub fn tail_end_slot(&self) -> Slot {
        self.tail_start_slot + self.k() as u64 - 1
    }

    /// Total escrowed per pattern.
    pub fn totals(&self) -> BTreeMap<TailConfig, Wei> {
        let mut totals = BTreeMap::new();
        for bid in &self.bids {
            *totals.entry(bid.config.clone()).or_insert(0) += bid.amount;
        }
        totals
    }

    /// The pattern the market bought: highest total, ties to the smaller
    /// pattern. With no bids every pattern totals zero and the smallest —
    /// publish-all — wins vacuously.
    pub fn winning_config(&self) -> (TailConfig, Wei) {
        let totals = self.totals();
        let mut best: Option<(&TailConfig, Wei)> = None;
        for (config, &total) in &totals {
            match best {
                // BTreeMap iterates in ascending pattern order, so on a tie
                // the earlier (smaller) pattern is kept.
                Some((_, best_total)) if total <= best_total => {}
                _ => best = Some((config, total)),
            }
        }
        match best {
            Some((config, total)) => (config.clone(), total),
            None => (TailConfig::publish_all(self.k()), 0),
        }
    }
}

/// Seed-bias auction contract. One auction per epoch; bidders' funds are
/// held encumbered (never owner-withdrawable) until settlement.
#[derive(Debug, Clone)]
pub struct PayToBias<S: PairingSuite> {
    escrow: Escrow,
    auctions: BTreeMap<Epoch, BiasAuction<S>>,
    payouts: Vec<(Epoch, Wei)>,
    refunds: Vec<(Address, Wei)>,
}

impl<S: PairingSuite> PayToBias<S> {
    /// New contract owned by the proposer selling the bias.
    pub fn new(owner: Address) -> Self {
        PayToBias {
            escrow: Escrow::new(owner),
            auctions: BTreeMap::new(),
            payouts: Vec::new(),
            refunds: Vec::new(),
        }
    }

    /// Escrow state (read-only).
    pub fn escrow(&self) -> &Escrow {
        &self.escrow
    }

    /// Balance snapshot for logging.
    pub fn snapshot(&self) -> EscrowSnapshot {
        self.escrow.snapshot()
    }

    /// Auction for an epoch, if one was opened.
    pub fn auction(&self, epoch: Epoch) -> Option<&BiasAuction<S>> {
        self.auctions.get(&epoch)
    }

    /// Settlement payouts so far: (epoch, amount to owner).
    pub fn payouts(&self) -> &[(Epoch, Wei)] {
        &self.payouts
    }

    /// Refunds issued so far: (bidder, amount).
    pub fn refunds(&self) -> &[(Address, Wei)] {
        &self.refunds
    }

    /// The escrow books balance.
    pub fn conservation_holds(&self) -> bool {
        self.escrow.conservation_holds()
    }

    /// Owner opens the auction for `epoch`, publishing one verified seed
    /// contribution per tail slot (earliest first). The tail is the last
    /// `contributions.len()` slots of the epoch.
    pub fn offer_bias(
        &mut self,
        caller: &Address,
        epoch: Epoch,
        contributions: Vec<(PublicKey<S>, Signature<S>)>,
        deadline: u64,
        protocol: &ChainConfig,
    ) -> Result<(), ContractError> {
        self.escrow.require_owner(caller)?;
        if self.auctions.contains_key(&epoch) {
            return Err(ContractError::AuctionExists { epoch });
        }
        let k = contributions.len();
        if k == 0 {
            return Err(ContractError::EmptyTail);
        }
        let max = protocol.slots_per_epoch as usize;
        if k > max {
            return Err(ContractError::TailTooLong { k, max });
        }
        let message = randao_epoch_bytes(epoch);
        for (position, (pk, sig)) in contributions.iter().enumerate() {
            if !verify(pk, &message, sig) {
                return Err(ContractError::BadContribution { position });
            }
        }
        let tail_start_slot =
            protocol.epoch_start_slot(epoch) + protocol.slots_per_epoch - k as u64;
        let bidding_closes = protocol.slot_start(tail_start_slot);
        self.auctions.insert(
            epoch,
            BiasAuction {
                epoch,
                tail_start_slot,
                contributions,
                bidding_closes,
                deadline,
                bids: Vec::new(),
                settled: false,
            },
        );
        Ok(())
    }

    /// Escrow `amount` behind `config`. Bids on the same pattern stack;
    /// bidding closes the moment the tail starts executing.
    pub fn place_bid(
        &mut self,
        bidder: &Address,
        epoch: Epoch,
        config: TailConfig,
        amount: Wei,
        now: u64,
    ) -> Result<(), ContractError> {
        let auction = self
            .auctions
            .get_mut(&epoch)
            .ok_or(ContractError::UnknownAuction { epoch })?;
        if auction.settled {
            return Err(ContractError::AuctionSettled { epoch });
        }
        if now >= auction.bidding_closes {
            return Err(ContractError::BiddingClosed {
                epoch,
                closes: auction.bidding_closes,
                now,
            });
        }
        if config.len() != auction.k() {
            return Err(ContractError::ConfigLengthMismatch {
                got: config.len(),
                expected: auction.k(),
            });
        }
        if amount == 0 {
            return Err(ContractError::ZeroBid);
        }
        auction.bids.push(BiasBid {
            bidder: bidder.clone(),
            config,
            amount,
        });
        self.escrow.deposit_held(amount);
        Ok(())
    }

    /// Settle by proving execution. `headers` must be a parent-linked run
    /// of canonical headers — each served verbatim at its height by the
    /// chain's recent-hash lookup, heights strictly consecutive — starting
    /// strictly before the tail and ending strictly after it. Consecutive
    /// heights prove the slots between two adjacent headers were empty, so
    /// the run pins the publish/withhold status of every tail slot. If the
    /// realized pattern equals the winning bid, the owner collects the
    /// winning total and losing bids are refunded.
    pub fn take_bribe(
        &mut self,
        epoch: Epoch,
        headers: &[BlockHeader],
        reader: &impl BeaconReader,
    ) -> Result<Wei, ContractError> {
        let auction = self
            .auctions
            .get_mut(&epoch)
            .ok_or(ContractError::UnknownAuction { epoch })?;
        if auction.settled {
            return Err(ContractError::AuctionSettled { epoch });
        }
        let now = reader.now();
        if now >= auction.deadline {
            return Err(ContractError::OfferExpired {
                deadline: auction.deadline,
                now,
            });
        }
        let executed = derive_executed_config(
            headers,
            auction.tail_start_slot,
            auction.k(),
            reader,
        )?;
        let (winning, total) = auction.winning_config();
        if executed != winning {
            return Err(ContractError::ExecutedConfigMismatch {
                executed: executed.bit_string(),
                winning: winning.bit_string(),
            });
        }
        auction.settled = true;
        let bids = auction.bids.clone();
        for bid in &bids {
            if bid.config == winning {
                self.escrow.pay_out(bid.amount);
            } else {
                self.escrow.refund(bid.amount);
                self.refunds.push((bid.bidder.clone(), bid.amount));
            }
        }
        self.payouts.push((epoch, total));
        Ok(total)
    }

    /// After the claim deadline passes unsettled, anyone can return every
    /// bid to its bidder. Returns the total refunded.
    pub fn refund_bids(&mut self, epoch: Epoch, now: u64) -> Result<Wei, ContractError> {
        let auction = self
            .auctions
            .get_mut(&epoch)
            .ok_or(ContractError::UnknownAuction { epoch })?;
        if auction.settled {
            return Err(ContractError::AuctionSettled { epoch });
        }
        if now < auction.deadline {
            return Err(ContractError::RefundTooEarly {
                deadline: auction.deadline,
                now,
            });
        }
        auction.settled = true;
        let bids = auction.bids.clone();
        let mut total = 0;
        for bid in &bids {
            self.escrow.refund(bid.amount);
            self.refunds.push((bid.bidder.clone(), bid.amount));
            total += bid.amount;
        }
        Ok(total)
    }
}

/// Check a header run against the canonical height index and read off the
/// publish/withhold status of every tail slot.
fn derive_executed_config(
    headers: &[BlockHeader],
    tail_start_slot: Slot,
    k: usize,
    reader: &impl BeaconReader,
) -> Result<TailConfig, ContractError> {
    let protocol = reader.protocol();
    let tail_end_slot = tail_start_slot + k as u64 - 1;
    if headers.is_empty() {
        return Err(ContractError::InsufficientCoverage {
            slot: tail_start_slot,
        });
    }
    for header in headers {
        // The slot field must be exactly what the timestamp implies.
        let derived = protocol.slot_at(header.timestamp);
        if derived != header.slot || protocol.slot_start(derived) != header.timestamp {
            return Err(ContractError::TimestampMismatch {
                slot: header.slot,
                timestamp: header.timestamp,
            });
        }
        // The header must be served verbatim at its height: this is what
        // makes the proof trustless — fabricated, orphaned, or stale
        // headers have no canonical hash to match.
        if reader.blockhash(header.height) != Some(header.root()) {
            return Err(ContractError::HeaderHashMismatch {
                height: header.height,
            });
        }
    }
    for pair in headers.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        // Consecutive heights with parent linkage prove every slot strictly
        // between `a.slot` and `b.slot` was empty.
        if b.parent != a.root() || b.height != a.height + 1 || b.slot <= a.slot {
            return Err(ContractError::BrokenHeaderLinkage);
        }
    }
    let first = headers.first().expect("nonempty");
    let last = headers.last().expect("nonempty");
    if first.slot >= tail_start_slot {
        return Err(ContractError::InsufficientCoverage {
            slot: tail_start_slot,
        });
    }
    if last.slot <= tail_end_slot {
        return Err(ContractError::InsufficientCoverage {
            slot: tail_end_slot,
        });
    }
    let withhold: Vec<bool> = (tail_start_slot..=tail_end_slot)
        .map(|slot| !headers.iter().any(|h| h.slot == slot))
        .collect();
    Ok(TailConfig { withhold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{ChainConfig, CommitteeSchedule, SimChain, Validator, ValidatorClass, ValidatorSet};
    use crate::crypto::mock::MockSuite;
    use crate::crypto::{keygen, sign};
    use crate::types::weight;

    fn owner() -> Address {
        Address::new("manipulator")
    }

    /// Chain with proposers for slot 1, the two tail slots 30 and 31 of
    /// epoch 0, and slot 32 (first of epoch 1).
    fn tail_chain() -> SimChain<MockSuite> {
        let validators: Vec<_> = (0..4u64)
            .map(|i| Validator {
                index: i,
                keypair: keygen(format!("v-{i}").as_bytes()).unwrap(),
                weight: weight(1, 4),
                class: ValidatorClass::Altruistic,
                withdrawal: Address::for_validator(i),
                active: true,
            })
            .collect();
        let vset = ValidatorSet::new(
            validators,
            CommitteeSchedule::Explicit(BTreeMap::new()),
            32,
        );
        let schedule: BTreeMap<u64, u64> =
            [(1u64, 0u64), (30, 1), (31, 2), (32, 3)].into_iter().collect();
        SimChain::new(ChainConfig::default(), vset, schedule)
    }

    fn contributions(chain: &SimChain<MockSuite>) -> Vec<(PublicKey<MockSuite>, Signature<MockSuite>)> {
        [1u64, 2]
            .iter()
            .map(|&v| {
                let kp = &chain.validator(v).unwrap().keypair;
                (
                    kp.public.clone(),
                    sign(&kp.secret, &randao_epoch_bytes(0)).unwrap(),
                )
            })
            .collect()
    }

    fn open_auction(chain: &SimChain<MockSuite>) -> PayToBias<MockSuite> {
        let mut c = PayToBias::new(owner());
        c.offer_bias(&owner(), 0, contributions(chain), 1_000, &chain.config)
            .unwrap();
        c
    }

    /// Execute the pattern "withhold slot 30, publish slot 31" and return
    /// (chain, proof headers).
    fn execute_10() -> (SimChain<MockSuite>, Vec<BlockHeader>) {
        let mut chain = tail_chain();
        let genesis = chain.genesis_root();
        chain.advance_to_slot_start(1).unwrap();
        let b1 = chain.propose(1, 0, genesis).unwrap();
        chain.advance_to_slot_start(30).unwrap();
        assert!(chain.propose_block(30, 1, b1, false).unwrap().is_none());
        chain.advance_to_slot_start(31).unwrap();
        let b31 = chain.propose(31, 2, b1).unwrap();
        chain.advance_to_slot_start(32).unwrap();
        let b32 = chain.propose(32, 3, b31).unwrap();
        let headers = vec![
            chain.header(&b1).unwrap().clone(),
            chain.header(&b31).unwrap().clone(),
            chain.header(&b32).unwrap().clone(),
        ];
        (chain, headers)
    }

    #[test]
    fn config_indexing_and_ordering_agree() {
        assert_eq!(TailConfig::from_index(0b100, 3).bit_string(), "100");
        assert_eq!(TailConfig::from_index(0b011, 3).bit_string(), "011");
        assert_eq!(TailConfig::publish_all(3).to_index(), 0);
        let mut configs: Vec<TailConfig> =
            (0..8).map(|i| TailConfig::from_index(i, 3)).collect();
        let by_index = configs.clone();
        configs.sort();
        assert_eq!(configs, by_index, "Ord order must match index order");
        for i in 0..8u64 {
            assert_eq!(TailConfig::from_index(i, 3).to_index(), i);
        }
        assert_eq!(TailConfig::parse_bits("010"), Some(TailConfig::from_index(2, 3)));
        assert_eq!(TailConfig::parse_bits("0x1"), None);
        assert_eq!(TailConfig::parse_bits(""), None);
    }

    #[test]
    fn winning_side_pays_owner_and_losers_are_refunded() {
        let (chain, headers) = execute_10();
        let mut c = open_auction(&chain);
        let won = TailConfig::parse_bits("10").unwrap();
        let lost = TailConfig::parse_bits("01").unwrap();
        c.place_bid(&Address::new("alice"), 0, won.clone(), 100, 0).unwrap();
        c.place_bid(&Address::new("bob"), 0, lost.clone(), 80, 5).unwrap();
        c.place_bid(&Address::new("carol"), 0, won.clone(), 50, 9).unwrap();
        assert_eq!(c.escrow().balance(), 230);
        assert_eq!(c.escrow().free_balance(), 0);

        assert_eq!(c.auction(0).unwrap().winning_config(), (won, 150));
        assert_eq!(c.take_bribe(0, &headers, &chain), Ok(150));
        assert_eq!(c.refunds(), &[(Address::new("bob"), 80)]);
        assert_eq!(c.payouts(), &[(0, 150)]);
        assert_eq!(c.escrow().balance(), 0);
        assert!(c.conservation_holds());
        assert_eq!(
            c.take_bribe(0, &headers, &chain),
            Err(ContractError::AuctionSettled { epoch: 0 })
        );
    }

    #[test]
    fn executing_the_losing_pattern_collects_nothing() {
        let (chain, headers) = execute_10();
        let mut c = open_auction(&chain);
        c.place_bid(&Address::new("alice"), 0, TailConfig::parse_bits("01").unwrap(), 500, 0)
            .unwrap();
        c.place_bid(&Address::new("bob"), 0, TailConfig::parse_bits("10").unwrap(), 100, 0)
            .unwrap();
        assert_eq!(
            c.take_bribe(0, &headers, &chain),
            Err(ContractError::ExecutedConfigMismatch {
                executed: "10".into(),
                winning: "01".into(),
            })
        );
        // Nothing settled; bidders can still be made whole at the deadline.
        assert_eq!(c.refund_bids(0, 1_000), Ok(600));
        assert!(c.conservation_holds());
        assert_eq!(c.escrow().balance(), 0);
    }

    #[test]
    fn proof_must_be_canonical_linked_and_covering() {
        let (chain, headers) = execute_10();

        // Tampered header: not served at its height.
        let mut c = open_auction(&chain);
        c.place_bid(&Address::new("a"), 0, TailConfig::parse_bits("10").unwrap(), 10, 0)
            .unwrap();
        let mut tampered = headers.clone();
        tampered[1].height += 1;
        match c.take_bribe(0, &tampered, &chain) {
            Err(ContractError::HeaderHashMismatch { .. }) => {}
            other => panic!("expected hash mismatch, got {other:?}"),
        }

        // Dropping the middle header breaks height consecutiveness.
        let gappy = vec![headers[0].clone(), headers[2].clone()];
        assert_eq!(
            c.take_bribe(0, &gappy, &chain),
            Err(ContractError::BrokenHeaderLinkage)
        );

        // Starting inside the tail leaves the first tail slot unproven.
        let late = headers[1..].to_vec();
        assert_eq!(
            c.take_bribe(0, &late, &chain),
            Err(ContractError::InsufficientCoverage { slot: 30 })
        );

        // Ending inside the tail leaves the last tail slot unproven.
        let short = headers[..2].to_vec();
        assert_eq!(
            c.take_bribe(0, &short, &chain),
            Err(ContractError::InsufficientCoverage { slot: 31 })
        );

        // Lying about the slot via the timestamp is caught.
        let mut shifted = headers.clone();
        shifted[1].timestamp += 1;
        match c.take_bribe(0, &shifted, &chain) {
            Err(ContractError::TimestampMismatch { .. }) => {}
            other => panic!("expected timestamp mismatch, got {other:?}"),
        }

        // The untampered proof still settles (rejections consumed nothing).
        assert_eq!(c.take_bribe(0, &headers, &chain), Ok(10));
    }

    #[test]
    fn bids_validate_epoch_timing_pattern_and_amount() {
        let chain = tail_chain();
        let mut c = open_auction(&chain);
        let pat = TailConfig::parse_bits("10").unwrap();
        assert_eq!(
            c.place_bid(&Address::new("a"), 7, pat.clone(), 10, 0),
            Err(ContractError::UnknownAuction { epoch: 7 })
        );
        assert_eq!(
            c.place_bid(&Address::new("a"), 0, TailConfig::parse_bits("101").unwrap(), 10, 0),
            Err(ContractError::ConfigLengthMismatch { got: 3, expected: 2 })
        );
        assert_eq!(
            c.place_bid(&Address::new("a"), 0, pat.clone(), 0, 0),
            Err(ContractError::ZeroBid)
        );
        // Tail slot 30 starts at 360s; bids at or after that are closed.
        let closes = chain.config.slot_start(30);
        assert_eq!(
            c.place_bid(&Address::new("a"), 0, pat.clone(), 10, closes),
            Err(ContractError::BiddingClosed {
                epoch: 0,
                closes,
                now: closes
            })
        );
        assert!(c.place_bid(&Address::new("a"), 0, pat, 10, closes - 1).is_ok());
    }

    #[test]
    fn offer_validates_owner_duplicates_length_and_contributions() {
        let chain = tail_chain();
        let mut c = PayToBias::<MockSuite>::new(owner());
        let outsider = Address::new("mallory");
        assert_eq!(
            c.offer_bias(&outsider, 0, contributions(&chain), 1_000, &chain.config),
            Err(ContractError::NotOwner { caller: outsider })
        );
        assert_eq!(
            c.offer_bias(&owner(), 0, vec![], 1_000, &chain.config),
            Err(ContractError::EmptyTail)
        );
        let kp = &chain.validator(1).unwrap().keypair;
        let too_many = vec![
            (
                kp.public.clone(),
                sign(&kp.secret, &randao_epoch_bytes(0)).unwrap()
            );
            33
        ];
        assert_eq!(
            c.offer_bias(&owner(), 0, too_many, 1_000, &chain.config),
            Err(ContractError::TailTooLong { k: 33, max: 32 })
        );
        // Second contribution signed for the wrong epoch.
        let mut bad = contributions(&chain);
        bad[1].1 = sign(&chain.validator(2).unwrap().keypair.secret, &randao_epoch_bytes(1)).unwrap();
        assert_eq!(
            c.offer_bias(&owner(), 0, bad, 1_000, &chain.config),
            Err(ContractError::BadContribution { position: 1 })
        );
        c.offer_bias(&owner(), 0, contributions(&chain), 1_000, &chain.config)
            .unwrap();
        assert_eq!(
            c.offer_bias(&owner(), 0, contributions(&chain), 1_000, &chain.config),
            Err(ContractError::AuctionExists { epoch: 0 })
        );
        let a = c.auction(0).unwrap();
        assert_eq!(a.tail_start_slot, 30);
        assert_eq!(a.tail_end_slot(), 31);
        assert_eq!(a.bidding_closes, chain.config.slot_start(30));
    }

    #[test]
    fn ties_resolve_to_the_smaller_pattern_and_no_bids_to_publish_all() {
        let chain = tail_chain();
        let mut c = open_auction(&chain);
        assert_eq!(
            c.auction(0).unwrap().winning_config(),
            (TailConfig::publish_all(2), 0)
        );
        c.place_bid(&Address::new("a"), 0, TailConfig::parse_bits("11").unwrap(), 100, 0)
            .unwrap();
        c.place_bid(&Address::new("b"), 0, TailConfig::parse_bits("01").unwrap(), 100, 0)
            .unwrap();
        assert_eq!(
            c.auction(0).unwrap().winning_config(),
            (TailConfig::parse_bits("01").unwrap(), 100)
        );
    }

    #[test]
    fn unclaimed_auctions_refund_everyone_after_the_deadline() {
        let chain = tail_chain();
        let mut c = open_auction(&chain);
        c.place_bid(&Address::new("a"), 0, TailConfig::parse_bits("11").unwrap(), 70, 0)
            .unwrap();
        c.place_bid(&Address::new("b"), 0, TailConfig::parse_bits("00").unwrap(), 30, 0)
            .unwrap();
        assert_eq!(
            c.refund_bids(0, 999),
            Err(ContractError::RefundTooEarly {
                deadline: 1_000,
                now: 999
            })
        );
        assert_eq!(c.refund_bids(0, 1_000), Ok(100));
        assert_eq!(
            c.refunds(),
            &[(Address::new("a"), 70), (Address::new("b"), 30)]
        );
        assert_eq!(c.escrow().balance(), 0);
        assert!(c.conservation_holds());
        assert_eq!(
            c.refund_bids(0, 1_001),
            Err(ContractError::AuctionSettled { epoch: 0 })
        );
    }

    #[test]
    fn expired_claims_are_rejected_even_with_a_valid_proof() {
        let (mut chain, headers) = execute_10();
        let mut c = open_auction(&chain);
        c.place_bid(&Address::new("a"), 0, TailConfig::parse_bits("10").unwrap(), 10, 0)
            .unwrap();
        chain.advance_to(1_000).unwrap();
        assert_eq!(
            c.take_bribe(0, &headers, &chain),
            Err(ContractError::OfferExpired {
                deadline: 1_000,
                now: 1_000
            })
        );
    }
}
