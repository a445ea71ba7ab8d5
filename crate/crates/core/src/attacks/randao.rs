//! Seed-bias planning and an end-to-end seed auction.
//!
//! A proposer controlling the last `k` slots of an epoch chooses, for each
//! of those slots, whether to publish its block (mixing a pre-committed
//! contribution into the epoch seed) or withhold it. The contributions are
//! signatures over a message fixed by the epoch alone, so all `2^k`
//! reachable seeds are computable in advance: each is the pre-tail
//! baseline XORed with the contribution hashes of the published slots.
//!
//! [`randao_enumerate`] produces that outcome table. [`run_bias_auction`]
//! demonstrates the full market: the controlling proposer pre-commits the
//! tail contributions, bidders buy withholding patterns, the winning
//! pattern is executed on a simulated chain, and the auction settles
//! against the canonical-header proof — paying out exactly when the
//! executed pattern is the purchased one, and matching the enumerated
//! seed prediction bit for bit.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::chain::{
    contribution_hash, BlockHeader, ChainConfig, CommitteeSchedule, Epoch, SimChain, Slot,
    Validator, ValidatorClass, ValidatorSet,
};
use crate::contracts::{PayToBias, TailConfig};
use crate::crypto::{keygen, PairingSuite, PublicKey, Signature};
use crate::types::{Address, Weight, Wei};

use super::AttackError;

/// Largest tail the enumerator will expand (2^k outcomes).
pub const ENUMERATION_CAP: usize = 20;

/// All `2^k` seed outcomes reachable by withholding subsets of the tail,
/// in counter order over withholding patterns.
///
/// `baseline` is the epoch seed as of the last pre-tail block;
/// `tail_hashes[i]` is the contribution hash the `i`-th tail slot would
/// mix in if published.
pub fn randao_enumerate(
    baseline: [u8; 32],
    tail_hashes: &[[u8; 32]],
    cap: usize,
) -> Result<Vec<(TailConfig, [u8; 32])>, AttackError> {
    let k = tail_hashes.len();
    if k > cap {
        return Err(AttackError::EnumerationCapExceeded { k, cap });
    }
    let mut rows = Vec::with_capacity(1usize << k);
    for index in 0..(1u64 << k) {
        let config = TailConfig::from_index(index, k);
        let mut mix = baseline;
        for (i, hash) in tail_hashes.iter().enumerate() {
            if !config.withholds(i) {
                for (m, h) in mix.iter_mut().zip(hash) {
                    *m ^= h;
                }
            }
        }
        rows.push((config, mix));
    }
    Ok(rows)
}

/// One bid the demonstration places before the tail executes.
#[derive(Debug, Clone)]
pub struct PlannedBid {
    /// Bidder label (becomes the refund address).
    pub bidder: String,
    /// The withholding pattern this bid backs.
    pub pattern: TailConfig,
    /// Escrowed amount.
    pub amount_wei: Wei,
}

/// Input to [`run_bias_auction`]: how long a tail to sell and who bids.
#[derive(Debug, Clone)]
pub struct BiasPlan {
    /// Number of controlled tail slots (1 ..= slots per epoch − 1).
    pub k: usize,
    /// Bids to place while the book is open.
    pub bids: Vec<PlannedBid>,
}

/// One enumerated outcome with the money behind it.
#[derive(Debug, Clone, Serialize)]
pub struct OutcomeRow {
    /// Counter index of the pattern.
    pub index: u64,
    /// Withholding pattern, earliest tail slot first (`1` = withhold).
    pub pattern: String,
    /// Epoch seed this pattern produces (hex).
    pub seed: String,
    /// Total wei bid on this pattern.
    pub total_bid_wei: Wei,
}

/// Full record of one seed auction.
#[derive(Debug, Clone, Serialize)]
pub struct AuctionReport {
    /// The epoch whose seed was sold.
    pub epoch: Epoch,
    /// Tail length.
    pub k: usize,
    /// First slot of the tail.
    pub tail_start_slot: Slot,
    /// Epoch seed before the tail executed (hex).
    pub baseline_seed: String,
    /// Every reachable outcome, in counter order.
    pub rows: Vec<OutcomeRow>,
    /// The pattern the market bought.
    pub winning_pattern: String,
    /// Total escrow behind the winning pattern.
    pub winning_total_wei: Wei,
    /// What the auction paid the seller on settlement.
    pub payout_wei: Wei,
    /// Refunds to losing bidders: (bidder, wei).
    pub refunds: Vec<(String, Wei)>,
    /// Seed realized on the canonical chain (hex).
    pub realized_seed: String,
    /// Seed the enumeration predicted for the winning pattern (hex).
    pub predicted_seed: String,
    /// Whether realized and predicted seeds agree.
    pub seed_matches_prediction: bool,
    /// Whether the escrow books still balance.
    pub escrow_conserved: bool,
}

/// Sell the last `k` slots of epoch 0, execute the winning pattern, and
/// settle the auction against the canonical-header proof.
pub fn run_bias_auction<S: PairingSuite>(plan: &BiasPlan) -> Result<AuctionReport, AttackError> {
    let config = ChainConfig::default();
    let spe = config.slots_per_epoch;
    let k = plan.k;
    if k == 0 || k as u64 > spe - 1 {
        return Err(AttackError::TailDoesNotFit {
            k,
            slots_per_epoch: spe,
        });
    }
    if plan.bids.is_empty() {
        return Err(AttackError::NoBids);
    }

    // Validator 0 proposes every non-tail slot; validators 1..=k each
    // control one tail slot, so every tail contribution is distinct.
    let mut validators = Vec::with_capacity(k + 1);
    for index in 0..=k as u64 {
        validators.push(Validator {
            index,
            keypair: keygen::<S>(format!("bias-validator-{index}").as_bytes())?,
            weight: Weight::zero(),
            class: if index == 0 {
                ValidatorClass::Altruistic
            } else {
                ValidatorClass::Adversary
            },
            withdrawal: Address::for_validator(index),
            active: true,
        });
    }
    let set = ValidatorSet::new(validators, CommitteeSchedule::Explicit(BTreeMap::new()), spe);

    let epoch: Epoch = 0;
    let tail_start: Slot = spe - k as u64;
    let mut schedule = BTreeMap::new();
    for slot in 1..tail_start {
        schedule.insert(slot, 0u64);
    }
    for (i, slot) in (tail_start..spe).enumerate() {
        schedule.insert(slot, 1 + i as u64);
    }
    schedule.insert(spe, 0u64);
    let mut chain = SimChain::<S>::new(config.clone(), set, schedule);

    // The controlling proposer pre-commits every tail contribution and
    // opens the book; the deadline leaves room for the settlement proof.
    let contributions: Vec<(PublicKey<S>, Signature<S>)> = (0..k)
        .map(|i| {
            let v = 1 + i as u64;
            let pk = chain.validator(v).expect("registered").keypair.public.clone();
            let sig = chain.reveal_signature(v, epoch)?;
            Ok::<_, AttackError>((pk, sig))
        })
        .collect::<Result<_, _>>()?;
    let tail_hashes: Vec<[u8; 32]> = contributions
        .iter()
        .map(|(_, sig)| contribution_hash(&sig.to_bytes()))
        .collect();

    let seller = Address::new("seed-auctioneer");
    let mut market = PayToBias::<S>::new(seller.clone());
    let deadline = config.slot_start(spe + 2);
    market.offer_bias(&seller, epoch, contributions, deadline, &config)?;

    for bid in &plan.bids {
        market.place_bid(
            &Address::new(bid.bidder.clone()),
            epoch,
            bid.pattern.clone(),
            bid.amount_wei,
            chain.now(),
        )?;
    }

    // Honest blocks fill the epoch up to the tail.
    let mut parent = chain.genesis_root();
    for slot in 1..tail_start {
        chain.advance_to_slot_start(slot)?;
        parent = chain.propose(slot, 0, parent)?;
    }
    let pre_tail_tip = parent;

    // Enumerate outcomes from the pre-committed contributions alone —
    // nothing after this point adds information.
    let baseline = chain.seed_mix_on_branch(pre_tail_tip, epoch);
    let outcomes = randao_enumerate(baseline, &tail_hashes, ENUMERATION_CAP)?;

    let auction = market.auction(epoch).expect("auction just opened");
    let totals = auction.totals();
    let (winning, winning_total) = auction.winning_config();
    let rows: Vec<OutcomeRow> = outcomes
        .iter()
        .map(|(cfg, seed)| OutcomeRow {
            index: cfg.to_index(),
            pattern: cfg.bit_string(),
            seed: hex::encode(seed),
            total_bid_wei: totals.get(cfg).copied().unwrap_or(0),
        })
        .collect();
    let predicted_seed = outcomes
        .iter()
        .find(|(cfg, _)| *cfg == winning)
        .map(|(_, seed)| *seed)
        .expect("winning pattern is enumerated");

    // Execute the purchased pattern through the tail.
    for (i, slot) in (tail_start..spe).enumerate() {
        chain.advance_to_slot_start(slot)?;
        let proposer = 1 + i as u64;
        if let Some(root) = chain.propose_block(slot, proposer, parent, !winning.withholds(i))? {
            parent = root;
        }
    }

    // A next-epoch block brackets the tail so the proof can show where the
    // published run ends.
    chain.advance_to_slot_start(spe)?;
    chain.propose(spe, 0, parent)?;

    // Settle against the canonical header run from the last pre-tail
    // block through the bracketing block.
    let canonical = chain.canonical_chain();
    let start = canonical
        .iter()
        .position(|r| *r == pre_tail_tip)
        .expect("pre-tail tip stays canonical");
    let headers: Vec<BlockHeader> = canonical[start..]
        .iter()
        .map(|r| chain.header(r).expect("canonical block").clone())
        .collect();
    let payout_wei = market.take_bribe(epoch, &headers, &chain)?;

    let realized = chain.seed_mix(epoch);
    let refunds = market
        .refunds()
        .iter()
        .map(|(addr, amount)| (addr.to_string(), *amount))
        .collect();

    Ok(AuctionReport {
        epoch,
        k,
        tail_start_slot: tail_start,
        baseline_seed: hex::encode(baseline),
        rows,
        winning_pattern: winning.bit_string(),
        winning_total_wei: winning_total,
        payout_wei,
        refunds,
        realized_seed: hex::encode(realized),
        predicted_seed: hex::encode(predicted_seed),
        seed_matches_prediction: realized == predicted_seed,
        escrow_conserved: market.conservation_holds(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::mock::MockSuite;
    use crate::types::WEI_PER_GWEI;

    fn bid(bidder: &str, bits: &str, gwei: Wei) -> PlannedBid {
        PlannedBid {
            bidder: bidder.into(),
            pattern: TailConfig::parse_bits(bits).expect("valid bits"),
            amount_wei: gwei * WEI_PER_GWEI,
        }
    }

    #[test]
    fn empty_tail_enumerates_only_the_baseline() {
        let baseline = [7u8; 32];
        let rows = randao_enumerate(baseline, &[], 20).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].0, TailConfig::publish_all(0));
        assert_eq!(rows[0].1, baseline);
    }

    #[test]
    fn single_slot_tail_xors_by_hand() {
        let baseline = [0x0fu8; 32];
        let hash = [0xf0u8; 32];
        let rows = randao_enumerate(baseline, &[hash], 20).unwrap();
        assert_eq!(rows.len(), 2);
        // Pattern "0" publishes: baseline ^ hash. Pattern "1" withholds.
        assert_eq!(rows[0].0.bit_string(), "0");
        assert_eq!(rows[0].1, [0xffu8; 32]);
        assert_eq!(rows[1].0.bit_string(), "1");
        assert_eq!(rows[1].1, baseline);
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let hashes = vec![[0u8; 32]; 5];
        assert!(matches!(
            randao_enumerate([0u8; 32], &hashes, 4),
            Err(AttackError::EnumerationCapExceeded { k: 5, cap: 4 })
        ));
    }

    /// Oracle: execute every withholding pattern on its own chain and
    /// compare the realized seed against the enumeration.
    #[test]
    fn enumeration_matches_exhaustive_replay_for_three_slots() {
        let k = 3usize;
        let config = ChainConfig::default();
        let spe = config.slots_per_epoch;
        let build = |withhold: &TailConfig| -> [u8; 32] {
            let mut validators = Vec::new();
            for index in 0..=k as u64 {
                validators.push(Validator {
                    index,
                    keypair: keygen::<MockSuite>(format!("bias-validator-{index}").as_bytes())
                        .unwrap(),
                    weight: Weight::zero(),
                    class: ValidatorClass::Adversary,
                    withdrawal: Address::for_validator(index),
                    active: true,
                });
            }
            let set = ValidatorSet::new(
                validators,
                CommitteeSchedule::Explicit(BTreeMap::new()),
                spe,
            );
            let tail_start = spe - k as u64;
            let mut schedule = BTreeMap::new();
            for slot in 1..tail_start {
                schedule.insert(slot, 0u64);
            }
            for (i, slot) in (tail_start..spe).enumerate() {
                schedule.insert(slot, 1 + i as u64);
            }
            let mut chain = SimChain::<MockSuite>::new(config.clone(), set, schedule);
            let mut parent = chain.genesis_root();
            for slot in 1..tail_start {
                chain.advance_to_slot_start(slot).unwrap();
                parent = chain.propose(slot, 0, parent).unwrap();
            }
            for (i, slot) in (tail_start..spe).enumerate() {
                chain.advance_to_slot_start(slot).unwrap();
                if let Some(root) = chain
                    .propose_block(slot, 1 + i as u64, parent, !withhold.withholds(i))
                    .unwrap()
                {
                    parent = root;
                }
            }
            chain.seed_mix_on_branch(parent, 0)
        };

        // Enumerate from a planning chain that never executes the tail.
        let planning: [u8; 32] = build(&TailConfig::from_index((1 << k) as u64 - 1, k));
        // Withholding everything leaves exactly the pre-tail baseline.
        let baseline = planning;
        let hashes: Vec<[u8; 32]> = (0..k)
            .map(|i| {
                let kp =
                    keygen::<MockSuite>(format!("bias-validator-{}", 1 + i).as_bytes()).unwrap();
                let sig = crate::crypto::sign::<MockSuite>(
                    &kp.secret,
                    &crate::chain::randao_epoch_bytes(0),
                )
                .unwrap();
                contribution_hash(&sig.to_bytes())
            })
            .collect();
        let rows = randao_enumerate(baseline, &hashes, 20).unwrap();
        assert_eq!(rows.len(), 8);
        for (cfg, predicted) in &rows {
            let realized = build(cfg);
            assert_eq!(
                realized,
                *predicted,
                "replay disagrees with enumeration at pattern {}",
                cfg.bit_string()
            );
        }
        // All eight seeds are distinct (contributions do not cancel).
        let mut seeds: Vec<[u8; 32]> = rows.iter().map(|(_, s)| *s).collect();
        seeds.sort();
        seeds.dedup();
        assert_eq!(seeds.len(), 8);
    }

    #[test]
    fn auction_pays_exactly_the_winning_total_and_refunds_losers() {
        let plan = BiasPlan {
            k: 2,
            bids: vec![
                bid("alice", "10", 100),
                bid("bob", "01", 80),
                bid("carol", "10", 50),
            ],
        };
        let report = run_bias_auction::<MockSuite>(&plan).unwrap();

        assert_eq!(report.winning_pattern, "10");
        assert_eq!(report.winning_total_wei, 150 * WEI_PER_GWEI);
        assert_eq!(report.payout_wei, 150 * WEI_PER_GWEI);
        assert_eq!(report.refunds, vec![("bob".to_string(), 80 * WEI_PER_GWEI)]);
        assert!(report.seed_matches_prediction);
        assert!(report.escrow_conserved);
        assert_eq!(report.rows.len(), 4);
        assert_eq!(report.tail_start_slot, 30);
        // Rows carry the bid totals.
        let by_pattern: BTreeMap<&str, Wei> = report
            .rows
            .iter()
            .map(|r| (r.pattern.as_str(), r.total_bid_wei))
            .collect();
        assert_eq!(by_pattern["10"], 150 * WEI_PER_GWEI);
        assert_eq!(by_pattern["01"], 80 * WEI_PER_GWEI);
        assert_eq!(by_pattern["00"], 0);
        assert_eq!(by_pattern["11"], 0);
    }

    #[test]
    fn tied_totals_buy_the_smaller_pattern() {
        let plan = BiasPlan {
            k: 2,
            bids: vec![bid("alice", "11", 90), bid("bob", "00", 90)],
        };
        let report = run_bias_auction::<MockSuite>(&plan).unwrap();
        assert_eq!(report.winning_pattern, "00");
        assert_eq!(report.payout_wei, 90 * WEI_PER_GWEI);
        assert!(report.seed_matches_prediction);
    }

    #[test]
    fn full_withholding_realizes_the_baseline_seed() {
        let plan = BiasPlan {
            k: 3,
            bids: vec![bid("alice", "111", 25)],
        };
        let report = run_bias_auction::<MockSuite>(&plan).unwrap();
        assert_eq!(report.winning_pattern, "111");
        assert_eq!(report.realized_seed, report.baseline_seed);
        assert!(report.seed_matches_prediction);
    }

    #[test]
    fn plan_validation_rejects_degenerate_inputs() {
        let no_bids = BiasPlan { k: 2, bids: vec![] };
        assert!(matches!(
            run_bias_auction::<MockSuite>(&no_bids),
            Err(AttackError::NoBids)
        ));
        let zero_tail = BiasPlan {
            k: 0,
            bids: vec![PlannedBid {
                bidder: "alice".into(),
                pattern: TailConfig::publish_all(0),
                amount_wei: WEI_PER_GWEI,
            }],
        };
        assert!(matches!(
            run_bias_auction::<MockSuite>(&zero_tail),
            Err(AttackError::TailDoesNotFit { k: 0, .. })
        ));
        let oversized = BiasPlan {
            k: 32,
            bids: vec![bid("alice", "1", 1)],
        };
        assert!(matches!(
            run_bias_auction::<MockSuite>(&oversized),
            Err(AttackError::TailDoesNotFit { k: 32, .. })
        ));
    }
}
