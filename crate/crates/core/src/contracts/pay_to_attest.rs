//! A contract that pays for attestations.
//!
//! The briber opens an offer naming the signer set (as an aggregate public
//! key), the exact attestation payload wanted — or, in the open variant,
//! a proposer key so that *any* attestation to one of that proposer's
//! blocks qualifies — and a claim deadline. The offered amount is
//! encumbered at creation, so a valid claim can never bounce. A claim is a
//! single aggregate signature; the contract verifies it with two pairing
//! evaluations regardless of how many validators signed, pays once, and
//! marks the offer spent.

use crate::chain::{randao_epoch_bytes, AttestationData, BlockHeader, ChainConfig};
use crate::crypto::{
    aggregate_public_keys, verify, verify_aggregate, AggregatePublicKey, AggregateSignature,
    PairingSuite, PublicKey, Signature,
};
use crate::types::{Address, Wei};

use super::{ContractError, Escrow, EscrowSnapshot};

/// What a claimant must demonstrate to collect.
#[derive(Debug, Clone)]
pub enum OfferTerms<S: PairingSuite> {
    /// The signers must have signed exactly this byte string (normally
    /// [`AttestationData::signing_bytes`] of an agreed attestation).
    FixedMessage {
        /// Message the aggregate signature must cover.
        message: Vec<u8>,
    },
    /// The signers must have attested to a block provably produced by the
    /// holder of this key — established from the block's seed reveal, which
    /// only that key can produce. The claim carries the block header.
    AnyBlockByProposer {
        /// Validator key of the paying proposer.
        proposer_key: PublicKey<S>,
    },
}

/// Everything a claimant presents against an
/// [`OfferTerms::AnyBlockByProposer`] offer.
#[derive(Debug, Clone)]
pub struct OpenClaim<S: PairingSuite> {
    /// The attestation the signer set produced.
    pub attestation: AttestationData,
    /// Full header of the attested block (hashes to `attestation.head`).
    pub header: BlockHeader,
    /// Aggregate signature by every offer signer over the attestation.
    pub signature: AggregateSignature<S>,
}

/// One open or spent offer.
#[derive(Debug, Clone)]
pub struct AttestOffer<S: PairingSuite> {
    /// Identifier returned at creation.
    pub id: u64,
    /// Wei paid on a successful claim.
    pub amount: Wei,
    /// Claims must arrive strictly before this time.
    pub deadline: u64,
    /// Aggregate key of the expected signer set.
    pub signers: AggregatePublicKey<S>,
    /// How many keys went into `signers` (informational).
    pub signer_count: usize,
    /// What must be signed.
    pub terms: OfferTerms<S>,
    /// Spent flag: set on payout or on reclaim of an expired offer.
    pub claimed: bool,
}

/// Attestation-bribery contract: escrow plus a list of offers.
///
/// Possession of the signatures is the entitlement: a claim pays whoever
/// presents it, so the payout log records the presenting address.
#[derive(Debug, Clone)]
pub struct PayToAttest<S: PairingSuite> {
    escrow: Escrow,
    offers: Vec<AttestOffer<S>>,
    payouts: Vec<(u64, Address, Wei)>,
}

impl<S: PairingSuite> PayToAttest<S> {
    /// New contract owned by `owner`, with an empty escrow.
    pub fn new(owner: Address) -> Self {
        PayToAttest {
            escrow: Escrow::new(owner),
            offers: Vec::new(),
            payouts: Vec::new(),
        }
    }

    /// Payout log: (offer id, presenting address, amount).
    pub fn payouts(&self) -> &[(u64, Address, Wei)] {
        &self.payouts
    }

    /// Owner funds the escrow.
    pub fn deposit(&mut self, caller: &Address, amount: Wei) -> Result<(), ContractError> {
        self.escrow.deposit(caller, amount)
    }

    /// Owner withdraws free funds.
    pub fn withdraw(&mut self, caller: &Address, amount: Wei) -> Result<(), ContractError> {
        self.escrow.withdraw(caller, amount)
    }

    /// Owner sets the amount future offers will pay.
    pub fn set_bribe_amount(
        &mut self,
        caller: &Address,
        amount: Wei,
    ) -> Result<(), ContractError> {
        self.escrow.set_bribe_amount(caller, amount)
    }

    /// Escrow state (read-only).
    pub fn escrow(&self) -> &Escrow {
        &self.escrow
    }

    /// Balance snapshot for logging.
    pub fn snapshot(&self) -> EscrowSnapshot {
        self.escrow.snapshot()
    }

    /// Offers created so far.
    pub fn offers(&self) -> &[AttestOffer<S>] {
        &self.offers
    }

    /// Owner opens an offer to the validators holding `signer_keys`,
    /// encumbering the current bribe amount. Returns the offer id.
    pub fn offer_bribe(
        &mut self,
        caller: &Address,
        signer_keys: &[PublicKey<S>],
        terms: OfferTerms<S>,
        deadline: u64,
    ) -> Result<u64, ContractError> {
        self.escrow.require_owner(caller)?;
        let signers = aggregate_public_keys(signer_keys)?;
        let amount = self.escrow.bribe_amount();
        self.escrow.encumber(amount)?;
        let id = self.offers.len() as u64;
        self.offers.push(AttestOffer {
            id,
            amount,
            deadline,
            signers,
            signer_count: signer_keys.len(),
            terms,
            claimed: false,
        });
        Ok(id)
    }

    fn open_offer_mut(
        offers: &mut [AttestOffer<S>],
        id: u64,
        now: u64,
    ) -> Result<&mut AttestOffer<S>, ContractError> {
        let offer = offers
            .get_mut(id as usize)
            .ok_or(ContractError::UnknownOffer { id })?;
        if offer.claimed {
            return Err(ContractError::AlreadyClaimed { id });
        }
        if now >= offer.deadline {
            return Err(ContractError::OfferExpired {
                deadline: offer.deadline,
                now,
            });
        }
        Ok(offer)
    }

    /// Claim a fixed-message offer with one aggregate signature over the
    /// agreed message. Pays the offer amount, once, to the presenter.
    pub fn take_bribe(
        &mut self,
        caller: &Address,
        id: u64,
        signature: &AggregateSignature<S>,
        now: u64,
    ) -> Result<Wei, ContractError> {
        let offer = Self::open_offer_mut(&mut self.offers, id, now)?;
        let message = match &offer.terms {
            OfferTerms::FixedMessage { message } => message.clone(),
            OfferTerms::AnyBlockByProposer { .. } => {
                return Err(ContractError::ClaimTermsMismatch)
            }
        };
        if !verify_aggregate(&offer.signers, &message, signature) {
            return Err(ContractError::InvalidSignature);
        }
        offer.claimed = true;
        let amount = offer.amount;
        self.escrow.pay_out(amount);
        self.payouts.push((id, caller.clone(), amount));
        Ok(amount)
    }

    /// Claim an open offer: present the attestation, the header of the
    /// attested block, and the aggregate signature. The header must hash to
    /// the attested root, sit at the slot its timestamp implies, and carry
    /// a seed reveal that verifies under the offering proposer's key for
    /// that slot's epoch — which no one else could have produced.
    pub fn take_bribe_open(
        &mut self,
        caller: &Address,
        id: u64,
        claim: &OpenClaim<S>,
        now: u64,
        protocol: &ChainConfig,
    ) -> Result<Wei, ContractError> {
        let offer = Self::open_offer_mut(&mut self.offers, id, now)?;
        let proposer_key = match &offer.terms {
            OfferTerms::AnyBlockByProposer { proposer_key } => proposer_key.clone(),
            OfferTerms::FixedMessage { .. } => return Err(ContractError::ClaimTermsMismatch),
        };
        if claim.header.root() != claim.attestation.head {
            return Err(ContractError::WrongBlockCommitment);
        }
        if protocol.slot_start(claim.header.slot) != claim.header.timestamp {
            return Err(ContractError::TimestampMismatch {
                slot: claim.header.slot,
                timestamp: claim.header.timestamp,
            });
        }
        let reveal = Signature::<S>::from_hex(&claim.header.randao_reveal)?;
        let epoch_message = randao_epoch_bytes(protocol.epoch_of(claim.header.slot));
        if !verify(&proposer_key, &epoch_message, &reveal) {
            return Err(ContractError::NotBriberBlock);
        }
        if !verify_aggregate(&offer.signers, &claim.attestation.signing_bytes(), &claim.signature)
        {
            return Err(ContractError::InvalidSignature);
        }
        offer.claimed = true;
        let amount = offer.amount;
        self.escrow.pay_out(amount);
        self.payouts.push((id, caller.clone(), amount));
        Ok(amount)
    }

    /// Owner releases the encumbrance of an offer whose deadline passed
    /// unclaimed. The offer is dead afterwards.
    pub fn reclaim_expired(
        &mut self,
        caller: &Address,
        id: u64,
        now: u64,
    ) -> Result<Wei, ContractError> {
        self.escrow.require_owner(caller)?;
        let offer = self
            .offers
            .get_mut(id as usize)
            .ok_or(ContractError::UnknownOffer { id })?;
        if offer.claimed {
            return Err(ContractError::AlreadyClaimed { id });
        }
        if now < offer.deadline {
            return Err(ContractError::RefundTooEarly {
                deadline: offer.deadline,
                now,
            });
        }
        offer.claimed = true;
        let amount = offer.amount;
        self.escrow.release(amount);
        Ok(amount)
    }

    /// The escrow books balance.
    pub fn conservation_holds(&self) -> bool {
        self.escrow.conservation_holds()
    }

    /// Amount a given offer pays.
    pub fn offer_amount(&self, id: u64) -> Option<Wei> {
        self.offers.get(id as usize).map(|o| o.amount)
    }

    /// Whether the offer has been spent.
    pub fn is_claimed(&self, id: u64) -> Option<bool> {
        self.offers.get(id as usize).map(|o| o.claimed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{BlockRoot, Checkpoint};
    use crate::crypto::mock::MockSuite;
    use crate::crypto::{aggregate_signatures, keygen, sign, KeyPair};

    fn owner() -> Address {
        Address::new("briber")
    }

    fn claimer() -> Address {
        Address::new("claimer")
    }

    fn keys(n: usize) -> Vec<KeyPair<MockSuite>> {
        (0..n)
            .map(|i| keygen::<MockSuite>(format!("signer-{i}").as_bytes()).unwrap())
            .collect()
    }

    fn sample_attestation() -> AttestationData {
        AttestationData {
            slot: 5,
            head: BlockRoot([7; 32]),
            source: Checkpoint {
                epoch: 0,
                root: BlockRoot([1; 32]),
            },
            target: Checkpoint {
                epoch: 0,
                root: BlockRoot([1; 32]),
            },
        }
    }

    fn funded_contract(amount: Wei) -> PayToAttest<MockSuite> {
        let mut c = PayToAttest::new(owner());
        c.deposit(&owner(), amount * 10).unwrap();
        c.set_bribe_amount(&owner(), amount).unwrap();
        c
    }

    fn signed_claim(
        signers: &[KeyPair<MockSuite>],
        message: &[u8],
    ) -> AggregateSignature<MockSuite> {
        let sigs: Vec<_> = signers
            .iter()
            .map(|kp| sign(&kp.secret, message).unwrap())
            .collect();
        aggregate_signatures(&sigs).unwrap()
    }

    #[test]
    fn fixed_message_claim_pays_once() {
        let signers = keys(3);
        let pks: Vec<_> = signers.iter().map(|k| k.public.clone()).collect();
        let mut c = funded_contract(1_000);
        let att = sample_attestation();
        let id = c
            .offer_bribe(
                &owner(),
                &pks,
                OfferTerms::FixedMessage {
                    message: att.signing_bytes(),
                },
                100,
            )
            .unwrap();
        assert_eq!(c.escrow().encumbered(), 1_000);

        let agg = signed_claim(&signers, &att.signing_bytes());
        assert_eq!(c.take_bribe(&claimer(), id, &agg, 40), Ok(1_000));
        assert_eq!(c.escrow().balance(), 9_000);
        assert_eq!(c.escrow().encumbered(), 0);
        assert_eq!(
            c.take_bribe(&claimer(), id, &agg, 41),
            Err(ContractError::AlreadyClaimed { id })
        );
        assert!(c.conservation_holds());
    }

    #[test]
    fn deadline_is_strict() {
        let signers = keys(2);
        let pks: Vec<_> = signers.iter().map(|k| k.public.clone()).collect();
        let mut c = funded_contract(10);
        let att = sample_attestation();
        let id = c
            .offer_bribe(
                &owner(),
                &pks,
                OfferTerms::FixedMessage {
                    message: att.signing_bytes(),
                },
                100,
            )
            .unwrap();
        let agg = signed_claim(&signers, &att.signing_bytes());
        assert_eq!(
            c.take_bribe(&claimer(), id, &agg, 100),
            Err(ContractError::OfferExpired {
                deadline: 100,
                now: 100
            })
        );
        // One second earlier is accepted.
        assert_eq!(c.take_bribe(&claimer(), id, &agg, 99), Ok(10));
    }

    #[test]
    fn rejection_precedence_unknown_then_replay_then_expiry_then_signature() {
        let signers = keys(2);
        let pks: Vec<_> = signers.iter().map(|k| k.public.clone()).collect();
        let mut c = funded_contract(10);
        let att = sample_attestation();
        let id = c
            .offer_bribe(
                &owner(),
                &pks,
                OfferTerms::FixedMessage {
                    message: att.signing_bytes(),
                },
                100,
            )
            .unwrap();
        let good = signed_claim(&signers, &att.signing_bytes());
        let bad = signed_claim(&signers, b"some other message");

        assert_eq!(
            c.take_bribe(&claimer(), 77, &good, 10),
            Err(ContractError::UnknownOffer { id: 77 })
        );
        // A bad signature leaves the offer claimable.
        assert_eq!(c.take_bribe(&claimer(), id, &bad, 10), Err(ContractError::InvalidSignature));
        assert_eq!(c.is_claimed(id), Some(false));
        // After expiry the signature is not even examined.
        assert_eq!(
            c.take_bribe(&claimer(), id, &good, 200),
            Err(ContractError::OfferExpired {
                deadline: 100,
                now: 200
            })
        );
        // Claim with the good signature in time, then replay.
        assert_eq!(c.take_bribe(&claimer(), id, &good, 50), Ok(10));
        assert_eq!(
            c.take_bribe(&claimer(), id, &bad, 60),
            Err(ContractError::AlreadyClaimed { id })
        );
    }

    #[test]
    fn partial_signer_sets_are_rejected() {
        let signers = keys(3);
        let pks: Vec<_> = signers.iter().map(|k| k.public.clone()).collect();
        let mut c = funded_contract(10);
        let att = sample_attestation();
        let id = c
            .offer_bribe(
                &owner(),
                &pks,
                OfferTerms::FixedMessage {
                    message: att.signing_bytes(),
                },
                100,
            )
            .unwrap();
        // Only two of the three promised validators sign.
        let agg = signed_claim(&signers[..2], &att.signing_bytes());
        assert_eq!(c.take_bribe(&claimer(), id, &agg, 10), Err(ContractError::InvalidSignature));
    }

    #[test]
    fn offers_need_free_escrow() {
        let signers = keys(1);
        let pks: Vec<_> = signers.iter().map(|k| k.public.clone()).collect();
        let mut c = PayToAttest::<MockSuite>::new(owner());
        c.deposit(&owner(), 15).unwrap();
        c.set_bribe_amount(&owner(), 10).unwrap();
        let msg = b"m".to_vec();
        c.offer_bribe(
            &owner(),
            &pks,
            OfferTerms::FixedMessage { message: msg.clone() },
            100,
        )
        .unwrap();
        assert_eq!(
            c.offer_bribe(&owner(), &pks, OfferTerms::FixedMessage { message: msg }, 100),
            Err(ContractError::InsufficientEscrow {
                needed: 10,
                available: 5
            })
        );
    }

    #[test]
    fn expired_offers_release_their_encumbrance() {
        let signers = keys(1);
        let pks: Vec<_> = signers.iter().map(|k| k.public.clone()).collect();
        let mut c = funded_contract(10);
        let id = c
            .offer_bribe(
                &owner(),
                &pks,
                OfferTerms::FixedMessage { message: b"m".to_vec() },
                100,
            )
            .unwrap();
        assert_eq!(
            c.reclaim_expired(&owner(), id, 99),
            Err(ContractError::RefundTooEarly {
                deadline: 100,
                now: 99
            })
        );
        assert_eq!(c.reclaim_expired(&owner(), id, 100), Ok(10));
        assert_eq!(c.escrow().encumbered(), 0);
        assert_eq!(c.escrow().balance(), 100);
        assert_eq!(
            c.reclaim_expired(&owner(), id, 101),
            Err(ContractError::AlreadyClaimed { id })
        );
        assert!(c.conservation_holds());
    }

    #[test]
    fn open_variant_pays_for_any_block_by_the_proposer() {
        use crate::chain::{ChainConfig, SimChain};
        use crate::chain::{CommitteeSchedule, Validator, ValidatorClass, ValidatorSet};
        use crate::types::weight;
        use std::collections::BTreeMap;

        // Two proposers (0 = briber, 1 = honest) and two attesters.
        let mut validators = Vec::new();
        for i in 0..4u64 {
            validators.push(Validator::<MockSuite> {
                index: i,
                keypair: keygen(format!("v-{i}").as_bytes()).unwrap(),
                weight: weight(1, 4),
                class: ValidatorClass::Altruistic,
                withdrawal: Address::for_validator(i),
                active: true,
            });
        }
        let mut committees = BTreeMap::new();
        committees.insert(1u64, vec![2u64, 3]);
        committees.insert(2u64, vec![2u64, 3]);
        let schedule = CommitteeSchedule::Explicit(committees);
        let vset = ValidatorSet::new(validators, schedule, 32);
        let mut schedule_map = BTreeMap::new();
        schedule_map.insert(1u64, 0u64); // briber proposes slot 1
        schedule_map.insert(2u64, 1u64); // honest proposes slot 2
        let config = ChainConfig::default();
        let mut chain = SimChain::new(config.clone(), vset, schedule_map);
        let genesis = chain.genesis_root();

        chain.advance_to_slot_start(1).unwrap();
        let briber_block = chain.propose(1, 0, genesis).unwrap();
        chain.advance_to_slot_start(2).unwrap();
        let honest_block = chain.propose(2, 1, briber_block).unwrap();

        let briber_pk = chain.validator(0).unwrap().keypair.public.clone();
        let attester_keys: Vec<KeyPair<MockSuite>> = vec![
            chain.validator(2).unwrap().keypair.clone(),
            chain.validator(3).unwrap().keypair.clone(),
        ];
        let pks: Vec<_> = attester_keys.iter().map(|k| k.public.clone()).collect();

        let mut c = funded_contract(500);
        let id = c
            .offer_bribe(
                &owner(),
                &pks,
                OfferTerms::AnyBlockByProposer {
                    proposer_key: briber_pk,
                },
                1_000,
            )
            .unwrap();

        // Attestation to the briber's block: pays.
        let att = chain.attestation_data_for(1, briber_block).unwrap();
        let header = chain.header(&briber_block).unwrap().clone();
        let agg = signed_claim(&attester_keys, &att.signing_bytes());
        let claim = OpenClaim {
            attestation: att,
            header: header.clone(),
            signature: agg,
        };
        assert_eq!(c.take_bribe_open(&claimer(), id, &claim, 30, &config), Ok(500));

        // Second offer; attestation to the honest block must not pay.
        let id2 = c
            .offer_bribe(
                &owner(),
                &pks,
                OfferTerms::AnyBlockByProposer {
                    proposer_key: chain.validator(0).unwrap().keypair.public.clone(),
                },
                1_000,
            )
            .unwrap();
        let att2 = chain.attestation_data_for(2, honest_block).unwrap();
        let header2 = chain.header(&honest_block).unwrap().clone();
        let agg2 = signed_claim(&attester_keys, &att2.signing_bytes());
        let honest_claim = OpenClaim {
            attestation: att2.clone(),
            header: header2,
            signature: agg2.clone(),
        };
        assert_eq!(
            c.take_bribe_open(&claimer(), id2, &honest_claim, 40, &config),
            Err(ContractError::NotBriberBlock)
        );

        // Mismatched header/attestation pair.
        let mismatched = OpenClaim {
            attestation: att2,
            header,
            signature: agg2.clone(),
        };
        assert_eq!(
            c.take_bribe_open(&claimer(), id2, &mismatched, 41, &config),
            Err(ContractError::WrongBlockCommitment)
        );

        // Fixed-style claim against an open offer is a terms mismatch.
        assert_eq!(
            c.take_bribe(&claimer(), id2, &agg2, 42),
            Err(ContractError::ClaimTermsMismatch)
        );
        assert!(c.conservation_holds());
    }
}
