//! A contract that pays validators to leave the stake.
//!
//! The briber arms a standing offer: any validator who can prove deposit
//! membership (a leaf proof of its public key against the chain's deposit
//! accumulator) and present a signed voluntary-exit message for an epoch at
//! or after the offer was armed gets the current bribe amount, paid to the
//! validator's registered withdrawal address — not to whoever submitted the
//! claim. Each validator index collects at most once.

use std::collections::BTreeSet;
use std::marker::PhantomData;

use crate::chain::{voluntary_exit_bytes, Epoch};
use crate::crypto::merkle::{verify_proof, MerkleProof};
use crate::crypto::{verify, PairingSuite, PublicKey, Signature};
use crate::types::{Address, Wei};

use super::{BeaconReader, ContractError, Escrow, EscrowSnapshot};

/// The standing offer: exits signed for epochs before `min_exit_epoch`
/// (i.e. exits that were already on their way) do not qualify.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExitOffer {
    /// Earliest exit epoch the offer pays for.
    pub min_exit_epoch: Epoch,
}

/// Everything a claimant submits.
#[derive(Debug, Clone)]
pub struct ExitClaim<S: PairingSuite> {
    /// Claiming validator index (the deposit-tree leaf position).
    pub validator: u64,
    /// Epoch named in the signed exit message.
    pub exit_epoch: Epoch,
    /// The validator's public key (checked against the deposit root).
    pub public_key: PublicKey<S>,
    /// Signature over the voluntary-exit message.
    pub signature: Signature<S>,
    /// Membership proof of `public_key` at leaf `validator`.
    pub proof: MerkleProof,
}

/// Exit-bribery contract.
#[derive(Debug, Clone)]
pub struct PayToExit<S: PairingSuite> {
    escrow: Escrow,
    offer: Option<ExitOffer>,
    claimed: BTreeSet<u64>,
    payouts: Vec<(u64, Address, Wei)>,
    _suite: PhantomData<S>,
}

impl<S: PairingSuite> PayToExit<S> {
    /// New contract owned by `owner`.
    pub fn new(owner: Address) -> Self {
        PayToExit {
            escrow: Escrow::new(owner),
            offer: None,
            claimed: BTreeSet::new(),
            payouts: Vec::new(),
            _suite: PhantomData,
        }
    }

    /// Owner funds the escrow.
    pub fn deposit(&mut self, caller: &Address, amount: Wei) -> Result<(), ContractError> {
        self.escrow.deposit(caller, amount)
    }

    /// Owner withdraws free funds.
    pub fn withdraw(&mut self, caller: &Address, amount: Wei) -> Result<(), ContractError> {
        self.escrow.withdraw(caller, amount)
    }

    /// Owner sets the per-exit payment.
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

    /// The standing offer, if armed.
    pub fn offer(&self) -> Option<ExitOffer> {
        self.offer
    }

    /// Validator indices that already collected.
    pub fn claimed(&self) -> &BTreeSet<u64> {
        &self.claimed
    }

    /// Payout log: (validator, withdrawal address, amount).
    pub fn payouts(&self) -> &[(u64, Address, Wei)] {
        &self.payouts
    }

    /// The escrow books balance.
    pub fn conservation_holds(&self) -> bool {
        self.escrow.conservation_holds()
    }

    /// Owner arms (or re-arms) the offer. Exits must be signed for
    /// `min_exit_epoch` or later to qualify.
    pub fn exit_offer(
        &mut self,
        caller: &Address,
        min_exit_epoch: Epoch,
    ) -> Result<(), ContractError> {
        self.escrow.require_owner(caller)?;
        self.offer = Some(ExitOffer { min_exit_epoch });
        Ok(())
    }

    /// Claim the bribe. Checks, in order: an offer is armed; this validator
    /// has not claimed; the key belongs to the deposit set at the claimed
    /// index; the exit epoch is fresh; the exit message is signed by that
    /// key; the escrow can pay. Pays the validator's withdrawal address and
    /// returns (amount, recipient).
    pub fn take_bribe(
        &mut self,
        claim: &ExitClaim<S>,
        reader: &impl BeaconReader,
    ) -> Result<(Wei, Address), ContractError> {
        let offer = self.offer.ok_or(ContractError::NoActiveOffer)?;
        if self.claimed.contains(&claim.validator) {
            return Err(ContractError::DoubleExitClaim {
                validator: claim.validator,
            });
        }
        let deposit_root = reader.deposit_root();
        if !verify_proof(
            &deposit_root,
            &claim.public_key.to_bytes(),
            claim.validator as usize,
            &claim.proof,
        ) {
            return Err(ContractError::InvalidMerkleProof {
                validator: claim.validator,
            });
        }
        if claim.exit_epoch < offer.min_exit_epoch {
            return Err(ContractError::StaleExitEpoch {
                exit_epoch: claim.exit_epoch,
                required: offer.min_exit_epoch,
            });
        }
        let message = voluntary_exit_bytes(claim.exit_epoch, claim.validator);
        if !verify(&claim.public_key, &message, &claim.signature) {
            return Err(ContractError::InvalidSignature);
        }
        let recipient = reader
            .withdrawal_address(claim.validator)
            .ok_or(ContractError::UnknownWithdrawalAddress {
                validator: claim.validator,
            })?;
        let amount = self.escrow.bribe_amount();
        self.escrow.encumber(amount)?;
        self.escrow.pay_out(amount);
        self.claimed.insert(claim.validator);
        self.payouts.push((claim.validator, recipient.clone(), amount));
        Ok((amount, recipient))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{
        ChainConfig, CommitteeSchedule, SimChain, Validator, ValidatorClass, ValidatorSet,
    };
    use crate::crypto::keygen;
    use crate::crypto::mock::MockSuite;
    use crate::types::weight;
    use std::collections::BTreeMap;

    fn owner() -> Address {
        Address::new("briber")
    }

    fn chain(n: u64) -> SimChain<MockSuite> {
        let validators: Vec<_> = (0..n)
            .map(|i| Validator {
                index: i,
                keypair: keygen(format!("v-{i}").as_bytes()).unwrap(),
                weight: weight(1, n as i128),
                class: ValidatorClass::Rational,
                withdrawal: Address::for_validator(i),
                active: true,
            })
            .collect();
        let vset = ValidatorSet::new(validators, CommitteeSchedule::RoundRobin, 32);
        SimChain::new(ChainConfig::default(), vset, BTreeMap::new())
    }

    fn funded(amount: Wei) -> PayToExit<MockSuite> {
        let mut c = PayToExit::new(owner());
        c.deposit(&owner(), amount * 100).unwrap();
        c.set_bribe_amount(&owner(), amount).unwrap();
        c
    }

    fn claim_for(chain: &SimChain<MockSuite>, validator: u64, exit_epoch: Epoch) -> ExitClaim<MockSuite> {
        let kp = chain.validator(validator).unwrap().keypair.clone();
        let tree = chain.validators().deposit_tree();
        let proof = tree.prove(&kp.public.to_bytes(), validator as usize).unwrap();
        let signature = crate::crypto::sign(
            &kp.secret,
            &voluntary_exit_bytes(exit_epoch, validator),
        )
        .unwrap();
        ExitClaim {
            validator,
            exit_epoch,
            public_key: kp.public,
            signature,
            proof,
        }
    }

    #[test]
    fn valid_claim_pays_the_withdrawal_address_once() {
        let ch = chain(8);
        let mut c = funded(1_000);
        c.exit_offer(&owner(), 3).unwrap();
        let claim = claim_for(&ch, 5, 4);
        let (amount, recipient) = c.take_bribe(&claim, &ch).unwrap();
        assert_eq!(amount, 1_000);
        assert_eq!(recipient, Address::for_validator(5));
        assert_eq!(
            c.take_bribe(&claim, &ch),
            Err(ContractError::DoubleExitClaim { validator: 5 })
        );
        assert!(c.conservation_holds());
        assert_eq!(c.escrow().balance(), 99_000);
    }

    #[test]
    fn claims_need_an_armed_offer() {
        let ch = chain(4);
        let mut c = funded(10);
        let claim = claim_for(&ch, 0, 1);
        assert_eq!(c.take_bribe(&claim, &ch), Err(ContractError::NoActiveOffer));
    }

    #[test]
    fn stale_exit_epochs_are_rejected() {
        let ch = chain(4);
        let mut c = funded(10);
        c.exit_offer(&owner(), 5).unwrap();
        let claim = claim_for(&ch, 1, 4);
        assert_eq!(
            c.take_bribe(&claim, &ch),
            Err(ContractError::StaleExitEpoch {
                exit_epoch: 4,
                required: 5
            })
        );
        // Same validator with a fresh enough epoch still collects: the
        // rejection did not consume the claim slot.
        let fresh = claim_for(&ch, 1, 5);
        assert!(c.take_bribe(&fresh, &ch).is_ok());
    }

    #[test]
    fn forged_membership_is_rejected() {
        let ch = chain(4);
        let mut c = funded(10);
        c.exit_offer(&owner(), 0).unwrap();

        // Claim validator 2's slot with validator 3's key and proof.
        let intruder = claim_for(&ch, 3, 1);
        let forged = ExitClaim {
            validator: 2,
            ..intruder.clone()
        };
        assert_eq!(
            c.take_bribe(&forged, &ch),
            Err(ContractError::InvalidMerkleProof { validator: 2 })
        );

        // Proof for the right leaf but a mismatched key.
        let mut wrong_key = claim_for(&ch, 2, 1);
        wrong_key.public_key = intruder.public_key.clone();
        assert_eq!(
            c.take_bribe(&wrong_key, &ch),
            Err(ContractError::InvalidMerkleProof { validator: 2 })
        );
    }

    #[test]
    fn wrong_signature_is_rejected() {
        let ch = chain(4);
        let mut c = funded(10);
        c.exit_offer(&owner(), 0).unwrap();
        let mut claim = claim_for(&ch, 2, 3);
        // Signed for a different epoch than the claim states.
        claim.signature = crate::crypto::sign(
            &ch.validator(2).unwrap().keypair.secret,
            &voluntary_exit_bytes(9, 2),
        )
        .unwrap();
        assert_eq!(c.take_bribe(&claim, &ch), Err(ContractError::InvalidSignature));
    }

    #[test]
    fn underfunded_escrow_refuses_to_pay() {
        let ch = chain(4);
        let mut c = PayToExit::<MockSuite>::new(owner());
        c.deposit(&owner(), 5).unwrap();
        c.set_bribe_amount(&owner(), 10).unwrap();
        c.exit_offer(&owner(), 0).unwrap();
        let claim = claim_for(&ch, 0, 1);
        assert_eq!(
            c.take_bribe(&claim, &ch),
            Err(ContractError::InsufficientEscrow {
                needed: 10,
                available: 5
            })
        );
        // The failed payment did not mark the validator as claimed.
        c.deposit(&owner(), 5).unwrap();
        assert!(c.take_bribe(&claim, &ch).is_ok());
        assert!(c.conservation_holds());
    }
}
