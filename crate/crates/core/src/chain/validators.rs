//! Validator registry, behavior classes, committee assignment, and the
//! deposit accumulator.

use crate::crypto::merkle::MerkleTree;
use crate::crypto::{KeyPair, PairingSuite};
use crate::types::{Address, Weight};

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::Slot;

/// How a validator responds to incentives. The chain itself treats all
/// classes identically; orchestration decides who follows the protocol,
/// who sells duties, and who coordinates the attack.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidatorClass {
    /// Follows the honest protocol unconditionally.
    Altruistic,
    /// Maximizes profit; will deviate when paid more than the deviation
    /// costs.
    Rational,
    /// Controlled by the attacker.
    Adversary,
}

/// One registered validator.
#[derive(Clone, Debug)]
pub struct Validator<S: PairingSuite> {
    /// Registry index (also the deposit-tree leaf index).
    pub index: u64,
    /// Signing/verification keys.
    pub keypair: KeyPair<S>,
    /// Fork-choice weight of this validator's attestations.
    pub weight: Weight,
    /// Behavior class for orchestration.
    pub class: ValidatorClass,
    /// Where exit payouts go.
    pub withdrawal: Address,
    /// Whether the validator is currently active.
    pub active: bool,
}

/// How attestation committees are formed.
#[derive(Clone, Debug)]
pub enum CommitteeSchedule {
    /// Active validators are partitioned round-robin into `slots_per_epoch`
    /// contiguous groups; slot `s` uses group `s % slots_per_epoch`. Group
    /// sizes differ by at most one.
    RoundRobin,
    /// An explicit committee per slot (used by attack orchestration, where
    /// each slot gets a fresh committee of virtual attesters). Slots absent
    /// from the map have empty committees.
    Explicit(BTreeMap<Slot, Vec<u64>>),
}

/// Sizes of the round-robin groups for `n` active validators: every group
/// gets `floor(n / groups)`, and the first `n % groups` groups one extra.
pub fn round_robin_committee_sizes(n: u64, groups: u64) -> Vec<u64> {
    let base = n / groups;
    let rem = n % groups;
    (0..groups).map(|g| base + u64::from(g < rem)).collect()
}

/// The validator registry plus committee assignment.
#[derive(Clone, Debug)]
pub struct ValidatorSet<S: PairingSuite> {
    validators: Vec<Validator<S>>,
    schedule: CommitteeSchedule,
    slots_per_epoch: u64,
}

impl<S: PairingSuite> ValidatorSet<S> {
    /// Build a registry. Indices must equal positions (enforced here).
    pub fn new(
        validators: Vec<Validator<S>>,
        schedule: CommitteeSchedule,
        slots_per_epoch: u64,
    ) -> Self {
        for (i, v) in validators.iter().enumerate() {
            assert_eq!(
                v.index, i as u64,
                "validator indices must be dense and ordered"
            );
        }
        ValidatorSet {
            validators,
            schedule,
            slots_per_epoch,
        }
    }

    /// Number of registered validators (active or not).
    pub fn len(&self) -> usize {
        self.validators.len()
    }

    /// True when no validators are registered.
    pub fn is_empty(&self) -> bool {
        self.validators.is_empty()
    }

    /// Look up a validator by index.
    pub fn get(&self, index: u64) -> Option<&Validator<S>> {
        self.validators.get(index as usize)
    }

    /// Mutable lookup (used for exits).
    pub fn get_mut(&mut self, index: u64) -> Option<&mut Validator<S>> {
        self.validators.get_mut(index as usize)
    }

    /// Iterate over all validators.
    pub fn iter(&self) -> impl Iterator<Item = &Validator<S>> {
        self.validators.iter()
    }

    /// Indices of currently active validators, ascending.
    pub fn active_indices(&self) -> Vec<u64> {
        self.validators
            .iter()
            .filter(|v| v.active)
            .map(|v| v.index)
            .collect()
    }

    /// The committee for a slot.
    pub fn committee(&self, slot: Slot) -> Vec<u64> {
        match &self.schedule {
            CommitteeSchedule::Explicit(map) => map.get(&slot).cloned().unwrap_or_default(),
            CommitteeSchedule::RoundRobin => {
                let active = self.active_indices();
                let sizes = round_robin_committee_sizes(active.len() as u64, self.slots_per_epoch);
                let group = (slot % self.slots_per_epoch) as usize;
                let start: u64 = sizes[..group].iter().sum();
                let end = start + sizes[group];
                active[start as usize..end as usize].to_vec()
            }
        }
    }

    /// Total attestation weight of a slot's committee (the unit the
    /// proposer boost is scaled by).
    pub fn committee_weight(&self, slot: Slot) -> Weight {
        self.committee(slot)
            .iter()
            .filter_map(|i| self.get(*i))
            .map(|v| v.weight)
            .sum()
    }

    /// The deposit accumulator: a Merkle tree whose leaf `i` is validator
    /// `i`'s encoded public key.
    pub fn deposit_tree(&self) -> MerkleTree {
        let mut tree = MerkleTree::new();
        for v in &self.validators {
            tree.insert(&v.keypair.public.to_bytes());
        }
        tree
    }
}
