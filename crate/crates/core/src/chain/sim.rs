//! The simulated chain: an explicit clock, a block store with publication
//! times, an attestation pool, and canonical-chain queries (seed mixes,
//! height-indexed hashes, duty rewards).

use std::collections::{BTreeMap, BTreeSet};

use sha2::{Digest, Sha256};

use crate::crypto::{sign, PairingSuite, Signature};
use crate::types::Weight;

use super::block::{AttestationData, BlockHeader, Checkpoint};
use super::fork_choice::{fork_choice_head, ChainView};
use super::rewards::attestation_reward_fraction;
use super::transcript::TranscriptEvent;
use super::validators::{Validator, ValidatorSet};
use super::{BlockRoot, ChainConfig, ChainError, Epoch, Slot};

/// Message a proposer signs to reveal its seed contribution for an epoch.
pub fn randao_epoch_bytes(epoch: Epoch) -> Vec<u8> {
    let mut out = Vec::with_capacity(24);
    out.extend_from_slice(b"seed-reveal-epoch");
    out.extend_from_slice(&epoch.to_le_bytes());
    out
}

/// Message a validator signs to voluntarily exit from `epoch` onward.
pub fn voluntary_exit_bytes(epoch: Epoch, validator: u64) -> Vec<u8> {
    let mut out = Vec::with_capacity(30);
    out.extend_from_slice(b"voluntary-exit");
    out.extend_from_slice(&epoch.to_le_bytes());
    out.extend_from_slice(&validator.to_le_bytes());
    out
}

/// A revealed signature's contribution to the epoch seed mix.
pub fn contribution_hash(reveal: &[u8]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"seed-contribution");
    h.update(reveal);
    h.finalize().into()
}

fn xor_mix(acc: &mut [u8; 32], contribution: &[u8; 32]) {
    for (a, c) in acc.iter_mut().zip(contribution) {
        *a ^= c;
    }
}

/// A stored block: header plus publication status.
#[derive(Clone, Debug)]
struct BlockRecord {
    header: BlockHeader,
    /// Absolute time from which the block is visible, `None` while private.
    published_at: Option<u64>,
}

/// A stored attestation.
#[derive(Clone, Debug)]
pub struct AttestationRecord {
    /// What was signed.
    pub data: AttestationData,
    /// Who signed it.
    pub validator: u64,
    /// Hex encoding of the signature.
    pub signature_hex: String,
    /// Absolute time from which other participants can see it.
    pub visible_at: u64,
}

/// The simulated beacon chain.
pub struct SimChain<S: PairingSuite> {
    /// Protocol constants.
    pub config: ChainConfig,
    validators: ValidatorSet<S>,
    proposer_schedule: BTreeMap<Slot, u64>,
    blocks: BTreeMap<BlockRoot, BlockRecord>,
    genesis: BlockRoot,
    attestations: Vec<AttestationRecord>,
    voted: BTreeSet<(u64, Slot)>,
    proposed: BTreeSet<(u64, Slot)>,
    exit_queue: BTreeMap<u64, Epoch>,
    clock: u64,
    events: Vec<TranscriptEvent>,
}

impl<S: PairingSuite> SimChain<S> {
    /// Create a chain at genesis. The clock starts at `genesis_time`.
    pub fn new(
        config: ChainConfig,
        validators: ValidatorSet<S>,
        proposer_schedule: BTreeMap<Slot, u64>,
    ) -> Self {
        let genesis_header = BlockHeader {
            slot: 0,
            height: 0,
            parent: BlockRoot::ZERO,
            proposer: u64::MAX,
            timestamp: config.genesis_time,
            randao_reveal: String::new(),
            body_root: BlockRoot(config.genesis_seed),
        };
        let genesis = genesis_header.root();
        let mut blocks = BTreeMap::new();
        blocks.insert(
            genesis,
            BlockRecord {
                header: genesis_header,
                published_at: Some(config.genesis_time),
            },
        );
        let clock = config.genesis_time;
        SimChain {
            config,
            validators,
            proposer_schedule,
            blocks,
            genesis,
            attestations: Vec::new(),
            voted: BTreeSet::new(),
            proposed: BTreeSet::new(),
            exit_queue: BTreeMap::new(),
            clock,
            events: Vec::new(),
        }
    }

    // ---- clock -----------------------------------------------------------

    /// Current absolute time in seconds.
    pub fn now(&self) -> u64 {
        self.clock
    }

    /// Move the clock forward to an absolute time.
    pub fn advance_to(&mut self, time: u64) -> Result<(), ChainError> {
        if time < self.clock {
            return Err(ChainError::TimeTravel {
                now: self.clock,
                requested: time,
            });
        }
        self.clock = time;
        Ok(())
    }

    /// Move the clock to the first second of a slot.
    pub fn advance_to_slot_start(&mut self, slot: Slot) -> Result<(), ChainError> {
        self.advance_to(self.config.slot_start(slot))
    }

    /// Move the clock to a slot's attestation deadline.
    pub fn advance_to_deadline(&mut self, slot: Slot) -> Result<(), ChainError> {
        self.advance_to(self.config.attestation_deadline(slot))
    }

    // ---- lookups ---------------------------------------------------------

    /// The genesis block root.
    pub fn genesis_root(&self) -> BlockRoot {
        self.genesis
    }

    /// Header of a known block.
    pub fn header(&self, root: &BlockRoot) -> Option<&BlockHeader> {
        self.blocks.get(root).map(|r| &r.header)
    }

    /// When a block became public (`None` for unknown or private blocks).
    pub fn publication_time(&self, root: &BlockRoot) -> Option<u64> {
        self.blocks.get(root).and_then(|r| r.published_at)
    }

    /// All stored block roots (public and private), ascending.
    pub fn block_roots(&self) -> impl Iterator<Item = BlockRoot> + '_ {
        self.blocks.keys().copied()
    }

    /// Validator lookup.
    pub fn validator(&self, index: u64) -> Option<&Validator<S>> {
        self.validators.get(index)
    }

    /// The validator registry.
    pub fn validators(&self) -> &ValidatorSet<S> {
        &self.validators
    }

    /// Committee members for a slot.
    pub fn committee(&self, slot: Slot) -> Vec<u64> {
        self.validators.committee(slot)
    }

    /// Total weight of a slot's committee.
    pub fn committee_weight(&self, slot: Slot) -> Weight {
        self.validators.committee_weight(slot)
    }

    /// Scheduled proposer for a slot.
    pub fn scheduled_proposer(&self, slot: Slot) -> Option<u64> {
        self.proposer_schedule.get(&slot).copied()
    }

    /// All recorded attestations in arrival order.
    pub fn attestation_records(&self) -> &[AttestationRecord] {
        &self.attestations
    }

    /// The event log so far.
    pub fn transcript(&self) -> &[TranscriptEvent] {
        &self.events
    }

    /// Append an orchestration-level event (branch weights, contract calls).
    pub fn record_event(&mut self, event: TranscriptEvent) {
        self.events.push(event);
    }

    // ---- views and fork choice --------------------------------------------

    /// The chain as visible at an absolute time.
    pub fn view_at(&self, at: u64) -> ChainView<'_, S> {
        ChainView { chain: self, at }
    }

    /// The view honest committee members act on in `slot`: everything
    /// published by the slot's attestation deadline.
    pub fn deadline_view(&self, slot: Slot) -> ChainView<'_, S> {
        self.view_at(self.config.attestation_deadline(slot))
    }

    /// Fork-choice head for the full current-clock view.
    pub fn canonical_head(&self) -> BlockRoot {
        fork_choice_head(&self.view_at(self.clock))
    }

    /// Roots from genesis to the canonical head, inclusive.
    pub fn canonical_chain(&self) -> Vec<BlockRoot> {
        let mut chain = Vec::new();
        let mut cursor = self.canonical_head();
        loop {
            chain.push(cursor);
            if cursor == self.genesis {
                break;
            }
            cursor = self.header(&cursor).expect("stored block").parent;
        }
        chain.reverse();
        chain
    }

    // ---- block production ---------------------------------------------------

    fn build_block(
        &mut self,
        slot: Slot,
        proposer: u64,
        parent: BlockRoot,
        published_at: Option<u64>,
    ) -> Result<BlockRoot, ChainError> {
        let scheduled =
            self.scheduled_proposer(slot)
                .ok_or(ChainError::NoProposerScheduled { slot })?;
        if scheduled != proposer {
            return Err(ChainError::WrongProposer {
                slot,
                expected: scheduled,
                got: proposer,
            });
        }
        let validator = self
            .validators
            .get(proposer)
            .ok_or(ChainError::UnknownValidator { validator: proposer })?;
        if !validator.active {
            return Err(ChainError::InactiveValidator { validator: proposer });
        }
        if self.proposed.contains(&(proposer, slot)) {
            return Err(ChainError::EquivocatingProposal { proposer, slot });
        }
        let parent_header = self
            .blocks
            .get(&parent)
            .map(|r| r.header.clone())
            .ok_or(ChainError::UnknownParent { parent })?;
        if parent_header.slot >= slot {
            return Err(ChainError::SlotNotAfterParent {
                slot,
                parent_slot: parent_header.slot,
            });
        }
        let epoch = self.config.epoch_of(slot);
        let reveal = sign::<S>(&validator.keypair.secret, &randao_epoch_bytes(epoch))?;
        let header = BlockHeader {
            slot,
            height: parent_header.height + 1,
            parent,
            proposer,
            timestamp: self.config.slot_start(slot),
            randao_reveal: reveal.to_hex(),
            body_root: BlockRoot::ZERO,
        };
        let root = header.root();
        self.proposed.insert((proposer, slot));
        let height = header.height;
        self.blocks.insert(
            root,
            BlockRecord {
                header,
                published_at,
            },
        );
        match published_at {
            Some(at) => self.events.push(TranscriptEvent::Propose {
                slot,
                root,
                parent,
                height,
                proposer,
                at,
            }),
            None => self.events.push(TranscriptEvent::ProposePrivate {
                slot,
                root,
                parent,
                height,
                proposer,
                at: self.clock,
            }),
        }
        Ok(root)
    }

    /// Produce and publish a block at the current clock time.
    pub fn propose(
        &mut self,
        slot: Slot,
        proposer: u64,
        parent: BlockRoot,
    ) -> Result<BlockRoot, ChainError> {
        self.build_block(slot, proposer, parent, Some(self.clock))
    }

    /// Produce a block but keep it private until [`SimChain::release`].
    pub fn propose_private(
        &mut self,
        slot: Slot,
        proposer: u64,
        parent: BlockRoot,
    ) -> Result<BlockRoot, ChainError> {
        self.build_block(slot, proposer, parent, None)
    }

    /// Scheduled proposer entry point: publish a block, or withhold the
    /// slot entirely (`reveal = false`), which is how seed contributions
    /// are suppressed.
    pub fn propose_block(
        &mut self,
        slot: Slot,
        proposer: u64,
        parent: BlockRoot,
        reveal: bool,
    ) -> Result<Option<BlockRoot>, ChainError> {
        if reveal {
            self.propose(slot, proposer, parent).map(Some)
        } else {
            let scheduled =
                self.scheduled_proposer(slot)
                    .ok_or(ChainError::NoProposerScheduled { slot })?;
            if scheduled != proposer {
                return Err(ChainError::WrongProposer {
                    slot,
                    expected: scheduled,
                    got: proposer,
                });
            }
            if self.proposed.contains(&(proposer, slot)) {
                return Err(ChainError::EquivocatingProposal { proposer, slot });
            }
            self.proposed.insert((proposer, slot));
            self.events.push(TranscriptEvent::Skip { slot, proposer });
            Ok(None)
        }
    }

    /// Make a private block visible from the current clock time onward.
    pub fn release(&mut self, root: BlockRoot) -> Result<(), ChainError> {
        let record = self
            .blocks
            .get_mut(&root)
            .ok_or(ChainError::UnknownBlock { root })?;
        if record.published_at.is_none() {
            record.published_at = Some(self.clock);
            self.events.push(TranscriptEvent::Release {
                root,
                at: self.clock,
            });
        }
        Ok(())
    }

    // ---- attestations -----------------------------------------------------

    /// Ancestor of `head` (inclusive) at or before `slot`.
    pub fn ancestor_at_or_before(&self, head: BlockRoot, slot: Slot) -> Option<BlockRoot> {
        let mut cursor = head;
        loop {
            let header = self.header(&cursor)?;
            if header.slot <= slot {
                return Some(cursor);
            }
            cursor = header.parent;
        }
    }

    /// Checkpoint an attester voting on `head` derives for `epoch`.
    fn checkpoint_on(&self, head: BlockRoot, epoch: Epoch) -> Option<Checkpoint> {
        let boundary = self.config.epoch_start_slot(epoch);
        self.ancestor_at_or_before(head, boundary)
            .map(|root| Checkpoint { epoch, root })
    }

    /// Assemble the attestation data a validator voting `head` in `slot`
    /// signs: the head itself, the current epoch's boundary checkpoint as
    /// target, and the previous epoch's as source (genesis at epoch zero).
    pub fn attestation_data_for(
        &self,
        slot: Slot,
        head: BlockRoot,
    ) -> Result<AttestationData, ChainError> {
        if self.header(&head).is_none() {
            return Err(ChainError::UnknownBlock { root: head });
        }
        let epoch = self.config.epoch_of(slot);
        let target = self
            .checkpoint_on(head, epoch)
            .ok_or(ChainError::UnknownBlock { root: head })?;
        let source = if epoch == 0 {
            Checkpoint {
                epoch: 0,
                root: self.genesis,
            }
        } else {
            self.checkpoint_on(head, epoch - 1)
                .ok_or(ChainError::UnknownBlock { root: head })?
        };
        Ok(AttestationData {
            slot,
            head,
            source,
            target,
        })
    }

    /// Record an attestation visible from the current clock time.
    pub fn attest(
        &mut self,
        validator: u64,
        data: &AttestationData,
    ) -> Result<Signature<S>, ChainError> {
        self.attest_with_visibility(validator, data, self.clock)
    }

    /// Record an attestation that other participants only see from
    /// `visible_at` (colluding attesters hand their signatures to the
    /// briber instead of broadcasting).
    pub fn attest_with_visibility(
        &mut self,
        validator: u64,
        data: &AttestationData,
        visible_at: u64,
    ) -> Result<Signature<S>, ChainError> {
        let v = self
            .validators
            .get(validator)
            .ok_or(ChainError::UnknownValidator { validator })?;
        if !v.active {
            return Err(ChainError::InactiveValidator { validator });
        }
        if self.header(&data.head).is_none() {
            return Err(ChainError::UnknownBlock { root: data.head });
        }
        if !self.validators.committee(data.slot).contains(&validator) {
            return Err(ChainError::NotInCommittee {
                validator,
                slot: data.slot,
            });
        }
        if self.voted.contains(&(validator, data.slot)) {
            return Err(ChainError::DoubleVote {
                validator,
                slot: data.slot,
            });
        }
        let signature = sign::<S>(&v.keypair.secret, &data.signing_bytes())?;
        self.voted.insert((validator, data.slot));
        self.attestations.push(AttestationRecord {
            data: data.clone(),
            validator,
            signature_hex: signature.to_hex(),
            visible_at,
        });
        self.events.push(TranscriptEvent::Attest {
            slot: data.slot,
            validator,
            head: data.head,
            visible_at,
        });
        Ok(signature)
    }

    // ---- canonical queries -------------------------------------------------

    /// Latest canonical block root at or before `slot` (the "parent beacon
    /// block root" a contract can read for that slot).
    pub fn beacon_root_at(&self, slot: Slot) -> BlockRoot {
        self.ancestor_at_or_before(self.canonical_head(), slot)
            .expect("genesis covers every slot")
    }

    /// Canonical block root at exactly `height`, if that height is within
    /// the recent-hash window of the canonical tip. Mirrors the execution
    /// environment's height-indexed hash lookup: hashes older than the
    /// window — or heights the canonical chain never reached — return
    /// `None`, and non-canonical blocks are never served.
    pub fn blockhash(&self, height: u64) -> Option<BlockRoot> {
        let head = self.canonical_head();
        let tip = self.header(&head).expect("stored head").height;
        if height > tip || tip - height > self.config.blockhash_window {
            return None;
        }
        let mut cursor = head;
        loop {
            let header = self.header(&cursor).expect("stored block");
            if header.height == height {
                return Some(cursor);
            }
            cursor = header.parent;
        }
    }

    /// Seed mix after processing every canonical reveal up to and
    /// including `epoch`, on the branch ending at `head`.
    pub fn seed_mix_on_branch(&self, head: BlockRoot, epoch: Epoch) -> [u8; 32] {
        let mut mix = self.config.genesis_seed;
        let mut cursor = head;
        loop {
            let header = self.header(&cursor).expect("stored block");
            if header.height == 0 {
                break;
            }
            if self.config.epoch_of(header.slot) <= epoch {
                let reveal = hex::decode(&header.randao_reveal).expect("stored reveal is hex");
                xor_mix(&mut mix, &contribution_hash(&reveal));
            }
            cursor = header.parent;
        }
        mix
    }

    /// Seed mix on the canonical chain after `epoch`.
    pub fn seed_mix(&self, epoch: Epoch) -> [u8; 32] {
        self.seed_mix_on_branch(self.canonical_head(), epoch)
    }

    /// Reveal signature a proposer would publish for an epoch (used to
    /// plan seed manipulation without touching the chain).
    pub fn reveal_signature(
        &self,
        validator: u64,
        epoch: Epoch,
    ) -> Result<Signature<S>, ChainError> {
        let v = self
            .validators
            .get(validator)
            .ok_or(ChainError::UnknownValidator { validator })?;
        Ok(sign::<S>(&v.keypair.secret, &randao_epoch_bytes(epoch))?)
    }

    /// Reward fraction an attestation earns against the *current*
    /// canonical chain, given its inclusion delay in slots.
    pub fn attestation_reward(&self, data: &AttestationData, delay: u64) -> Weight {
        let epoch = self.config.epoch_of(data.slot);
        let head = self.canonical_head();
        let expected_target = self.checkpoint_on(head, epoch);
        let expected_source = if epoch == 0 {
            Some(Checkpoint {
                epoch: 0,
                root: self.genesis,
            })
        } else {
            self.checkpoint_on(head, epoch - 1)
        };
        let head_correct = data.head == self.beacon_root_at(data.slot);
        let target_correct = expected_target.is_some_and(|cp| cp == data.target);
        let source_correct = expected_source.is_some_and(|cp| cp == data.source);
        attestation_reward_fraction(source_correct, target_correct, head_correct, delay)
    }

    // ---- exits --------------------------------------------------------------

    /// Queue a voluntary exit effective from `epoch`.
    pub fn queue_exit(&mut self, validator: u64, epoch: Epoch) -> Result<(), ChainError> {
        let v = self
            .validators
            .get(validator)
            .ok_or(ChainError::UnknownValidator { validator })?;
        if !v.active || self.exit_queue.contains_key(&validator) {
            return Err(ChainError::AlreadyExited { validator });
        }
        self.exit_queue.insert(validator, epoch);
        self.events
            .push(TranscriptEvent::ExitQueued { validator, epoch });
        Ok(())
    }

    /// Deactivate every queued validator whose exit epoch has passed.
    pub fn process_exits(&mut self, up_to_epoch: Epoch) {
        let due: Vec<u64> = self
            .exit_queue
            .iter()
            .filter(|(_, e)| **e <= up_to_epoch)
            .map(|(v, _)| *v)
            .collect();
        for index in due {
            if let Some(v) = self.validators.get_mut(index) {
                v.active = false;
            }
        }
    }

    /// Validators currently waiting in the exit queue.
    pub fn exit_queue(&self) -> &BTreeMap<u64, Epoch> {
        &self.exit_queue
    }
}
