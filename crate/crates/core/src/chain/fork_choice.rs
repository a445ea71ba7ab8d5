//! Latest-message-driven greedy fork choice with proposer boost.
//!
//! The head is found by descending from genesis, at each block following
//! the child whose subtree carries the most attestation weight. A
//! validator's weight counts toward exactly one block: the target of its
//! newest visible attestation (by duty slot). A block that arrived within
//! its own slot's proposal window receives an additional boost — a fixed
//! fraction of one committee's weight — but only while that slot is still
//! the current one.
//!
//! Weight ties are broken in favor of the earliest-published block (and
//! then the smaller root, for blocks published in the same instant). This
//! "first seen wins" rule mirrors how honest nodes keep the block they
//! already have, and it makes simulation outcomes at exact ties agree with
//! feasibility predicates stated as strict inequalities: an attacking
//! branch that merely *matches* the honest branch's weight does not win.

use std::collections::BTreeMap;

use crate::crypto::PairingSuite;
use crate::types::Weight;

use super::sim::SimChain;
use super::{BlockRoot, Slot};

/// The chain as visible at one instant: blocks and attestations published
/// at or before `at`.
#[derive(Clone, Copy)]
pub struct ChainView<'c, S: PairingSuite> {
    pub(super) chain: &'c SimChain<S>,
    pub(super) at: u64,
}

impl<'c, S: PairingSuite> ChainView<'c, S> {
    /// The instant this view captures.
    pub fn at(&self) -> u64 {
        self.at
    }

    /// Whether a block is published and visible in this view.
    pub fn is_visible(&self, root: &BlockRoot) -> bool {
        self.chain
            .publication_time(root)
            .is_some_and(|t| t <= self.at)
    }

    /// Roots of all visible blocks.
    pub fn visible_blocks(&self) -> Vec<BlockRoot> {
        self.chain
            .block_roots()
            .filter(|r| self.is_visible(r))
            .collect()
    }

    /// Latest visible attestation per validator: `validator -> (duty slot,
    /// head voted)`. Only votes naming visible blocks participate; a vote
    /// for a block the view cannot see yet cannot direct weight anywhere.
    pub fn latest_messages(&self) -> BTreeMap<u64, (Slot, BlockRoot)> {
        let mut latest: BTreeMap<u64, (Slot, BlockRoot)> = BTreeMap::new();
        for att in self.chain.attestation_records() {
            if att.visible_at > self.at || !self.is_visible(&att.data.head) {
                continue;
            }
            let entry = latest.entry(att.validator).or_insert((att.data.slot, att.data.head));
            if att.data.slot >= entry.0 {
                *entry = (att.data.slot, att.data.head);
            }
        }
        latest
    }
}

struct Weigher<'v, 'c, S: PairingSuite> {
    view: &'v ChainView<'c, S>,
    children: BTreeMap<BlockRoot, Vec<BlockRoot>>,
    direct: BTreeMap<BlockRoot, Weight>,
    current_slot: Slot,
}

impl<'v, 'c, S: PairingSuite> Weigher<'v, 'c, S> {
    fn build(view: &'v ChainView<'c, S>) -> Self {
        let mut children: BTreeMap<BlockRoot, Vec<BlockRoot>> = BTreeMap::new();
        for root in view.visible_blocks() {
            let header = view.chain.header(&root).expect("visible block exists");
            if root != view.chain.genesis_root() {
                children.entry(header.parent).or_default().push(root);
            }
        }
        let mut direct: BTreeMap<BlockRoot, Weight> = BTreeMap::new();
        for (validator, (_slot, head)) in view.latest_messages() {
            if let Some(v) = view.chain.validator(validator) {
                *direct.entry(head).or_insert_with(|| Weight::from_integer(0)) += v.weight;
            }
        }
        let current_slot = view.chain.config.slot_at(view.at);
        Weigher {
            view,
            children,
            direct,
            current_slot,
        }
    }

    /// Proposer boost for a block: granted while the block's slot is the
    /// current slot and the block was published inside that slot's
    /// proposal window.
    fn boost(&self, root: &BlockRoot) -> Weight {
        let chain = self.view.chain;
        let header = chain.header(root).expect("weighed block exists");
        if header.slot != self.current_slot || header.slot == 0 {
            return Weight::from_integer(0);
        }
        // A block that is still private has no boost (callers may weigh
        // branches whose tip has not been released yet).
        let Some(published) = chain.publication_time(root) else {
            return Weight::from_integer(0);
        };
        if published <= chain.config.attestation_deadline(header.slot) {
            chain.config.proposer_boost * chain.committee_weight(header.slot)
        } else {
            Weight::from_integer(0)
        }
    }

    fn subtree_weight(&self, root: &BlockRoot) -> Weight {
        let mut total = self
            .direct
            .get(root)
            .copied()
            .unwrap_or_else(|| Weight::from_integer(0))
            + self.boost(root);
        if let Some(kids) = self.children.get(root) {
            for child in kids {
                total += self.subtree_weight(child);
            }
        }
        total
    }

    /// Publication order key for tie-breaking.
    fn tie_key(&self, root: &BlockRoot) -> (u64, BlockRoot) {
        let published = self
            .view
            .chain
            .publication_time(root)
            .expect("visible block has a publication time");
        (published, *root)
    }
}

/// Run fork choice over a view, returning the head block root.
pub fn fork_choice_head<S: PairingSuite>(view: &ChainView<'_, S>) -> BlockRoot {
    let weigher = Weigher::build(view);
    let mut head = view.chain.genesis_root();
    loop {
        let Some(kids) = weigher.children.get(&head) else {
            return head;
        };
        let best = kids
            .iter()
            .map(|child| {
                let weight = weigher.subtree_weight(child);
                let (published, root) = weigher.tie_key(child);
                (child, weight, published, root)
            })
            // Heaviest subtree wins; at equal weight the earliest-published
            // (then smallest-root) child is kept.
            .max_by(|a, b| {
                a.1.cmp(&b.1)
                    .then_with(|| b.2.cmp(&a.2))
                    .then_with(|| b.3.cmp(&a.3))
            })
            .map(|(child, ..)| *child)
            .expect("children lists are non-empty");
        head = best;
    }
}

/// Total latest-message weight (plus any active boost) in the subtree
/// rooted at `root`, as seen by `view`.
pub fn subtree_weight<S: PairingSuite>(view: &ChainView<'_, S>, root: &BlockRoot) -> Weight {
    Weigher::build(view).subtree_weight(root)
}
