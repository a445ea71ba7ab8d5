//! End-to-end reorg executions against the chain and the bribery market.
//!
//! Both timelines share the same skeleton. Every contested slot has a
//! fresh committee; altruistic members attest to the head their own fork
//! choice shows at the 4-second deadline, while adversary-owned and bribed
//! members cast the instructed vote. For each slot with bribable members
//! the briber opens a fixed-message offer on the exact instructed
//! attestation; the members' signatures are collected as they vote and
//! later redeemed in one aggregate claim per slot. Hidden blocks and the
//! votes naming them stay invisible to honest views until the release
//! instant, which is what keeps honest attesters voting their own branch
//! right up to the decision.
//!
//! The decision is read at the final slot's attestation deadline, before
//! that slot's committee votes: whichever branch the fork choice then
//! names has won, and the weights of the two branches at that instant are
//! reported exactly.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::chain::{
    fork_choice_head, subtree_weight, AttestationData, BlockRoot, ChainConfig, SimChain, Slot,
    TranscriptEvent,
};
use crate::contracts::{OfferTerms, PayToAttest};
use crate::crypto::{aggregate_signatures, PairingSuite, Signature};
use crate::types::{weight_to_string, Address, Weight, Wei};

use super::feasibility::{
    bribed_fraction, exante_decision_weights, exante_feasible, expost_decision_weights,
    expost_feasible,
};
use super::pattern::{pattern_for, AttackKind, ForkPattern, Side};
use super::scenario::{build_scenario_chain, CommitteeSpec, ScenarioChain};
use super::AttackError;

/// Everything a single attack run needs besides its shape.
#[derive(Debug, Clone)]
pub struct ScenarioParams {
    /// Adversary stake fraction α ∈ [0, 1/2].
    pub alpha: Weight,
    /// Bribable fraction β ∈ [0, 1] of the non-adversary stake.
    pub beta: Weight,
    /// Committee sizing and weight mode.
    pub committee: CommitteeSpec,
    /// Protocol constants.
    pub config: ChainConfig,
    /// Wei escrowed per per-slot offer.
    pub bribe_per_offer_wei: Wei,
}

impl ScenarioParams {
    /// Params with default committee (1000 exact-fraction attesters),
    /// default protocol constants, and a 1 ETH per-slot bribe.
    pub fn new(alpha: Weight, beta: Weight) -> Self {
        ScenarioParams {
            alpha,
            beta,
            committee: CommitteeSpec::default(),
            config: ChainConfig::default(),
            bribe_per_offer_wei: crate::types::WEI_PER_ETH,
        }
    }
}

/// Branch weights and head as read at one slot's attestation deadline.
#[derive(Debug, Clone, Serialize)]
pub struct SlotWeights {
    /// The slot whose deadline this is.
    pub slot: Slot,
    /// Weight of the adversary branch (0 until it exists).
    #[serde(with = "crate::types::weight_serde")]
    pub adversary: Weight,
    /// Weight of the honest branch (0 until it exists).
    #[serde(with = "crate::types::weight_serde")]
    pub honest: Weight,
    /// Fork-choice head at this instant (hex root).
    pub head: String,
}

/// Full record of one attack run.
#[derive(Debug, Clone, Serialize)]
pub struct AttackReport {
    /// Canonical fork pattern, e.g. `"H A^2"`.
    pub pattern: String,
    /// `"ex-post"` or `"ex-ante"`.
    pub kind: String,
    /// Honest-run length `h`.
    pub honest_run: u64,
    /// Adversary-run length `a` (ex-ante: excluding the boost slot).
    pub adversary_run: u64,
    /// Adversary stake fraction.
    #[serde(with = "crate::types::weight_serde")]
    pub alpha: Weight,
    /// Bribed fraction of the rest.
    #[serde(with = "crate::types::weight_serde")]
    pub beta: Weight,
    /// Committee fraction voting with the adversary, `α + (1−α)β`.
    #[serde(with = "crate::types::weight_serde")]
    pub gamma: Weight,
    /// Proposer boost in force.
    #[serde(with = "crate::types::weight_serde")]
    pub proposer_boost: Weight,
    /// What the closed-form predicate says should happen.
    pub predicted_success: bool,
    /// What the simulation actually did.
    pub simulated_success: bool,
    /// Adversary branch weight at the decision instant.
    #[serde(with = "crate::types::weight_serde")]
    pub decision_adversary: Weight,
    /// Honest branch weight at the decision instant.
    #[serde(with = "crate::types::weight_serde")]
    pub decision_honest: Weight,
    /// Closed-form adversary weight (must equal the decision weight).
    #[serde(with = "crate::types::weight_serde")]
    pub closed_form_adversary: Weight,
    /// Closed-form honest weight (must equal the decision weight).
    #[serde(with = "crate::types::weight_serde")]
    pub closed_form_honest: Weight,
    /// Weights and head at every contested slot's deadline.
    pub per_slot: Vec<SlotWeights>,
    /// Head of the chain after the decision (hex root).
    pub final_head: String,
    /// Tip of the adversary branch (hex root).
    pub adversary_tip: String,
    /// Tip of the honest branch (hex root).
    pub honest_tip: String,
    /// Offers the briber opened (one per slot with bribable members).
    pub offers_opened: u64,
    /// Aggregate claims that paid out.
    pub claims_paid: u64,
    /// Total wei paid to bribees.
    pub bribes_paid_wei: Wei,
    /// Bribed attestations cast across all slots.
    pub bribed_attestations: u64,
}

fn check_run_lengths(h: u64, a: u64) -> Result<(), AttackError> {
    for (name, got) in [("h", h), ("a", a)] {
        if got == 0 {
            return Err(AttackError::ParameterOutOfRange {
                name,
                low: "1".into(),
                high: "unbounded".into(),
                got: got.to_string(),
            });
        }
    }
    Ok(())
}

/// Run the attack a fork pattern describes.
pub fn run_attack<S: PairingSuite>(
    pattern: &ForkPattern,
    params: &ScenarioParams,
) -> Result<AttackReport, AttackError> {
    run_attack_with_chain::<S>(pattern, params).map(|(report, _)| report)
}

/// [`run_attack`], also returning the finished chain (for transcripts).
pub fn run_attack_with_chain<S: PairingSuite>(
    pattern: &ForkPattern,
    params: &ScenarioParams,
) -> Result<(AttackReport, SimChain<S>), AttackError> {
    match pattern.classify()? {
        AttackKind::ExPost { honest, adversary } => {
            run_expost_with_chain::<S>(honest, adversary, params)
        }
        AttackKind::ExAnte { adversary, honest } => {
            run_exante_with_chain::<S>(honest, adversary, params)
        }
    }
}

/// One per-slot bribery offer being assembled: the instructed attestation,
/// the offer id, and the signatures collected from bribed members.
struct OpenOffer<S: PairingSuite> {
    id: u64,
    slot: Slot,
    signatures: Vec<Signature<S>>,
}

struct Engine<S: PairingSuite> {
    sc: ScenarioChain<S>,
    contract: PayToAttest<S>,
    briber: Address,
    offers: Vec<OpenOffer<S>>,
    offers_opened: u64,
    per_slot: Vec<SlotWeights>,
    bribed_attestations: u64,
    adversary_branch: Option<BlockRoot>,
    honest_branch: Option<BlockRoot>,
}

impl<S: PairingSuite> Engine<S> {
    fn new(sides: &[Side], params: &ScenarioParams) -> Result<Self, AttackError> {
        let sc = build_scenario_chain::<S>(
            params.alpha,
            params.beta,
            sides,
            &params.committee,
            params.config.clone(),
        )?;
        let briber = Address::new("briber");
        let mut contract = PayToAttest::new(briber.clone());
        let funding = params.bribe_per_offer_wei * sides.len() as Wei;
        contract.deposit(&briber, funding)?;
        contract.set_bribe_amount(&briber, params.bribe_per_offer_wei)?;
        Ok(Engine {
            sc,
            contract,
            briber,
            offers: Vec::new(),
            offers_opened: 0,
            per_slot: Vec::new(),
            bribed_attestations: 0,
            adversary_branch: None,
            honest_branch: None,
        })
    }

    fn log_contract_call(&mut self, function: &str, outcome: &str, detail: String) {
        let snap = self.contract.snapshot();
        self.sc.chain.record_event(TranscriptEvent::ContractCall {
            contract: "pay_to_attest".into(),
            function: function.into(),
            caller: self.briber.to_string(),
            outcome: outcome.into(),
            detail,
            balance_wei: snap.balance.to_string(),
            encumbered_wei: snap.encumbered.to_string(),
        });
    }

    /// The adversary instructs `data` in `slot`: adversary-owned members
    /// just vote; bribable members get a per-slot offer and their
    /// signatures are collected for the later claim. Votes become visible
    /// to honest views at `visible_at`.
    fn cast_attack_votes(
        &mut self,
        slot: Slot,
        data: &AttestationData,
        visible_at: u64,
        offer_deadline: u64,
    ) -> Result<(), AttackError> {
        let committee = self.sc.committees[&slot].clone();
        for member in &committee.adversary {
            self.sc.chain.attest_with_visibility(*member, data, visible_at)?;
            self.bribed_attestations += 1;
        }
        if committee.rational.is_empty() {
            return Ok(());
        }
        let keys: Vec<_> = committee
            .rational
            .iter()
            .map(|&v| self.sc.chain.validator(v).expect("member").keypair.public.clone())
            .collect();
        let id = self.contract.offer_bribe(
            &self.briber,
            &keys,
            OfferTerms::FixedMessage {
                message: data.signing_bytes(),
            },
            offer_deadline,
        )?;
        self.log_contract_call(
            "offer_bribe",
            "ok",
            format!("offer {id}: slot {slot}, {} signers, head {}", keys.len(), data.head.to_hex()),
        );
        self.offers_opened += 1;
        let mut signatures = Vec::with_capacity(committee.rational.len());
        for member in &committee.rational {
            let sig = self.sc.chain.attest_with_visibility(*member, data, visible_at)?;
            signatures.push(sig);
            self.bribed_attestations += 1;
        }
        self.offers.push(OpenOffer { id, slot, signatures });
        Ok(())
    }

    /// Altruistic members of `slot` attest to the head their fork choice
    /// shows right now (the slot's deadline).
    fn cast_honest_votes(&mut self, slot: Slot) -> Result<BlockRoot, AttackError> {
        let head = self.sc.chain.canonical_head();
        let data = self.sc.chain.attestation_data_for(slot, head)?;
        let committee = self.sc.committees[&slot].clone();
        for member in &committee.altruistic {
            self.sc.chain.attest(*member, &data)?;
        }
        Ok(head)
    }

    /// Read branch weights and head at the current instant (a deadline).
    fn record_weights(&mut self, slot: Slot) {
        let chain = &self.sc.chain;
        let view = chain.view_at(chain.now());
        let weight_of = |branch: &Option<BlockRoot>| {
            branch
                .as_ref()
                .map(|root| subtree_weight(&view, root))
                .unwrap_or_else(Weight::zero)
        };
        let adversary = weight_of(&self.adversary_branch);
        let honest = weight_of(&self.honest_branch);
        let head = fork_choice_head(&view);
        let at = chain.now();
        let attacker_tip = self
            .adversary_branch
            .map(|r| self.tip_of(r))
            .unwrap_or_else(|| chain.genesis_root());
        let honest_tip = self
            .honest_branch
            .map(|r| self.tip_of(r))
            .unwrap_or_else(|| chain.genesis_root());
        self.per_slot.push(SlotWeights {
            slot,
            adversary,
            honest,
            head: head.to_hex(),
        });
        self.sc.chain.record_event(TranscriptEvent::BranchWeights {
            slot,
            at,
            attacker_tip,
            attacker_weight: weight_to_string(&adversary),
            honest_tip,
            honest_weight: weight_to_string(&honest),
            head,
        });
    }

    /// Deepest stored descendant along a branch (branches here are chains).
    fn tip_of(&self, branch_root: BlockRoot) -> BlockRoot {
        let chain = &self.sc.chain;
        let mut tip = branch_root;
        let mut depth = chain.header(&tip).map(|h| h.height).unwrap_or(0);
        for root in chain.block_roots() {
            let mut cursor = root;
            let mut on_branch = false;
            while let Some(header) = chain.header(&cursor) {
                if cursor == branch_root {
                    on_branch = true;
                    break;
                }
                if header.height == 0 {
                    break;
                }
                cursor = header.parent;
            }
            if on_branch {
                let height = chain.header(&root).expect("stored").height;
                if height > depth {
                    depth = height;
                    tip = root;
                }
            }
        }
        tip
    }

    /// Redeem every per-slot offer with one aggregate claim.
    fn settle_claims(&mut self) -> Result<(u64, Wei), AttackError> {
        let now = self.sc.chain.now();
        let mut paid = 0u64;
        let mut total = 0;
        let offers = std::mem::take(&mut self.offers);
        for offer in &offers {
            let aggregate = aggregate_signatures(&offer.signatures)?;
            let amount = self
                .contract
                .take_bribe(&self.briber, offer.id, &aggregate, now)?;
            self.log_contract_call(
                "take_bribe",
                "ok",
                format!(
                    "offer {}: slot {}, {} signatures, paid {amount} wei",
                    offer.id,
                    offer.slot,
                    offer.signatures.len()
                ),
            );
            paid += 1;
            total += amount;
        }
        debug_assert!(self.contract.conservation_holds());
        Ok((paid, total))
    }

    fn finish(
        mut self,
        kind: AttackKind,
        params: &ScenarioParams,
        final_tip: BlockRoot,
        closed_form: (Weight, Weight),
        predicted: bool,
    ) -> Result<(AttackReport, SimChain<S>), AttackError> {
        let decision_view = self.sc.chain.view_at(self.sc.chain.now());
        let decision_adversary = self
            .adversary_branch
            .map(|r| subtree_weight(&decision_view, &r))
            .unwrap_or_else(Weight::zero);
        let decision_honest = self
            .honest_branch
            .map(|r| subtree_weight(&decision_view, &r))
            .unwrap_or_else(Weight::zero);
        let head = fork_choice_head(&decision_view);
        let simulated_success = head == final_tip;

        // The final committee now votes: instructed members for the
        // adversary tip, altruistic members for whatever won.
        let final_slot = self.sc.chain.config.slot_at(self.sc.chain.now());
        let adv_data = self.sc.chain.attestation_data_for(final_slot, final_tip)?;
        let offer_deadline = self.sc.chain.now() + 10 * self.sc.chain.config.seconds_per_slot;
        self.cast_attack_votes(final_slot, &adv_data, self.sc.chain.now(), offer_deadline)?;
        self.cast_honest_votes(final_slot)?;
        self.record_weights(final_slot);

        let (claims_paid, bribes_paid_wei) = self.settle_claims()?;
        let honest_tip = self
            .honest_branch
            .map(|r| self.tip_of(r))
            .unwrap_or_else(|| self.sc.chain.genesis_root());

        let gamma = bribed_fraction(params.alpha, params.beta);
        let report = AttackReport {
            pattern: pattern_for(kind),
            kind: kind.label().into(),
            honest_run: kind.honest_run(),
            adversary_run: kind.adversary_run(),
            alpha: params.alpha,
            beta: params.beta,
            gamma,
            proposer_boost: params.config.proposer_boost,
            predicted_success: predicted,
            simulated_success,
            decision_adversary,
            decision_honest,
            closed_form_adversary: closed_form.0,
            closed_form_honest: closed_form.1,
            per_slot: self.per_slot,
            final_head: head.to_hex(),
            adversary_tip: final_tip.to_hex(),
            honest_tip: honest_tip.to_hex(),
            offers_opened: self.offers_opened,
            claims_paid,
            bribes_paid_wei,
            bribed_attestations: self.bribed_attestations,
        };
        Ok((report, self.sc.chain))
    }
}

/// Execute `H^h A^a`: let `h` honest blocks appear (bribed committees
/// voting for their parent instead), hide `a−1` adversary blocks built
/// from before the honest run, then release them all behind one timely,
/// boosted block and read the fork choice.
pub fn run_expost<S: PairingSuite>(
    h: u64,
    a: u64,
    params: &ScenarioParams,
) -> Result<AttackReport, AttackError> {
    run_expost_with_chain::<S>(h, a, params).map(|(report, _)| report)
}

/// [`run_expost`], also returning the finished chain (for transcripts).
pub fn run_expost_with_chain<S: PairingSuite>(
    h: u64,
    a: u64,
    params: &ScenarioParams,
) -> Result<(AttackReport, SimChain<S>), AttackError> {
    check_run_lengths(h, a)?;
    let kind = AttackKind::ExPost { honest: h, adversary: a };
    let mut sides = vec![Side::Honest; h as usize];
    sides.extend(vec![Side::Adversary; a as usize]);
    let mut engine = Engine::<S>::new(&sides, params)?;

    let final_slot = h + a;
    let release_at = params.config.slot_start(final_slot);
    let offer_deadline = release_at + 10 * params.config.seconds_per_slot;
    let genesis = engine.sc.chain.genesis_root();
    let fork_point = genesis;
    let mut honest_tip = genesis;
    let mut adversary_tip = genesis;

    // Honest run: blocks appear on time; bribed members vote the fork
    // point, denying the honest blocks their weight without equivocating.
    for slot in 1..=h {
        engine.sc.chain.advance_to_slot_start(slot)?;
        honest_tip = engine
            .sc
            .chain
            .propose(slot, engine.sc.honest_proposer, honest_tip)?;
        if engine.honest_branch.is_none() {
            engine.honest_branch = Some(honest_tip);
        }
        engine.sc.chain.advance_to_deadline(slot)?;
        let fork_vote = engine.sc.chain.attestation_data_for(slot, fork_point)?;
        engine.cast_attack_votes(slot, &fork_vote, engine.sc.chain.now(), offer_deadline)?;
        engine.cast_honest_votes(slot)?;
        engine.record_weights(slot);
    }

    // Hidden adversary run: blocks and the votes naming them surface only
    // at the release instant; honest committees keep voting their branch.
    for slot in h + 1..final_slot {
        engine.sc.chain.advance_to_slot_start(slot)?;
        adversary_tip = engine
            .sc
            .chain
            .propose_private(slot, engine.sc.adversary_proposer, adversary_tip)?;
        if engine.adversary_branch.is_none() {
            engine.adversary_branch = Some(adversary_tip);
        }
        engine.sc.chain.advance_to_deadline(slot)?;
        let adv_vote = engine.sc.chain.attestation_data_for(slot, adversary_tip)?;
        engine.cast_attack_votes(slot, &adv_vote, release_at, offer_deadline)?;
        engine.cast_honest_votes(slot)?;
        engine.record_weights(slot);
    }

    // Release: everything hidden becomes visible, and the final block
    // lands inside its proposal window to collect the boost.
    engine.sc.chain.advance_to_slot_start(final_slot)?;
    let hidden: Vec<BlockRoot> = engine
        .sc
        .chain
        .block_roots()
        .filter(|r| engine.sc.chain.publication_time(r).is_none())
        .collect();
    for root in hidden {
        engine.sc.chain.release(root)?;
    }
    let final_tip = engine
        .sc
        .chain
        .propose(final_slot, engine.sc.adversary_proposer, adversary_tip)?;
    if engine.adversary_branch.is_none() {
        engine.adversary_branch = Some(final_tip);
    }
    engine.sc.chain.advance_to_deadline(final_slot)?;

    let closed = expost_decision_weights(h, a, params.alpha, params.beta, params.config.proposer_boost);
    let predicted = expost_feasible(h, a, params.alpha, params.beta, params.config.proposer_boost);
    engine.finish(kind, params, final_tip, closed, predicted)
}

/// Execute `A^a H^h A`: hide `a` adversary blocks first, let `h` honest
/// blocks appear meanwhile (bribed committees voting the hidden branch all
/// along), then release everything behind one boosted block.
pub fn run_exante<S: PairingSuite>(
    h: u64,
    a: u64,
    params: &ScenarioParams,
) -> Result<AttackReport, AttackError> {
    run_exante_with_chain::<S>(h, a, params).map(|(report, _)| report)
}

/// [`run_exante`], also returning the finished chain (for transcripts).
pub fn run_exante_with_chain<S: PairingSuite>(
    h: u64,
    a: u64,
    params: &ScenarioParams,
) -> Result<(AttackReport, SimChain<S>), AttackError> {
    check_run_lengths(h, a)?;
    let kind = AttackKind::ExAnte { adversary: a, honest: h };
    let mut sides = vec![Side::Adversary; a as usize];
    sides.extend(vec![Side::Honest; h as usize]);
    sides.push(Side::Adversary);
    let mut engine = Engine::<S>::new(&sides, params)?;

    let final_slot = a + h + 1;
    let release_at = params.config.slot_start(final_slot);
    let offer_deadline = release_at + 10 * params.config.seconds_per_slot;
    let genesis = engine.sc.chain.genesis_root();
    let mut adversary_tip = genesis;

    // Hidden run: adversary blocks pile up unseen; bribed committees
    // pre-commit their votes to the hidden tip, honest members attest to
    // the only head they can see.
    for slot in 1..=a {
        engine.sc.chain.advance_to_slot_start(slot)?;
        adversary_tip = engine
            .sc
            .chain
            .propose_private(slot, engine.sc.adversary_proposer, adversary_tip)?;
        if engine.adversary_branch.is_none() {
            engine.adversary_branch = Some(adversary_tip);
        }
        engine.sc.chain.advance_to_deadline(slot)?;
        let adv_vote = engine.sc.chain.attestation_data_for(slot, adversary_tip)?;
        engine.cast_attack_votes(slot, &adv_vote, release_at, offer_deadline)?;
        engine.cast_honest_votes(slot)?;
        engine.record_weights(slot);
    }

    // Honest run: proposers build on what they can see (the hidden branch
    // does not exist for them); bribed committees keep voting the hidden
    // tip.
    for slot in a + 1..=a + h {
        engine.sc.chain.advance_to_slot_start(slot)?;
        let visible_head = engine.sc.chain.canonical_head();
        let honest_block = engine
            .sc
            .chain
            .propose(slot, engine.sc.honest_proposer, visible_head)?;
        if engine.honest_branch.is_none() {
            engine.honest_branch = Some(honest_block);
        }
        engine.sc.chain.advance_to_deadline(slot)?;
        let adv_vote = engine.sc.chain.attestation_data_for(slot, adversary_tip)?;
        engine.cast_attack_votes(slot, &adv_vote, release_at, offer_deadline)?;
        engine.cast_honest_votes(slot)?;
        engine.record_weights(slot);
    }

    // Release everything behind one timely, boosted block.
    engine.sc.chain.advance_to_slot_start(final_slot)?;
    let hidden: Vec<BlockRoot> = engine
        .sc
        .chain
        .block_roots()
        .filter(|r| engine.sc.chain.publication_time(r).is_none())
        .collect();
    for root in hidden {
        engine.sc.chain.release(root)?;
    }
    let final_tip = engine
        .sc
        .chain
        .propose(final_slot, engine.sc.adversary_proposer, adversary_tip)?;
    engine.sc.chain.advance_to_deadline(final_slot)?;

    let closed = exante_decision_weights(h, a, params.alpha, params.beta, params.config.proposer_boost);
    let predicted = exante_feasible(h, a, params.alpha, params.beta, params.config.proposer_boost);
    engine.finish(kind, params, final_tip, closed, predicted)
}

/// One cell of a predicate-vs-simulation sweep.
#[derive(Debug, Clone, Serialize)]
pub struct GridCell {
    /// Adversary stake fraction.
    #[serde(with = "crate::types::weight_serde")]
    pub alpha: Weight,
    /// Bribed fraction of the rest.
    #[serde(with = "crate::types::weight_serde")]
    pub beta: Weight,
    /// Honest-run length.
    pub h: u64,
    /// Adversary-run length.
    pub a: u64,
    /// `"ex-post"` or `"ex-ante"`.
    pub kind: String,
    /// Closed-form predicate verdict.
    pub predicted: bool,
    /// Simulated verdict.
    pub simulated: bool,
    /// Whether the decision weights equal the closed forms exactly.
    pub weights_exact: bool,
}

/// Run both attack families over a parameter grid in parallel and compare
/// each simulation against its predicate and closed-form weights.
pub fn reorg_agreement_grid<S: PairingSuite>(
    alphas: &[Weight],
    betas: &[Weight],
    shapes: &[(u64, u64)],
    committee: &CommitteeSpec,
) -> Result<Vec<GridCell>, AttackError> {
    use rayon::prelude::*;

    let mut jobs = Vec::new();
    for &alpha in alphas {
        for &beta in betas {
            for &(h, a) in shapes {
                jobs.push((alpha, beta, h, a, true));
                jobs.push((alpha, beta, h, a, false));
            }
        }
    }
    jobs.par_iter()
        .map(|&(alpha, beta, h, a, expost)| {
            let params = ScenarioParams {
                alpha,
                beta,
                committee: *committee,
                config: ChainConfig::default(),
                bribe_per_offer_wei: crate::types::WEI_PER_GWEI,
            };
            let report = if expost {
                run_expost::<S>(h, a, &params)?
            } else {
                run_exante::<S>(h, a, &params)?
            };
            Ok(GridCell {
                alpha,
                beta,
                h,
                a,
                kind: report.kind.clone(),
                predicted: report.predicted_success,
                simulated: report.simulated_success,
                weights_exact: report.decision_adversary == report.closed_form_adversary
                    && report.decision_honest == report.closed_form_honest,
            })
        })
        .collect()
}

/// The standard 21×21 stake grid: α over [0, 1/2] in steps of 1/40 and β
/// over [0, 1] in steps of 1/20.
pub fn standard_stake_grid() -> (Vec<Weight>, Vec<Weight>) {
    let alphas = (0..=20).map(|i| crate::types::weight(i, 40)).collect();
    let betas = (0..=20).map(|j| crate::types::weight(j, 20)).collect();
    (alphas, betas)
}

/// Convenience: map a slot-weights list keyed by slot.
pub fn per_slot_map(report: &AttackReport) -> BTreeMap<Slot, (Weight, Weight)> {
    report
        .per_slot
        .iter()
        .map(|w| (w.slot, (w.adversary, w.honest)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::scenario::WeightMode;
    use crate::attacks::slashable_offenses;
    use crate::crypto::mock::MockSuite;
    use crate::types::{weight, WEI_PER_ETH};
    use num_traits::One;

    fn small_params(alpha: Weight, beta: Weight) -> ScenarioParams {
        ScenarioParams {
            committee: CommitteeSpec {
                size: 20,
                mode: WeightMode::ExactFractions,
            },
            ..ScenarioParams::new(alpha, beta)
        }
    }

    #[test]
    fn expost_two_block_reorg_succeeds_and_pays_every_slot() {
        let params = small_params(weight(3, 10), weight(1, 2));
        let (report, chain) = run_expost_with_chain::<MockSuite>(1, 2, &params).unwrap();

        assert!(report.predicted_success);
        assert!(report.simulated_success);
        assert_eq!(report.decision_adversary, weight(21, 20));
        assert_eq!(report.decision_honest, weight(7, 10));
        assert_eq!(report.closed_form_adversary, weight(21, 20));
        assert_eq!(report.closed_form_honest, weight(7, 10));
        assert_eq!(report.final_head, report.adversary_tip);
        assert_eq!(report.gamma, weight(13, 20));

        // Every contested slot had bribable members, so one offer per slot,
        // all claimed.
        assert_eq!(report.offers_opened, 3);
        assert_eq!(report.claims_paid, 3);
        assert_eq!(report.bribes_paid_wei, 3 * WEI_PER_ETH);

        // Bribed voting never equivocates and proposers never reuse a
        // height: nothing in the transcript is slashable.
        assert!(slashable_offenses(chain.transcript()).is_empty());
    }

    #[test]
    fn expost_telemetry_tracks_branch_weights_per_slot() {
        let params = small_params(weight(3, 10), weight(1, 2));
        let (report, chain) = run_expost_with_chain::<MockSuite>(1, 2, &params).unwrap();

        assert_eq!(report.per_slot.len(), 3);
        let by_slot = per_slot_map(&report);
        // Slot 1: only the honest block exists; its committee's altruists
        // back it (7/20) while the bribed members vote the fork point, and
        // the timely block still carries its own boost (2/5) at its own
        // deadline.
        assert_eq!(by_slot[&1], (Weight::zero(), weight(3, 4)));
        // Slot 2: the adversary block exists but is still hidden, so its
        // weight reads zero while the honest branch keeps growing.
        assert_eq!(by_slot[&2], (Weight::zero(), weight(7, 10)));
        // Final slot: after release the head flips to the attacker tip.
        assert_eq!(report.per_slot[2].head, report.adversary_tip);

        let weights_events = chain
            .transcript()
            .iter()
            .filter(|e| matches!(e, TranscriptEvent::BranchWeights { .. }))
            .count();
        assert_eq!(weights_events, 3);
        let contract_events = chain
            .transcript()
            .iter()
            .filter(|e| matches!(e, TranscriptEvent::ContractCall { .. }))
            .count();
        // One offer and one claim per slot.
        assert_eq!(contract_events, 6);
    }

    #[test]
    fn expost_fails_without_bribable_members() {
        let params = small_params(weight(3, 10), Weight::zero());
        let report = run_expost::<MockSuite>(1, 2, &params).unwrap();

        assert!(!report.predicted_success);
        assert!(!report.simulated_success);
        assert_eq!(report.decision_adversary, weight(7, 10));
        assert_eq!(report.decision_honest, weight(7, 5));
        assert_eq!(report.offers_opened, 0);
        assert_eq!(report.bribes_paid_wei, 0);
        assert_ne!(report.final_head, report.adversary_tip);
    }

    #[test]
    fn exante_one_one_succeeds_with_modest_bribery() {
        let params = small_params(weight(1, 4), weight(1, 5));
        let (report, chain) = run_exante_with_chain::<MockSuite>(1, 1, &params).unwrap();

        assert!(report.predicted_success);
        assert!(report.simulated_success);
        assert_eq!(report.decision_adversary, weight(6, 5));
        assert_eq!(report.decision_honest, weight(3, 5));
        assert_eq!(report.closed_form_adversary, weight(6, 5));
        assert_eq!(report.closed_form_honest, weight(3, 5));
        assert!(slashable_offenses(chain.transcript()).is_empty());
    }

    #[test]
    fn exact_weight_tie_leaves_honest_branch_canonical() {
        // γ = 8/15 makes both branches weigh exactly 14/15 in H A^2;
        // first-seen tie-breaking keeps the honest head, matching the
        // strict-inequality predicate.
        let params = small_params(weight(1, 5), weight(5, 12));
        let report = run_expost::<MockSuite>(1, 2, &params).unwrap();

        assert_eq!(report.gamma, weight(8, 15));
        assert_eq!(report.decision_adversary, weight(14, 15));
        assert_eq!(report.decision_honest, weight(14, 15));
        assert!(!report.predicted_success);
        assert!(!report.simulated_success);
    }

    #[test]
    fn run_attack_dispatches_on_pattern_shape() {
        let params = small_params(weight(3, 10), weight(1, 2));
        let expost: ForkPattern = "H A^2".parse().unwrap();
        let report = run_attack::<MockSuite>(&expost, &params).unwrap();
        assert_eq!(report.kind, "ex-post");
        assert_eq!(report.pattern, "H A^2");
        assert_eq!((report.honest_run, report.adversary_run), (1, 2));

        let exante: ForkPattern = "A^2 H A".parse().unwrap();
        let report = run_attack::<MockSuite>(&exante, &params).unwrap();
        assert_eq!(report.kind, "ex-ante");
        assert_eq!(report.pattern, "A^2 H A");
        assert_eq!((report.honest_run, report.adversary_run), (1, 2));
    }

    #[test]
    fn zero_length_runs_are_rejected() {
        let params = small_params(weight(3, 10), weight(1, 2));
        assert!(matches!(
            run_expost::<MockSuite>(0, 2, &params),
            Err(AttackError::ParameterOutOfRange { name: "h", .. })
        ));
        assert!(matches!(
            run_exante::<MockSuite>(1, 0, &params),
            Err(AttackError::ParameterOutOfRange { name: "a", .. })
        ));
    }

    #[test]
    fn simulation_agrees_with_predicates_on_spot_grid() {
        let alphas = [Weight::zero(), weight(1, 4), weight(2, 5)];
        let betas = [Weight::zero(), weight(1, 2), Weight::one()];
        let shapes = [(1, 1), (1, 2), (2, 1)];
        let committee = CommitteeSpec {
            size: 12,
            mode: WeightMode::ExactFractions,
        };
        let cells =
            reorg_agreement_grid::<MockSuite>(&alphas, &betas, &shapes, &committee).unwrap();

        assert_eq!(cells.len(), 3 * 3 * 3 * 2);
        for cell in &cells {
            assert_eq!(
                cell.predicted, cell.simulated,
                "disagreement at α={} β={} h={} a={} {}",
                cell.alpha, cell.beta, cell.h, cell.a, cell.kind
            );
            assert!(
                cell.weights_exact,
                "inexact weights at α={} β={} h={} a={} {}",
                cell.alpha, cell.beta, cell.h, cell.a, cell.kind
            );
        }
        // The grid must contain both outcomes or it tests nothing.
        assert!(cells.iter().any(|c| c.simulated));
        assert!(cells.iter().any(|c| !c.simulated));
    }
}
