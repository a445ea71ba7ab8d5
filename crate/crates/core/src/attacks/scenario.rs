//! Committee construction for attack scenarios.
//!
//! Each contested slot gets a fresh committee of virtual attesters split
//! into three behavior classes: the adversary's own stake, rational
//! (bribable) validators, and altruistic ones. Head counts come from
//! largest-remainder apportionment, but each member's voting weight is its
//! class fraction divided by the class head count — so every committee
//! weighs exactly 1 and each class weighs exactly its stake fraction, no
//! matter the committee size. That keeps simulated decision weights equal
//! to the closed forms in exact rational arithmetic, including on boundary
//! cells. A discrete mode (equal per-member weights, attacker classes
//! rounded down) is available for realism checks with real validator
//! counts.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::chain::{
    ChainConfig, CommitteeSchedule, SimChain, Slot, Validator, ValidatorClass, ValidatorSet,
};
use crate::crypto::{keygen, PairingSuite};
use crate::types::{weight, Address, Weight};

use super::pattern::Side;
use super::AttackError;

/// How member weights are assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    /// Each member carries `class fraction / class head count`: committee
    /// totals are exact rationals, independent of committee size.
    ExactFractions,
    /// Each member carries `1 / committee size`; adversary and rational
    /// head counts are rounded *down*, so discreteness never favors the
    /// attacker.
    DiscreteFloor,
}

/// Committee sizing for scenario construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CommitteeSpec {
    /// Virtual attesters per slot.
    pub size: usize,
    /// Weight assignment mode.
    pub mode: WeightMode,
}

impl Default for CommitteeSpec {
    fn default() -> Self {
        CommitteeSpec {
            size: 1000,
            mode: WeightMode::ExactFractions,
        }
    }
}

/// One slot's committee, by behavior class.
#[derive(Debug, Clone, Default)]
pub struct ClassifiedCommittee {
    /// The adversary's own validators (vote with the attack, unbribed).
    pub adversary: Vec<u64>,
    /// Bribable validators (vote with the attack when paid).
    pub rational: Vec<u64>,
    /// Protocol-following validators.
    pub altruistic: Vec<u64>,
}

impl ClassifiedCommittee {
    /// All members voting with the adversary (own stake plus bribed).
    pub fn attacking(&self) -> impl Iterator<Item = u64> + '_ {
        self.adversary.iter().chain(self.rational.iter()).copied()
    }

    /// Total head count.
    pub fn len(&self) -> usize {
        self.adversary.len() + self.rational.len() + self.altruistic.len()
    }

    /// True when no members exist at all.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A chain wired for one attack run: per-slot committees plus the two
/// weightless proposer identities driving each side's blocks.
pub struct ScenarioChain<S: PairingSuite> {
    /// The simulated chain.
    pub chain: SimChain<S>,
    /// Validator index proposing every adversary slot (weight 0).
    pub adversary_proposer: u64,
    /// Validator index proposing every honest slot (weight 0).
    pub honest_proposer: u64,
    /// Committee membership by contested slot (slots `1..=sides.len()`).
    pub committees: BTreeMap<Slot, ClassifiedCommittee>,
}

/// Largest-remainder head counts for `fractions` summing to ≤ 1 over
/// `size` seats, with every nonzero class seated at least once. The result
/// always sums to exactly `size`.
pub fn apportion_committee(size: usize, fractions: &[Weight]) -> Vec<usize> {
    let size_w = Weight::from_integer(size as i128);
    let quotas: Vec<Weight> = fractions.iter().map(|f| f * size_w).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor().to_integer() as usize).collect();
    // Seat every class that holds stake.
    for (i, f) in fractions.iter().enumerate() {
        if !f.is_zero() && counts[i] == 0 {
            counts[i] = 1;
        }
    }
    let mut assigned: usize = counts.iter().sum();
    // Hand out remaining seats by largest fractional remainder (ties to
    // the earlier class).
    while assigned < size {
        let mut best: Option<(usize, Weight)> = None;
        for (i, q) in quotas.iter().enumerate() {
            let remainder = q - Weight::from_integer(counts[i] as i128);
            match best {
                Some((_, r)) if remainder <= r => {}
                _ => best = Some((i, remainder)),
            }
        }
        counts[best.expect("nonempty fractions").0] += 1;
        assigned += 1;
    }
    // Forced seats may have overshot; reclaim from the most overseated
    // class (never below one seat).
    while assigned > size {
        let (i, _) = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 1)
            .max_by_key(|(i, &c)| (Weight::from_integer(c as i128) - quotas[*i], *i))
            .expect("a class with spare seats");
        counts[i] -= 1;
        assigned -= 1;
    }
    counts
}

fn check_unit_range(name: &'static str, value: Weight, high: Weight) -> Result<(), AttackError> {
    if value < Weight::zero() || value > high {
        return Err(AttackError::ParameterOutOfRange {
            name,
            low: "0".into(),
            high: crate::types::weight_to_string(&high),
            got: crate::types::weight_to_string(&value),
        });
    }
    Ok(())
}

/// Build a chain for the contested slots `1..=sides.len()`, with a fresh
/// committee per slot. `sides[i]` names who proposes slot `i+1`. The
/// adversary holds fraction `alpha` of each committee and `beta` of the
/// remainder is bribable.
pub fn build_scenario_chain<S: PairingSuite>(
    alpha: Weight,
    beta: Weight,
    sides: &[Side],
    committee: &CommitteeSpec,
    config: ChainConfig,
) -> Result<ScenarioChain<S>, AttackError> {
    check_unit_range("alpha", alpha, weight(1, 2))?;
    check_unit_range("beta", beta, Weight::one())?;

    let adversary_fraction = alpha;
    let rational_fraction = (Weight::one() - alpha) * beta;
    let altruistic_fraction = Weight::one() - adversary_fraction - rational_fraction;
    let fractions = [adversary_fraction, rational_fraction, altruistic_fraction];
    let represented = fractions.iter().filter(|f| !f.is_zero()).count();
    if committee.size < represented {
        return Err(AttackError::CommitteeTooSmall {
            needed: represented,
            got: committee.size,
        });
    }

    let counts = match committee.mode {
        WeightMode::ExactFractions => apportion_committee(committee.size, &fractions),
        WeightMode::DiscreteFloor => {
            let size_w = Weight::from_integer(committee.size as i128);
            let adv = (adversary_fraction * size_w).floor().to_integer() as usize;
            let rat = (rational_fraction * size_w).floor().to_integer() as usize;
            vec![adv, rat, committee.size - adv - rat]
        }
    };
    let member_weights: Vec<Weight> = match committee.mode {
        WeightMode::ExactFractions => fractions
            .iter()
            .zip(&counts)
            .map(|(f, &c)| {
                if c == 0 {
                    Weight::zero()
                } else {
                    f / Weight::from_integer(c as i128)
                }
            })
            .collect(),
        WeightMode::DiscreteFloor => {
            vec![weight(1, committee.size as i128); 3]
        }
    };

    let mut validators: Vec<Validator<S>> = Vec::new();
    let push_validator = |class: ValidatorClass, w: Weight, validators: &mut Vec<Validator<S>>| {
        let index = validators.len() as u64;
        validators.push(Validator {
            index,
            keypair: keygen(format!("scenario-validator-{index}").as_bytes())
                .expect("nonempty seed"),
            weight: w,
            class,
            withdrawal: Address::for_validator(index),
            active: true,
        });
        index
    };

    let adversary_proposer =
        push_validator(ValidatorClass::Adversary, Weight::zero(), &mut validators);
    let honest_proposer =
        push_validator(ValidatorClass::Altruistic, Weight::zero(), &mut validators);

    let mut committees = BTreeMap::new();
    let mut schedule_map: BTreeMap<Slot, Vec<u64>> = BTreeMap::new();
    let mut proposer_schedule: BTreeMap<Slot, u64> = BTreeMap::new();
    for (i, side) in sides.iter().enumerate() {
        let slot = i as u64 + 1;
        let mut classified = ClassifiedCommittee::default();
        let classes = [
            (ValidatorClass::Adversary, counts[0], member_weights[0]),
            (ValidatorClass::Rational, counts[1], member_weights[1]),
            (ValidatorClass::Altruistic, counts[2], member_weights[2]),
        ];
        for (class, count, w) in classes {
            for _ in 0..count {
                let index = push_validator(class, w, &mut validators);
                match class {
                    ValidatorClass::Adversary => classified.adversary.push(index),
                    ValidatorClass::Rational => classified.rational.push(index),
                    ValidatorClass::Altruistic => classified.altruistic.push(index),
                }
            }
        }
        schedule_map.insert(
            slot,
            classified
                .adversary
                .iter()
                .chain(&classified.rational)
                .chain(&classified.altruistic)
                .copied()
                .collect(),
        );
        committees.insert(slot, classified);
        proposer_schedule.insert(
            slot,
            match side {
                Side::Honest => honest_proposer,
                Side::Adversary => adversary_proposer,
            },
        );
    }

    let slots_per_epoch = config.slots_per_epoch;
    let vset = ValidatorSet::new(
        validators,
        CommitteeSchedule::Explicit(schedule_map),
        slots_per_epoch,
    );
    let chain = SimChain::new(config, vset, proposer_schedule);
    Ok(ScenarioChain {
        chain,
        adversary_proposer,
        honest_proposer,
        committees,
    })
}
