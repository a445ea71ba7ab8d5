//! Attestation duty rewards as exact fractions of the per-epoch base
//! reward.
//!
//! An attestation earns up to three components, each a fixed number of
//! 64ths of the base reward: 14/64 for a timely correct source, 26/64 for a
//! correct target, and 14/64 for a correct head included in the very next
//! slot. Lateness degrades the reward in steps: past five slots the source
//! (and with it the head) component is gone, past one epoch everything is.

use crate::types::{weight, Weight};

/// Source component: 14/64 of the base reward, paid when the source is
/// correct and inclusion is within [`TIMELY_SOURCE_DELAY_SLOTS`].
pub fn source_weight() -> Weight {
    weight(14, 64)
}

/// Target component: 26/64 of the base reward, paid when the target is
/// correct and inclusion is within [`MAX_INCLUSION_DELAY_SLOTS`].
pub fn target_weight() -> Weight {
    weight(26, 64)
}

/// Head component: 14/64 of the base reward, paid only for a correct head
/// included in the next slot (delay of exactly one).
pub fn head_weight() -> Weight {
    weight(14, 64)
}

/// Inclusion delay (in slots) up to which the source component is paid.
pub const TIMELY_SOURCE_DELAY_SLOTS: u64 = 5;

/// Inclusion delay (in slots) up to which the target component is paid.
pub const MAX_INCLUSION_DELAY_SLOTS: u64 = 32;

/// Reward for an attestation given which of its votes match the canonical
/// chain and how many slots after its duty slot it was included.
///
/// `delay` is at least 1 (inclusion in the immediately following slot); a
/// nonsensical delay of 0 earns nothing. The head component additionally
/// requires source and target to be correct, mirroring the protocol where
/// the head flag cannot be set without a timely source and target.
pub fn attestation_reward_fraction(
    source_correct: bool,
    target_correct: bool,
    head_correct: bool,
    delay: u64,
) -> Weight {
    if delay == 0 || !source_correct {
        return weight(0, 1);
    }
    let mut total = weight(0, 1);
    if target_correct && delay <= MAX_INCLUSION_DELAY_SLOTS {
        total += target_weight();
    }
    if delay <= TIMELY_SOURCE_DELAY_SLOTS {
        total += source_weight();
        if target_correct && head_correct && delay == 1 {
            total += head_weight();
        }
    }
    total
}
