//! Closed-form reorg feasibility in exact rational arithmetic.
//!
//! Both attack shapes reduce to one weight comparison at the decision
//! instant — the attestation deadline of the adversary's final, boosted
//! slot. Writing `γ = α + (1−α)β` for the fraction of each committee that
//! votes with the adversary (its own stake plus the bribed share of the
//! rest):
//!
//! * ex-post `H^h A^a`: the adversary branch carries the bribed votes of
//!   the `a−1` hidden slots plus the boost, `(a−1)γ + boost`; the honest
//!   branch carries the honest votes of every earlier slot,
//!   `(h+a−1)(1−γ)`. Bribed votes in the first `h` slots name the fork
//!   point and count for neither branch.
//! * ex-ante `A^a H^h A`: every one of the first `a+h` committees
//!   contributes its bribed share to the hidden branch, `(a+h)γ + boost`
//!   against the honest `h(1−γ)`; honest votes in the first `a` slots see
//!   nothing to vote for beyond the fork point.
//!
//! The comparisons are strict: a branch that merely ties does not displace
//! the block honest nodes already hold, which is also how the simulation's
//! first-published tie-break behaves.

use num_rational::Ratio;
use num_traits::One;

use crate::types::Weight;

/// The committee fraction voting with the adversary: its own stake `α`
/// plus the bribed share `β` of everyone else.
pub fn bribed_fraction(alpha: Weight, beta: Weight) -> Weight {
    alpha + (Weight::one() - alpha) * beta
}

/// Decision weights (adversary branch, honest branch) for `H^h A^a`.
pub fn expost_decision_weights(
    h: u64,
    a: u64,
    alpha: Weight,
    beta: Weight,
    boost: Weight,
) -> (Weight, Weight) {
    let gamma = bribed_fraction(alpha, beta);
    let adversary = Ratio::from_integer(i128::from(a) - 1) * gamma + boost;
    let honest = Ratio::from_integer(i128::from(h + a) - 1) * (Weight::one() - gamma);
    (adversary, honest)
}

/// Whether `H^h A^a` succeeds: the adversary branch must strictly outweigh
/// the honest one at the decision instant.
pub fn expost_feasible(h: u64, a: u64, alpha: Weight, beta: Weight, boost: Weight) -> bool {
    let (adversary, honest) = expost_decision_weights(h, a, alpha, beta, boost);
    adversary > honest
}

/// Decision weights (adversary branch, honest branch) for `A^a H^h A`.
pub fn exante_decision_weights(
    h: u64,
    a: u64,
    alpha: Weight,
    beta: Weight,
    boost: Weight,
) -> (Weight, Weight) {
    let gamma = bribed_fraction(alpha, beta);
    let adversary = Ratio::from_integer(i128::from(a + h)) * gamma + boost;
    let honest = Ratio::from_integer(i128::from(h)) * (Weight::one() - gamma);
    (adversary, honest)
}

/// Whether `A^a H^h A` succeeds, by the same strict comparison.
pub fn exante_feasible(h: u64, a: u64, alpha: Weight, beta: Weight, boost: Weight) -> bool {
    let (adversary, honest) = exante_decision_weights(h, a, alpha, beta, boost);
    adversary > honest
}
