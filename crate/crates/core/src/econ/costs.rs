//! What it costs to buy one slot committee's head votes, and when a bought
//! one-block fork can win at all.
//!
//! A rational attester voting for the attacker's fork forfeits only the
//! head component of its duty reward: if the fork wins, source and target
//! still pay on the winning branch, and the head vote is the one piece a
//! short fork flips. The price of a committee is therefore the head share
//! of the per-epoch base reward times the number of bribable members.

use crate::chain::head_weight;

use super::{Eth, HeatmapCell};

/// Proposer-boost fraction assumed by the feasibility rule: the timely
/// block of the current slot counts as 0.4 committees of virtual weight.
pub const DEFAULT_PROPOSER_BOOST: f64 = 0.4;

/// Effective balance per validator in gwei (32 ETH).
const EFFECTIVE_BALANCE_GWEI: f64 = 32.0e9;

/// Protocol constant scaling the per-epoch base reward.
const BASE_REWARD_FACTOR: f64 = 64.0;

/// Committees per epoch: the active set is split over 32 slots.
const SLOTS_PER_EPOCH: f64 = 32.0;

const GWEI_PER_ETH: f64 = 1.0e9;

/// Per-epoch base reward of one 32-ETH validator when `total_stake_eth` is
/// staked overall: `32·10⁹ × 64 / √(stake in gwei)`, in gwei.
pub fn per_validator_base_reward_gwei(total_stake_eth: f64) -> f64 {
    let stake_gwei = total_stake_eth * GWEI_PER_ETH;
    EFFECTIVE_BALANCE_GWEI * BASE_REWARD_FACTOR / stake_gwei.sqrt()
}

/// Price of one bribed attestation in gwei: the head-vote share (14/64) of
/// the per-epoch base reward — the only reward component the attester puts
/// at risk by voting a one-slot fork.
pub fn per_attestation_price_gwei(total_stake_eth: f64) -> f64 {
    let head = head_weight();
    let head_share = *head.numer() as f64 / *head.denom() as f64;
    head_share * per_validator_base_reward_gwei(total_stake_eth)
}

/// Cost in ether of bribing the rational members of one slot's committee:
/// `(1−α)·β · (N/32) · ρ`, where `N/32` is the committee size, `(1−α)β`
/// the bribable fraction of it, and `ρ` the per-attestation price.
///
/// Only the single committee voting between the forked block and the
/// attacker's replacement needs paying; later committees vote for the
/// already-winning branch at no cost.
pub fn attestation_bribery_cost(
    validators: u64,
    total_stake_eth: f64,
    alpha: f64,
    beta: f64,
) -> Eth {
    let committee_size = validators as f64 / SLOTS_PER_EPOCH;
    let gwei =
        (1.0 - alpha) * beta * committee_size * per_attestation_price_gwei(total_stake_eth);
    Eth(gwei / GWEI_PER_ETH)
}

/// Smallest rational fraction β at which an adversary holding share α can
/// win a one-block fork with proposer boost `proposer_boost`.
///
/// The fork carries when the honest attesters still voting the original
/// head — weight `2(1−α)(1−β)` across the two decisive committees — are
/// outweighed by the boost plus the adversary's and the bought validators'
/// votes, `p + α + (1−α)β`. Solving for β gives
/// `(2 − p − 3α) / (3(1−α))`, clamped to the unit interval.
pub fn feasibility_threshold(alpha: f64, proposer_boost: f64) -> f64 {
    if alpha >= 1.0 {
        return 0.0;
    }
    ((2.0 - proposer_boost - 3.0 * alpha) / (3.0 * (1.0 - alpha))).clamp(0.0, 1.0)
}

/// Whether a one-block fork at `(α, β)` carries under the given boost:
/// β at or above [`feasibility_threshold`].
pub fn fork_is_feasible(alpha: f64, beta: f64, proposer_boost: f64) -> bool {
    beta >= feasibility_threshold(alpha, proposer_boost)
}

/// Committee-bribery cost over a grid of `(α, β)` cells, each flagged with
/// the one-block-fork feasibility rule. Values are in ether.
pub fn cost_sweep(
    validators: u64,
    total_stake_eth: f64,
    alphas: &[f64],
    betas: &[f64],
    proposer_boost: f64,
) -> Vec<HeatmapCell> {
    let mut cells = Vec::with_capacity(alphas.len() * betas.len());
    for &alpha in alphas {
        for &beta in betas {
            cells.push(HeatmapCell {
                alpha,
                beta_or_alpha_star: beta,
                value: attestation_bribery_cost(validators, total_stake_eth, alpha, beta).value(),
                feasible: fork_is_feasible(alpha, beta, proposer_boost),
            });
        }
    }
    cells
}
