//! The per-validator annual reward curve and the annuity discounting that
//! turns a reward stream into a lump sum worth comparing against a bribe.

use super::{EconConfig, EconError, Eth};

/// Annual reward index for one validator when `active` validators are
/// staking: `stake × (c_issuance/√n + c_fees/n)`.
///
/// Issuance per validator decays with the square root of the set size while
/// fee extraction is a fixed pool split evenly, so both terms — and the
/// index — are strictly decreasing in `active`. The index is quoted in
/// percent·ETH per year; multiplying by [`pv_multiplier`] (which folds in
/// the percent-to-fraction conversion) yields ether.
pub fn annual_reward_index(config: &EconConfig, active: u64) -> Result<f64, EconError> {
    if active == 0 {
        return Err(EconError::NoActiveValidators);
    }
    let n = active as f64;
    Ok(config.stake_per_validator_eth
        * (config.protocol_reward_constant / n.sqrt() + config.mev_reward_constant / n))
}

/// Present-value multiplier for a `years`-long annual stream quoted in
/// percent: `(1 − (1+r)^−Y) / (100·r)`, the standard finite-annuity factor
/// with the percent-to-fraction conversion folded in.
pub fn pv_multiplier(rate: f64, years: f64) -> f64 {
    debug_assert!(rate > 0.0, "discount rate must be positive");
    (1.0 - (1.0 + rate).powf(-years)) / (100.0 * rate)
}

/// Limit of [`pv_multiplier`] as the horizon grows without bound:
/// `1/(100·r)`.
pub fn perpetuity_multiplier(rate: f64) -> f64 {
    debug_assert!(rate > 0.0, "discount rate must be positive");
    1.0 / (100.0 * rate)
}

/// Years after which discounting at `rate` halves a claim:
/// `ln 2 / ln(1+r)`.
///
/// At this horizon the annuity is worth exactly half the perpetuity, since
/// `(1+r)^−Y = 1/2` there.
pub fn half_life_years(rate: f64) -> f64 {
    debug_assert!(rate > 0.0, "discount rate must be positive");
    std::f64::consts::LN_2 / (1.0 + rate).ln()
}

/// Discounted lifetime reward of one validator in a set of `active`, at the
/// config's rate and horizon: the annual index times the annuity
/// multiplier, in ether. This is the opportunity cost of exiting — the
/// price floor for any exit bribe.
pub fn discounted_reward(config: &EconConfig, active: u64) -> Result<Eth, EconError> {
    let index = annual_reward_index(config, active)?;
    Ok(Eth(
        index * pv_multiplier(config.discount_rate, config.horizon_years)
    ))
}
