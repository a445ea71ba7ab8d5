//! Validator economics: the annual reward curve, annuity discounting, the
//! committee-bribery price model, and the voluntary-exit game that prices a
//! takeover-by-attrition campaign.
//!
//! Everything in this module is a pure function over plain value types, so
//! sweeps parallelize freely and results are bit-reproducible. Monetary
//! amounts are carried as tagged quantities ([`Eth`], [`Usd`]) so that unit
//! mistakes are construction errors instead of silently mixed scales.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod costs;
pub mod exit_game;
pub mod rewards;

pub use costs::{
    attestation_bribery_cost, cost_sweep, feasibility_threshold, fork_is_feasible,
    per_attestation_price_gwei, DEFAULT_PROPOSER_BOOST,
};
pub use exit_game::{
    bribe_bounds, dynamic_bribe_total, exit_bribe_sweep, exit_count_is_stable,
    exit_duration_days, exit_duration_sweep, follower_utility, leader_utility, required_exits,
    solve_exit_game, FollowerAction, LeaderOutcome, QUOTED_ANNUAL_EXOGENOUS_PROFIT_ETH,
};
pub use rewards::{
    annual_reward_index, discounted_reward, half_life_years, perpetuity_multiplier, pv_multiplier,
};

/// Errors from the economic model.
#[derive(Debug, Error, PartialEq)]
pub enum EconError {
    /// A configuration field violates its invariant.
    #[error("configuration field {field} is out of range: got {got}")]
    InvalidConfig {
        /// Name of the offending field.
        field: &'static str,
        /// The rejected value, formatted.
        got: String,
    },
    /// The reward curve needs at least one active validator.
    #[error("the reward curve needs at least one active validator")]
    NoActiveValidators,
    /// A target share of zero can never be reached by shrinking the set.
    #[error("the target share must be positive")]
    ZeroTargetShare,
    /// A share or fraction lies outside its admissible interval.
    #[error("{name} = {got} must lie in [{low}, {high}]")]
    ShareOutOfRange {
        /// Which share was rejected.
        name: &'static str,
        /// The rejected value.
        got: f64,
        /// Inclusive lower bound.
        low: f64,
        /// Inclusive upper bound.
        high: f64,
    },
    /// The briber already holds more than the share it is trying to reach.
    #[error("briber share {briber} already exceeds the target share {target}")]
    BriberAboveTarget {
        /// Current briber share.
        briber: f64,
        /// Share the briber wants to reach.
        target: f64,
    },
    /// More exits were requested than the active set can lose.
    #[error("cannot remove {exits} of {active} active validators")]
    TooManyExits {
        /// Exits requested.
        exits: u64,
        /// Active validators before any exit.
        active: u64,
    },
    /// The rational pool is smaller than the number of exits the campaign
    /// needs, so no bribe can close the gap.
    #[error("{required} exits required but only {available} rational validators can be bought")]
    InsufficientRationalValidators {
        /// Exits the campaign needs.
        required: u64,
        /// Rational validators available to bribe.
        available: u64,
    },
}

/// An amount denominated in ether.
#[derive(Debug, Clone, Copy, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Eth(pub f64);

impl Eth {
    /// The underlying amount.
    pub fn value(self) -> f64 {
        self.0
    }

    /// Converts to dollars at the given ETH/USD rate.
    pub fn usd(self, rate: f64) -> Usd {
        Usd(self.0 * rate)
    }
}

impl fmt::Display for Eth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ETH", self.0)
    }
}

impl Add for Eth {
    type Output = Eth;
    fn add(self, rhs: Eth) -> Eth {
        Eth(self.0 + rhs.0)
    }
}

impl Sub for Eth {
    type Output = Eth;
    fn sub(self, rhs: Eth) -> Eth {
        Eth(self.0 - rhs.0)
    }
}

impl Mul<f64> for Eth {
    type Output = Eth;
    fn mul(self, rhs: f64) -> Eth {
        Eth(self.0 * rhs)
    }
}

impl Mul<Eth> for f64 {
    type Output = Eth;
    fn mul(self, rhs: Eth) -> Eth {
        Eth(self * rhs.0)
    }
}

impl Sum for Eth {
    fn sum<I: Iterator<Item = Eth>>(iter: I) -> Eth {
        Eth(iter.map(|e| e.0).sum())
    }
}

/// An amount denominated in US dollars.
#[derive(Debug, Clone, Copy, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Usd(pub f64);

impl Usd {
    /// The underlying amount.
    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Usd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} USD", self.0)
    }
}

/// Calibration constants for the economic model.
///
/// The defaults describe the September-2025 network snapshot: an 8% annual
/// discount rate over a nine-year operator horizon, a 4,478 ETH/USD rate,
/// and reward-curve constants fitted so that issuance decays with the
/// square root of the validator count while fee extraction decays linearly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EconConfig {
    /// Annual discount rate applied to future rewards (must be positive).
    pub discount_rate: f64,
    /// Horizon over which a validator values its reward stream, in years
    /// (at least one).
    pub horizon_years: f64,
    /// Conversion rate from ether to dollars.
    pub eth_usd_rate: f64,
    /// Issuance coefficient of the reward curve (dividing by the square
    /// root of the validator count).
    pub protocol_reward_constant: f64,
    /// Fee/extraction coefficient of the reward curve (dividing by the
    /// validator count).
    pub mev_reward_constant: f64,
    /// Stake per validator in ether.
    pub stake_per_validator_eth: f64,
    /// Voluntary exits the protocol processes per epoch (at least one).
    pub exit_churn_per_epoch: u64,
    /// Epochs per day (32-slot epochs of 12-second slots give 225).
    pub epochs_per_day: u64,
}

impl Default for EconConfig {
    fn default() -> Self {
        EconConfig {
            discount_rate: 0.08,
            horizon_years: 9.0,
            eth_usd_rate: 4478.0,
            protocol_reward_constant: 2940.21,
            mev_reward_constant: 1_078_543.3,
            stake_per_validator_eth: 32.0,
            exit_churn_per_epoch: 8,
            epochs_per_day: 225,
        }
    }
}

impl EconConfig {
    /// Checks every field against its invariant.
    pub fn validate(&self) -> Result<(), EconError> {
        let bad = |field: &'static str, got: String| Err(EconError::InvalidConfig { field, got });
        if !(self.discount_rate > 0.0 && self.discount_rate.is_finite()) {
            return bad("discount_rate", self.discount_rate.to_string());
        }
        if !(self.horizon_years >= 1.0 && self.horizon_years.is_finite()) {
            return bad("horizon_years", self.horizon_years.to_string());
        }
        if !(self.eth_usd_rate > 0.0 && self.eth_usd_rate.is_finite()) {
            return bad("eth_usd_rate", self.eth_usd_rate.to_string());
        }
        if !(self.protocol_reward_constant > 0.0 && self.protocol_reward_constant.is_finite()) {
            return bad(
                "protocol_reward_constant",
                self.protocol_reward_constant.to_string(),
            );
        }
        if !(self.mev_reward_constant >= 0.0 && self.mev_reward_constant.is_finite()) {
            return bad("mev_reward_constant", self.mev_reward_constant.to_string());
        }
        if !(self.stake_per_validator_eth > 0.0 && self.stake_per_validator_eth.is_finite()) {
            return bad(
                "stake_per_validator_eth",
                self.stake_per_validator_eth.to_string(),
            );
        }
        if self.exit_churn_per_epoch == 0 {
            return bad("exit_churn_per_epoch", "0".into());
        }
        if self.epochs_per_day == 0 {
            return bad("epochs_per_day", "0".into());
        }
        Ok(())
    }
}

/// Parameters of one exit-game instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    /// Active validators before the campaign, `N`.
    pub total_validators: u64,
    /// Fraction of the active set the briber already controls, `α`.
    pub briber_share: f64,
    /// Fraction of the active set the briber wants to reach, `α*`.
    pub target_share: f64,
    /// Fraction of the non-briber validators that are rational (willing to
    /// deviate for pay), `β`.
    pub rational_fraction: f64,
}

impl GameParams {
    /// Rational validators available to bribe: `⌊(1−α)βN⌋`.
    pub fn rational_count(&self) -> u64 {
        ((1.0 - self.briber_share) * self.rational_fraction * self.total_validators as f64).floor()
            as u64
    }

    /// Checks the shares against their invariants: `0 ≤ α ≤ α* ≤ 1/2`
    /// (growing past half the set is a different attack) and `0 ≤ β ≤ 1`.
    pub fn validate(&self) -> Result<(), EconError> {
        if self.total_validators == 0 {
            return Err(EconError::NoActiveValidators);
        }
        if self.target_share <= 0.0 {
            return Err(EconError::ZeroTargetShare);
        }
        if !(0.0..=0.5).contains(&self.target_share) {
            return Err(EconError::ShareOutOfRange {
                name: "target share",
                got: self.target_share,
                low: 0.0,
                high: 0.5,
            });
        }
        if !(0.0..=0.5).contains(&self.briber_share) {
            return Err(EconError::ShareOutOfRange {
                name: "briber share",
                got: self.briber_share,
                low: 0.0,
                high: 0.5,
            });
        }
        if self.briber_share > self.target_share {
            return Err(EconError::BriberAboveTarget {
                briber: self.briber_share,
                target: self.target_share,
            });
        }
        if !(0.0..=1.0).contains(&self.rational_fraction) {
            return Err(EconError::ShareOutOfRange {
                name: "rational fraction",
                got: self.rational_fraction,
                low: 0.0,
                high: 1.0,
            });
        }
        Ok(())
    }
}

/// Solved exit game: how many exits the campaign needs, what each exit
/// costs, and what the whole campaign costs the leader.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumResult {
    /// Exits needed for the briber's share to reach the target, `k*`.
    pub required_exits: u64,
    /// Cheapest per-validator bribe at which exactly `k*` exits is stable.
    pub bribe_lower: Eth,
    /// Largest per-validator bribe a stayer would still refuse.
    pub bribe_upper: Eth,
    /// Chosen per-validator bribe `b*` (the upper bound, which makes
    /// exiting a dominant action for every offered validator).
    pub bribe: Eth,
    /// `b*` in dollars at the configured rate.
    pub bribe_usd: Usd,
    /// Extra discounted reward the leader's own validators earn because the
    /// set shrank, `g(k*)`.
    pub reward_gain: Eth,
    /// Total bribe outlay, `k*·b*`.
    pub bribe_cost: Eth,
    /// Exogenous profit at which the campaign breaks even,
    /// `k*·b* − g(k*)`.
    pub break_even_exogenous: Eth,
    /// Days the exit queue needs to process `k*` exits at the configured
    /// churn.
    pub duration_days: f64,
}

/// One cell of a two-axis sweep. Field names deliberately match the CSV
/// header `alpha,beta_or_alpha_star,value,feasible` emitted by the
/// command-line tool.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatmapCell {
    /// First axis: the briber/adversary share α.
    pub alpha: f64,
    /// Second axis: the rational fraction β or the target share α*,
    /// depending on the sweep.
    pub beta_or_alpha_star: f64,
    /// The swept quantity (cost in ETH or USD, or duration in days).
    pub value: f64,
    /// Whether the cell satisfies the sweep's feasibility rule.
    pub feasible: bool,
}

/// `points` evenly spaced values from `low` to `high` inclusive; a single
/// point collapses to `low`.
pub fn linspace(low: f64, high: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![low],
        _ => (0..points)
            .map(|i| low + (high - low) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_satisfies_its_own_invariants() {
        let config = EconConfig::default();
        assert_eq!(config.validate(), Ok(()));
        assert_eq!(config.discount_rate, 0.08);
        assert_eq!(config.horizon_years, 9.0);
        assert_eq!(config.eth_usd_rate, 4478.0);
        assert_eq!(config.exit_churn_per_epoch, 8);
        assert_eq!(config.epochs_per_day, 225);
    }

    #[test]
    fn config_round_trips_through_json_and_fills_missing_fields() {
        let config = EconConfig::default();
        let json = serde_json::to_string(&config).unwrap();
        let back: EconConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, config);

        let partial: EconConfig = serde_json::from_str(r#"{"eth_usd_rate": 3708.0}"#).unwrap();
        assert_eq!(partial.eth_usd_rate, 3708.0);
        assert_eq!(partial.discount_rate, 0.08);
    }

    #[test]
    fn invalid_config_fields_are_rejected_by_name() {
        let cases: Vec<(EconConfig, &str)> = vec![
            (
                EconConfig {
                    discount_rate: 0.0,
                    ..EconConfig::default()
                },
                "discount_rate",
            ),
            (
                EconConfig {
                    horizon_years: 0.5,
                    ..EconConfig::default()
                },
                "horizon_years",
            ),
            (
                EconConfig {
                    eth_usd_rate: -1.0,
                    ..EconConfig::default()
                },
                "eth_usd_rate",
            ),
            (
                EconConfig {
                    exit_churn_per_epoch: 0,
                    ..EconConfig::default()
                },
                "exit_churn_per_epoch",
            ),
            (
                EconConfig {
                    epochs_per_day: 0,
                    ..EconConfig::default()
                },
                "epochs_per_day",
            ),
        ];
        for (config, field) in cases {
            match config.validate() {
                Err(EconError::InvalidConfig { field: got, .. }) => assert_eq!(got, field),
                other => panic!("expected InvalidConfig for {field}, got {other:?}"),
            }
        }
    }

    #[test]
    fn tagged_quantities_carry_their_units() {
        let a = Eth(2.0) + Eth(1.5);
        assert_eq!(a, Eth(3.5));
        assert_eq!(a - Eth(0.5), Eth(3.0));
        assert_eq!(a * 2.0, Eth(7.0));
        assert_eq!(2.0 * a, Eth(7.0));
        let total: Eth = [Eth(1.0), Eth(2.0), Eth(3.0)].into_iter().sum();
        assert_eq!(total, Eth(6.0));

        let usd = Eth(9.23).usd(4478.0);
        assert!((usd.value() - 41_331.94).abs() < 0.01);
        assert_eq!(format!("{}", Eth(1.5)), "1.5 ETH");
        assert_eq!(format!("{}", Usd(10.0)), "10 USD");
    }

    #[test]
    fn game_params_guard_their_shares() {
        let base = GameParams {
            total_validators: 1_000,
            briber_share: 0.1,
            target_share: 0.2,
            rational_fraction: 0.5,
        };
        assert_eq!(base.validate(), Ok(()));
        assert_eq!(base.rational_count(), 450);

        let mut p = base;
        p.briber_share = 0.3;
        assert_eq!(
            p.validate(),
            Err(EconError::BriberAboveTarget {
                briber: 0.3,
                target: 0.2
            })
        );

        p = base;
        p.target_share = 0.0;
        assert_eq!(p.validate(), Err(EconError::ZeroTargetShare));

        p = base;
        p.target_share = 0.6;
        assert!(matches!(
            p.validate(),
            Err(EconError::ShareOutOfRange {
                name: "target share",
                ..
            })
        ));

        p = base;
        p.rational_fraction = 1.2;
        assert!(matches!(
            p.validate(),
            Err(EconError::ShareOutOfRange {
                name: "rational fraction",
                ..
            })
        ));

        p = base;
        p.total_validators = 0;
        assert_eq!(p.validate(), Err(EconError::NoActiveValidators));
    }

    #[test]
    fn linspace_hits_both_endpoints_exactly() {
        let axis = linspace(0.0, 0.5, 21);
        assert_eq!(axis.len(), 21);
        assert_eq!(axis[0], 0.0);
        assert_eq!(axis[20], 0.5);
        assert!((axis[10] - 0.25).abs() < 1e-15);
        assert!(axis.windows(2).all(|w| w[0] < w[1]));

        assert_eq!(linspace(0.3, 0.9, 1), vec![0.3]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }
}
