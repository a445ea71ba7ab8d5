//! Run configuration: a single TOML file of key = value sections naming a
//! network snapshot, the economic constants, the default exit game, and
//! grid resolutions. Shipped presets live under `configs/`; omitting
//! `--config` uses the September-2025 snapshot below.

use std::fs;
use std::path::Path;

use bribesim_core::econ::EconConfig;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Everything an experiment reads besides its own flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// The network snapshot experiments price against.
    pub snapshot: Snapshot,
    /// Economic constants: discounting, reward curve, churn.
    pub economics: EconConfig,
    /// Default exit-game shares.
    pub game: Game,
    /// Grid resolutions and simulation sizing.
    pub grid: Grid,
}

impl RunConfig {
    /// Checks every section against its invariants.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |message: String| Err(CliError::Usage(message));
        self.economics
            .validate()
            .map_err(|e| CliError::Usage(format!("economics: {e}")))?;
        if self.snapshot.validators == 0 {
            return bad("snapshot.validators must be at least 1".into());
        }
        if let Some(stake) = self.snapshot.total_stake_eth {
            if !(stake > 0.0 && stake.is_finite()) {
                return bad(format!("snapshot.total_stake_eth = {stake} must be positive"));
            }
        }
        if self.grid.analytic_points < 2 {
            return bad("grid.analytic_points must be at least 2".into());
        }
        if self.grid.simulation_points < 2 {
            return bad("grid.simulation_points must be at least 2".into());
        }
        if self.grid.committee_size == 0 {
            return bad("grid.committee_size must be at least 1".into());
        }
        if !(self.grid.proposer_boost >= 0.0 && self.grid.proposer_boost <= 1.0) {
            return bad(format!(
                "grid.proposer_boost = {} must lie in [0, 1]",
                self.grid.proposer_boost
            ));
        }
        Ok(())
    }
}

/// A dated network snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Snapshot {
    /// Label echoed into reports.
    pub label: String,
    /// Active validators, N.
    pub validators: u64,
    /// Total stake in ether; omitted means 32 ETH × N.
    pub total_stake_eth: Option<f64>,
}

impl Default for Snapshot {
    fn default() -> Self {
        Snapshot {
            label: "sept-2025".into(),
            validators: 1_123_611,
            total_stake_eth: None,
        }
    }
}

impl Snapshot {
    /// Total stake in ether, defaulting to the per-validator stake times
    /// the validator count.
    pub fn stake_eth(&self, economics: &EconConfig) -> f64 {
        self.total_stake_eth
            .unwrap_or(economics.stake_per_validator_eth * self.validators as f64)
    }
}

/// Default shares for the exit game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Game {
    /// Share the briber already controls, α.
    pub briber_share: f64,
    /// Share the briber wants to reach, α*.
    pub target_share: f64,
    /// Fraction of the other validators that are bribable, β.
    pub rational_fraction: f64,
}

impl Default for Game {
    fn default() -> Self {
        Game {
            briber_share: 0.239,
            target_share: 1.0 / 3.0,
            rational_fraction: 1.0,
        }
    }
}

/// Grid resolutions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grid {
    /// Points per axis for closed-form sweeps.
    pub analytic_points: usize,
    /// Points per axis for simulation-backed sweeps.
    pub simulation_points: usize,
    /// Virtual attesters per slot in simulated scenarios.
    pub committee_size: usize,
    /// Proposer-boost fraction used by the analytic feasibility rule
    /// (matches the chain simulation's 2/5 by default).
    pub proposer_boost: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            analytic_points: 101,
            simulation_points: 21,
            committee_size: 16,
            proposer_boost: 0.4,
        }
    }
}

/// Loads the run configuration, falling back to the built-in default when
/// no path is given.
pub fn load(path: Option<&Path>) -> Result<RunConfig, CliError> {
    let config = match path {
        None => RunConfig::default(),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", p.display())))?;
            toml::from_str(&text)
                .map_err(|e| CliError::usage(format!("bad config {}: {e}", p.display())))?
        }
    };
    config.validate()?;
    Ok(config)
}
