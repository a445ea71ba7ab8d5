//! `bias` — sell the tail of an epoch: enumerate every withholding
//! pattern, auction them, execute the winner, and settle against the
//! realized seed.

use std::path::Path;
use std::process::ExitCode;

use bribesim_core::attacks::{run_bias_auction, AttackError, BiasPlan};
use bribesim_core::attacks::randao::PlannedBid;
use bribesim_core::contracts::TailConfig;
use bribesim_core::crypto::mock::MockSuite;
use bribesim_core::types::{Wei, WEI_PER_GWEI};
use serde::Deserialize;

use crate::output::{write_json, Envelope};
use crate::{CliError, Ctx};

/// One line of the bids file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BidEntry {
    /// Bidder label; losing bids are refunded to it.
    bidder: String,
    /// `k` bits, earliest tail slot first, `1` = withhold that slot.
    pattern: String,
    /// Escrowed amount in gwei.
    amount_gwei: u64,
}

pub fn run(ctx: &Ctx, k: usize, bids_path: &Path) -> Result<ExitCode, CliError> {
    let text = std::fs::read_to_string(bids_path)
        .map_err(|e| CliError::usage(format!("cannot read bids {}: {e}", bids_path.display())))?;
    let entries: Vec<BidEntry> = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("bad bids file {}: {e}", bids_path.display())))?;
    if entries.is_empty() {
        return Err(CliError::usage(format!(
            "bids file {} lists no bids",
            bids_path.display()
        )));
    }

    let mut bids = Vec::with_capacity(entries.len());
    for entry in entries {
        let pattern = TailConfig::parse_bits(&entry.pattern)
            .filter(|p| p.len() == k)
            .ok_or_else(|| {
                CliError::usage(format!(
                    "bid by {:?} has pattern {:?}; expected {k} bits of 0/1",
                    entry.bidder, entry.pattern
                ))
            })?;
        bids.push(PlannedBid {
            bidder: entry.bidder,
            pattern,
            amount_wei: entry.amount_gwei as Wei * WEI_PER_GWEI,
        });
    }

    let plan = BiasPlan { k, bids };
    let report = run_bias_auction::<MockSuite>(&plan).map_err(|e| match e {
        AttackError::NoBids
        | AttackError::TailDoesNotFit { .. }
        | AttackError::EnumerationCapExceeded { .. } => CliError::usage(e.to_string()),
        other => CliError::from(other),
    })?;

    let path = ctx.out.join("bias-report.json");
    write_json(
        &path,
        &Envelope {
            schema: "bribesim/bias-report/1",
            seed: ctx.seed,
            config: &ctx.config,
            report: &report,
        },
    )?;

    println!(
        "epoch {} tail of {}: {} patterns enumerated",
        report.epoch,
        report.k,
        report.rows.len()
    );
    println!(
        "winner {:?} paid {} wei; realized seed {} prediction",
        report.winning_pattern,
        report.payout_wei,
        if report.seed_matches_prediction {
            "matches"
        } else {
            "MISSES"
        },
    );
    println!("wrote {}", path.display());

    if !report.seed_matches_prediction || !report.escrow_conserved {
        return Err(CliError::Runtime(anyhow::anyhow!(
            "settlement invariants violated: seed prediction {}, escrow conserved {}",
            report.seed_matches_prediction,
            report.escrow_conserved
        )));
    }
    Ok(ExitCode::SUCCESS)
}
