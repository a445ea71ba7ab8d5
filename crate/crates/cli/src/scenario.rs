//! `scenario` — replay one fork pattern with escrowed bribes and report
//! whether the bought fork carried.

use std::process::ExitCode;

use bribesim_core::attacks::{run_attack_with_chain, ForkPattern, ScenarioParams};
use bribesim_core::attacks::scenario::{CommitteeSpec, WeightMode};
use bribesim_core::chain::ChainConfig;
use bribesim_core::crypto::mock::MockSuite;
use bribesim_core::types::{parse_weight, weight, weight_to_string, Weight, WEI_PER_ETH};
use num_rational::Ratio;

use crate::output::{write_json, write_transcript, Envelope};
use crate::{CliError, Ctx};

/// Parses a stake share given either as an exact fraction ("3/10") or a
/// decimal ("0.3", converted exactly).
pub fn parse_fraction(text: &str) -> Result<Weight, CliError> {
    let text = text.trim();
    if let Some((whole, frac)) = text.split_once('.') {
        let whole = if whole.is_empty() { "0" } else { whole };
        if frac.len() > 18 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(CliError::usage(format!(
                "bad share {text:?}: expected at most 18 decimal digits"
            )));
        }
        let whole: i128 = whole
            .parse()
            .map_err(|e| CliError::usage(format!("bad share {text:?}: {e}")))?;
        let digits: i128 = if frac.is_empty() {
            0
        } else {
            frac.parse()
                .map_err(|e| CliError::usage(format!("bad share {text:?}: {e}")))?
        };
        let scale = 10i128.pow(frac.len() as u32);
        Ok(Ratio::new(whole * scale + digits, scale))
    } else {
        parse_weight(text).map_err(CliError::Usage)
    }
}

fn unit_share(name: &str, text: &str) -> Result<Weight, CliError> {
    let share = parse_fraction(text)?;
    if share < weight(0, 1) || share > weight(1, 1) {
        return Err(CliError::usage(format!(
            "{name} = {} must lie in [0, 1]",
            weight_to_string(&share)
        )));
    }
    Ok(share)
}

pub fn run(ctx: &Ctx, chain: &str, alpha: &str, beta: &str) -> Result<ExitCode, CliError> {
    let pattern: ForkPattern = chain
        .parse()
        .map_err(|e| CliError::usage(format!("bad chain pattern {chain:?}: {e}")))?;
    let alpha = unit_share("alpha", alpha)?;
    let beta = unit_share("beta", beta)?;

    let params = ScenarioParams {
        alpha,
        beta,
        committee: CommitteeSpec {
            size: ctx.config.grid.committee_size,
            mode: WeightMode::ExactFractions,
        },
        config: ChainConfig::default(),
        bribe_per_offer_wei: WEI_PER_ETH,
    };
    let (report, chain) = run_attack_with_chain::<MockSuite>(&pattern, &params)?;

    let report_path = ctx.out.join("scenario-report.json");
    write_json(
        &report_path,
        &Envelope {
            schema: "bribesim/scenario-report/1",
            seed: ctx.seed,
            config: &ctx.config,
            report: &report,
        },
    )?;
    let transcript_path = ctx.out.join("scenario-transcript.jsonl");
    write_transcript(&transcript_path, chain.transcript())?;

    println!(
        "{} ({}): alpha={} beta={} gamma={}",
        report.pattern,
        report.kind,
        weight_to_string(&report.alpha),
        weight_to_string(&report.beta),
        weight_to_string(&report.gamma),
    );
    println!(
        "decision weights: adversary={} honest={} head={}",
        weight_to_string(&report.decision_adversary),
        weight_to_string(&report.decision_honest),
        report.final_head,
    );
    println!(
        "bribes: {} offers, {} claims, {} wei over {} attestations",
        report.offers_opened, report.claims_paid, report.bribes_paid_wei, report.bribed_attestations,
    );
    println!("wrote {}", report_path.display());
    println!("wrote {}", transcript_path.display());

    match (report.predicted_success, report.simulated_success) {
        (true, true) => {
            println!("outcome: reorg succeeded (predicted and simulated)");
            Ok(ExitCode::SUCCESS)
        }
        (false, false) => {
            println!("outcome: reorg failed (predicted and simulated)");
            Ok(ExitCode::from(3))
        }
        (predicted, simulated) => Err(CliError::Runtime(anyhow::anyhow!(
            "predicate/simulation disagreement: predicted {predicted}, simulated {simulated}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn decimals_parse_to_exact_rationals() {
        assert_eq!(parse_fraction("0.3").unwrap(), weight(3, 10));
        assert_eq!(parse_fraction("0.25").unwrap(), weight(1, 4));
        assert_eq!(parse_fraction(".5").unwrap(), weight(1, 2));
        assert_eq!(parse_fraction("1.").unwrap(), weight(1, 1));
        assert_eq!(parse_fraction("0.239").unwrap(), weight(239, 1000));
        // 18 digits is the longest decimal accepted.
        assert_eq!(
            parse_fraction("0.333333333333333333").unwrap(),
            weight(333_333_333_333_333_333, 1_000_000_000_000_000_000),
        );
    }

    #[test]
    fn fractions_and_integers_still_parse() {
        assert_eq!(parse_fraction("3/10").unwrap(), weight(3, 10));
        assert_eq!(parse_fraction(" 1/3 ").unwrap(), weight(1, 3));
        assert_eq!(parse_fraction("1").unwrap(), weight(1, 1));
        assert_eq!(parse_fraction("0").unwrap(), weight(0, 1));
    }

    #[test]
    fn malformed_shares_are_usage_errors() {
        for bad in ["", "0.x", "0.1234567890123456789", "1/0", "abc", "1.2.3"] {
            assert!(
                matches!(parse_fraction(bad), Err(CliError::Usage(_))),
                "{bad:?} should be rejected as a usage error",
            );
        }
    }

    #[test]
    fn shares_outside_the_unit_interval_are_rejected() {
        assert!(unit_share("alpha", "0.5").is_ok());
        assert!(matches!(
            unit_share("alpha", "1.0001"),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            unit_share("beta", "-1/4"),
            Err(CliError::Usage(_))
        ));
    }

    proptest! {
        /// Any numerator/denominator pair rendered as an exact decimal via
        /// a power-of-ten denominator parses back to the identical rational.
        #[test]
        fn decimal_rendering_round_trips(digits in 0u64..=999_999_999, places in 1u32..=9) {
            let scale = 10u64.pow(places);
            let digits = digits % scale;
            let text = format!("0.{digits:0width$}", width = places as usize);
            let parsed = parse_fraction(&text).unwrap();
            prop_assert_eq!(parsed, weight(digits as i128, scale as i128));
        }
    }
}
