//! Replayable event log. Every state transition the simulation or a
//! contract makes is appended as a typed event; serializing the sequence as
//! JSON lines (fixed field order, one event per line) gives byte-identical
//! transcripts for identical runs.

use serde::{Deserialize, Serialize};
use std::io::{self, Write};

use super::{BlockRoot, Epoch, Slot};

/// One logged state transition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TranscriptEvent {
    /// A block was produced and published.
    Propose {
        /// Duty slot.
        slot: Slot,
        /// New block root.
        root: BlockRoot,
        /// Parent root.
        parent: BlockRoot,
        /// Chain height of the new block.
        height: u64,
        /// Proposer index.
        proposer: u64,
        /// Publication time (absolute seconds).
        at: u64,
    },
    /// A block was produced but kept private.
    ProposePrivate {
        /// Duty slot.
        slot: Slot,
        /// New block root.
        root: BlockRoot,
        /// Parent root.
        parent: BlockRoot,
        /// Chain height of the new block.
        height: u64,
        /// Proposer index.
        proposer: u64,
        /// Production time (absolute seconds).
        at: u64,
    },
    /// A previously private block was released to the network.
    Release {
        /// The released block.
        root: BlockRoot,
        /// Release time.
        at: u64,
    },
    /// The scheduled proposer skipped its slot (block withheld entirely).
    Skip {
        /// The skipped slot.
        slot: Slot,
        /// The proposer that stayed silent.
        proposer: u64,
    },
    /// A validator attested.
    Attest {
        /// Duty slot.
        slot: Slot,
        /// Attesting validator.
        validator: u64,
        /// Head voted for.
        head: BlockRoot,
        /// From when the attestation is visible to others.
        visible_at: u64,
    },
    /// Fork-choice weights of two competing branches, as measured by the
    /// orchestrator at a decision point. Weights are exact rationals
    /// rendered as `num/den`.
    BranchWeights {
        /// Measurement slot.
        slot: Slot,
        /// Measurement time.
        at: u64,
        /// Root of the attacker's branch tip.
        attacker_tip: BlockRoot,
        /// Weight of the attacker's branch.
        attacker_weight: String,
        /// Root of the competing (honest) branch tip.
        honest_tip: BlockRoot,
        /// Weight of the competing branch.
        honest_weight: String,
        /// Head selected by fork choice at this measurement.
        head: BlockRoot,
    },
    /// A contract call completed (successfully or not).
    ContractCall {
        /// Which contract ("pay_to_attest", "pay_to_exit", "pay_to_bias").
        contract: String,
        /// Function invoked.
        function: String,
        /// Caller address.
        caller: String,
        /// "ok" or the error message.
        outcome: String,
        /// Free-form details (offer ids, amounts, config bits).
        detail: String,
        /// Contract balance after the call, in wei.
        balance_wei: String,
        /// Encumbered (committed to open offers) portion after the call.
        encumbered_wei: String,
    },
    /// A validator's voluntary exit joined the exit queue.
    ExitQueued {
        /// Exiting validator.
        validator: u64,
        /// Epoch from which the exit takes effect.
        epoch: Epoch,
    },
}

/// Write events as JSON lines.
pub fn write_jsonl<W: Write>(events: &[TranscriptEvent], mut out: W) -> io::Result<()> {
    for ev in events {
        serde_json::to_writer(&mut out, ev)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsonl_is_stable_and_one_line_per_event() {
        let events = vec![
            TranscriptEvent::Skip { slot: 4, proposer: 9 },
            TranscriptEvent::ExitQueued { validator: 3, epoch: 2 },
        ];
        let mut buf = Vec::new();
        write_jsonl(&events, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "{\"event\":\"skip\",\"slot\":4,\"proposer\":9}\n\
             {\"event\":\"exit_queued\",\"validator\":3,\"epoch\":2}\n"
        );
    }
}
