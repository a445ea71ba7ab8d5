//! Fork patterns written as strings of proposer runs.
//!
//! A pattern like `"H A^2"` or `"HHA A"` names who proposes each slot of
//! the contested region: `H` an honest proposer, `A` the adversary, with
//! `^n` repeating a symbol. Adjacent runs of the same side merge, so
//! `"HHA A"` and `"H^2 A^2"` parse identically. Two shapes correspond to
//! executable attacks: `H^h A^a` (orphan `h` honest blocks after the
//! fact) and `A^a H^h A` (hide `a` blocks in advance, then orphan the `h`
//! honest blocks built meanwhile with one boosted release).

use thiserror::Error;

/// Who proposes a run of slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Protocol-following proposer.
    Honest,
    /// The attacking proposer.
    Adversary,
}

/// A maximal run of same-side slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Run {
    /// Which side proposes.
    pub side: Side,
    /// How many consecutive slots (≥ 1).
    pub count: u64,
}

/// Parse failures for fork patterns.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    /// Nothing but whitespace.
    #[error("empty fork pattern")]
    Empty,
    /// A character other than `H`, `A`, `^`, digits, or whitespace.
    #[error("unknown symbol {found:?} in fork pattern")]
    UnknownSymbol {
        /// The offending character.
        found: char,
    },
    /// `^0` repeats a symbol zero times.
    #[error("zero exponent in fork pattern")]
    ZeroExponent,
    /// `^` without a preceding symbol or following count.
    #[error("malformed exponent in fork pattern")]
    MalformedExponent,
    /// Parsed fine but matches no executable attack shape.
    #[error("pattern {pattern:?} is neither H^h A^a nor A^a H^h A")]
    UnsupportedShape {
        /// Normalized rendering of the parsed pattern.
        pattern: String,
    },
}

/// A parsed fork pattern: the merged run-length schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForkPattern {
    runs: Vec<Run>,
}

/// The two executable attack shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackKind {
    /// `H^h A^a`: after `h` honest blocks exist, the adversary builds `a`
    /// blocks from before them and orphans the run.
    ExPost {
        /// Honest blocks to orphan.
        honest: u64,
        /// Adversary blocks, the last one released timely for boost.
        adversary: u64,
    },
    /// `A^a H^h A`: the adversary hides `a` blocks first, lets `h` honest
    /// blocks appear, then releases everything with one boosted block.
    ExAnte {
        /// Hidden adversary blocks.
        adversary: u64,
        /// Honest blocks built while the adversary chain is hidden.
        honest: u64,
    },
}

impl AttackKind {
    /// Honest-run length `h`.
    pub fn honest_run(&self) -> u64 {
        match self {
            AttackKind::ExPost { honest, .. } => *honest,
            AttackKind::ExAnte { honest, .. } => *honest,
        }
    }

    /// Adversary-run length `a` (excluding the ex-ante boost slot).
    pub fn adversary_run(&self) -> u64 {
        match self {
            AttackKind::ExPost { adversary, .. } => *adversary,
            AttackKind::ExAnte { adversary, .. } => *adversary,
        }
    }

    /// Short label used in reports and CSV.
    pub fn label(&self) -> &'static str {
        match self {
            AttackKind::ExPost { .. } => "ex-post",
            AttackKind::ExAnte { .. } => "ex-ante",
        }
    }
}

impl ForkPattern {
    /// The merged runs, in order.
    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    /// Total number of slots the pattern covers.
    pub fn total_slots(&self) -> u64 {
        self.runs.iter().map(|r| r.count).sum()
    }

    /// Canonical rendering: `H^2 A^2` style, `^1` omitted.
    pub fn render(&self) -> String {
        self.runs
            .iter()
            .map(|r| {
                let sym = match r.side {
                    Side::Honest => 'H',
                    Side::Adversary => 'A',
                };
                if r.count == 1 {
                    sym.to_string()
                } else {
                    format!("{sym}^{}", r.count)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Side proposing each slot, earliest first.
    pub fn slot_sides(&self) -> Vec<Side> {
        let mut sides = Vec::new();
        for run in &self.runs {
            for _ in 0..run.count {
                sides.push(run.side);
            }
        }
        sides
    }

    /// Match the pattern against the two executable shapes.
    pub fn classify(&self) -> Result<AttackKind, PatternError> {
        match self.runs.as_slice() {
            [Run { side: Side::Honest, count: h }, Run { side: Side::Adversary, count: a }] => {
                Ok(AttackKind::ExPost {
                    honest: *h,
                    adversary: *a,
                })
            }
            [Run { side: Side::Adversary, count: a }, Run { side: Side::Honest, count: h }, Run { side: Side::Adversary, count: 1 }] => {
                Ok(AttackKind::ExAnte {
                    adversary: *a,
                    honest: *h,
                })
            }
            _ => Err(PatternError::UnsupportedShape {
                pattern: self.render(),
            }),
        }
    }
}

impl std::str::FromStr for ForkPattern {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut runs: Vec<Run> = Vec::new();
        let mut push = |side: Side, count: u64| {
            match runs.last_mut() {
                Some(last) if last.side == side => last.count += count,
                _ => runs.push(Run { side, count }),
            }
        };
        let mut chars = s.chars().peekable();
        while let Some(c) = chars.next() {
            if c.is_whitespace() {
                continue;
            }
            let side = match c {
                'H' | 'h' => Side::Honest,
                'A' | 'a' => Side::Adversary,
                other => return Err(PatternError::UnknownSymbol { found: other }),
            };
            let mut count = 1u64;
            if chars.peek() == Some(&'^') {
                chars.next();
                let mut digits = String::new();
                while chars.peek().is_some_and(|d| d.is_ascii_digit()) {
                    digits.push(chars.next().expect("peeked"));
                }
                if digits.is_empty() {
                    return Err(PatternError::MalformedExponent);
                }
                count = digits
                    .parse()
                    .map_err(|_| PatternError::MalformedExponent)?;
                if count == 0 {
                    return Err(PatternError::ZeroExponent);
                }
            }
            push(side, count);
        }
        if runs.is_empty() {
            return Err(PatternError::Empty);
        }
        Ok(ForkPattern { runs })
    }
}

/// Render an attack kind back to its canonical pattern string.
pub fn pattern_for(kind: AttackKind) -> String {
    let fmt = |sym: char, n: u64| {
        if n == 1 {
            sym.to_string()
        } else {
            format!("{sym}^{n}")
        }
    };
    match kind {
        AttackKind::ExPost { honest, adversary } => {
            format!("{} {}", fmt('H', honest), fmt('A', adversary))
        }
        AttackKind::ExAnte { adversary, honest } => {
            format!("{} {} A", fmt('A', adversary), fmt('H', honest))
        }
    }
}
