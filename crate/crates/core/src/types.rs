//! Small shared value types: account addresses, token amounts, and exact
//! stake-weight fractions.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

/// Wei, the base token unit. One ether is `10^18` wei.
pub type Wei = u128;

/// Wei per ether.
pub const WEI_PER_ETH: Wei = 1_000_000_000_000_000_000;

/// Wei per gwei.
pub const WEI_PER_GWEI: Wei = 1_000_000_000;

/// Gwei per ether.
pub const GWEI_PER_ETH: u64 = 1_000_000_000;

/// Convert whole ether to wei.
pub const fn eth_to_wei(eth: u64) -> Wei {
    eth as Wei * WEI_PER_ETH
}

/// Render a wei amount as a decimal ether string with full precision,
/// e.g. `1500000000000000000 -> "1.5"`.
pub fn wei_to_eth_string(wei: Wei) -> String {
    let whole = wei / WEI_PER_ETH;
    let frac = wei % WEI_PER_ETH;
    if frac == 0 {
        return format!("{whole}");
    }
    let digits = format!("{frac:018}");
    format!("{whole}.{}", digits.trim_end_matches('0'))
}

/// An account identifier in the sandbox ledger. Free-form labels keep
/// transcripts readable ("briber", "validator-17", ...).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Address(pub String);

impl Address {
    /// Build an address from any displayable label.
    pub fn new(label: impl Into<String>) -> Self {
        Address(label.into())
    }

    /// Conventional address for a validator's withdrawal credentials.
    pub fn for_validator(index: u64) -> Self {
        Address(format!("validator-{index}"))
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Address({})", self.0)
    }
}

impl From<&str> for Address {
    fn from(s: &str) -> Self {
        Address(s.to_string())
    }
}

/// Exact stake fraction used everywhere fork-choice weights are compared.
/// `i128` terms keep every value arising from per-mille grids and
/// thousand-member committees far from overflow.
pub type Weight = Ratio<i128>;

/// Build a weight from a numerator/denominator pair.
pub fn weight(num: i128, den: i128) -> Weight {
    Ratio::new(num, den)
}

/// Render a weight as `"num/den"` in lowest terms (integers as plain
/// numbers), the form used in reports and transcripts.
pub fn weight_to_string(w: &Weight) -> String {
    if w.is_integer() {
        format!("{}", w.numer())
    } else {
        format!("{}/{}", w.numer(), w.denom())
    }
}

/// Parse a weight from `"num/den"` or a bare integer.
pub fn parse_weight(s: &str) -> Result<Weight, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: i128 = num
        .parse()
        .map_err(|e| format!("bad weight numerator {num:?}: {e}"))?;
    let den: i128 = den
        .parse()
        .map_err(|e| format!("bad weight denominator {den:?}: {e}"))?;
    if den == 0 {
        return Err("weight denominator must be non-zero".to_string());
    }
    Ok(Ratio::new(num, den))
}

/// Serde adapter storing a [`Weight`] as its `"num/den"` string.
pub mod weight_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{parse_weight, weight_to_string, Weight};

    /// Serialize as `"num/den"`.
    pub fn serialize<S: Serializer>(w: &Weight, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&weight_to_string(w))
    }

    /// Deserialize from `"num/den"` or a bare integer string.
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Weight, D::Error> {
        let raw = String::deserialize(d)?;
        parse_weight(&raw).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wei_rendering() {
        assert_eq!(wei_to_eth_string(0), "0");
        assert_eq!(wei_to_eth_string(WEI_PER_ETH), "1");
        assert_eq!(wei_to_eth_string(WEI_PER_ETH / 2), "0.5");
        assert_eq!(wei_to_eth_string(3 * WEI_PER_ETH / 2), "1.5");
        assert_eq!(wei_to_eth_string(1), "0.000000000000000001");
    }

    #[test]
    fn weight_rendering() {
        assert_eq!(weight_to_string(&weight(2, 5)), "2/5");
        assert_eq!(weight_to_string(&weight(4, 2)), "2");
        assert_eq!(weight_to_string(&weight(0, 7)), "0");
        assert_eq!(weight_to_string(&weight(21, 20)), "21/20");
    }
}
