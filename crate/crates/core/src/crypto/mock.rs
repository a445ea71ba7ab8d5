//! A discrete-log-transparent pairing suite for high-volume testing.
//!
//! Group elements are represented by their exponents over the Mersenne prime
//! `p = 2^61 - 1`: the "point" `g^x` is stored as `x`. Group addition is
//! exponent addition, scalar multiplication is exponent multiplication, and
//! the bilinear map is `e(g1^a, g2^b) = gT^(a*b)`. Bilinearity therefore
//! holds exactly, which is all the signature scheme relies on, while every
//! operation stays a couple of integer multiplications. Security is of
//! course nil — discrete logs are the identity function — so this suite is
//! strictly for simulation and fuzzing.

use sha2::{Digest, Sha256};

use super::{note_pairing_evaluation, CryptoError, PairingSuite};

/// Field modulus: the Mersenne prime `2^61 - 1`.
pub const MOCK_MODULUS: u64 = (1 << 61) - 1;

/// Exponent-tracking suite over `2^61 - 1`. See the module docs.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct MockSuite;

fn reduce(x: u64) -> u64 {
    x % MOCK_MODULUS
}

fn add_mod(a: u64, b: u64) -> u64 {
    ((a as u128 + b as u128) % MOCK_MODULUS as u128) as u64
}

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MOCK_MODULUS as u128) as u64
}

fn hash_to_exponent(domain: &[u8], data: &[u8]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(domain);
    hasher.update(data);
    let digest = hasher.finalize();
    let word = u64::from_be_bytes(digest[..8].try_into().expect("eight bytes"));
    let reduced = reduce(word);
    // Zero would be the identity element; every message must land on a
    // proper generator multiple or signatures on it would verify vacuously.
    if reduced == 0 {
        1
    } else {
        reduced
    }
}

fn decode_exponent(kind: &'static str, bytes: &[u8]) -> Result<u64, CryptoError> {
    let arr: [u8; 8] = bytes.try_into().map_err(|_| CryptoError::Decode {
        kind,
        reason: format!("expected 8 bytes, got {}", bytes.len()),
    })?;
    let value = u64::from_be_bytes(arr);
    if value >= MOCK_MODULUS {
        return Err(CryptoError::Decode {
            kind,
            reason: format!("value {value} is not a canonical field element"),
        });
    }
    Ok(value)
}

impl PairingSuite for MockSuite {
    type Scalar = u64;
    type G1 = u64;
    type G2 = u64;
    type Gt = u64;

    const NAME: &'static str = "mock-exponent";
    const G1_ENCODED_LEN: usize = 8;
    const G2_ENCODED_LEN: usize = 8;

    fn scalar_from_seed(seed: &[u8]) -> u64 {
        hash_to_exponent(b"mock-scalar", seed)
    }

    fn g1_generator() -> u64 {
        1
    }

    fn g1_mul_generator(k: &u64) -> u64 {
        reduce(*k)
    }

    fn g1_add(a: &u64, b: &u64) -> u64 {
        add_mod(*a, *b)
    }

    fn g2_add(a: &u64, b: &u64) -> u64 {
        add_mod(*a, *b)
    }

    fn g2_mul(point: &u64, k: &u64) -> u64 {
        mul_mod(*point, *k)
    }

    fn hash_to_g2(msg: &[u8]) -> u64 {
        hash_to_exponent(b"mock-hash-to-g2", msg)
    }

    fn pairing(p: &u64, q: &u64) -> u64 {
        note_pairing_evaluation();
        mul_mod(*p, *q)
    }

    fn gt_combine(a: &u64, b: &u64) -> u64 {
        add_mod(*a, *b)
    }

    fn g1_to_bytes(p: &u64) -> Vec<u8> {
        p.to_be_bytes().to_vec()
    }

    fn g1_from_bytes(bytes: &[u8]) -> Result<u64, CryptoError> {
        decode_exponent("G1 point", bytes)
    }

    fn g2_to_bytes(p: &u64) -> Vec<u8> {
        p.to_be_bytes().to_vec()
    }

    fn g2_from_bytes(bytes: &[u8]) -> Result<u64, CryptoError> {
        decode_exponent("G2 point", bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_is_the_61_bit_mersenne_prime() {
        assert_eq!(MOCK_MODULUS, 2_305_843_009_213_693_951);
    }

    #[test]
    fn bilinearity_holds_in_exponents() {
        // e(g1^a, g2^b) combined with e(g1^c, g2^b) must equal e(g1^(a+c), g2^b).
        let (a, b, c) = (123_456_789_u64, 987_654_321_u64, 555_555_u64);
        let lhs = MockSuite::gt_combine(
            &MockSuite::pairing(&a, &b),
            &MockSuite::pairing(&c, &b),
        );
        let rhs = MockSuite::pairing(&add_mod(a, c), &b);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn decode_rejects_non_canonical_values() {
        let over = MOCK_MODULUS.to_be_bytes();
        assert!(MockSuite::g1_from_bytes(&over).is_err());
        let ok = (MOCK_MODULUS - 1).to_be_bytes();
        assert_eq!(MockSuite::g1_from_bytes(&ok).unwrap(), MOCK_MODULUS - 1);
    }
}
