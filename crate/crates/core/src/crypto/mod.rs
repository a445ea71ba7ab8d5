//! Pairing-based aggregate signatures and a binary Merkle accumulator.
//!
//! Everything is generic over a [`PairingSuite`], which abstracts the three
//! groups of a pairing-friendly construction. Two implementations ship:
//!
//! * [`Bls381Suite`](bls381::Bls381Suite) — the real BLS12-381 curve with
//!   public keys in G1 and signatures in G2;
//! * [`MockSuite`](mock::MockSuite) — a structurally faithful stand-in that
//!   tracks group elements as exponents over a 61-bit prime field, cheap
//!   enough for tens of thousands of randomized trials.
//!
//! Every pairing evaluation, on either suite, ticks a thread-local counter
//! (see [`pairing_evaluations`]) so callers can assert how many pairings a
//! verification path consumed: a same-message batch costs exactly two, a
//! distinct-message batch exactly `n + 1`.

pub mod bls381;
pub mod merkle;
pub mod mock;

use std::cell::Cell;
use std::fmt;

use thiserror::Error;

/// Errors raised by key management, signing, and verification plumbing.
///
/// Verification itself never reports failure through `Err`: a well-formed
/// but wrong signature yields `Ok(false)` / `false`. Errors are reserved for
/// inputs that violate a precondition (empty seed, empty message, empty
/// aggregation set) or bytes that do not decode to a group element.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CryptoError {
    /// Key generation requires a non-empty seed.
    #[error("key seed must not be empty")]
    EmptySeed,
    /// Signing requires a non-empty message.
    #[error("message must not be empty")]
    EmptyMessage,
    /// Aggregation requires at least one element.
    #[error("cannot aggregate an empty collection")]
    EmptyAggregation,
    /// Bytes did not decode to a valid group element.
    #[error("malformed {kind} encoding: {reason}")]
    Decode {
        /// Which kind of element failed to decode (e.g. `"G1 point"`).
        kind: &'static str,
        /// Human-readable decode failure.
        reason: String,
    },
}

thread_local! {
    static PAIRING_EVALS: Cell<u64> = const { Cell::new(0) };
}

/// Number of pairing evaluations performed on this thread since the last
/// [`reset_pairing_evaluations`].
pub fn pairing_evaluations() -> u64 {
    PAIRING_EVALS.with(Cell::get)
}

/// Reset this thread's pairing-evaluation counter to zero.
pub fn reset_pairing_evaluations() {
    PAIRING_EVALS.with(|c| c.set(0));
}

/// Record one pairing evaluation. Suite implementations must call this
/// exactly once per bilinear-map evaluation.
pub fn note_pairing_evaluation() {
    PAIRING_EVALS.with(|c| c.set(c.get() + 1));
}

/// Abstraction over a pairing construction `e : G1 x G2 -> Gt`.
///
/// Public keys live in G1, message hashes and signatures in G2. The trait
/// exposes only the operations the signature scheme needs, so a mock with
/// trivial discrete logs can implement it alongside the real curve.
pub trait PairingSuite: Copy + Clone + PartialEq + Eq + fmt::Debug + Send + Sync + 'static {
    /// Scalar field element (secret keys, exponents).
    type Scalar: Clone + PartialEq + Eq + fmt::Debug + Send + Sync;
    /// First source group (public keys).
    type G1: Clone + PartialEq + Eq + fmt::Debug + Send + Sync;
    /// Second source group (message hashes, signatures).
    type G2: Clone + PartialEq + Eq + fmt::Debug + Send + Sync;
    /// Target group of the pairing.
    type Gt: Clone + PartialEq + Eq + fmt::Debug + Send + Sync;

    /// Human-readable suite name, used in reports and error messages.
    const NAME: &'static str;
    /// Length in bytes of an encoded G1 element.
    const G1_ENCODED_LEN: usize;
    /// Length in bytes of an encoded G2 element.
    const G2_ENCODED_LEN: usize;

    /// Deterministically derive a non-zero scalar from an arbitrary seed.
    fn scalar_from_seed(seed: &[u8]) -> Self::Scalar;
    /// The fixed G1 generator.
    fn g1_generator() -> Self::G1;
    /// Generator raised to `k` (i.e. `k * G1`).
    fn g1_mul_generator(k: &Self::Scalar) -> Self::G1;
    /// Group operation in G1.
    fn g1_add(a: &Self::G1, b: &Self::G1) -> Self::G1;
    /// Group operation in G2.
    fn g2_add(a: &Self::G2, b: &Self::G2) -> Self::G2;
    /// Scalar multiplication in G2.
    fn g2_mul(point: &Self::G2, k: &Self::Scalar) -> Self::G2;
    /// Hash an arbitrary message onto G2.
    fn hash_to_g2(msg: &[u8]) -> Self::G2;
    /// Evaluate the bilinear map. Implementations must call
    /// [`note_pairing_evaluation`] exactly once.
    fn pairing(p: &Self::G1, q: &Self::G2) -> Self::Gt;
    /// Group operation in Gt (product of pairing outputs).
    fn gt_combine(a: &Self::Gt, b: &Self::Gt) -> Self::Gt;
    /// Serialize a G1 element to its canonical encoding.
    fn g1_to_bytes(p: &Self::G1) -> Vec<u8>;
    /// Deserialize a G1 element, rejecting malformed encodings.
    fn g1_from_bytes(bytes: &[u8]) -> Result<Self::G1, CryptoError>;
    /// Serialize a G2 element to its canonical encoding.
    fn g2_to_bytes(p: &Self::G2) -> Vec<u8>;
    /// Deserialize a G2 element, rejecting malformed encodings.
    fn g2_from_bytes(bytes: &[u8]) -> Result<Self::G2, CryptoError>;
}

macro_rules! group_wrapper {
    ($(#[$doc:meta])* $name:ident, $group:ident, $to:ident, $from:ident, $kind:literal) => {
        $(#[$doc])*
        #[derive(Clone, PartialEq, Eq)]
        pub struct $name<S: PairingSuite>(pub(crate) S::$group);

        impl<S: PairingSuite> $name<S> {
            /// Canonical byte encoding of the underlying group element.
            pub fn to_bytes(&self) -> Vec<u8> {
                S::$to(&self.0)
            }

            /// Decode from the canonical byte encoding.
            pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
                S::$from(bytes).map(Self)
            }

            /// Lowercase hex of [`Self::to_bytes`].
            pub fn to_hex(&self) -> String {
                hex::encode(self.to_bytes())
            }

            /// Decode from lowercase or uppercase hex.
            pub fn from_hex(s: &str) -> Result<Self, CryptoError> {
                let bytes = hex::decode(s).map_err(|e| CryptoError::Decode {
                    kind: $kind,
                    reason: format!("invalid hex: {e}"),
                })?;
                Self::from_bytes(&bytes)
            }
        }

        impl<S: PairingSuite> fmt::Debug for $name<S> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!(stringify!($name), "({})"), self.to_hex())
            }
        }
    };
}

group_wrapper!(
    /// A public key (G1 element).
    PublicKey, G1, g1_to_bytes, g1_from_bytes, "G1 point"
);
group_wrapper!(
    /// Sum of several public keys, committed to ahead of a batched check.
    AggregatePublicKey, G1, g1_to_bytes, g1_from_bytes, "G1 point"
);
group_wrapper!(
    /// A signature (G2 element).
    Signature, G2, g2_to_bytes, g2_from_bytes, "G2 point"
);
group_wrapper!(
    /// Sum of several signatures.
    AggregateSignature, G2, g2_to_bytes, g2_from_bytes, "G2 point"
);

/// A secret scalar. Deliberately not serializable; debug output is redacted.
#[derive(Clone, PartialEq, Eq)]
pub struct SecretKey<S: PairingSuite>(pub(crate) S::Scalar);

impl<S: PairingSuite> fmt::Debug for SecretKey<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SecretKey(..)")
    }
}

/// A secret/public key pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyPair<S: PairingSuite> {
    /// The signing key.
    pub secret: SecretKey<S>,
    /// The corresponding verification key.
    pub public: PublicKey<S>,
}

/// Derive a key pair deterministically from a non-empty seed.
pub fn keygen<S: PairingSuite>(seed: &[u8]) -> Result<KeyPair<S>, CryptoError> {
    if seed.is_empty() {
        return Err(CryptoError::EmptySeed);
    }
    let sk = S::scalar_from_seed(seed);
    let pk = S::g1_mul_generator(&sk);
    Ok(KeyPair {
        secret: SecretKey(sk),
        public: PublicKey(pk),
    })
}

/// Sign a non-empty message: `sigma = sk * H(m)`.
pub fn sign<S: PairingSuite>(sk: &SecretKey<S>, msg: &[u8]) -> Result<Signature<S>, CryptoError> {
    if msg.is_empty() {
        return Err(CryptoError::EmptyMessage);
    }
    let h = S::hash_to_g2(msg);
    Ok(Signature(S::g2_mul(&h, &sk.0)))
}

/// Verify a single signature: `e(g1, sigma) == e(pk, H(m))`.
///
/// Costs exactly two pairing evaluations.
pub fn verify<S: PairingSuite>(pk: &PublicKey<S>, msg: &[u8], sig: &Signature<S>) -> bool {
    if msg.is_empty() {
        return false;
    }
    let lhs = S::pairing(&S::g1_generator(), &sig.0);
    let rhs = S::pairing(&pk.0, &S::hash_to_g2(msg));
    lhs == rhs
}

/// Sum public keys into an aggregate key. Errors on an empty slice.
pub fn aggregate_public_keys<S: PairingSuite>(
    pks: &[PublicKey<S>],
) -> Result<AggregatePublicKey<S>, CryptoError> {
    let (first, rest) = pks.split_first().ok_or(CryptoError::EmptyAggregation)?;
    let sum = rest
        .iter()
        .fold(first.0.clone(), |acc, pk| S::g1_add(&acc, &pk.0));
    Ok(AggregatePublicKey(sum))
}

/// Sum signatures into an aggregate signature. Errors on an empty slice.
pub fn aggregate_signatures<S: PairingSuite>(
    sigs: &[Signature<S>],
) -> Result<AggregateSignature<S>, CryptoError> {
    let (first, rest) = sigs.split_first().ok_or(CryptoError::EmptyAggregation)?;
    let sum = rest
        .iter()
        .fold(first.0.clone(), |acc, s| S::g2_add(&acc, &s.0));
    Ok(AggregateSignature(sum))
}

/// Verify `n` signatures on one shared message with exactly **two** pairing
/// evaluations: `e(g1, sum(sigma_i)) == e(sum(pk_i), H(m))`.
pub fn verify_same_message_batch<S: PairingSuite>(
    pks: &[PublicKey<S>],
    msg: &[u8],
    aggregate: &AggregateSignature<S>,
) -> Result<bool, CryptoError> {
    let apk = aggregate_public_keys(pks)?;
    Ok(verify_aggregate(&apk, msg, aggregate))
}

/// Same-message batch check against a pre-aggregated public key.
///
/// Costs exactly two pairing evaluations. Escrow contracts store the
/// aggregate key at offer time and call this at claim time.
pub fn verify_aggregate<S: PairingSuite>(
    apk: &AggregatePublicKey<S>,
    msg: &[u8],
    aggregate: &AggregateSignature<S>,
) -> bool {
    if msg.is_empty() {
        return false;
    }
    let lhs = S::pairing(&S::g1_generator(), &aggregate.0);
    let rhs = S::pairing(&apk.0, &S::hash_to_g2(msg));
    lhs == rhs
}

/// Verify `n` signatures on per-signer messages with exactly **`n + 1`**
/// pairing evaluations: `e(g1, sum(sigma_i)) == prod_i e(pk_i, H(m_i))`.
pub fn verify_distinct_message_batch<S: PairingSuite>(
    entries: &[(PublicKey<S>, Vec<u8>)],
    aggregate: &AggregateSignature<S>,
) -> Result<bool, CryptoError> {
    let (first, rest) = entries.split_first().ok_or(CryptoError::EmptyAggregation)?;
    if entries.iter().any(|(_, msg)| msg.is_empty()) {
        return Err(CryptoError::EmptyMessage);
    }
    let lhs = S::pairing(&S::g1_generator(), &aggregate.0);
    let mut rhs = S::pairing(&first.0 .0, &S::hash_to_g2(&first.1));
    for (pk, msg) in rest {
        let term = S::pairing(&pk.0, &S::hash_to_g2(msg));
        rhs = S::gt_combine(&rhs, &term);
    }
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::mock::MockSuite;
    use super::*;

    type Pk = PublicKey<MockSuite>;

    fn keypairs(n: usize) -> Vec<KeyPair<MockSuite>> {
        (0..n)
            .map(|i| keygen::<MockSuite>(format!("signer-{i}").as_bytes()).unwrap())
            .collect()
    }

    #[test]
    fn keygen_is_deterministic_and_seed_sensitive() {
        let a = keygen::<MockSuite>(b"alpha").unwrap();
        let b = keygen::<MockSuite>(b"alpha").unwrap();
        let c = keygen::<MockSuite>(b"beta").unwrap();
        assert_eq!(a.public, b.public);
        assert_ne!(a.public, c.public);
        assert_eq!(keygen::<MockSuite>(b""), Err(CryptoError::EmptySeed));
    }

    #[test]
    fn sign_verify_roundtrip_and_rejections() {
        let kp = keygen::<MockSuite>(b"signer").unwrap();
        let other = keygen::<MockSuite>(b"other").unwrap();
        let sig = sign(&kp.secret, b"vote for block 7").unwrap();
        assert!(verify(&kp.public, b"vote for block 7", &sig));
        assert!(!verify(&kp.public, b"vote for block 8", &sig));
        assert!(!verify(&other.public, b"vote for block 7", &sig));
        assert_eq!(sign(&kp.secret, b""), Err(CryptoError::EmptyMessage));
    }

    #[test]
    fn same_message_batch_uses_two_pairings() {
        let kps = keypairs(3);
        let msg = b"attestation data";
        let sigs: Vec<_> = kps.iter().map(|k| sign(&k.secret, msg).unwrap()).collect();
        let agg = aggregate_signatures(&sigs).unwrap();
        let pks: Vec<Pk> = kps.iter().map(|k| k.public.clone()).collect();

        reset_pairing_evaluations();
        assert!(verify_same_message_batch(&pks, msg, &agg).unwrap());
        assert_eq!(pairing_evaluations(), 2);

        // Replace one constituent signature with one over another message.
        let mut tampered = sigs.clone();
        tampered[1] = sign(&kps[1].secret, b"different payload").unwrap();
        let bad = aggregate_signatures(&tampered).unwrap();
        assert!(!verify_same_message_batch(&pks, msg, &bad).unwrap());
    }

    #[test]
    fn distinct_message_batch_uses_n_plus_one_pairings() {
        for n in [1usize, 5, 25] {
            let kps = keypairs(n);
            let entries: Vec<(Pk, Vec<u8>)> = kps
                .iter()
                .enumerate()
                .map(|(i, k)| (k.public.clone(), format!("payload-{i}").into_bytes()))
                .collect();
            let sigs: Vec<_> = kps
                .iter()
                .zip(&entries)
                .map(|(k, (_, m))| sign(&k.secret, m).unwrap())
                .collect();
            let agg = aggregate_signatures(&sigs).unwrap();

            reset_pairing_evaluations();
            assert!(verify_distinct_message_batch(&entries, &agg).unwrap());
            assert_eq!(pairing_evaluations(), (n as u64) + 1);

            // Reordering whole entries is harmless (the pairing product is
            // commutative), but crossing messages between signers is not.
            if n >= 2 {
                let mut reordered = entries.clone();
                reordered.reverse();
                assert!(verify_distinct_message_batch(&reordered, &agg).unwrap());

                let mut crossed = entries.clone();
                let tmp = crossed[0].1.clone();
                crossed[0].1 = crossed[1].1.clone();
                crossed[1].1 = tmp;
                assert!(!verify_distinct_message_batch(&crossed, &agg).unwrap());
            }
        }
    }

    #[test]
    fn aggregation_rejects_empty_collections() {
        assert!(matches!(
            aggregate_public_keys::<MockSuite>(&[]),
            Err(CryptoError::EmptyAggregation)
        ));
        assert!(matches!(
            aggregate_signatures::<MockSuite>(&[]),
            Err(CryptoError::EmptyAggregation)
        ));
    }

    #[test]
    fn aggregation_is_order_independent() {
        let kps = keypairs(6);
        let msg = b"same message";
        let sigs: Vec<_> = kps.iter().map(|k| sign(&k.secret, msg).unwrap()).collect();
        let fwd = aggregate_signatures(&sigs).unwrap();
        let rev: Vec<_> = sigs.iter().rev().cloned().collect();
        let bwd = aggregate_signatures(&rev).unwrap();
        assert_eq!(fwd, bwd);
    }

    #[test]
    fn hex_roundtrip_and_decode_errors() {
        let kp = keygen::<MockSuite>(b"hexer").unwrap();
        let sig = sign(&kp.secret, b"msg").unwrap();
        assert_eq!(
            PublicKey::<MockSuite>::from_hex(&kp.public.to_hex()).unwrap(),
            kp.public
        );
        assert_eq!(
            Signature::<MockSuite>::from_hex(&sig.to_hex()).unwrap(),
            sig
        );
        assert!(matches!(
            PublicKey::<MockSuite>::from_hex("zz"),
            Err(CryptoError::Decode { .. })
        ));
        assert!(matches!(
            PublicKey::<MockSuite>::from_bytes(&[1, 2, 3]),
            Err(CryptoError::Decode { .. })
        ));
    }
}
