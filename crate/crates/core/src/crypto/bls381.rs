//! The BLS12-381 pairing suite: public keys in G1 (48-byte compressed),
//! signatures in G2 (96-byte compressed), hash-to-curve via
//! expand-message-XMD over SHA-256 with the standard signature ciphersuite
//! domain tag.

use bls12_381::hash_to_curve::{ExpandMsgXmd, HashToCurve};
use bls12_381::{pairing, G1Affine, G1Projective, G2Affine, G2Projective, Gt, Scalar};
use sha2::{Digest, Sha512};

use super::{note_pairing_evaluation, CryptoError, PairingSuite};

/// Domain separation tag for hashing messages onto G2 (the RO variant of the
/// BLS signature ciphersuite over BLS12-381 G2 with SHA-256).
pub const HASH_TO_G2_DST: &[u8] = b"BLS_SIG_BLS12381G2_XMD:SHA-256_SSWU_RO_POP_";

/// The production-grade suite over the BLS12-381 curve.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Bls381Suite;

impl PairingSuite for Bls381Suite {
    type Scalar = Scalar;
    type G1 = G1Projective;
    type G2 = G2Projective;
    type Gt = Gt;

    const NAME: &'static str = "bls12-381";
    const G1_ENCODED_LEN: usize = 48;
    const G2_ENCODED_LEN: usize = 96;

    fn scalar_from_seed(seed: &[u8]) -> Scalar {
        // A 64-byte wide reduction keeps the output statistically uniform
        // over the scalar field.
        let digest = Sha512::new().chain(b"bls381-keygen").chain(seed).finalize();
        let wide: [u8; 64] = digest[..].try_into().expect("sha512 is 64 bytes");
        let scalar = Scalar::from_bytes_wide(&wide);
        if scalar == Scalar::zero() {
            Scalar::one()
        } else {
            scalar
        }
    }

    fn g1_generator() -> G1Projective {
        G1Projective::generator()
    }

    fn g1_mul_generator(k: &Scalar) -> G1Projective {
        G1Projective::generator() * k
    }

    fn g1_add(a: &G1Projective, b: &G1Projective) -> G1Projective {
        a + b
    }

    fn g2_add(a: &G2Projective, b: &G2Projective) -> G2Projective {
        a + b
    }

    fn g2_mul(point: &G2Projective, k: &Scalar) -> G2Projective {
        point * k
    }

    fn hash_to_g2(msg: &[u8]) -> G2Projective {
        <G2Projective as HashToCurve<ExpandMsgXmd<sha2::Sha256>>>::hash_to_curve(
            msg,
            HASH_TO_G2_DST,
        )
    }

    fn pairing(p: &G1Projective, q: &G2Projective) -> Gt {
        note_pairing_evaluation();
        pairing(&G1Affine::from(p), &G2Affine::from(q))
    }

    fn gt_combine(a: &Gt, b: &Gt) -> Gt {
        a + b
    }

    fn g1_to_bytes(p: &G1Projective) -> Vec<u8> {
        G1Affine::from(p).to_compressed().to_vec()
    }

    fn g1_from_bytes(bytes: &[u8]) -> Result<G1Projective, CryptoError> {
        let arr: [u8; 48] = bytes.try_into().map_err(|_| CryptoError::Decode {
            kind: "G1 point",
            reason: format!("expected 48 bytes, got {}", bytes.len()),
        })?;
        Option::<G1Affine>::from(G1Affine::from_compressed(&arr))
            .map(G1Projective::from)
            .ok_or(CryptoError::Decode {
                kind: "G1 point",
                reason: "bytes are not a valid compressed point".to_string(),
            })
    }

    fn g2_to_bytes(p: &G2Projective) -> Vec<u8> {
        G2Affine::from(p).to_compressed().to_vec()
    }

    fn g2_from_bytes(bytes: &[u8]) -> Result<G2Projective, CryptoError> {
        let arr: [u8; 96] = bytes.try_into().map_err(|_| CryptoError::Decode {
            kind: "G2 point",
            reason: format!("expected 96 bytes, got {}", bytes.len()),
        })?;
        Option::<G2Affine>::from(G2Affine::from_compressed(&arr))
            .map(G2Projective::from)
            .ok_or(CryptoError::Decode {
                kind: "G2 point",
                reason: "bytes are not a valid compressed point".to_string(),
            })
    }
}
