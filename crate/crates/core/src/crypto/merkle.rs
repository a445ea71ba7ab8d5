//! An append-only binary Merkle accumulator with domain-separated hashing.
//!
//! Leaves are hashed as `SHA-256(0x00 || value)` and interior nodes as
//! `SHA-256(0x01 || left || right)`, so a leaf can never be reinterpreted as
//! a node (or vice versa). The tree keeps the minimal depth for its current
//! leaf count — `ceil(log2(n))`, zero for a single leaf — and pads missing
//! right subtrees with an all-zero-leaf ladder.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// A 32-byte SHA-256 output.
pub type Digest32 = [u8; 32];

/// Errors from proof construction. Verification never errors; it returns
/// `false` for anything that does not bind to the root.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MerkleError {
    /// Requested index is not a leaf of the tree.
    #[error("leaf index {index} out of range for a tree with {leaves} leaves")]
    IndexOutOfRange {
        /// The requested index.
        index: usize,
        /// Current number of leaves.
        leaves: usize,
    },
    /// The value supplied to `prove` does not hash to the leaf at `index`.
    #[error("value does not match the leaf stored at index {index}")]
    LeafMismatch {
        /// The requested index.
        index: usize,
    },
    /// The tree has no leaves, so there is nothing to prove.
    #[error("cannot prove membership in an empty tree")]
    EmptyTree,
}

/// Sibling hashes from leaf level (first) up to just below the root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MerkleProof {
    /// One sibling digest per tree level.
    pub path: Vec<Digest32>,
}

/// Append-only Merkle tree over opaque byte strings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MerkleTree {
    leaf_hashes: Vec<Digest32>,
}

/// `SHA-256(0x00 || value)`.
pub fn leaf_hash(value: &[u8]) -> Digest32 {
    let mut h = Sha256::new();
    h.update([0x00]);
    h.update(value);
    h.finalize().into()
}

/// `SHA-256(0x01 || left || right)`.
pub fn node_hash(left: &Digest32, right: &Digest32) -> Digest32 {
    let mut h = Sha256::new();
    h.update([0x01]);
    h.update(left);
    h.update(right);
    h.finalize().into()
}

/// Hash of an all-zero subtree of the given height (height 0 = zero digest).
fn zero_at(level: usize) -> Digest32 {
    let mut d = [0u8; 32];
    for _ in 0..level {
        d = node_hash(&d, &d);
    }
    d
}

impl MerkleTree {
    /// An empty tree.
    pub fn new() -> Self {
        Self::default()
    }

    /// Append a value as the next leaf.
    pub fn insert(&mut self, value: &[u8]) {
        self.leaf_hashes.push(leaf_hash(value));
    }

    /// Number of leaves.
    pub fn len(&self) -> usize {
        self.leaf_hashes.len()
    }

    /// Whether the tree has no leaves.
    pub fn is_empty(&self) -> bool {
        self.leaf_hashes.is_empty()
    }

    /// Current depth: `ceil(log2(n))`, with zero for zero or one leaf.
    pub fn depth(&self) -> u32 {
        match self.leaf_hashes.len() {
            0 | 1 => 0,
            n => (n - 1).ilog2() + 1,
        }
    }

    /// Root digest. The empty tree's root is the zero digest.
    pub fn root(&self) -> Digest32 {
        if self.leaf_hashes.is_empty() {
            return [0u8; 32];
        }
        let mut level = self.leaf_hashes.clone();
        let mut height = 0usize;
        while level.len() > 1 {
            let pad = zero_at(height);
            level = level
                .chunks(2)
                .map(|pair| node_hash(&pair[0], pair.get(1).unwrap_or(&pad)))
                .collect();
            height += 1;
        }
        level[0]
    }

    /// Produce a membership proof for `value` at `index`.
    pub fn prove(&self, value: &[u8], index: usize) -> Result<MerkleProof, MerkleError> {
        if self.leaf_hashes.is_empty() {
            return Err(MerkleError::EmptyTree);
        }
        if index >= self.leaf_hashes.len() {
            return Err(MerkleError::IndexOutOfRange {
                index,
                leaves: self.leaf_hashes.len(),
            });
        }
        if self.leaf_hashes[index] != leaf_hash(value) {
            return Err(MerkleError::LeafMismatch { index });
        }
        let mut path = Vec::with_capacity(self.depth() as usize);
        let mut level = self.leaf_hashes.clone();
        let mut idx = index;
        let mut height = 0usize;
        while level.len() > 1 {
            let pad = zero_at(height);
            let sibling = if idx.is_multiple_of(2) {
                *level.get(idx + 1).unwrap_or(&pad)
            } else {
                level[idx - 1]
            };
            path.push(sibling);
            level = level
                .chunks(2)
                .map(|pair| node_hash(&pair[0], pair.get(1).unwrap_or(&pad)))
                .collect();
            idx /= 2;
            height += 1;
        }
        Ok(MerkleProof { path })
    }
}

/// Check a membership proof: recompute the root from `(value, index, proof)`
/// and compare. Returns `false` for any mismatch, including an index that
/// does not fit in the proof's depth.
pub fn verify_proof(root: &Digest32, value: &[u8], index: usize, proof: &MerkleProof) -> bool {
    if proof.path.len() < usize::BITS as usize && (index >> proof.path.len()) != 0 {
        return false;
    }
    let mut acc = leaf_hash(value);
    for (level, sibling) in proof.path.iter().enumerate() {
        acc = if (index >> level) & 1 == 0 {
            node_hash(&acc, sibling)
        } else {
            node_hash(sibling, &acc)
        };
    }
    acc == *root
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree_of(n: usize) -> (MerkleTree, Vec<Vec<u8>>) {
        let mut t = MerkleTree::new();
        let values: Vec<Vec<u8>> = (0..n).map(|i| format!("leaf-{i}").into_bytes()).collect();
        for v in &values {
            t.insert(v);
        }
        (t, values)
    }

    #[test]
    fn eight_leaves_prove_and_verify_everywhere() {
        let (t, values) = tree_of(8);
        assert_eq!(t.depth(), 3);
        let root = t.root();
        for (i, v) in values.iter().enumerate() {
            let proof = t.prove(v, i).unwrap();
            assert_eq!(proof.path.len(), 3);
            assert!(verify_proof(&root, v, i, &proof));
        }
    }

    #[test]
    fn tampering_with_value_index_or_path_fails() {
        let (t, values) = tree_of(8);
        let root = t.root();
        let proof = t.prove(&values[5], 5).unwrap();

        // Flip one byte of the value.
        let mut bad_value = values[5].clone();
        bad_value[0] ^= 0x01;
        assert!(!verify_proof(&root, &bad_value, 5, &proof));

        // Any other index fails, including out-of-depth ones.
        for wrong in [0usize, 1, 2, 3, 4, 6, 7, 8, 13, 1 << 20] {
            assert!(!verify_proof(&root, &values[5], wrong, &proof));
        }

        // Flip one byte in each path element in turn.
        for level in 0..proof.path.len() {
            let mut bad = proof.clone();
            bad.path[level][7] ^= 0x80;
            assert!(!verify_proof(&root, &values[5], 5, &bad));
        }
    }

    #[test]
    fn single_leaf_tree_has_depth_zero_and_empty_proof() {
        let (t, values) = tree_of(1);
        assert_eq!(t.depth(), 0);
        let proof = t.prove(&values[0], 0).unwrap();
        assert!(proof.path.is_empty());
        assert!(verify_proof(&t.root(), &values[0], 0, &proof));
        assert!(!verify_proof(&t.root(), &values[0], 1, &proof));
    }

    #[test]
    fn prove_errors_are_specific() {
        let (t, values) = tree_of(3);
        assert_eq!(
            t.prove(&values[0], 9),
            Err(MerkleError::IndexOutOfRange { index: 9, leaves: 3 })
        );
        assert_eq!(
            t.prove(&values[0], 1),
            Err(MerkleError::LeafMismatch { index: 1 })
        );
        let empty = MerkleTree::new();
        assert_eq!(empty.prove(b"x", 0), Err(MerkleError::EmptyTree));
    }

    #[test]
    fn depth_grows_as_ceil_log2() {
        let cases = [
            (1usize, 0u32),
            (2, 1),
            (3, 2),
            (4, 2),
            (5, 3),
            (8, 3),
            (9, 4),
        ];
        for (n, d) in cases {
            let (t, _) = tree_of(n);
            assert_eq!(t.depth(), d, "n={n}");
        }
    }

    #[test]
    fn root_changes_after_every_insert() {
        let mut t = MerkleTree::new();
        let mut seen = vec![t.root()];
        for i in 0..20 {
            t.insert(format!("v{i}").as_bytes());
            let r = t.root();
            assert!(!seen.contains(&r), "root repeated after insert {i}");
            seen.push(r);
        }
    }

    #[test]
    fn odd_trees_pad_with_zero_subtrees() {
        // Manually recompute a 3-leaf root.
        let (t, values) = tree_of(3);
        let l: Vec<Digest32> = values.iter().map(|v| leaf_hash(v)).collect();
        let n01 = node_hash(&l[0], &l[1]);
        let n2z = node_hash(&l[2], &[0u8; 32]);
        assert_eq!(t.root(), node_hash(&n01, &n2z));
        // Proofs still verify for every leaf.
        let root = t.root();
        for (i, v) in values.iter().enumerate() {
            assert!(verify_proof(&root, v, i, &t.prove(v, i).unwrap()));
        }
    }
}
