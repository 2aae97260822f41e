//! Input-ID hashing.
//!
//! Propositions commit to events by SHA-256 digest only; the raw input ID is
//! revealed later inside True votes as the preimage proof. The host and every
//! submitter and verifier must therefore agree on one canonical hash of the
//! opaque input-ID bytes.

use sha2::{Digest as _, Sha256};

use crate::types::Digest;

/// Error from [`hash_input_id`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HashError {
    /// Input IDs identify events; an empty byte string identifies nothing.
    #[error("input id must be non-empty")]
    EmptyInputId,
}

/// Hashes an opaque event input ID to its proposition digest (SHA-256).
pub fn hash_input_id(input_id: &[u8]) -> Result<Digest, HashError> {
    if input_id.is_empty() {
        return Err(HashError::EmptyInputId);
    }
    let out = Sha256::digest(input_id);
    Ok(Digest(out.into()))
}
