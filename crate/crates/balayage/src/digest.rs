//! Stable content digests for reports and CLI outputs.

use sha2::{Digest, Sha256};

/// Hex SHA-256 of raw bytes.
pub fn digest_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hex SHA-256 of a value's `Debug` rendering.
///
/// `Debug` output of the crate's types is deterministic (floats print in
/// shortest round-trip form, maps are ordered), so equal inputs give equal
/// digests across runs.
pub fn digest_debug<T: std::fmt::Debug + ?Sized>(value: &T) -> String {
    digest_bytes(format!("{value:?}").as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_vector() {
        assert_eq!(
            digest_bytes(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
