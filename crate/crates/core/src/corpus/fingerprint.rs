use std::fmt;

use sha2::{Digest, Sha256};

/// 128-bit snippet identity: the first 16 bytes of the SHA-256 digest of the
/// exact code bytes, read big-endian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fingerprint(pub u128);

pub fn fingerprint(code: &str) -> Fingerprint {
    let digest = Sha256::digest(code.as_bytes());
    let mut head = [0u8; 16];
    head.copy_from_slice(&digest[..16]);
    Fingerprint(u128::from_be_bytes(head))
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:032x}", self.0)
    }
}
