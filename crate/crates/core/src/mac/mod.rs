//! Keyed MAC constructions used by the counter-mode generators.
//!
//! All three are pure functions of `(key, message, params)`. The hash and
//! block-cipher primitives come from RustCrypto crates; the MAC framing
//! (pads, CBC chain and subkeys, cSHAKE encodings) is implemented here.

mod cmac;
mod hmac;
mod kmac;

use std::fmt;

use sha2::{Digest, Sha256};

use crate::bits::BitStream;

pub use self::cmac::{
    aes_encrypt_block, cmac, cmac_subkeys, CmacCipher, CmacParams, CmacSubkeys, CMAC_BLOCK_BYTES,
};
pub use self::hmac::{hmac, HashFunction, HmacParams, IPAD_BYTE, OPAD_BYTE};
pub use self::kmac::{
    bytepad, cshake, encode_string, kmac, left_encode, right_encode, KmacParams, KmacVariant,
};

/// Raw key material handed to a MAC construction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MacKey {
    bytes: Vec<u8>,
}

impl MacKey {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Self {
        Self {
            bytes: bytes.into(),
        }
    }

    pub fn from_hex(s: &str) -> crate::Result<Self> {
        Ok(Self::new(hex::decode(s.trim())?))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn bits(&self) -> usize {
        self.bytes.len() * 8
    }

    /// First eight hex digits of SHA-256 over the key. Safe to print.
    pub fn fingerprint(&self) -> String {
        hex::encode(&Sha256::digest(&self.bytes)[..4])
    }
}

impl fmt::Debug for MacKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MacKey({} bits, fp {})", self.bits(), self.fingerprint())
    }
}

/// Output of a MAC construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MacTag {
    pub bits: BitStream,
}

impl MacTag {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.bits.as_bytes())
    }
}
