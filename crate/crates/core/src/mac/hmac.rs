use sha2::{Digest, Sha256};
use sha3::Sha3_256;

use super::{MacKey, MacTag};
use crate::bits::BitStream;

pub const IPAD_BYTE: u8 = 0x36;
pub const OPAD_BYTE: u8 = 0x5C;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum HashFunction {
    #[default]
    Sha256,
    Sha3_256,
}

impl HashFunction {
    pub fn block_bytes(self) -> usize {
        match self {
            HashFunction::Sha256 => 64,
            HashFunction::Sha3_256 => 136,
        }
    }

    pub fn output_bytes(self) -> usize {
        32
    }

    pub fn digest(self, parts: &[&[u8]]) -> Vec<u8> {
        match self {
            HashFunction::Sha256 => {
                let mut h = Sha256::new();
                parts.iter().for_each(|p| h.update(p));
                h.finalize().to_vec()
            }
            HashFunction::Sha3_256 => {
                let mut h = Sha3_256::new();
                parts.iter().for_each(|p| h.update(p));
                h.finalize().to_vec()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct HmacParams {
    pub hash: HashFunction,
}

impl HmacParams {
    pub fn block_bits(&self) -> usize {
        self.hash.block_bytes() * 8
    }

    pub fn output_bits(&self) -> usize {
        self.hash.output_bytes() * 8
    }

    /// Key length a generator should supply: one full hash block.
    pub fn key_bits(&self) -> usize {
        self.block_bits()
    }
}

/// Brings a key to exactly one hash block: long keys are hashed first, then
/// everything is zero-padded on the right.
fn block_key(key: &MacKey, hash: HashFunction) -> Vec<u8> {
    let mut k = if key.as_bytes().len() > hash.block_bytes() {
        hash.digest(&[key.as_bytes()])
    } else {
        key.as_bytes().to_vec()
    };
    k.resize(hash.block_bytes(), 0);
    k
}

/// `h((k ^ opad) || h((k ^ ipad) || message))`.
pub fn hmac(key: &MacKey, message: &[u8], params: &HmacParams) -> MacTag {
    let k = block_key(key, params.hash);
    let inner_key: Vec<u8> = k.iter().map(|b| b ^ IPAD_BYTE).collect();
    let outer_key: Vec<u8> = k.iter().map(|b| b ^ OPAD_BYTE).collect();
    let inner = params.hash.digest(&[&inner_key, message]);
    let outer = params.hash.digest(&[&outer_key, &inner]);
    MacTag {
        bits: BitStream::from_bytes(outer),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rfc4231_case1() -> MacTag {
        hmac(
            &MacKey::new(vec![0x0b; 20]),
            b"Hi There",
            &HmacParams::default(),
        )
    }

    #[test]
    fn pads_are_the_fixed_bit_patterns() {
        assert_eq!(IPAD_BYTE, 0b0011_0110);
        assert_eq!(OPAD_BYTE, 0b0101_1100);
    }

    #[test]
    fn rfc4231_case_1() {
        assert_eq!(
            rfc4231_case1().to_hex(),
            "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7"
        );
    }

    #[test]
    fn deterministic_and_message_sensitive() {
        let key = MacKey::new(vec![0x0b; 20]);
        let p = HmacParams::default();
        assert_eq!(rfc4231_case1(), rfc4231_case1());
        assert_ne!(hmac(&key, b"", &p), hmac(&key, b"x", &p));
    }

    #[test]
    fn output_length_is_hash_length() {
        for hash in [HashFunction::Sha256, HashFunction::Sha3_256] {
            let p = HmacParams { hash };
            assert_eq!(hmac(&MacKey::new(vec![]), b"", &p).len(), 256);
            assert_eq!(
                hmac(&MacKey::new(vec![1; 300]), &[7; 1000], &p).len(),
                p.output_bits()
            );
        }
    }

    #[test]
    fn long_key_equals_its_digest() {
        let long = MacKey::new(vec![0xaa; 131]);
        let hashed = MacKey::new(HashFunction::Sha256.digest(&[long.as_bytes()]));
        let p = HmacParams::default();
        assert_eq!(hmac(&long, b"m", &p), hmac(&hashed, b"m", &p));
    }
}
