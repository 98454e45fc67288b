use aes::cipher::{Array, BlockCipherEncrypt, KeyInit};
use aes::{Aes128, Aes256};

use super::{MacKey, MacTag};
use crate::bits::BitStream;
use crate::error::{Error, Result};

pub const CMAC_BLOCK_BYTES: usize = 16;

/// Reduction constant for doubling in GF(2^128).
const RB: u8 = 0x87;

type Block = [u8; CMAC_BLOCK_BYTES];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CmacCipher {
    #[default]
    Aes128,
    Aes256,
}

impl CmacCipher {
    pub fn key_bytes(self) -> usize {
        match self {
            CmacCipher::Aes128 => 16,
            CmacCipher::Aes256 => 32,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct CmacParams {
    pub cipher: CmacCipher,
}

impl CmacParams {
    pub fn block_bits(&self) -> usize {
        CMAC_BLOCK_BYTES * 8
    }

    pub fn output_bits(&self) -> usize {
        self.block_bits()
    }

    pub fn key_bits(&self) -> usize {
        self.cipher.key_bytes() * 8
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CmacSubkeys {
    pub k1: Block,
    pub k2: Block,
}

#[allow(clippy::large_enum_variant)]
enum Cipher {
    Aes128(Aes128),
    Aes256(Aes256),
}

impl Cipher {
    fn new(key: &MacKey, kind: CmacCipher) -> Result<Self> {
        let bytes = key.as_bytes();
        if bytes.len() != kind.key_bytes() {
            return Err(Error::InvalidKeyLength {
                expected: kind.key_bytes(),
                actual: bytes.len(),
            });
        }
        Ok(match kind {
            CmacCipher::Aes128 => Cipher::Aes128(Aes128::new(
                &Array::try_from(bytes).expect("length checked"),
            )),
            CmacCipher::Aes256 => Cipher::Aes256(Aes256::new(
                &Array::try_from(bytes).expect("length checked"),
            )),
        })
    }

    fn encrypt(&self, block: &Block) -> Block {
        let mut b = Array::from(*block);
        match self {
            Cipher::Aes128(c) => c.encrypt_block(&mut b),
            Cipher::Aes256(c) => c.encrypt_block(&mut b),
        }
        b.into()
    }
}

/// Left shift by one bit, XOR-ing in `RB` when the top bit falls off.
fn double(block: &Block) -> Block {
    let mut out = [0u8; CMAC_BLOCK_BYTES];
    for i in 0..CMAC_BLOCK_BYTES {
        let carry = block.get(i + 1).map_or(0, |b| b >> 7);
        out[i] = block[i] << 1 | carry;
    }
    if block[0] & 0x80 != 0 {
        out[CMAC_BLOCK_BYTES - 1] ^= RB;
    }
    out
}

fn xor(a: &mut Block, b: &Block) {
    a.iter_mut().zip(b).for_each(|(x, y)| *x ^= y);
}

fn subkeys_for(cipher: &Cipher) -> CmacSubkeys {
    let l = cipher.encrypt(&[0u8; CMAC_BLOCK_BYTES]);
    let k1 = double(&l);
    let k2 = double(&k1);
    CmacSubkeys { k1, k2 }
}

/// Single-block AES encryption; the key length selects AES-128 or AES-256.
pub fn aes_encrypt_block(key: &MacKey, block: &Block) -> Result<Block> {
    let kind = if key.as_bytes().len() == 32 {
        CmacCipher::Aes256
    } else {
        CmacCipher::Aes128
    };
    Ok(Cipher::new(key, kind)?.encrypt(block))
}

/// K1 = dbl(AES_k(0^128)), K2 = dbl(K1).
pub fn cmac_subkeys(key: &MacKey, params: &CmacParams) -> Result<CmacSubkeys> {
    Ok(subkeys_for(&Cipher::new(key, params.cipher)?))
}

/// CBC-MAC over the message with `c_0 = 0`, where the final block is masked
/// with K1 when complete and with K2 after `10*` padding otherwise.
pub fn cmac(key: &MacKey, message: &[u8], params: &CmacParams) -> Result<MacTag> {
    let cipher = Cipher::new(key, params.cipher)?;
    let keys = subkeys_for(&cipher);

    let blocks = message.len().div_ceil(CMAC_BLOCK_BYTES).max(1);
    let complete = !message.is_empty() && message.len().is_multiple_of(CMAC_BLOCK_BYTES);
    let (head, tail) = message.split_at((blocks - 1) * CMAC_BLOCK_BYTES);

    let mut last = [0u8; CMAC_BLOCK_BYTES];
    last[..tail.len()].copy_from_slice(tail);
    if complete {
        xor(&mut last, &keys.k1);
    } else {
        last[tail.len()] = 0x80;
        xor(&mut last, &keys.k2);
    }

    let mut chain = [0u8; CMAC_BLOCK_BYTES];
    for block in head.chunks_exact(CMAC_BLOCK_BYTES) {
        xor(&mut chain, block.try_into().expect("exact chunk"));
        chain = cipher.encrypt(&chain);
    }
    xor(&mut chain, &last);
    Ok(MacTag {
        bits: BitStream::from_bytes(cipher.encrypt(&chain).to_vec()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rfc_key() -> MacKey {
        MacKey::from_hex("2b7e151628aed2a6abf7158809cf4f3c").unwrap()
    }

    #[test]
    fn rfc4493_subkeys() {
        let keys = cmac_subkeys(&rfc_key(), &CmacParams::default()).unwrap();
        assert_eq!(hex::encode(keys.k1), "fbeed618357133667c85e08f7236a8de");
        assert_eq!(hex::encode(keys.k2), "f7ddac306ae266ccf90bc11ee46d513b");
    }

    #[test]
    fn rfc4493_examples_1_and_2() {
        let p = CmacParams::default();
        assert_eq!(
            cmac(&rfc_key(), b"", &p).unwrap().to_hex(),
            "bb1d6929e95937287fa37d129b756746"
        );
        let one_block = hex::decode("6bc1bee22e409f96e93d7e117393172a").unwrap();
        assert_eq!(
            cmac(&rfc_key(), &one_block, &p).unwrap().to_hex(),
            "070a16b46b4d4144f79bdd9dd04a287c"
        );
    }

    #[test]
    fn padding_paths_differ() {
        let p = CmacParams::default();
        let msg = [0x5a; 16];
        assert_ne!(
            cmac(&rfc_key(), &msg, &p).unwrap(),
            cmac(&rfc_key(), &msg[..15], &p).unwrap()
        );
    }

    #[test]
    fn wrong_key_length_is_rejected() {
        let err = cmac(&MacKey::new(vec![0; 15]), b"", &CmacParams::default()).unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidKeyLength {
                expected: 16,
                actual: 15
            }
        ));
        let aes256 = CmacParams {
            cipher: CmacCipher::Aes256,
        };
        assert!(cmac(&rfc_key(), b"", &aes256).is_err());
    }

    #[test]
    fn doubling_reduces_on_carry() {
        let mut top = [0u8; 16];
        top[0] = 0x80;
        let mut expected = [0u8; 16];
        expected[15] = 0x87;
        assert_eq!(double(&top), expected);
    }
}
