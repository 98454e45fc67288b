//! KMAC over an in-crate cSHAKE sponge; the permutation is `keccak::f1600`.

use super::{MacKey, MacTag};
use crate::bits::BitStream;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum KmacVariant {
    #[default]
    Kmac128,
    Kmac256,
}

impl KmacVariant {
    /// Sponge rate in bytes.
    pub fn rate(self) -> usize {
        match self {
            KmacVariant::Kmac128 => 168,
            KmacVariant::Kmac256 => 136,
        }
    }

    /// Default generator key length.
    pub fn key_bits(self) -> usize {
        match self {
            KmacVariant::Kmac128 | KmacVariant::Kmac256 => 256,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KmacParams {
    pub variant: KmacVariant,
    pub output_bits: usize,
    pub customization: Vec<u8>,
}

impl KmacParams {
    pub fn new(variant: KmacVariant, output_bits: usize) -> Self {
        Self {
            variant,
            output_bits,
            customization: Vec::new(),
        }
    }

    pub fn with_customization(mut self, s: impl Into<Vec<u8>>) -> Self {
        self.customization = s.into();
        self
    }
}

struct Sponge {
    state: [u64; 25],
    rate: usize,
    pos: usize,
}

impl Sponge {
    fn new(rate: usize) -> Self {
        Self {
            state: [0; 25],
            rate,
            pos: 0,
        }
    }

    fn xor_byte(&mut self, idx: usize, byte: u8) {
        self.state[idx / 8] ^= (byte as u64) << (8 * (idx % 8));
    }

    fn absorb(&mut self, data: &[u8]) {
        for &b in data {
            self.xor_byte(self.pos, b);
            self.pos += 1;
            if self.pos == self.rate {
                keccak::f1600(&mut self.state);
                self.pos = 0;
            }
        }
    }

    fn squeeze(mut self, domain: u8, out_len: usize) -> Vec<u8> {
        self.xor_byte(self.pos, domain);
        self.xor_byte(self.rate - 1, 0x80);
        keccak::f1600(&mut self.state);
        let mut out = Vec::with_capacity(out_len);
        let mut idx = 0;
        while out.len() < out_len {
            if idx == self.rate {
                keccak::f1600(&mut self.state);
                idx = 0;
            }
            out.push((self.state[idx / 8] >> (8 * (idx % 8))) as u8);
            idx += 1;
        }
        out
    }
}

fn minimal_be(x: u64) -> Vec<u8> {
    let bytes = x.to_be_bytes();
    let skip = bytes.iter().take_while(|&&b| b == 0).count().min(7);
    bytes[skip..].to_vec()
}

pub fn left_encode(x: u64) -> Vec<u8> {
    let body = minimal_be(x);
    let mut out = vec![body.len() as u8];
    out.extend(body);
    out
}

pub fn right_encode(x: u64) -> Vec<u8> {
    let mut out = minimal_be(x);
    out.push(out.len() as u8);
    out
}

pub fn encode_string(s: &[u8]) -> Vec<u8> {
    let mut out = left_encode(s.len() as u64 * 8);
    out.extend_from_slice(s);
    out
}

pub fn bytepad(x: &[u8], w: usize) -> Vec<u8> {
    let mut out = left_encode(w as u64);
    out.extend_from_slice(x);
    out.resize(out.len().div_ceil(w) * w, 0);
    out
}

/// cSHAKE with function name `name` and customization `custom`, returning
/// `out_len` bytes. Falls back to plain SHAKE when both strings are empty.
pub fn cshake(
    variant: KmacVariant,
    data: &[u8],
    out_len: usize,
    name: &[u8],
    custom: &[u8],
) -> Vec<u8> {
    let mut sponge = Sponge::new(variant.rate());
    if name.is_empty() && custom.is_empty() {
        sponge.absorb(data);
        return sponge.squeeze(0x1F, out_len);
    }
    let mut prefix = encode_string(name);
    prefix.extend(encode_string(custom));
    sponge.absorb(&bytepad(&prefix, variant.rate()));
    sponge.absorb(data);
    sponge.squeeze(0x04, out_len)
}

/// `cSHAKE(bytepad(encode_string(K)) || M || right_encode(L), L, "KMAC", S)`.
///
/// Lengths that are not a multiple of eight keep the leading bits of the
/// final byte.
pub fn kmac(key: &MacKey, message: &[u8], params: &KmacParams) -> Result<MacTag> {
    let bits = params.output_bits;
    if bits < 8 {
        return Err(Error::InvalidOutputLength(bits));
    }
    let rate = params.variant.rate();
    let mut input = bytepad(&encode_string(key.as_bytes()), rate);
    input.extend_from_slice(message);
    input.extend(right_encode(bits as u64));
    let out = cshake(
        params.variant,
        &input,
        bits.div_ceil(8),
        b"KMAC",
        &params.customization,
    );
    Ok(MacTag {
        bits: BitStream::from_bytes_truncated(&out, bits)?,
    })
}
