//! Packed bit sequences, MSB-first within each byte.

use std::fmt;

use crate::error::{Error, Result};

/// An ordered sequence of bits stored eight to a byte, most significant bit
/// first. Unused trailing bits of the last byte are always zero.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitStream {
    bytes: Vec<u8>,
    len: usize,
}

impl BitStream {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            bytes: Vec::with_capacity(bits.div_ceil(8)),
            len: 0,
        }
    }

    /// Wraps whole bytes; the stream length is `8 * bytes.len()`.
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        let len = bytes.len() * 8;
        Self { bytes, len }
    }

    /// Keeps the leading `bits` bits of `bytes`.
    pub fn from_bytes_truncated(bytes: &[u8], bits: usize) -> Result<Self> {
        if bits > bytes.len() * 8 {
            return Err(Error::LengthMismatch {
                expected: bits,
                actual: bytes.len() * 8,
            });
        }
        let mut out = Self::from_bytes(bytes[..bits.div_ceil(8)].to_vec());
        out.truncate(bits);
        Ok(out)
    }

    /// Parses a string of `'0'`/`'1'` characters. Whitespace is ignored.
    pub fn from_bit_str(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidArgument(format!("not a bit: {other:?}"))),
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Packed bytes; the final byte is zero-padded when `len` is not a
    /// multiple of eight.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    /// # Panics
    /// Panics if `index >= self.len()`.
    pub fn get(&self, index: usize) -> bool {
        assert!(
            index < self.len,
            "bit index {index} out of range {}",
            self.len
        );
        self.bytes[index / 8] >> (7 - index % 8) & 1 == 1
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            self.bytes[self.len / 8] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    /// Appends the leading `bits` bits of `bytes`.
    pub fn extend_from_bytes(&mut self, bytes: &[u8], bits: usize) {
        assert!(bits <= bytes.len() * 8);
        if self.len.is_multiple_of(8) {
            self.bytes.extend_from_slice(&bytes[..bits.div_ceil(8)]);
            self.len += bits.div_ceil(8) * 8;
            self.truncate(self.len - (bits.div_ceil(8) * 8 - bits));
        } else {
            for i in 0..bits {
                self.push(bytes[i / 8] >> (7 - i % 8) & 1 == 1);
            }
        }
    }

    pub fn extend_from_stream(&mut self, other: &BitStream) {
        self.extend_from_bytes(&other.bytes, other.len);
    }

    /// Appends the low `width` bits of `value`, most significant first.
    pub fn push_uint(&mut self, value: u64, width: u32) {
        assert!(width <= 64);
        for shift in (0..width).rev() {
            self.push(value >> shift & 1 == 1);
        }
    }

    pub fn truncate(&mut self, bits: usize) {
        if bits >= self.len {
            return;
        }
        self.len = bits;
        self.bytes.truncate(bits.div_ceil(8));
        if !bits.is_multiple_of(8) {
            let last = self.bytes.len() - 1;
            self.bytes[last] &= 0xFFu8 << (8 - bits % 8);
        }
    }

    /// Reads `width` bits starting at `start` as a big-endian unsigned integer.
    pub fn read_uint(&self, start: usize, width: u32) -> u64 {
        assert!(width <= 64 && start + width as usize <= self.len);
        (start..start + width as usize).fold(0u64, |acc, i| acc << 1 | self.get(i) as u64)
    }

    pub fn slice(&self, start: usize, end: usize) -> BitStream {
        assert!(start <= end && end <= self.len);
        if start.is_multiple_of(8) {
            let mut out = BitStream::from_bytes(self.bytes[start / 8..end.div_ceil(8)].to_vec());
            out.truncate(end - start);
            return out;
        }
        (start..end).map(|i| self.get(i)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.bytes.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_prefix_of(&self, other: &BitStream) -> bool {
        self.len <= other.len && other.slice(0, self.len) == *self
    }
}

impl FromIterator<bool> for BitStream {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut out = BitStream::new();
        for bit in iter {
            out.push(bit);
        }
        out
    }
}

impl fmt::Display for BitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in self.iter() {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "BitStream({} bits: {})",
            self.len,
            hex::encode(&self.bytes)
        )
    }
}
