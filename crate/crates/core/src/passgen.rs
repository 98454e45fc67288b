//! Mapping random bits to passwords, length requirements and key derivation.

use std::collections::HashSet;
use std::fmt;

use sha2::{Digest, Sha256};

use crate::bits::BitStream;
use crate::engine::PrngEngine;
use crate::error::{Error, Result};
use crate::mac::MacKey;

pub const DEFAULT_CHAR_BITS: u32 = 32;
pub const DEFAULT_STRENGTH_BITS: u32 = 128;

const SPECIALS: [char; 10] = ['~', '!', '@', '#', '$', '%', '^', '+', '-', '='];

/// An ordered alphabet; a symbol's index is its position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Charset {
    symbols: Vec<char>,
}

impl Charset {
    pub fn new(symbols: impl IntoIterator<Item = char>) -> Result<Self> {
        let symbols: Vec<char> = symbols.into_iter().collect();
        let mut seen = HashSet::new();
        if let Some(&dup) = symbols.iter().find(|c| !seen.insert(**c)) {
            return Err(Error::DuplicateSymbol(dup));
        }
        if symbols.len() < 2 {
            return Err(Error::CharsetTooSmall(symbols.len()));
        }
        Ok(Self { symbols })
    }

    /// Presets 1 (letters, 52), 2 (+ digits, 62) and 3 (+ ten specials, 72).
    pub fn preset(id: u8) -> Result<Self> {
        let letters = ('a'..='z').chain('A'..='Z');
        let symbols: Vec<char> = match id {
            1 => letters.collect(),
            2 => letters.chain('0'..='9').collect(),
            3 => letters.chain('0'..='9').chain(SPECIALS).collect(),
            other => return Err(Error::UnknownCharset(other)),
        };
        Self::new(symbols)
    }

    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn contains(&self, c: char) -> bool {
        self.symbols.contains(&c)
    }

    pub fn index_of(&self, c: char) -> Option<usize> {
        self.symbols.iter().position(|&s| s == c)
    }

    /// Smallest bits-per-character that can address every symbol.
    pub fn min_char_bits(&self) -> u32 {
        (self.size() as u64).next_power_of_two().trailing_zeros()
    }
}

/// `ceil(strength / log2 q)`: characters needed to match `strength_bits`.
pub fn required_length(q: usize, strength_bits: u32) -> Result<usize> {
    if q < 2 {
        return Err(Error::CharsetTooSmall(q));
    }
    if strength_bits == 0 {
        return Err(Error::InvalidArgument(
            "strength must be at least 1 bit".into(),
        ));
    }
    if q.is_power_of_two() {
        let per_char = q.trailing_zeros();
        return Ok(strength_bits.div_ceil(per_char) as usize);
    }
    // log2 q is irrational here, so the quotient is never an integer.
    Ok((strength_bits as f64 / (q as f64).log2()).ceil() as usize)
}

/// Where MAC key material comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KeySource {
    Explicit(Vec<u8>),
    Timestamp(u64),
}

impl KeySource {
    pub fn from_hex(s: &str) -> Result<Self> {
        Ok(KeySource::Explicit(hex::decode(s.trim())?))
    }
}

/// Explicit keys must already have the target length. Timestamps are
/// stretched as `H(t) || H(H(t)) || ...` over `BE64(t)`, `H` = SHA-256.
pub fn derive_key(source: &KeySource, target_bits: usize) -> Result<MacKey> {
    if target_bits == 0 || !target_bits.is_multiple_of(8) {
        return Err(Error::InvalidOutputLength(target_bits));
    }
    let target = target_bits / 8;
    match source {
        KeySource::Explicit(bytes) if bytes.len() == target => Ok(MacKey::new(bytes.clone())),
        KeySource::Explicit(bytes) => Err(Error::InvalidKeyLength {
            expected: target,
            actual: bytes.len(),
        }),
        KeySource::Timestamp(t) => {
            let mut out = Vec::with_capacity(target + 32);
            let mut link = Sha256::digest(t.to_be_bytes());
            while out.len() < target {
                out.extend_from_slice(&link);
                link = Sha256::digest(link);
            }
            out.truncate(target);
            Ok(MacKey::new(out))
        }
    }
}

/// Splits `T` into `n` consecutive `width`-bit big-endian integers.
pub fn split_bits(bits: &BitStream, n: usize, width: u32) -> Result<Vec<u64>> {
    if width == 0 || width > 64 {
        return Err(Error::InvalidArgument(format!(
            "split width {width} outside 1..=64"
        )));
    }
    let expected = n * width as usize;
    if bits.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            actual: bits.len(),
        });
    }
    Ok((0..n)
        .map(|i| bits.read_uint(i * width as usize, width))
        .collect())
}

pub fn map_char(t: u64, charset: &Charset) -> char {
    charset.symbols[(t % charset.size() as u64) as usize]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PasswordSpec {
    pub charset: Charset,
    pub length: usize,
    pub char_bits: u32,
}

impl PasswordSpec {
    pub fn new(charset: Charset, length: usize, char_bits: u32) -> Result<Self> {
        if length == 0 {
            return Err(Error::InvalidArgument(
                "password length must be at least 1".into(),
            ));
        }
        let min = charset.min_char_bits();
        if char_bits < min || char_bits > 64 {
            return Err(Error::InvalidCharBits {
                min,
                actual: char_bits,
            });
        }
        Ok(Self {
            charset,
            length,
            char_bits,
        })
    }

    /// Length chosen to match `strength_bits`, with the default `N`.
    pub fn for_strength(charset: Charset, strength_bits: u32) -> Result<Self> {
        let n = required_length(charset.size(), strength_bits)?;
        Self::new(charset, n, DEFAULT_CHAR_BITS)
    }

    pub fn total_bits(&self) -> usize {
        self.length * self.char_bits as usize
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Password(String);

impl Password {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.chars().count()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Password {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Password {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Password({} chars)", self.len())
    }
}

/// Maps an already generated stream of `n * N` bits to a password.
pub fn password_from_bits(bits: &BitStream, spec: &PasswordSpec) -> Result<Password> {
    let values = split_bits(bits, spec.length, spec.char_bits)?;
    Ok(Password(
        values
            .into_iter()
            .map(|t| map_char(t, &spec.charset))
            .collect(),
    ))
}

/// Draws `n * N` bits from the engine and maps them to characters.
pub fn generate_password(engine: &mut PrngEngine, spec: &PasswordSpec) -> Result<Password> {
    let bits = engine.fill(spec.total_bits())?;
    password_from_bits(&bits, spec)
}
