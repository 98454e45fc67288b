use crate::bits::BitStream;
use crate::error::{Error, Result};
use crate::mac::{cmac, hmac, CmacParams, HmacParams, KmacVariant, MacKey};

pub const KDF_LABEL: &[u8] = b"KDF";
pub const KDF_SEPARATOR: u8 = 0x00;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MacConstruction {
    Hmac(HmacParams),
    Cmac(CmacParams),
    Kmac {
        variant: KmacVariant,
        customization: Vec<u8>,
    },
}

impl MacConstruction {
    /// Bits produced per MAC call in counter mode; `None` for the
    /// extendable-output construction.
    pub fn block_bits(&self) -> Option<usize> {
        match self {
            MacConstruction::Hmac(p) => Some(p.output_bits()),
            MacConstruction::Cmac(p) => Some(p.output_bits()),
            MacConstruction::Kmac { .. } => None,
        }
    }

    pub fn key_bits(&self) -> usize {
        match self {
            MacConstruction::Hmac(p) => p.key_bits(),
            MacConstruction::Cmac(p) => p.key_bits(),
            MacConstruction::Kmac { variant, .. } => variant.key_bits(),
        }
    }
}

/// Inputs of one counter-mode fill.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterModeContext {
    pub construction: MacConstruction,
    pub key: MacKey,
    pub base_message: Vec<u8>,
    pub output_bits: u32,
}

impl CounterModeContext {
    /// `BE32(i) || "KDF" || 0x00 || M || BE32(L)`.
    pub fn block_message(&self, i: u32) -> Result<Vec<u8>> {
        counter_block_message(&self.base_message, self.output_bits, i)
    }

    /// The first `bits` bits of `MAC(k, M_1) || MAC(k, M_2) || ...` with the
    /// length field held at `output_bits`. Not defined for KMAC.
    pub fn stream(&self, bits: usize) -> Result<BitStream> {
        if bits == 0 {
            return Err(Error::InvalidOutputLength(0));
        }
        let block_bits = self
            .construction
            .block_bits()
            .ok_or_else(|| Error::InvalidArgument("KMAC has no counter-mode blocks".into()))?;
        let blocks = u32::try_from(bits.div_ceil(block_bits))
            .map_err(|_| Error::InvalidOutputLength(bits))?;
        let mut out = BitStream::with_capacity(blocks as usize * block_bits);
        for i in 1..=blocks {
            let m = self.block_message(i)?;
            let tag = match &self.construction {
                MacConstruction::Hmac(p) => hmac(&self.key, &m, p),
                MacConstruction::Cmac(p) => cmac(&self.key, &m, p)?,
                MacConstruction::Kmac { .. } => unreachable!(),
            };
            out.extend_from_stream(&tag.bits);
        }
        out.truncate(bits);
        Ok(out)
    }
}

pub fn counter_block_message(message: &[u8], output_bits: u32, i: u32) -> Result<Vec<u8>> {
    if i == 0 {
        return Err(Error::InvalidCounter(i));
    }
    let mut out = Vec::with_capacity(12 + message.len());
    out.extend_from_slice(&i.to_be_bytes());
    out.extend_from_slice(KDF_LABEL);
    out.push(KDF_SEPARATOR);
    out.extend_from_slice(message);
    out.extend_from_slice(&output_bits.to_be_bytes());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        assert_eq!(
            hex::encode(counter_block_message(b"", 256, 1).unwrap()),
            "000000014b44460000000100"
        );
        assert_eq!(
            hex::encode(counter_block_message(b"pw", 64, 1).unwrap()),
            "000000014b444600707700000040"
        );
    }

    #[test]
    fn only_counter_bytes_change() {
        let a = counter_block_message(b"msg", 300, 1).unwrap();
        let b = counter_block_message(b"msg", 300, 2).unwrap();
        assert_eq!(a[4..], b[4..]);
        assert_ne!(a[..4], b[..4]);
    }

    #[test]
    fn counter_zero_is_rejected() {
        assert!(matches!(
            counter_block_message(b"", 8, 0),
            Err(Error::InvalidCounter(0))
        ));
    }
}
