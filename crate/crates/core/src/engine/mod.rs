//! Bit generators: the LCG baseline and MAC-based counter-mode engines.

mod counter;
mod lcg;

use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::bits::BitStream;
use crate::error::{Error, Result};
use crate::mac::{kmac, CmacParams, HmacParams, KmacParams, KmacVariant, MacKey};

pub use self::counter::{
    counter_block_message, CounterModeContext, MacConstruction, KDF_LABEL, KDF_SEPARATOR,
};
pub use self::lcg::{
    recover_seed, LcgState, SeedRecovery, LCG_INCREMENT, LCG_MASK, LCG_MULTIPLIER,
    LCG_MULTIPLIER_INVERSE, LCG_STATE_BITS,
};

/// The four generator families.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EngineKind {
    Lcg,
    Hmac,
    Cmac,
    #[default]
    Kmac,
}

impl EngineKind {
    pub const ALL: [EngineKind; 4] = [
        EngineKind::Lcg,
        EngineKind::Hmac,
        EngineKind::Cmac,
        EngineKind::Kmac,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Lcg => "lcg",
            EngineKind::Hmac => "hmac",
            EngineKind::Cmac => "cmac",
            EngineKind::Kmac => "kmac",
        }
    }

    /// Default MAC construction: HMAC-SHA-256, AES-128-CMAC, KMAC128.
    pub fn default_construction(self) -> Option<MacConstruction> {
        match self {
            EngineKind::Lcg => None,
            EngineKind::Hmac => Some(MacConstruction::Hmac(HmacParams::default())),
            EngineKind::Cmac => Some(MacConstruction::Cmac(CmacParams::default())),
            EngineKind::Kmac => Some(MacConstruction::Kmac {
                variant: KmacVariant::default(),
                customization: Vec::new(),
            }),
        }
    }

    /// Key (or seed) length the engine expects, in bits.
    pub fn key_bits(self) -> usize {
        self.default_construction().map_or(64, |c| c.key_bits())
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EngineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EngineKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown engine {s:?}")))
    }
}

/// A MAC engine: a fixed construction, key and base message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MacEngine {
    pub construction: MacConstruction,
    pub key: MacKey,
    pub message: Vec<u8>,
}

impl MacEngine {
    pub fn context(&self, bits: u32) -> CounterModeContext {
        CounterModeContext {
            construction: self.construction.clone(),
            key: self.key.clone(),
            base_message: self.message.clone(),
            output_bits: bits,
        }
    }

    /// Concatenates `MAC(k, M_i)` for `i = 1..=ceil(L/l)` and keeps the
    /// leading `L` bits. KMAC produces all `L` bits in one call instead.
    pub fn fill(&self, bits: usize) -> Result<BitStream> {
        let l = u32::try_from(bits)
            .ok()
            .filter(|&l| l > 0)
            .ok_or(Error::InvalidOutputLength(bits))?;
        if let MacConstruction::Kmac {
            variant,
            customization,
        } = &self.construction
        {
            let params = KmacParams::new(*variant, bits).with_customization(customization.clone());
            return Ok(kmac(&self.key, &self.message, &params)?.bits);
        }
        self.context(l).stream(bits)
    }
}

/// A ready-to-run generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrngEngine {
    Lcg(LcgState),
    Mac(MacEngine),
}

impl PrngEngine {
    pub fn lcg(seed: u64) -> Self {
        PrngEngine::Lcg(LcgState::seed(seed))
    }

    pub fn mac(construction: MacConstruction, key: MacKey, message: impl Into<Vec<u8>>) -> Self {
        PrngEngine::Mac(MacEngine {
            construction,
            key,
            message: message.into(),
        })
    }

    /// Produces exactly `bits` bits. MAC engines are pure; the LCG advances
    /// its state, emitting each full 48-bit state MSB-first.
    pub fn fill(&mut self, bits: usize) -> Result<BitStream> {
        if bits == 0 {
            return Err(Error::InvalidOutputLength(0));
        }
        match self {
            PrngEngine::Mac(engine) => engine.fill(bits),
            PrngEngine::Lcg(state) => {
                let mut out = BitStream::with_capacity(bits.div_ceil(48) * 48);
                while out.len() < bits {
                    let (next, value) = state.next();
                    *state = next;
                    out.push_uint(value, LCG_STATE_BITS);
                }
                out.truncate(bits);
                Ok(out)
            }
        }
    }
}

pub fn restart_seed(seed: u64, index: u32) -> u64 {
    let digest = Sha256::new()
        .chain_update(seed.to_be_bytes())
        .chain_update(index.to_be_bytes())
        .finalize();
    u64::from_be_bytes(digest[..8].try_into().expect("8 bytes"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EngineConfig {
    Lcg,
    Mac(MacConstruction),
}

/// Everything needed to (re)start an engine: kind, key and base message.
///
/// For the LCG the key is the 64-bit big-endian seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineDescriptor {
    pub config: EngineConfig,
    pub key: MacKey,
    pub message: Vec<u8>,
}

impl EngineDescriptor {
    pub fn new(kind: EngineKind, key: MacKey, message: impl Into<Vec<u8>>) -> Self {
        let config = kind
            .default_construction()
            .map_or(EngineConfig::Lcg, EngineConfig::Mac);
        Self {
            config,
            key,
            message: message.into(),
        }
    }

    pub fn kind(&self) -> EngineKind {
        match &self.config {
            EngineConfig::Lcg => EngineKind::Lcg,
            EngineConfig::Mac(MacConstruction::Hmac(_)) => EngineKind::Hmac,
            EngineConfig::Mac(MacConstruction::Cmac(_)) => EngineKind::Cmac,
            EngineConfig::Mac(MacConstruction::Kmac { .. }) => EngineKind::Kmac,
        }
    }

    fn lcg_seed(&self) -> Result<u64> {
        let bytes: [u8; 8] =
            self.key
                .as_bytes()
                .try_into()
                .map_err(|_| Error::InvalidKeyLength {
                    expected: 8,
                    actual: self.key.as_bytes().len(),
                })?;
        Ok(u64::from_be_bytes(bytes))
    }

    pub fn engine(&self) -> Result<PrngEngine> {
        Ok(match &self.config {
            EngineConfig::Lcg => PrngEngine::lcg(self.lcg_seed()?),
            EngineConfig::Mac(c) => {
                PrngEngine::mac(c.clone(), self.key.clone(), self.message.clone())
            }
        })
    }

    /// The `index`-th independent restart: MAC engines see
    /// `message || BE32(index)`; the LCG is seeded with the leading 64 bits
    /// of `SHA-256(BE64(seed) || BE32(index))`.
    ///
    /// Consecutive LCG seeds would share the high bits of their first states
    /// (the multiplier is below 2^35), biasing every restart-matrix column.
    pub fn restart(&self, index: u32) -> Result<PrngEngine> {
        Ok(match &self.config {
            EngineConfig::Lcg => PrngEngine::lcg(restart_seed(self.lcg_seed()?, index)),
            EngineConfig::Mac(c) => {
                let mut message = self.message.clone();
                message.extend_from_slice(&index.to_be_bytes());
                PrngEngine::mac(c.clone(), self.key.clone(), message)
            }
        })
    }
}
