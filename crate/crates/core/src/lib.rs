//! Keyed random bit generation and password mapping.
//!
//! * [`mac`]: HMAC, CMAC and KMAC.
//! * [`engine`]: the 48-bit LCG baseline and MAC counter-mode generators.
//! * [`passgen`]: charsets, security-equivalent lengths and bit-to-character mapping.
//! * [`stats`] and [`validation`]: the restart-matrix entropy test, the per-row
//!   IID tests and the character uniformity test.
//! * [`vectors`]: runner for the bundled known-answer files.

pub mod bits;
pub mod engine;
mod error;
pub mod exec;
pub mod mac;
pub mod passgen;
pub mod stats;
pub mod validation;
pub mod vectors;

pub use bits::BitStream;
pub use engine::{EngineDescriptor, EngineKind, PrngEngine};
pub use error::{Error, Result};
pub use exec::Execution;
pub use mac::MacKey;
pub use passgen::{Charset, KeySource, Password, PasswordSpec};
