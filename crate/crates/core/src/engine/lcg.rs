//! 48-bit linear congruential generator and its inversion.

use crate::error::{Error, Result};

pub const LCG_MULTIPLIER: u64 = 25_214_903_917;
pub const LCG_INCREMENT: u64 = 11;
pub const LCG_STATE_BITS: u32 = 48;
pub const LCG_MASK: u64 = (1 << LCG_STATE_BITS) - 1;

/// Multiplicative inverse of [`LCG_MULTIPLIER`] modulo 2^48.
pub const LCG_MULTIPLIER_INVERSE: u64 = inverse_mod_2_64(LCG_MULTIPLIER) & LCG_MASK;

/// Newton iteration `x <- x(2 - ax)`; each step doubles the correct low bits.
const fn inverse_mod_2_64(a: u64) -> u64 {
    let mut x = a;
    let mut i = 0;
    while i < 6 {
        x = x.wrapping_mul(2u64.wrapping_sub(a.wrapping_mul(x)));
        i += 1;
    }
    x
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LcgState(u64);

impl LcgState {
    pub fn new(state: u64) -> Result<Self> {
        if state > LCG_MASK {
            return Err(Error::InvalidArgument(format!(
                "LCG state {state:#x} exceeds 48 bits"
            )));
        }
        Ok(Self(state))
    }

    /// `f_0 = (a XOR k) mod 2^48`.
    pub fn seed(k: u64) -> Self {
        Self((LCG_MULTIPLIER ^ k) & LCG_MASK)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    /// Advances once; the emitted value is the full new state.
    pub fn next(self) -> (Self, u64) {
        let s = LCG_MULTIPLIER
            .wrapping_mul(self.0)
            .wrapping_add(LCG_INCREMENT)
            & LCG_MASK;
        (Self(s), s)
    }

    /// The unique predecessor: `(f - c) * a^-1 mod 2^48`.
    pub fn invert(self) -> Self {
        Self(
            self.0
                .wrapping_sub(LCG_INCREMENT)
                .wrapping_mul(LCG_MULTIPLIER_INVERSE)
                & LCG_MASK,
        )
    }

    /// Low 48 bits of the seed that produced this state when it is `f_0`.
    pub fn seed_bits(self) -> u64 {
        (self.0 ^ LCG_MULTIPLIER) & LCG_MASK
    }
}

/// Result of walking an observed output back to the initial state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedRecovery {
    pub initial_state: LcgState,
    pub seed_bits: u64,
}

/// Recovers `f_0` from consecutive outputs `f_first, f_first+1, ...` and
/// checks the whole run by re-simulating forward.
pub fn recover_seed(outputs: &[u64], first_index: u32) -> Result<SeedRecovery> {
    let (&head, _) = outputs
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("at least one output is required".into()))?;
    if first_index == 0 {
        return Err(Error::InvalidArgument("outputs start at f_1".into()));
    }
    let mut state = LcgState::new(head)?;
    for _ in 0..first_index {
        state = state.invert();
    }
    let initial = state;
    for _ in 1..first_index {
        state = state.next().0;
    }
    for (i, &expected) in outputs.iter().enumerate() {
        let (next, value) = state.next();
        if value != expected {
            return Err(Error::InvalidArgument(format!(
                "output {} does not follow from the recovered state (expected {expected:#014x}, simulated {value:#014x})",
                i + first_index as usize
            )));
        }
        state = next;
    }
    Ok(SeedRecovery {
        initial_state: initial,
        seed_bits: initial.seed_bits(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeding() {
        assert_eq!(LcgState::seed(0).value(), 25_214_903_917);
        assert_eq!(LcgState::seed(LCG_MULTIPLIER).value(), 0);
        assert_eq!(LcgState::seed(1 << 48).value(), 25_214_903_917);
    }

    #[test]
    fn stepping() {
        assert_eq!(LcgState::new(0).unwrap().next().1, 11);
        // (25214903917^2 + 11) mod 2^48, computed with arbitrary precision.
        assert_eq!(LcgState::seed(0).next().1, 205_749_139_540_596);
    }

    #[test]
    fn inverse_constant() {
        assert_eq!(LCG_MULTIPLIER_INVERSE, 246_154_705_703_781);
        assert_eq!(
            LCG_MULTIPLIER.wrapping_mul(LCG_MULTIPLIER_INVERSE) & LCG_MASK,
            1
        );
    }

    #[test]
    fn recovers_seed_from_f3() {
        let seed = 0xDEAD_BEEF_u64;
        let f0 = LcgState::seed(seed);
        let f3 = (0..3).fold(f0, |s, _| s.next().0);
        let back = (0..3).fold(f3, |s, _| s.invert());
        assert_eq!(back, f0);
        assert_eq!(back.seed_bits(), seed & LCG_MASK);
    }

    #[test]
    fn recovery_rejects_bad_input() {
        assert!(recover_seed(&[], 1).is_err());
        assert!(recover_seed(&[1 << 48], 1).is_err());
        let (s1, v1) = LcgState::seed(42).next();
        let (_, v2) = s1.next();
        assert_eq!(recover_seed(&[v1, v2], 1).unwrap().seed_bits, 42);
        assert!(recover_seed(&[v1, v2 ^ 1], 1).is_err());
        assert_eq!(recover_seed(&[v2], 2).unwrap().seed_bits, 42);
    }
}
