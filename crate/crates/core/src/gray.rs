//! Binary assembly-line states and their reflected Gray-code positions.
//!
//! Bit `i` of a [`BinaryState`] (1-indexed from the front of the line) is the
//! awake/asleep indicator of worker `i`. Position bit `i` is the suffix parity
//! `b_i + b_{i+1} + ... mod 2`, which makes every chain move a `+-1` step.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported truncation level.
pub const MAX_LEVEL: usize = 63;

/// A finite binary string `... b_2 b_1`, stored with bit `i - 1` holding `b_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BinaryState(u64);

impl BinaryState {
    pub const ZERO: BinaryState = BinaryState(0);

    pub fn from_raw(bits: u64) -> Self {
        Self(bits)
    }

    /// Builds a state from `b_1, b_2, ...` (front first).
    pub fn from_front(bits: &[u8]) -> Result<Self> {
        if bits.len() > MAX_LEVEL {
            return Err(Error::OutOfRange(format!("at most {MAX_LEVEL} bits")));
        }
        let mut raw = 0u64;
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => raw |= 1 << i,
                _ => return Err(Error::InvalidInput(format!("bit value {b}"))),
            }
        }
        Ok(Self(raw))
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    /// `b_i` for `i >= 1`.
    pub fn bit(self, i: usize) -> u8 {
        debug_assert!(i >= 1);
        if i > 64 {
            0
        } else {
            ((self.0 >> (i - 1)) & 1) as u8
        }
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Index of the highest nonzero bit, 0 for the empty string.
    pub fn len(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Index of the first awake worker, if any.
    pub fn first_nonzero(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    pub fn toggle(self, i: usize) -> Self {
        Self(self.0 ^ (1 << (i - 1)))
    }
}

impl fmt::Display for BinaryState {
    /// Written `b_k ... b_1`, with `o` for the empty string.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "o");
        }
        write!(f, "{:b}", self.0)
    }
}

/// Position of `b` in the reflected Gray order.
pub fn gray_position(b: BinaryState) -> u64 {
    let mut p = b.0;
    let mut shift = 1;
    while shift < 64 {
        p ^= p >> shift;
        shift <<= 1;
    }
    p
}

/// The state at `position`, for `position < 2^level`.
pub fn gray_bits(position: u64, level: usize) -> Result<BinaryState> {
    if level > MAX_LEVEL || position >> level != 0 {
        return Err(Error::OutOfRange(format!("position {position} outside 2^{level}")));
    }
    Ok(BinaryState(position ^ (position >> 1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(s: &str) -> BinaryState {
        // written b_k..b_1
        let bits: Vec<u8> = s.bytes().rev().map(|c| c - b'0').collect();
        BinaryState::from_front(&bits).unwrap()
    }

    #[test]
    fn position_examples() {
        assert_eq!(gray_position(BinaryState::ZERO), 0);
        assert_eq!(gray_position(st("1")), 1);
        assert_eq!(gray_position(st("11")), 2);
        assert_eq!(gray_position(st("10")), 3);
    }

    #[test]
    fn position_is_suffix_parity() {
        // Oracle straight from the definition.
        for raw in 0u64..1024 {
            let b = BinaryState::from_raw(raw);
            let mut expect = 0u64;
            for i in 1..=11 {
                let parity = (i..=11).map(|j| u64::from(b.bit(j))).sum::<u64>() % 2;
                expect |= parity << (i - 1);
            }
            assert_eq!(gray_position(b), expect);
        }
    }

    #[test]
    fn bits_examples() {
        assert_eq!(gray_bits(0, 5).unwrap(), BinaryState::ZERO);
        assert_eq!(gray_bits(2, 2).unwrap(), st("11"));
        assert_eq!(gray_bits(3, 2).unwrap(), st("10"));
        assert!(gray_bits(4, 2).is_err());
    }

    #[test]
    fn state_helpers() {
        let b = st("10100");
        assert_eq!(b.len(), 5);
        assert_eq!(b.first_nonzero(), Some(3));
        assert_eq!(b.toggle(1), st("10101"));
        assert_eq!(BinaryState::ZERO.first_nonzero(), None);
        assert_eq!(b.to_string(), "10100");
        assert_eq!(BinaryState::ZERO.to_string(), "o");
        assert!(BinaryState::from_front(&[0, 2]).is_err());
    }
}
