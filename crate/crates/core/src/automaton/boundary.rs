use std::fmt;

use crate::error::{Error, Result};
use crate::gray::{gray_position, BinaryState};
use crate::sequence::DegreeSequence;

/// A point `... w_3 w_2 w_1` of the tree boundary with finitely many nonzero
/// letters; `letters[0]` is `w_1`. Trailing zeros are never stored, so the
/// root ray `o` is the empty vector.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundaryPoint {
    letters: Vec<u32>,
}

impl BoundaryPoint {
    pub fn origin() -> Self {
        Self::default()
    }

    pub fn from_letters(mut letters: Vec<u32>) -> Self {
        while letters.last() == Some(&0) {
            letters.pop();
        }
        Self { letters }
    }

    /// Like [`Self::from_letters`], rejecting letters outside their alphabet.
    pub fn checked(letters: Vec<u32>, seq: &DegreeSequence) -> Result<Self> {
        let p = Self::from_letters(letters);
        p.validate(seq)?;
        Ok(p)
    }

    pub fn validate(&self, seq: &DegreeSequence) -> Result<()> {
        for (i, &w) in self.letters.iter().enumerate() {
            if w >= seq.degree(i + 1) {
                return Err(Error::LevelMismatch { expected: seq.degree(i + 1) as usize, found: w as usize });
            }
        }
        Ok(())
    }

    pub fn is_origin(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    /// `w_i` for `i >= 1`.
    pub fn letter(&self, i: usize) -> u32 {
        self.letters.get(i - 1).copied().unwrap_or(0)
    }

    /// Index of the last nonzero letter.
    pub fn support_len(&self) -> usize {
        self.letters.len()
    }

    /// First `depth` letters, zero padded: the level-`depth` vertex on this ray.
    pub fn prefix(&self, depth: usize) -> Vec<u32> {
        (1..=depth).map(|i| self.letter(i)).collect()
    }

    /// Awake/asleep projection onto binary strings.
    pub fn project(&self) -> BinaryState {
        let bits: Vec<u8> = self.letters.iter().map(|&w| u8::from(w > 0)).collect();
        BinaryState::from_front(&bits).expect("boundary points stay within 63 levels")
    }

    /// Gray position of the projection.
    pub fn position(&self) -> u64 {
        gray_position(self.project())
    }

    pub(crate) fn trim(&mut self) {
        while self.letters.last() == Some(&0) {
            self.letters.pop();
        }
    }

    /// Sets `w_i`, growing or trimming storage as needed.
    pub fn set_letter(&mut self, i: usize, w: u32) {
        if self.letters.len() < i {
            if w == 0 {
                return;
            }
            self.letters.resize(i, 0);
        }
        self.letters[i - 1] = w;
        self.trim();
    }
}

impl fmt::Debug for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for BoundaryPoint {
    /// `w_k ... w_1` with `.` separators, `o` for the root ray.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "o");
        }
        let parts: Vec<String> = self.letters.iter().rev().map(u32::to_string).collect();
        write!(f, "{}", parts.join("."))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_trimming() {
        let p = BoundaryPoint::from_letters(vec![1, 0, 2, 0, 0]);
        assert_eq!(p.letters(), &[1, 0, 2]);
        assert_eq!(p.letter(5), 0);
        assert_eq!(p.prefix(4), vec![1, 0, 2, 0]);
        assert_eq!(p.to_string(), "2.0.1");
        assert!(BoundaryPoint::from_letters(vec![0, 0]).is_origin());
        let mut q = p.clone();
        q.set_letter(3, 0);
        assert_eq!(q.letters(), &[1]);
        q.set_letter(4, 0);
        assert_eq!(q.letters(), &[1]);
    }

    #[test]
    fn projection() {
        let p = BoundaryPoint::from_letters(vec![2, 1]);
        assert_eq!(p.project().raw(), 0b11);
        assert_eq!(p.position(), 2);
        let s = DegreeSequence::constant(3).unwrap();
        assert!(BoundaryPoint::checked(vec![3], &s).is_err());
        assert!(BoundaryPoint::checked(vec![2, 2], &s).is_ok());
    }
}
