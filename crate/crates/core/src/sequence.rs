//! Bounded degree sequences `m_1, m_2, ...` and the scale quantities derived
//! from them: volumes `v_l`, resistance factors `r_l`, scales `n_l = r_l v_l`,
//! the inverse level function `l(n)` and the exponent `alpha_n`.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::ln_biguint;

/// How `m_l` is continued past the explicit head.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Extension {
    /// Repeat the last head entry forever.
    Constant,
    /// Repeat the last `period` head entries forever.
    Periodic { period: usize },
}

#[derive(Debug, Clone, Deserialize)]
struct RawSequence {
    head: Vec<u32>,
    extension: Extension,
}

/// A bounded sequence of tree degrees `m_l >= 2`, 1-indexed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSequence")]
pub struct DegreeSequence {
    head: Vec<u32>,
    extension: Extension,
}

impl TryFrom<RawSequence> for DegreeSequence {
    type Error = Error;

    fn try_from(raw: RawSequence) -> Result<Self> {
        DegreeSequence::new(raw.head, raw.extension)
    }
}

impl DegreeSequence {
    pub fn new(head: Vec<u32>, extension: Extension) -> Result<Self> {
        if head.is_empty() {
            return Err(Error::InvalidSequence("head must be nonempty".into()));
        }
        if let Some(bad) = head.iter().find(|&&m| m < 2) {
            return Err(Error::InvalidSequence(format!("entry {bad} is below 2")));
        }
        if let Extension::Periodic { period } = extension {
            if period == 0 || period > head.len() {
                return Err(Error::InvalidSequence(format!(
                    "period {period} must lie in 1..={}",
                    head.len()
                )));
            }
        }
        Ok(Self { head, extension })
    }

    /// `m_l = m` for every level.
    pub fn constant(m: u32) -> Result<Self> {
        Self::new(vec![m], Extension::Constant)
    }

    /// Explicit head followed by repetition of its last entry.
    pub fn from_head(head: Vec<u32>) -> Result<Self> {
        Self::new(head, Extension::Constant)
    }

    pub fn head(&self) -> &[u32] {
        &self.head
    }

    pub fn extension(&self) -> &Extension {
        &self.extension
    }

    /// The degree `m_l` for `l >= 1`.
    ///
    /// # Panics
    /// Panics for `level == 0`; level 0 has no degree.
    pub fn degree(&self, level: usize) -> u32 {
        assert!(level >= 1, "degrees are 1-indexed");
        let len = self.head.len();
        if level <= len {
            return self.head[level - 1];
        }
        match self.extension {
            Extension::Constant => self.head[len - 1],
            Extension::Periodic { period } => {
                let start = len - period;
                self.head[start + (level - 1 - start) % period]
            }
        }
    }

    /// Number of levels after which the sequence is purely periodic.
    fn eventual_start(&self) -> usize {
        match self.extension {
            Extension::Constant => self.head.len(),
            Extension::Periodic { period } => self.head.len() - period + 1,
        }
    }

    /// The bound `m_*`: the largest degree anywhere in the sequence.
    pub fn m_star(&self) -> u32 {
        *self.head.iter().max().expect("head is nonempty")
    }

    /// Sorted distinct degree values.
    pub fn distinct_degrees(&self) -> Vec<u32> {
        let mut v = self.head.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// `lcm{m_j : j > level}`: the order of the cyclic group generated by the
    /// propagating action rooted below `level`.
    pub fn tail_lcm(&self, level: usize) -> u64 {
        let horizon = self.eventual_start().max(level) + self.head.len() + 1;
        (level + 1..=horizon).fold(1u64, |acc, j| acc.lcm(&u64::from(self.degree(j))))
    }

    /// `v_l = m_1 * ... * m_l`.
    pub fn volume(&self, level: usize) -> BigUint {
        (1..=level).fold(BigUint::one(), |acc, i| acc * self.degree(i))
    }

    /// `r_l = prod m_i / (m_i - 1)`.
    pub fn resistance_factor(&self, level: usize) -> BigRational {
        (1..=level).fold(BigRational::one(), |acc, i| {
            let m = self.degree(i);
            acc * BigRational::new(BigInt::from(m), BigInt::from(m - 1))
        })
    }

    /// `n_l = r_l v_l`.
    pub fn scale(&self, level: usize) -> BigRational {
        self.resistance_factor(level) * BigRational::from_integer(self.volume(level).into())
    }

    /// `(l(n), alpha_n)` for real `n >= 1`.
    pub fn level_of(&self, n: f64) -> Result<(usize, f64)> {
        ScaleTable::new(self.clone()).level_of(n)
    }
}

/// One row of a [`ScaleTable`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleRecord {
    pub level: usize,
    pub volume: BigUint,
    pub resistance: BigRational,
    pub scale: BigRational,
}

/// Lazily extended table of exact `(v_l, r_l, n_l)` with fast `l(n)` lookup.
#[derive(Debug, Clone)]
pub struct ScaleTable {
    seq: DegreeSequence,
    records: Vec<ScaleRecord>,
    scale_f64: Vec<f64>,
    ln_volume: Vec<f64>,
}

impl ScaleTable {
    pub fn new(seq: DegreeSequence) -> Self {
        let base = ScaleRecord {
            level: 0,
            volume: BigUint::one(),
            resistance: BigRational::one(),
            scale: BigRational::one(),
        };
        Self { seq, records: vec![base], scale_f64: vec![1.0], ln_volume: vec![0.0] }
    }

    pub fn sequence(&self) -> &DegreeSequence {
        &self.seq
    }

    /// Makes sure rows `0..=level` exist.
    pub fn extend_to(&mut self, level: usize) {
        while self.records.len() <= level {
            let prev = self.records.last().expect("table has a base row");
            let l = prev.level + 1;
            let m = self.seq.degree(l);
            let volume = &prev.volume * m;
            let resistance = &prev.resistance * BigRational::new(BigInt::from(m), BigInt::from(m - 1));
            let scale = &resistance * BigRational::from_integer(BigInt::from(volume.clone()));
            self.scale_f64.push(crate::scalar::ratio_to_f64(&scale));
            self.ln_volume.push(ln_biguint(&volume));
            self.records.push(ScaleRecord { level: l, volume, resistance, scale });
        }
    }

    pub fn record(&mut self, level: usize) -> &ScaleRecord {
        self.extend_to(level);
        &self.records[level]
    }

    pub fn records(&self) -> &[ScaleRecord] {
        &self.records
    }

    pub fn ln_volume(&mut self, level: usize) -> f64 {
        self.extend_to(level);
        self.ln_volume[level]
    }

    /// `l(n) = min{l : n_l >= n}`, compared exactly.
    pub fn level(&mut self, n: f64) -> Result<usize> {
        if !(n >= 1.0) || !n.is_finite() {
            return Err(Error::OutOfRange(format!("level_of needs finite n >= 1, got {n}")));
        }
        let target = BigRational::from_float(n).expect("finite");
        // n_l grows at least by a factor 2 per level.
        let mut l = 0;
        loop {
            self.extend_to(l);
            // Cheap float screen, exact comparison near the threshold.
            let approx = self.scale_f64[l];
            if approx >= n * (1.0 + 1e-9) || (approx >= n * (1.0 - 1e-9) && self.records[l].scale >= target) {
                return Ok(l);
            }
            l += 1;
        }
    }

    /// `(l(n), alpha_n)` with `alpha_n = ln v_{l(n)} / ln n` and `alpha_1 = 0`.
    pub fn level_of(&mut self, n: f64) -> Result<(usize, f64)> {
        let l = self.level(n)?;
        if n == 1.0 {
            return Ok((0, 0.0));
        }
        Ok((l, self.ln_volume[l] / n.ln()))
    }

    /// `alpha_n` alone.
    pub fn alpha(&mut self, n: f64) -> Result<f64> {
        self.level_of(n).map(|(_, a)| a)
    }
}

/// Shared all-twos sequence, convenient in tests and examples.
pub fn binary() -> &'static DegreeSequence {
    static SEQ: OnceLock<DegreeSequence> = OnceLock::new();
    SEQ.get_or_init(|| DegreeSequence::constant(2).expect("2 is a valid degree"))
}
