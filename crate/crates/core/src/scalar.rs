//! Scalar abstraction shared by the exact and floating-point code paths.
//!
//! Chain kernels, stationary weights, resistances and return-time tails are
//! written once against [`Scalar`]. Instantiating with [`BigRational`] gives
//! exact answers; `f64` (or `f32`) gives the fast path used at large horizons.

use std::fmt::Debug;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

/// Field-like scalar used by the chain computations.
pub trait Scalar: Num + Clone + PartialOrd + Debug + Send + Sync + 'static {
    /// The value `num / den`. `den` must be nonzero.
    fn from_ratio(num: u64, den: u64) -> Self;

    fn from_biguint(v: &BigUint) -> Self;

    fn to_f64(&self) -> f64;

    /// True when arithmetic on this type never rounds.
    const EXACT: bool;

    fn from_u64(v: u64) -> Self {
        Self::from_ratio(v, 1)
    }
}

impl Scalar for f64 {
    fn from_ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn from_biguint(v: &BigUint) -> Self {
        v.to_f64().unwrap_or(f64::INFINITY)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    const EXACT: bool = false;
}

impl Scalar for f32 {
    fn from_ratio(num: u64, den: u64) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn from_biguint(v: &BigUint) -> Self {
        v.to_f32().unwrap_or(f32::INFINITY)
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }

    const EXACT: bool = false;
}

impl Scalar for BigRational {
    fn from_ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_biguint(v: &BigUint) -> Self {
        BigRational::from_integer(BigInt::from(v.clone()))
    }

    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }

    const EXACT: bool = true;
}

/// Converts a big rational to the nearest-ish `f64`, also for values whose
/// numerator and denominator individually overflow `f64`.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = ToPrimitive::to_f64(r) {
        if v.is_finite() && (v != 0.0 || r.numer().bits() == 0) {
            return v;
        }
    }
    // Shift both parts down to 60 significant bits and fix the exponent up.
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let ns = (nb - 60).max(0);
    let ds = (db - 60).max(0);
    let n = (r.numer() >> ns as usize).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> ds as usize).to_f64().unwrap_or(1.0);
    (n / d) * 2f64.powi((ns - ds) as i32)
}

/// Natural logarithm of a positive big integer.
pub fn ln_biguint(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().map(f64::ln).unwrap_or(f64::INFINITY);
    }
    let shift = bits - 60;
    let top = (v >> shift as usize).to_f64().unwrap_or(1.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural logarithm of a positive big rational.
pub fn ln_ratio(r: &BigRational) -> f64 {
    let n = r.numer().magnitude();
    let d = r.denom().magnitude();
    ln_biguint(n) - ln_biguint(d)
}
