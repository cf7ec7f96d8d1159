//! Piecewise mother groups, the assembly-line birth-and-death chain, and the
//! switch-walk-switch random walk on their permutational wreath products.
//!
//! The chain computations are generic over [`Scalar`]: use [`ExactChain`] /
//! [`ExactTail`] for rational answers and [`FloatChain`] / [`FloatTail`] at
//! large horizons. Bound evaluators are generic over `num_traits::Float`.
//!
//! Randomness is ChaCha8 throughout (see [`rng`]), so seeded runs are
//! reproducible across platforms.

pub mod automaton;
pub mod bounds;
pub mod chain;
pub mod designer;
pub mod error;
pub mod gray;
pub mod report;
pub mod rng;
pub mod scalar;
pub mod sequence;
pub mod verify;
pub mod wreath;

use num_rational::BigRational;

pub use automaton::{BoundaryPoint, Generator, MotherGroup, RayTree, WalkWord};
pub use chain::{ReturnTail, TruncatedChain};
pub use designer::{DesignCertificate, TargetFunction};
pub use error::{Error, Result};
pub use gray::{gray_bits, gray_position, BinaryState};
pub use report::{BoundCheck, ExperimentReport, SlopeFit};
pub use scalar::Scalar;
pub use sequence::{DegreeSequence, Extension, ScaleTable};
pub use wreath::{BinaryLamps, IntegerLamps, LampGroup};

/// Exact rational scalar.
pub type Exact = BigRational;

pub type ExactChain = TruncatedChain<BigRational>;
pub type FloatChain = TruncatedChain<f64>;
pub type ExactTail = ReturnTail<BigRational>;
pub type FloatTail = ReturnTail<f64>;

/// Single-precision chain, for quick screening.
pub type Float32Chain = TruncatedChain<f32>;
