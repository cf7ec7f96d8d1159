//! Lamplighter-type walks over the mother group and their measured statistics.

mod lamps;
mod regression;
mod sws;

pub use lamps::{binomial_entropy, srw_mean_abs, BinaryLamps, IntegerLamps, LampGroup};
pub use regression::{exponent_regression, SeriesPoint, Z95};
pub use sws::{
    lamp_length_stat, mean_stderr, speed_experiment, sws_checkpoints, sws_direct, sws_walk, theoretical_speed_stat,
    wreath_multiply, LampConfig, SpeedRow, SwsOutcome, SwsSample, WreathElement,
};
