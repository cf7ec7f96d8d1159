//! Lamp groups: the switch distribution and its displacement and entropy
//! profiles.

use std::fmt::Debug;
use std::hash::Hash;
use std::sync::OnceLock;

use rand::Rng;

/// A lamp group `Lambda` with a symmetric switch distribution.
///
/// Profiles are in terms of the switch walk `S_k = L_1 ... L_k`:
/// `lambda_lower(t) = inf_{k >= t} E|S_k|`, `lambda_upper(t) = sup_{k <= t} E|S_k|`
/// and `entropy(t)` interpolates `H(S_k)`. Logs are natural.
pub trait LampGroup: Sync {
    type Element: Clone + PartialEq + Eq + Hash + Debug + Send + Sync;

    fn name(&self) -> &'static str;
    fn identity(&self) -> Self::Element;
    fn sample_switch<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Element;
    fn compose(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn inverse(&self, a: &Self::Element) -> Self::Element;
    /// Word length in the switch generators.
    fn length(&self, a: &Self::Element) -> u64;
    fn lambda_lower(&self, t: f64) -> f64;
    fn lambda_upper(&self, t: f64) -> f64;
    /// `h_1 = H(L_1)`.
    fn step_entropy(&self) -> f64;
    fn entropy(&self, t: f64) -> f64;
}

/// `Z` with uniform `+-1` switches.
#[derive(Clone, Copy, Debug, Default)]
pub struct IntegerLamps;

/// `Z_2` with uniform `{0, 1}` switches.
#[derive(Clone, Copy, Debug, Default)]
pub struct BinaryLamps;

const EXACT_STEPS: u64 = 64;
const EXACT_ENTROPY: usize = 4096;

/// `E|S_k|` for simple random walk on `Z`.
///
/// `E|S_{2j}| = E|S_{2j-1}| = 2j C(2j, j) 4^{-j}`; the central binomial ratio
/// is a running product for small `j` and an asymptotic series beyond.
pub fn srw_mean_abs(k: u64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let j = k.div_ceil(2);
    2.0 * j as f64 * central_ratio(j)
}

/// `C(2j, j) / 4^j`.
fn central_ratio(j: u64) -> f64 {
    if j < EXACT_STEPS {
        (1..=j).fold(1.0, |acc, i| acc * (2 * i - 1) as f64 / (2 * i) as f64)
    } else {
        let x = j as f64;
        let series = 1.0 - 1.0 / (8.0 * x) + 1.0 / (128.0 * x * x) + 5.0 / (1024.0 * x.powi(3))
            - 21.0 / (32768.0 * x.powi(4));
        series / (std::f64::consts::PI * x).sqrt()
    }
}

/// Entropy of `Binomial(k, 1/2)`, which is `H(S_k)` for `+-1` steps.
pub fn binomial_entropy(k: u64) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut ln_fact = vec![0.0f64; EXACT_ENTROPY + 1];
        for i in 1..=EXACT_ENTROPY {
            ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
        }
        (0..=EXACT_ENTROPY)
            .map(|k| {
                let kf = k as f64;
                (0..=k)
                    .map(|i| {
                        let lp = ln_fact[k] - ln_fact[i] - ln_fact[k - i] - kf * std::f64::consts::LN_2;
                        -lp.exp() * lp
                    })
                    .sum()
            })
            .collect()
    });
    match table.get(k as usize) {
        Some(&h) => h,
        None => binomial_entropy_series(k as f64),
    }
}

fn binomial_entropy_series(x: f64) -> f64 {
    0.5 * (std::f64::consts::PI * std::f64::consts::E * x / 2.0).ln() - 1.0 / (12.0 * x * x) - 1.0 / (6.0 * x.powi(3))
}

fn interpolate(t: f64, f: impl Fn(u64) -> f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let lo = t.floor();
    let frac = t - lo;
    let a = f(lo as u64);
    if frac == 0.0 {
        a
    } else {
        a + frac * (f(lo as u64 + 1) - a)
    }
}

impl LampGroup for IntegerLamps {
    type Element = i64;

    fn name(&self) -> &'static str {
        "z"
    }

    fn identity(&self) -> i64 {
        0
    }

    fn sample_switch<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        if rng.random::<bool>() {
            1
        } else {
            -1
        }
    }

    fn compose(&self, a: &i64, b: &i64) -> i64 {
        a + b
    }

    fn inverse(&self, a: &i64) -> i64 {
        -a
    }

    fn length(&self, a: &i64) -> u64 {
        a.unsigned_abs()
    }

    fn lambda_lower(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            srw_mean_abs(t.ceil() as u64)
        }
    }

    fn lambda_upper(&self, t: f64) -> f64 {
        if t < 1.0 {
            0.0
        } else {
            srw_mean_abs(t.floor() as u64)
        }
    }

    fn step_entropy(&self) -> f64 {
        std::f64::consts::LN_2
    }

    fn entropy(&self, t: f64) -> f64 {
        interpolate(t, binomial_entropy)
    }
}

impl LampGroup for BinaryLamps {
    type Element = u8;

    fn name(&self) -> &'static str {
        "z2"
    }

    fn identity(&self) -> u8 {
        0
    }

    fn sample_switch<R: Rng + ?Sized>(&self, rng: &mut R) -> u8 {
        u8::from(rng.random::<bool>())
    }

    fn compose(&self, a: &u8, b: &u8) -> u8 {
        a ^ b
    }

    fn inverse(&self, a: &u8) -> u8 {
        *a
    }

    fn length(&self, a: &u8) -> u64 {
        u64::from(*a)
    }

    fn lambda_lower(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            0.5
        }
    }

    fn lambda_upper(&self, t: f64) -> f64 {
        if t < 1.0 {
            0.0
        } else {
            0.5
        }
    }

    fn step_entropy(&self) -> f64 {
        std::f64::consts::LN_2
    }

    fn entropy(&self, t: f64) -> f64 {
        interpolate(t, |k| if k == 0 { 0.0 } else { std::f64::consts::LN_2 })
    }
}
