//! Closed-form evaluators for the speed and entropy inequalities.
//!
//! All logarithms are natural. Evaluators are generic over [`Float`] so they
//! can run in `f32` or `f64`.

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequence::ScaleTable;

fn c<T: Float>(x: f64) -> T {
    T::from(x).expect("constant representable")
}

/// `4 sqrt(n max(H, eta))`.
pub fn varopoulos_carne_speed<T: Float>(n: T, entropy: T, eta: T) -> Result<T> {
    if eta < T::one() {
        return Err(Error::OutOfRange("degree ratio eta below 1".into()));
    }
    if n < T::one() || entropy < T::zero() {
        return Err(Error::OutOfRange("need n >= 1 and H >= 0".into()));
    }
    Ok(c::<T>(4.0) * (n * entropy.max(eta)).sqrt())
}

fn check_p<T: Float>(p: T) -> Result<()> {
    if p > T::zero() && p <= T::one() {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("p = {:?} outside (0, 1]", p.to_f64())))
    }
}

/// `n p lambda_lower(1/p) / 16`.
pub fn thm_4_1_lower<T: Float>(n: T, p: T, lambda_lower: impl Fn(T) -> T) -> Result<T> {
    check_p(p)?;
    Ok(n * p * lambda_lower(p.recip()) / c(16.0))
}

/// Inputs to the five summary bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cor45Inputs<T> {
    pub n: T,
    /// At most `P(T > n)`.
    pub p: T,
    /// At least `sum_{i <= n} P(T > i)`.
    pub q: T,
    /// Upper bound for `H(Y_n)`.
    pub h_y: T,
    /// Upper bound for `H(supp Q_n)`.
    pub h_supp: T,
    /// `E|Q_n|`.
    pub orbit: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cor45Bundle<T> {
    pub speed_lower: T,
    pub speed_upper_entropy: T,
    pub speed_upper_tight: T,
    pub entropy_lower: T,
    pub entropy_upper: T,
}

pub fn cor_4_5_bundle<T: Float>(
    x: &Cor45Inputs<T>,
    lambda_lower: impl Fn(T) -> T,
    lambda_upper: impl Fn(T) -> T,
    h: impl Fn(T) -> T,
) -> Result<Cor45Bundle<T>> {
    check_p(x.p)?;
    if x.n < T::one() || x.q <= T::zero() {
        return Err(Error::OutOfRange("need n >= 1 and q > 0".into()));
    }
    let ll = lambda_lower(x.p.recip());
    let log_n1 = (x.n + T::one()).ln();
    let entropy_upper = x.h_y + x.h_supp + c::<T>(2.0) * x.q * (h(x.n / x.q) + log_n1);
    Ok(Cor45Bundle {
        speed_lower: x.n * x.p * ll / c(16.0),
        speed_upper_entropy: c::<T>(4.0) * (x.n * entropy_upper).sqrt(),
        speed_upper_tight: c::<T>(3.0) * lambda_upper(x.n / x.q) * x.q
            + c::<T>(12.0) * (x.n * (x.h_y + x.h_supp + x.orbit)).sqrt(),
        entropy_lower: x.n * x.p * x.p * ll * ll / c(4096.0),
        entropy_upper,
    })
}

/// Entropy bounds from the ray-tree counts, given `E|Q_n|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cor64<T> {
    /// `H(supp Q_n | |Q_n|) <= 6 log(m_*+1) E|Q_n|`.
    pub supp_given_size: T,
    pub supp: T,
    /// `H(Y_n | |Q_n|) <= 5 m_*^3 log(m_*) E|Q_n|`.
    pub element_given_size: T,
    pub element: T,
}

pub fn cor_6_4<T: Float>(m_star: u32, orbit: T, n: T) -> Cor64<T> {
    let m: T = c(f64::from(m_star));
    let log_n1 = (n + T::one()).ln();
    let supp_given_size = c::<T>(6.0) * (m + T::one()).ln() * orbit;
    let element_given_size = c::<T>(5.0) * m.powi(3) * m.ln() * orbit;
    Cor64 { supp_given_size, supp: supp_given_size + log_n1, element_given_size, element: element_given_size + log_n1 }
}

fn alpha_and_m(table: &mut ScaleTable, n: f64) -> Result<(f64, f64)> {
    if n < 1.0 {
        return Err(Error::OutOfRange(format!("n = {n} below 1")));
    }
    let (_, alpha) = table.level_of(n)?;
    Ok((alpha, f64::from(table.sequence().m_star())))
}

/// `lambda_lower(k) <= lambda_upper(k)` at integer probes.
fn check_profiles<T: Float>(lambda_lower: &impl Fn(T) -> T, lambda_upper: &impl Fn(T) -> T, extra: f64) -> Result<()> {
    let probes = (1..=16).map(f64::from).chain(std::iter::once(extra.ceil().max(1.0)));
    for k in probes {
        let k: T = c(k);
        if lambda_lower(k) > lambda_upper(k) * c(1.0 + 1e-12) {
            return Err(Error::InvalidInput(format!("lambda profiles swapped at k = {:?}", k.to_f64())));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thm65<T> {
    pub alpha: T,
    pub lower: T,
    pub upper: T,
}

/// Speed bracket:
/// `n^a lambda_lower(n^{1-a}/(500 m^2)) / (8000 m^2) <= E|X_n| <= 6 n^a lambda_upper(n^{1-a}) + 48 m^2 n^{(1+a)/2}`.
pub fn thm_6_5_bracket<T: Float>(
    table: &mut ScaleTable,
    n: f64,
    lambda_lower: impl Fn(T) -> T,
    lambda_upper: impl Fn(T) -> T,
) -> Result<Thm65<T>> {
    let (alpha, m) = alpha_and_m(table, n)?;
    let (nt, a, m2): (T, T, T) = (c(n), c(alpha), c(m * m));
    let na = nt.powf(a);
    let rest = nt.powf(T::one() - a);
    check_profiles(&lambda_lower, &lambda_upper, rest.to_f64().unwrap_or(1.0))?;
    let lower = na * lambda_lower(rest / (c::<T>(500.0) * m2)) / (c::<T>(8000.0) * m2);
    let upper = c::<T>(6.0) * na * lambda_upper(rest) + c::<T>(48.0) * m2 * nt.powf((T::one() + a) / c(2.0));
    Ok(Thm65 { alpha: a, lower, upper })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thm66<T> {
    pub alpha: T,
    pub lower_general: T,
    pub lower_finite: T,
    pub upper: T,
}

impl<T: Float> Thm66<T> {
    pub fn lower(&self) -> T {
        self.lower_general.max(self.lower_finite)
    }
}

/// Entropy bracket:
/// `max(n^{2a-1} lambda_lower^2(n^{1-a})/(2^30 m^4), h_1 n^a/(500 m^2)) <= H(X_n) <= (15 m^4 + 2 h(n^{1-a})) n^a`.
pub fn thm_6_6_bracket<T: Float>(
    table: &mut ScaleTable,
    n: f64,
    lambda_lower: impl Fn(T) -> T,
    h: impl Fn(T) -> T,
    h1: T,
) -> Result<Thm66<T>> {
    let (alpha, m) = alpha_and_m(table, n)?;
    if h1 < T::zero() {
        return Err(Error::OutOfRange("negative step entropy".into()));
    }
    let (nt, a, m2): (T, T, T) = (c(n), c(alpha), c(m * m));
    let na = nt.powf(a);
    let rest = nt.powf(T::one() - a);
    let ll = lambda_lower(rest);
    Ok(Thm66 {
        alpha: a,
        lower_general: nt.powf(c::<T>(2.0) * a - T::one()) * ll * ll / (c::<T>(2f64.powi(30)) * m2 * m2),
        lower_finite: h1 * na / (c::<T>(500.0) * m2),
        upper: (c::<T>(15.0) * m2 * m2 + c::<T>(2.0) * h(rest)) * na,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Speed,
    Entropy,
}

/// `C_g = 3 e^{1/(1-g)}`.
pub fn remark_c<T: Float>(g: T) -> T {
    c::<T>(3.0) * (T::one() - g).recip().exp()
}

/// The closing constants: entropy in `[log 2/(1000 C^3), 16 C^{9/2}] f(n)` with
/// `C = C_gamma`; speed in `[2^{-19} C^{-7/2}, 49 C^{9/4}] f(n)` with
/// `C = C_{2 gamma - 1}`.
pub fn remark_constants<T: Float>(gamma: T, f_n: T, side: Side) -> Result<(T, T)> {
    let half: T = c(0.5);
    match side {
        Side::Entropy => {
            if !(gamma >= half && gamma < T::one()) {
                return Err(Error::OutOfRange("entropy side needs gamma in [1/2, 1)".into()));
            }
            let cg = remark_c(gamma);
            Ok((c::<T>(std::f64::consts::LN_2) / (c::<T>(1000.0) * cg.powi(3)) * f_n, c::<T>(16.0) * cg.powf(c(4.5)) * f_n))
        }
        Side::Speed => {
            if !(gamma >= c(0.75) && gamma < T::one()) {
                return Err(Error::OutOfRange("speed side needs gamma in [3/4, 1)".into()));
            }
            let cg = remark_c(c::<T>(2.0) * gamma - T::one());
            Ok((f_n / (c::<T>(2f64.powi(19)) * cg.powf(c(3.5))), c::<T>(49.0) * cg.powf(c(2.25)) * f_n))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcavityReport {
    pub n: f64,
    pub checked: usize,
    /// Worst `(phi(x) + phi(y))/2 - phi((x+y)/2)`, scaled; positive means a violation.
    pub worst_excess: f64,
    pub violations: Vec<(f64, f64)>,
}

impl ConcavityReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

pub const CONCAVITY_TOL: f64 = 1e-9;

/// Midpoint concavity of `x -> x h(n/x)` over every pair of grid points.
pub fn concavity_check(h: impl Fn(f64) -> f64, n: f64, grid: &[f64]) -> ConcavityReport {
    let phi = |x: f64| x * h(n / x);
    let mut worst = f64::NEG_INFINITY;
    let mut violations = Vec::new();
    for (i, &x) in grid.iter().enumerate() {
        for &y in &grid[i + 1..] {
            let (px, py) = (phi(x), phi(y));
            let excess = (px + py) / 2.0 - phi((x + y) / 2.0);
            let scale = px.abs().max(py.abs()).max(1.0);
            worst = worst.max(excess / scale);
            if excess > CONCAVITY_TOL * scale {
                violations.push((x, y));
            }
        }
    }
    ConcavityReport { n, checked: grid.len(), worst_excess: worst, violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::binary;

    #[test]
    fn vc_examples() {
        assert_eq!(varopoulos_carne_speed(100.0, 4.0, 1.0).unwrap(), 80.0);
        assert_eq!(varopoulos_carne_speed(100.0, 0.0, 1.0).unwrap(), 40.0);
        assert!(varopoulos_carne_speed(100.0, 1.0, 0.5).is_err());
        assert_eq!(varopoulos_carne_speed(100f32, 4.0, 1.0).unwrap(), 80f32);
    }

    #[test]
    fn thm41_examples() {
        assert_eq!(thm_4_1_lower(160.0, 1.0, |t| t).unwrap(), 10.0);
        assert_eq!(thm_4_1_lower(160.0, 0.3, |_| 0.0).unwrap(), 0.0);
        assert!(thm_4_1_lower(160.0, 0.0, |t| t).is_err());
        assert!(thm_4_1_lower(160.0, 1.5, |t| t).is_err());
    }

    #[test]
    fn cor45_degenerate_is_finite() {
        let x = Cor45Inputs { n: 1.0, p: 1.0, q: 1.0, h_y: 0.0, h_supp: 0.0, orbit: 1.0 };
        let b = cor_4_5_bundle(&x, |t: f64| t.sqrt(), |t: f64| t.sqrt(), |t: f64| (2.0 * t + 1.0).ln()).unwrap();
        for v in [b.speed_lower, b.speed_upper_entropy, b.speed_upper_tight, b.entropy_lower, b.entropy_upper] {
            assert!(v.is_finite());
        }
        assert!(b.speed_lower <= b.speed_upper_tight);
        assert!(b.entropy_lower <= b.entropy_upper);
    }

    #[test]
    fn thm65_is_ordered_and_rejects_swapped_profiles() {
        let mut t = ScaleTable::new(binary().clone());
        let b = thm_6_5_bracket(&mut t, 4096.0, |k: f64| 0.6 * k.sqrt(), |k: f64| k.sqrt()).unwrap();
        assert!((b.alpha - 0.5).abs() < 1e-12);
        assert!(b.lower <= b.upper);
        assert!(thm_6_5_bracket(&mut t, 4096.0, |k: f64| k.sqrt(), |k: f64| 0.5 * k.sqrt()).is_err());
    }

    #[test]
    fn thm66_finite_lamps() {
        let mut t = ScaleTable::new(binary().clone());
        let b = thm_6_6_bracket(&mut t, 4096.0, |_| 0.5, |k: f64| k.min(1.0) * 2f64.ln(), 2f64.ln()).unwrap();
        assert!((b.lower_finite - 2f64.ln() * 64.0 / 2000.0).abs() < 1e-12);
        assert!(b.lower() <= b.upper);
        let z = thm_6_6_bracket(&mut t, 4096.0, |_| 0.5, |_| 0.0, 0.0).unwrap();
        assert_eq!(z.lower_finite, 0.0);
    }

    #[test]
    fn remark_examples() {
        let (lo, hi) = remark_constants(0.5, 1.0, Side::Entropy).unwrap();
        let cg = 3.0 * 2f64.exp();
        assert!((remark_c(0.5) - cg).abs() < 1e-12);
        assert!((lo - 2f64.ln() / (1000.0 * cg.powi(3))).abs() < 1e-18 && hi > lo);
        let (slo, shi) = remark_constants(0.75, 1.0, Side::Speed).unwrap();
        assert!((shi - 49.0 * cg.powf(2.25)).abs() < 1e-9 * shi && slo > 0.0);
        assert!(remark_constants(0.6, 1.0, Side::Speed).is_err());
    }

    #[test]
    fn concavity_examples() {
        let grid = crate::designer::log_grid(1.0, 1e3, 100);
        assert!(concavity_check(|k| (2.0 * k + 1.0).ln(), 1e3, &grid).pass());
        assert!(concavity_check(f64::sqrt, 1e3, &grid).pass());
        assert!(!concavity_check(|k| k * k, 1e3, &grid).pass());
    }

    #[test]
    fn cor64_values() {
        let b = cor_6_4(2, 10.0, 0.0);
        assert!((b.supp_given_size - 60.0 * 3f64.ln()).abs() < 1e-12);
        assert!((b.element_given_size - 400.0 * 2f64.ln()).abs() < 1e-12);
    }
}
