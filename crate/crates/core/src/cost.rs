//! The Dorfman two-stage cost model.
//!
//! A pool of `k` specimens is tested once; if positive, every member is
//! retested. With independent infections at prevalence `p` the expected
//! number of tests per person is `1 - (1-p)^k + 1/k` for `k >= 2` and 1 for
//! individual testing.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::LazyLock;

use crate::error::{Error, Result};

/// A pool size, always at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct GroupSize(u64);

impl GroupSize {
    pub const INDIVIDUAL: GroupSize = GroupSize(1);

    pub fn new(k: u64) -> Result<Self> {
        if k >= 1 {
            Ok(GroupSize(k))
        } else {
            Err(Error::InvalidGroupSize { value: k, min: 1 })
        }
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }
}

impl TryFrom<u64> for GroupSize {
    type Error = Error;

    fn try_from(k: u64) -> Result<Self> {
        GroupSize::new(k)
    }
}

impl From<GroupSize> for u64 {
    fn from(k: GroupSize) -> u64 {
        k.0
    }
}

impl fmt::Display for GroupSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A per-person infection probability strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Prevalence(f64);

impl Prevalence {
    pub fn new(p: f64) -> Result<Self> {
        if p > 0.0 && p < 1.0 {
            Ok(Prevalence(p))
        } else {
            Err(Error::InvalidPrevalence {
                value: p,
                domain: "(0, 1)",
            })
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Prevalence {
    type Error = Error;

    fn try_from(p: f64) -> Result<Self> {
        Prevalence::new(p)
    }
}

impl From<Prevalence> for f64 {
    fn from(p: Prevalence) -> f64 {
        p.0
    }
}

/// Threshold between pooling and individual testing.
///
/// Pooling beats individual testing iff `p <= p0 = 1 - (1/3)^(1/3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModelConstants {
    pub p0: f64,
    pub q0: f64,
}

impl CostModelConstants {
    pub fn new() -> Self {
        // (1/3)^(1/3) = exp(-ln 3 / 3)
        let log_q0 = -(3f64.ln()) / 3.0;
        CostModelConstants {
            p0: -log_q0.exp_m1(),
            q0: log_q0.exp(),
        }
    }
}

impl Default for CostModelConstants {
    fn default() -> Self {
        Self::new()
    }
}

static CONSTANTS: LazyLock<CostModelConstants> = LazyLock::new(CostModelConstants::new);

/// `1 - (1/3)^(1/3)`, the largest prevalence at which pooling pays off.
#[inline]
pub fn pooling_threshold() -> f64 {
    CONSTANTS.p0
}

/// `1 - (1 - p)^k`, accurate for tiny `p` and large `k`.
#[inline]
pub(crate) fn pool_positive_prob(k: u64, p: f64) -> f64 {
    -((k as f64) * (-p).ln_1p()).exp_m1()
}

#[inline]
pub(crate) fn expected_tests_raw(k: u64, p: f64) -> f64 {
    if k == 1 {
        1.0
    } else {
        pool_positive_prob(k, p) + 1.0 / k as f64
    }
}

pub(crate) fn samuels_raw(p: f64) -> u64 {
    if p > pooling_threshold() {
        return 1;
    }
    let w = p.sqrt().recip();
    let i = w.floor();
    let frac = w - i;
    let i = i as u64;
    if frac < i as f64 / (2.0 * i as f64 + frac) {
        return i + 1;
    }
    let (k1, k2) = (i + 1, i + 2);
    if expected_tests_raw(k1, p) <= expected_tests_raw(k2, p) {
        k1
    } else {
        k2
    }
}

#[inline]
pub(crate) fn loss_raw(k: u64, p: f64) -> f64 {
    if p == 0.0 {
        return 1.0 / k as f64;
    }
    let opt = expected_tests_raw(samuels_raw(p), p);
    (expected_tests_raw(k, p) - opt).max(0.0)
}

fn check_closed_prevalence(p: f64) -> Result<()> {
    if (0.0..1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidPrevalence {
            value: p,
            domain: "[0, 1)",
        })
    }
}

/// Expected number of tests per person with pool size `k` at prevalence `p`.
///
/// `p = 0` is accepted; the formula is continuous there.
pub fn expected_tests(k: GroupSize, p: f64) -> Result<f64> {
    check_closed_prevalence(p)?;
    Ok(expected_tests_raw(k.get(), p))
}

/// Cost-minimising pool size at a known prevalence (Samuels' rule).
///
/// Ties between the two candidate sizes go to the smaller one.
pub fn samuels_optimal_k(p: Prevalence) -> GroupSize {
    GroupSize(samuels_raw(p.get()))
}

/// Expected tests per person under the optimal pool size.
pub fn optimal_expected_tests(p: Prevalence) -> f64 {
    let p = p.get();
    expected_tests_raw(samuels_raw(p), p)
}

/// Regret of pool size `k` against the optimal pool size at prevalence `p`.
///
/// At `p = 0` the value is the limit as `p` decreases to 0, which is `1/k`
/// (and 1 for individual testing).
pub fn loss(k: GroupSize, p: f64) -> Result<f64> {
    check_closed_prevalence(p)?;
    Ok(loss_raw(k.get(), p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(v: u64) -> GroupSize {
        GroupSize::new(v).unwrap()
    }

    fn prev(v: f64) -> Prevalence {
        Prevalence::new(v).unwrap()
    }

    fn brute_argmin(p: f64, k_max: u64) -> u64 {
        let mut best = (1, 1.0);
        for k in 2..=k_max {
            let e = 1.0 - (1.0 - p).powi(k as i32) + 1.0 / k as f64;
            if e < best.1 {
                best = (k, e);
            }
        }
        best.0
    }

    #[test]
    fn constants() {
        let c = CostModelConstants::new();
        assert!((c.p0 + c.q0 - 1.0).abs() <= f64::EPSILON);
        assert!((c.p0 - 0.306_639).abs() < 1e-6);
        assert_eq!(c.p0, pooling_threshold());
        assert_eq!(c, CostModelConstants::default());
        assert!((c.q0.powi(3) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn expected_tests_examples() {
        assert_eq!(expected_tests(k(1), 0.3).unwrap(), 1.0);
        assert!((expected_tests(k(2), 0.5).unwrap() - 1.25).abs() < 1e-15);
        // 1 - 0.98^8 + 1/8 evaluated at 40 digits
        assert!((expected_tests(k(8), 0.02).unwrap() - 0.2742369774182144).abs() < 1e-15);
        assert_eq!(expected_tests(k(5), 0.0).unwrap(), 0.2);
    }

    #[test]
    fn expected_tests_rejects_bad_input() {
        assert!(GroupSize::new(0).is_err());
        assert!(expected_tests(k(3), 1.0).is_err());
        assert!(expected_tests(k(3), -0.1).is_err());
        assert!(expected_tests(k(3), f64::NAN).is_err());
    }

    #[test]
    fn samuels_examples() {
        assert_eq!(samuels_optimal_k(prev(0.5)).get(), 1);
        assert_eq!(samuels_optimal_k(prev(0.01)).get(), 11);
        assert_eq!(samuels_optimal_k(prev(0.0001)).get(), 101);
        assert_eq!(samuels_optimal_k(prev(0.02)).get(), 8);
        assert!(Prevalence::new(0.0).is_err());
        assert!(Prevalence::new(1.0).is_err());
    }

    #[test]
    fn threshold_is_pooling() {
        let p0 = pooling_threshold();
        assert_eq!(samuels_optimal_k(prev(p0)).get(), 3);
        assert_eq!(samuels_optimal_k(prev(p0 + 1e-12)).get(), 1);
        assert!((optimal_expected_tests(prev(p0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn optimal_expected_tests_examples() {
        assert_eq!(optimal_expected_tests(prev(0.9)), 1.0);
        let brute = (1..=10_000u64)
            .map(|k| expected_tests_raw(k, 0.02))
            .fold(f64::INFINITY, f64::min);
        assert!((optimal_expected_tests(prev(0.02)) - brute).abs() < 1e-12);
        // 0.0157 sits just below the k = 8 range
        assert_eq!(samuels_optimal_k(prev(0.0157)).get(), 9);
        assert_eq!(samuels_optimal_k(prev(0.016)).get(), 8);
        assert!((expected_tests_raw(8, 0.0157) - 0.243_910_793_995_976_1).abs() < 1e-14);
    }

    #[test]
    fn loss_examples() {
        let k5 = samuels_optimal_k(prev(0.05));
        assert_eq!(loss(k5, 0.05).unwrap(), 0.0);
        let p8 = 1.0 - (3.0f64 / 8.0).powf(0.2);
        let exact = 0.625 * (0.375f64).powf(0.6) - 5.0 / 24.0;
        let l8 = loss(k(8), p8).unwrap();
        assert!((l8 - exact).abs() < 1e-14);
        assert!((l8 - 437.0 / 3152.0).abs() < 1e-3);
        assert_eq!(loss(k(3), 0.0).unwrap(), 1.0 / 3.0);
        assert_eq!(loss(k(1), 0.0).unwrap(), 1.0);
        assert!(loss(k(3), 1.0).is_err());
    }

    #[test]
    fn samuels_matches_brute_force_on_grid() {
        let mut p: f64 = 1e-5;
        while p < 0.99 {
            let bound = 3 + (p.sqrt().recip()).ceil() as u64 + 5;
            assert_eq!(samuels_raw(p), brute_argmin(p, bound), "p = {p}");
            p *= 1.01;
        }
    }

    #[test]
    fn monotone_in_prevalence() {
        let mut prev_k = u64::MAX;
        let mut prev_e = 0.0;
        let mut i = 1u64;
        loop {
            let p = i as f64 * 1e-5;
            if p > 0.99 {
                break;
            }
            let kk = samuels_raw(p);
            let e = expected_tests_raw(kk, p);
            assert!(kk <= prev_k, "k* increased at p = {p}");
            assert_ne!(kk, 2);
            assert!(e >= prev_e, "E* decreased at p = {p}");
            assert!(loss_raw(kk, p) <= 1e-15);
            prev_k = kk;
            prev_e = e;
            i += if p < 0.01 { 1 } else { 10 };
        }
    }

    #[test]
    fn monte_carlo_agrees_with_formula() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let (kk, p) = (6u64, 0.07);
        let groups = 1_000_000u64;
        let mut rng = StdRng::seed_from_u64(0x5eed);
        let mut tests = 0u64;
        for _ in 0..groups {
            let positive = (0..kk).any(|_| rng.random::<f64>() < p);
            tests += if positive { kk + 1 } else { 1 };
        }
        let mean = tests as f64 / (groups * kk) as f64;
        let prob = 1.0 - (1.0 - p).powi(kk as i32);
        // per-group tests are 1 + k*Bernoulli(prob); per-person sd follows
        let sd = (prob * (1.0 - prob)).sqrt() / (groups as f64).sqrt();
        let expected = expected_tests(k(kk), p).unwrap();
        assert!((mean - expected).abs() < 3.0 * sd, "{mean} vs {expected}");
    }
}
