//! Prevalence intervals on which a given pool size is optimal.
//!
//! With `q = 1 - p`, moving from pool size `k` to `k + 1` changes the cost by
//! `delta_k(q) = q^k (1 - q) - 1/(k(k+1))`. Pool size `l >= 3` is optimal
//! exactly when `q` lies between the larger roots of `delta_{l-1}` and
//! `delta_l`; the larger root of `delta_2` is replaced by `(1/3)^(1/3)`, the
//! pooling threshold.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{pooling_threshold, CostModelConstants, GroupSize};
use crate::error::{Error, Result};
use crate::roots::bisect;

/// Closed prevalence interval `[p_low, p_high]` on which `k` is optimal.
///
/// Adjacent ranges share their endpoints: at a breakpoint both neighbouring
/// pool sizes give the same expected cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalityRange {
    pub k: GroupSize,
    pub p_low: f64,
    pub p_high: f64,
}

impl OptimalityRange {
    pub fn contains(&self, p: f64) -> bool {
        p >= self.p_low && p <= self.p_high
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.p_low + self.p_high)
    }
}

/// `q^k (1-q) - 1/(k(k+1))` for `k >= 3` and `q` in `[0, 1]`.
pub fn delta(k: GroupSize, q: f64) -> Result<f64> {
    if k.get() < 3 {
        return Err(Error::InvalidGroupSize {
            value: k.get(),
            min: 3,
        });
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::OutOfDomain {
            name: "q",
            value: q,
            domain: "[0, 1]",
        });
    }
    let k = k.get() as f64;
    Ok(q.powf(k) * (1.0 - q) - 1.0 / (k * (k + 1.0)))
}

/// Breakpoint in prevalence units, `1 - q*_k`, computed directly in `p` so
/// that tiny breakpoints keep full relative precision.
pub(crate) fn breakpoint_raw(k: u64) -> f64 {
    debug_assert!(k >= 2);
    if k == 2 {
        return pooling_threshold();
    }
    let kf = k as f64;
    let target = 1.0 / (kf * (kf + 1.0));
    // p (1-p)^k rises on (0, 1/(k+1)), negative-to-positive across the root
    let g = |p: f64| p * (kf * (-p).ln_1p()).exp() - target;
    bisect(g, 0.0, 1.0 / (kf + 1.0), 0.0).expect("breakpoint bracket always changes sign")
}

fn check_root_index(k: GroupSize) -> Result<u64> {
    match k.get() {
        k if k >= 2 => Ok(k),
        k => Err(Error::InvalidGroupSize { value: k, min: 2 }),
    }
}

/// Larger real root `q*_k` of `delta_k`; `q*_2` is `(1/3)^(1/3)` by convention.
pub fn larger_root(k: GroupSize) -> Result<f64> {
    let k = check_root_index(k)?;
    if k == 2 {
        return Ok(CostModelConstants::new().q0);
    }
    Ok(1.0 - breakpoint_raw(k))
}

/// `1 - larger_root(k)`, without the cancellation of forming `1 - q`.
pub fn breakpoint(k: GroupSize) -> Result<f64> {
    Ok(breakpoint_raw(check_root_index(k)?))
}

/// Prevalence range on which pool size `k` is optimal.
///
/// `k = 1` covers `(p0, 1)`; `k = 2` is never optimal and is rejected.
pub fn optimality_range(k: GroupSize) -> Result<OptimalityRange> {
    match k.get() {
        1 => Ok(OptimalityRange {
            k,
            p_low: pooling_threshold(),
            p_high: 1.0,
        }),
        2 => Err(Error::NeverOptimal),
        m => Ok(OptimalityRange {
            k,
            p_low: breakpoint_raw(m),
            p_high: breakpoint_raw(m - 1),
        }),
    }
}

/// Precomputed breakpoints `1 - q*_m` for `m = 2..=max`.
#[derive(Debug, Clone)]
pub struct Breakpoints {
    // index m - 2 holds the breakpoint for m
    values: Vec<f64>,
}

impl Breakpoints {
    pub fn new() -> Self {
        Breakpoints { values: Vec::new() }
    }

    pub fn up_to(max: u64) -> Self {
        let mut table = Self::new();
        table.ensure(max);
        table
    }

    /// Extends the table so that `get(m)` is valid for all `m <= max`.
    pub fn ensure(&mut self, max: u64) {
        let have = self.values.len() as u64 + 1;
        if max > have {
            let fresh: Vec<f64> = (have + 1..=max)
                .into_par_iter()
                .map(breakpoint_raw)
                .collect();
            self.values.extend(fresh);
        }
    }

    pub fn max(&self) -> u64 {
        self.values.len() as u64 + 1
    }

    /// Breakpoint for `m`; panics if `m < 2` or beyond the computed range.
    #[inline]
    pub fn get(&self, m: u64) -> f64 {
        self.values[(m - 2) as usize]
    }
}

impl Default for Breakpoints {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{samuels_optimal_k, Prevalence};

    fn k(v: u64) -> GroupSize {
        GroupSize::new(v).unwrap()
    }

    #[test]
    fn delta_examples() {
        assert!((delta(k(3), 1.0).unwrap() + 1.0 / 12.0).abs() < 1e-16);
        let expect = 27.0 / 256.0 - 1.0 / 12.0;
        assert!((delta(k(3), 0.75).unwrap() - expect).abs() < 1e-15);
        // 0.9843^8 * 0.0157 - 1/72 at 40 digits
        assert!((delta(k(8), 0.9843).unwrap() + 5.578_835_462_571_4e-5).abs() < 1e-15);
        assert!(delta(k(2), 0.5).is_err());
        assert!(delta(k(3), 1.5).is_err());
    }

    #[test]
    fn delta_shape() {
        for m in 3..60 {
            let peak = m as f64 / (m as f64 + 1.0);
            assert!(delta(k(m), peak).unwrap() > 0.0);
            assert!(delta(k(m), 0.0).unwrap() < 0.0);
            assert_eq!(delta(k(m), 0.0).unwrap(), delta(k(m), 1.0).unwrap());
        }
    }

    #[test]
    fn larger_root_examples() {
        assert!((larger_root(k(2)).unwrap() - 0.693361).abs() < 1e-6);
        // roots of p(1-p)^k = 1/(k(k+1)) from a 40-digit solver
        assert!((breakpoint(k(8)).unwrap() - 0.015_772_625_168_187_294).abs() < 1e-15);
        assert!((breakpoint(k(7)).unwrap() - 0.020_668_217_880_938_3).abs() < 1e-15);
        assert!((breakpoint(k(3)).unwrap() - 0.123_942_830_246_826_05).abs() < 1e-15);
        assert!((larger_root(k(8)).unwrap() - (1.0 - 0.0157)).abs() < 1e-4);
        assert!(larger_root(k(1)).is_err());
    }

    #[test]
    fn root_residuals_and_monotonicity() {
        let mut prev = 0.0;
        for m in 2..=500 {
            let q = larger_root(k(m)).unwrap();
            assert!(q > prev, "q*_{m} not increasing");
            prev = q;
            if m >= 3 {
                assert!(delta(k(m), q).unwrap().abs() <= 1e-12);
                assert!(q > m as f64 / (m as f64 + 1.0));
            }
        }
    }

    #[test]
    fn range_examples() {
        let r8 = optimality_range(k(8)).unwrap();
        assert!((r8.p_low - 0.015_772_625_168_187_3).abs() < 1e-13);
        assert!((r8.p_high - 0.0206).abs() < 1e-4);
        let r1 = optimality_range(k(1)).unwrap();
        assert_eq!(r1.p_low, pooling_threshold());
        assert_eq!(r1.p_high, 1.0);
        let r3 = optimality_range(k(3)).unwrap();
        assert_eq!(r3.p_high, pooling_threshold());
        let mid = Prevalence::new(r3.midpoint()).unwrap();
        assert_eq!(samuels_optimal_k(mid).get(), 3);
        assert_eq!(optimality_range(k(2)), Err(Error::NeverOptimal));
    }

    #[test]
    fn ranges_agree_with_samuels() {
        for m in 3..=200 {
            let r = optimality_range(k(m)).unwrap();
            for i in 1..=100 {
                let p = r.p_low + (r.p_high - r.p_low) * i as f64 / 101.0;
                let got = samuels_optimal_k(Prevalence::new(p).unwrap()).get();
                assert_eq!(got, m, "p = {p} in range of {m}");
            }
        }
    }

    #[test]
    fn ranges_tile_without_gaps() {
        let mut upper = 1.0;
        for m in std::iter::once(1).chain(3..=200) {
            let r = optimality_range(k(m)).unwrap();
            assert_eq!(r.p_high, upper, "gap above k = {m}");
            assert!(r.p_low < r.p_high);
            upper = r.p_low;
        }
        assert_eq!(upper, breakpoint(k(200)).unwrap());
    }

    #[test]
    fn table_matches_direct_computation() {
        let table = Breakpoints::up_to(300);
        assert_eq!(table.max(), 300);
        for m in [2, 3, 17, 150, 300] {
            assert_eq!(table.get(m), breakpoint(k(m)).unwrap());
        }
        let mut grown = Breakpoints::up_to(10);
        grown.ensure(300);
        assert_eq!(grown.get(299), table.get(299));
    }
}
