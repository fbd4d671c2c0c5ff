//! Minimax pool size when the prevalence is unknown or only bounded above.
//!
//! For each `k` the worst-case regret over `p` in `(0, min(U, p0)]` is found
//! exactly: on each stretch where the optimal pool size is a constant `m`,
//! the regret is `q^m - q^k + 1/k - 1/m` with `q = 1 - p`, whose only
//! interior stationary point is `q = (m/k)^(1/(k-m))`. Stretches with
//! `m >= k` never exceed the `p -> 0` limit `1/k`. A brute-force grid search
//! is kept alongside as an independent check.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{loss_raw, pooling_threshold, GroupSize};
use crate::error::{check_upper_bound, Error, Result};
use crate::ranges::Breakpoints;
use crate::scan::{argmin_k, ScanOptions};

/// Worst-case prevalence and regret for one pool size.
///
/// `p_star == 0` encodes the `p -> 0` limit, where the regret tends to `1/k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossPoint {
    pub k: GroupSize,
    pub p_star: f64,
    pub sup_loss: f64,
}

impl LossPoint {
    pub fn is_limit(&self) -> bool {
        self.p_star == 0.0
    }

    fn limit(k: u64) -> Self {
        LossPoint {
            k: GroupSize::new(k).expect("k >= 1"),
            p_star: 0.0,
            sup_loss: 1.0 / k as f64,
        }
    }

    // strictly larger loss wins; equal loss keeps the lower prevalence
    fn better_than(&self, other: &LossPoint) -> bool {
        self.sup_loss > other.sup_loss
            || (self.sup_loss == other.sup_loss && self.p_star < other.p_star)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimaxResult {
    pub k_minimax: GroupSize,
    pub upper_bound: f64,
    pub worst_point: LossPoint,
    pub method: Method,
}

/// Grid spacing used by the grid method when none is given: at most `1e-6`,
/// and fine enough to leave `10^5` points below small upper bounds.
pub fn default_grid_step(upper: f64) -> f64 {
    (1e-6f64).min(upper / 1e5)
}

/// Exact supremum of the regret of pool size `k` over `(0, min(U, p0)]`.
pub fn sup_loss_analytic(k: GroupSize, upper: f64) -> Result<LossPoint> {
    check_upper_bound(upper)?;
    let table = Breakpoints::up_to(k.get().max(2));
    Ok(sup_loss_with_table(&table, k.get(), upper))
}

/// As [`sup_loss_analytic`], reusing precomputed breakpoints.
///
/// `table` must cover `k - 1`.
pub fn sup_loss_analytic_with(table: &Breakpoints, k: GroupSize, upper: f64) -> Result<LossPoint> {
    check_upper_bound(upper)?;
    assert!(
        table.max() + 1 >= k.get(),
        "breakpoint table too short for k = {k}"
    );
    Ok(sup_loss_with_table(table, k.get(), upper))
}

fn sup_loss_with_table(table: &Breakpoints, k: u64, upper: f64) -> LossPoint {
    let top = upper.min(pooling_threshold());
    let mut best = LossPoint::limit(k);
    let kf = k as f64;
    let mut consider = |p: f64| {
        let cand = LossPoint {
            k: best.k,
            p_star: p,
            sup_loss: loss_raw(k, p),
        };
        if cand.better_than(&best) {
            best = cand;
        }
    };
    // m = k* on [breakpoint(m), breakpoint(m - 1)]
    for m in 3..k {
        let lo = table.get(m);
        if lo >= top {
            continue;
        }
        let hi = table.get(m - 1).min(top);
        let mf = m as f64;
        let stationary = -((mf / kf).ln() / (kf - mf)).exp_m1();
        consider(lo);
        consider(stationary.clamp(lo, hi));
        consider(hi);
    }
    best
}

/// Worst regret of pool size `k` on the grid `{0, step, 2 step, ...} <= min(U, p0)`.
///
/// The point `p = 0` stands for the `p -> 0` limit.
pub fn sup_loss_grid(k: GroupSize, upper: f64, step: f64) -> Result<LossPoint> {
    check_upper_bound(upper)?;
    if !(step > 0.0 && step <= 1e-3) {
        return Err(Error::OutOfDomain {
            name: "grid step",
            value: step,
            domain: "(0, 1e-3]",
        });
    }
    let top = upper.min(pooling_threshold());
    let n = ((top / step) * (1.0 + 1e-12)).floor() as u64;
    let kk = k.get();
    let best = (0..=n)
        .into_par_iter()
        .map(|i| {
            let p = (i as f64 * step).min(top);
            LossPoint {
                k,
                p_star: p,
                sup_loss: loss_raw(kk, p),
            }
        })
        .reduce(
            || LossPoint {
                k,
                p_star: f64::INFINITY,
                sup_loss: f64::NEG_INFINITY,
            },
            |a, b| if b.better_than(&a) { b } else { a },
        );
    Ok(best)
}

/// Options for [`minimax_group_size_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimaxOptions {
    pub method: Method,
    /// Grid spacing for [`Method::Grid`]; `None` picks [`default_grid_step`].
    pub grid_step: Option<f64>,
    pub scan: ScanOptions,
}

impl Default for MinimaxOptions {
    fn default() -> Self {
        MinimaxOptions {
            method: Method::Analytic,
            grid_step: None,
            scan: ScanOptions::default(),
        }
    }
}

/// Pool size minimising the worst-case regret for prevalence in `(0, U]`.
pub fn minimax_group_size(upper: f64) -> Result<MinimaxResult> {
    minimax_group_size_with(upper, &MinimaxOptions::default())
}

pub fn minimax_group_size_with(upper: f64, opts: &MinimaxOptions) -> Result<MinimaxResult> {
    check_upper_bound(upper)?;
    let (k_best, _) = match opts.method {
        Method::Analytic => {
            let mut table = Breakpoints::up_to(64);
            argmin_k(&opts.scan, |k| {
                if k > table.max() {
                    table.ensure(2 * k);
                }
                Ok(sup_loss_with_table(&table, k, upper).sup_loss)
            })?
        }
        Method::Grid => {
            let step = opts.grid_step.unwrap_or_else(|| default_grid_step(upper));
            argmin_k(&opts.scan, |k| {
                Ok(sup_loss_grid(GroupSize::new(k)?, upper, step)?.sup_loss)
            })?
        }
    };
    let k = GroupSize::new(k_best)?;
    let worst_point = match opts.method {
        Method::Analytic => sup_loss_analytic(k, upper)?,
        Method::Grid => {
            let step = opts.grid_step.unwrap_or_else(|| default_grid_step(upper));
            sup_loss_grid(k, upper, step)?
        }
    };
    Ok(MinimaxResult {
        k_minimax: k,
        upper_bound: upper,
        worst_point,
        method: opts.method,
    })
}
