//! Integer argmin search over pool sizes `k = 1, 2, 3, ...`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_PATIENCE: u64 = 10;
pub const DEFAULT_MAX_K: u64 = 100_000;

/// Stopping rule for a k-scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanOptions {
    /// Stop once this many consecutive k fail to strictly improve the best value.
    pub patience: u64,
    /// Hard cap on k; reaching it without a bracketed minimum is an error.
    pub max_k: u64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            patience: DEFAULT_PATIENCE,
            max_k: DEFAULT_MAX_K,
        }
    }
}

/// Returns the smallest k attaining the minimum of `f` seen before the scan
/// stops, together with that minimum.
pub(crate) fn argmin_k<F>(opts: &ScanOptions, mut f: F) -> Result<(u64, f64)>
where
    F: FnMut(u64) -> Result<f64>,
{
    let patience = opts.patience.max(1);
    let mut best = (1, f(1)?);
    let mut stale = 0;
    for k in 2..=opts.max_k {
        let v = f(k)?;
        if v < best.1 {
            best = (k, v);
            stale = 0;
        } else {
            stale += 1;
            if stale >= patience {
                return Ok(best);
            }
        }
    }
    Err(Error::ScanExhausted { max_k: opts.max_k })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_minimum() {
        let (k, v) = argmin_k(&ScanOptions::default(), |k| Ok((k as f64 - 13.0).powi(2))).unwrap();
        assert_eq!((k, v), (13, 0.0));
    }

    #[test]
    fn ties_keep_smaller_k() {
        let (k, _) = argmin_k(&ScanOptions::default(), |k| {
            Ok(if k >= 4 { 1.0 } else { 2.0 })
        })
        .unwrap();
        assert_eq!(k, 4);
    }

    #[test]
    fn first_k_can_win_against_a_decreasing_tail() {
        // 1 at k = 1, then 1 + 1/k approaching 1 from above
        let (k, _) = argmin_k(&ScanOptions::default(), |k| {
            Ok(if k == 1 { 1.0 } else { 1.0 + 1.0 / k as f64 })
        })
        .unwrap();
        assert_eq!(k, 1);
    }

    #[test]
    fn exhausts_on_monotone_decrease() {
        let opts = ScanOptions {
            patience: 10,
            max_k: 50,
        };
        assert_eq!(
            argmin_k(&opts, |k| Ok(-(k as f64))),
            Err(Error::ScanExhausted { max_k: 50 })
        );
    }
}
