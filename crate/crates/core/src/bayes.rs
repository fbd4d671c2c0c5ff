//! Pool sizes minimising the prior-expected cost under truncated beta priors.
//!
//! The prior has density proportional to `p^(a-1) (1-p)^(b-1)` on `(0, U]`.
//! Integrals are taken in `theta` with `p = U sin^2(theta)`, which turns the
//! `p^(-1/2)` singularity of the Jeffreys prior into a bounded integrand.

use serde::{Deserialize, Serialize};

use crate::cost::{pool_positive_prob, GroupSize};
use crate::error::{check_upper_bound, Error, Result};
use crate::quadrature::{integrate, QuadratureOptions};
use crate::scan::{argmin_k, ScanOptions};

use std::f64::consts::FRAC_PI_2;

/// Beta(a, b) prior truncated to `(0, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub a: f64,
    pub b: f64,
    pub upper: f64,
}

impl PriorSpec {
    pub fn new(a: f64, b: f64, upper: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) || !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidPrior(format!(
                "beta shapes must be positive and finite, got a = {a}, b = {b}"
            )));
        }
        check_upper_bound(upper)?;
        Ok(PriorSpec { a, b, upper })
    }

    pub fn uniform(upper: f64) -> Result<Self> {
        Self::new(1.0, 1.0, upper)
    }

    pub fn jeffreys(upper: f64) -> Result<Self> {
        Self::new(0.5, 0.5, upper)
    }

    pub fn is_uniform(&self) -> bool {
        self.a == 1.0 && self.b == 1.0
    }

    pub fn is_jeffreys(&self) -> bool {
        self.a == 0.5 && self.b == 0.5
    }

    /// Unnormalised prior weight after `p = U sin^2(theta)`, including the
    /// Jacobian `2 U sin(theta) cos(theta)`.
    fn weight(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        let u = self.upper;
        let left = 2.0 * u.powf(self.a) * s.powf(2.0 * self.a - 1.0);
        // (1 - U sin^2) = cos^2 + (1 - U) sin^2; at U = 1 the cosine cancels
        let right = if u == 1.0 {
            c.powf(2.0 * self.b - 1.0)
        } else {
            c * (c * c + (1.0 - u) * s * s).powf(self.b - 1.0)
        };
        left * right
    }

    fn prevalence(&self, theta: f64) -> f64 {
        let s = theta.sin();
        self.upper * s * s
    }

    /// `int_0^U p^(a-1) (1-p)^(b-1) dp`.
    pub fn normalizer(&self, opts: &QuadratureOptions) -> Result<f64> {
        Ok(integrate(|t| self.weight(t), 0.0, FRAC_PI_2, opts)?.value)
    }

    /// Prior density at `p`; zero outside `(0, U]`.
    pub fn density(&self, p: f64, normalizer: f64) -> f64 {
        if p <= 0.0 || p > self.upper {
            return 0.0;
        }
        p.powf(self.a - 1.0) * (1.0 - p).powf(self.b - 1.0) / normalizer
    }
}

/// Normalising constant of the Jeffreys prior on `(0, U]`: `2 asin(sqrt(U))`.
pub fn jeffreys_constant(upper: f64) -> Result<f64> {
    check_upper_bound(upper)?;
    Ok(2.0 * upper.sqrt().asin())
}

/// Prior-mean expected tests under the uniform prior on `(0, U]`, in closed form.
pub fn expected_tests_uniform(k: GroupSize, upper: f64) -> Result<f64> {
    check_upper_bound(upper)?;
    let k = k.get();
    if k == 1 {
        return Ok(1.0);
    }
    let k1 = (k + 1) as f64;
    // (1-U)^(k+1) - 1
    let tail = (k1 * (-upper).ln_1p()).exp_m1();
    Ok(1.0 + 1.0 / k as f64 + tail / (upper * k1))
}

/// Prior-mean expected tests per person with pool size `k`.
pub fn expected_tests_under_prior(k: GroupSize, prior: &PriorSpec) -> Result<f64> {
    expected_tests_under_prior_with(k, prior, &QuadratureOptions::default())
}

pub fn expected_tests_under_prior_with(
    k: GroupSize,
    prior: &PriorSpec,
    opts: &QuadratureOptions,
) -> Result<f64> {
    let norm = prior.normalizer(opts)?;
    prior_mean_cost(k.get(), prior, norm, opts)
}

fn prior_mean_cost(k: u64, prior: &PriorSpec, norm: f64, opts: &QuadratureOptions) -> Result<f64> {
    if k == 1 {
        return Ok(1.0);
    }
    // E(k, p) = P(pool positive) + 1/k; integrate the first term only
    let positive = integrate(
        |t| pool_positive_prob(k, prior.prevalence(t)) * prior.weight(t),
        0.0,
        FRAC_PI_2,
        opts,
    )?;
    Ok(positive.value / norm + 1.0 / k as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BayesResult {
    pub k_opt: GroupSize,
    pub expected_tests_at_opt: f64,
    pub prior: PriorSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BayesOptions {
    pub quadrature: QuadratureOptions,
    pub scan: ScanOptions,
}

/// Pool size minimising the prior-expected cost.
pub fn bayes_optimal_k(prior: &PriorSpec) -> Result<BayesResult> {
    bayes_optimal_k_with(prior, &BayesOptions::default())
}

pub fn bayes_optimal_k_with(prior: &PriorSpec, opts: &BayesOptions) -> Result<BayesResult> {
    let norm = prior.normalizer(&opts.quadrature)?;
    let (k, value) = argmin_k(&opts.scan, |k| {
        prior_mean_cost(k, prior, norm, &opts.quadrature)
    })?;
    Ok(BayesResult {
        k_opt: GroupSize::new(k)?,
        expected_tests_at_opt: value,
        prior: *prior,
    })
}
