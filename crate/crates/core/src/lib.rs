//! Group-size design for Dorfman two-stage group testing.
//!
//! Given a prevalence `p` that is known, bounded above, or described by a
//! prior, this crate computes:
//!
//! * the cost-optimal pool size and its expected cost ([`cost`]),
//! * the prevalence range on which each pool size is optimal ([`ranges`]),
//! * the minimax-regret pool size over `(0, U]` ([`minimax`]),
//! * the Bayes pool size under truncated beta priors ([`bayes`]),
//! * relative efficiencies and the standard design tables ([`efficiency`]).
//!
//! ```
//! use pooldesign_core::{minimax_group_size, samuels_optimal_k, Prevalence};
//!
//! let k = samuels_optimal_k(Prevalence::new(0.01)?);
//! assert_eq!(k.get(), 11);
//! assert_eq!(minimax_group_size(1.0)?.k_minimax.get(), 8);
//! # Ok::<(), pooldesign_core::Error>(())
//! ```

pub mod bayes;
pub mod cost;
pub mod efficiency;
pub mod error;
pub mod golden;
pub mod minimax;
pub mod quadrature;
pub mod ranges;
pub mod roots;
pub mod scan;

pub use bayes::{
    bayes_optimal_k, bayes_optimal_k_with, expected_tests_under_prior,
    expected_tests_under_prior_with, expected_tests_uniform, jeffreys_constant, BayesOptions,
    BayesResult, PriorSpec,
};
pub use cost::{
    expected_tests, loss, optimal_expected_tests, pooling_threshold, samuels_optimal_k,
    CostModelConstants, GroupSize, Prevalence,
};
pub use efficiency::{
    generate_table, relative_efficiency, Cell, EfficiencyRow, TableId, TableOptions, TableReport,
    TableRow,
};
pub use error::{Error, Result};
pub use minimax::{
    default_grid_step, minimax_group_size, minimax_group_size_with, sup_loss_analytic,
    sup_loss_analytic_with, sup_loss_grid, LossPoint, Method, MinimaxOptions, MinimaxResult,
};
pub use quadrature::QuadratureOptions;
pub use ranges::{breakpoint, delta, larger_root, optimality_range, Breakpoints, OptimalityRange};
pub use scan::ScanOptions;
