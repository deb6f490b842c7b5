//! Scalable subsampling: block schemes, subsampling distributions,
//! subagging estimators, and rate tuning for large samples.
//!
//! The core idea: instead of evaluating an expensive statistic on all n
//! observations — or on all n−b+1 overlapping subsamples — evaluate it on
//! `q = floor((n-b)/h) + 1` blocks of length b spaced h apart. With
//! `h = b` the blocks tile the sample disjointly, `q ≈ n/b`, and three
//! things come almost for free:
//!
//! * the empirical distribution of the scaled block statistics estimates
//!   the sampling law of the full-sample statistic
//!   ([`SubsamplingDistribution`]), giving confidence intervals without
//!   knowing the limit law's nuisance parameters;
//! * averaging the block statistics gives the subagging point estimator
//!   ([`subagg_estimate`]), often dramatically cheaper than the
//!   full-sample statistic, together with a variance estimate and normal
//!   ([`clt_ci`]) or two-level subsampling ([`two_level_ci`]) intervals;
//! * the exponents that govern the quality of all of the above are simple
//!   arithmetic ([`optimal_beta`], [`delta_bounds`], [`resolve_scheme`]).
//!
//! Everything is deterministic by construction: reductions use a fixed
//! pairwise summation order ([`pairwise_sum`]), parallel loops assemble
//! results in index order, and the Monte Carlo harness
//! ([`run_experiment`]) keys every replication to its own counter-based
//! random stream — the same configuration produces the same bytes at any
//! thread count.
//!
//! # Quick start
//!
//! ```
//! use scalsub::{clt_ci, subagg_estimate, BlockScheme, BuiltinStatistic, Sample};
//!
//! # fn main() -> scalsub::Result<()> {
//! // 10_000 observations, blocks of 100, disjoint tiling (h = b).
//! let data: Vec<f64> = (0..10_000).map(|i| (i as f64 * 0.37).sin()).collect();
//! let sample = Sample::univariate(data)?;
//! let scheme = BlockScheme::new(sample.n(), 100, 100)?;
//!
//! let result = subagg_estimate(&sample, &BuiltinStatistic::mean(), scheme)?;
//! let ci = clt_ci(&result, 0.95)?;
//! assert!(ci.lower <= result.theta_bar && result.theta_bar <= ci.upper);
//! # Ok(())
//! # }
//! ```
//!
//! The `scalsub` binary exposes the same functionality as subcommands
//! (`estimate`, `distribution`, `ci`, `tune`, `mc`); see the guide in
//! `book/` for a walkthrough.

// Validation guards are written as negated comparisons (`!(x > 0.0)`) so
// NaN fails them, and the numeric constants keep the full precision of the
// sources they were transcribed from.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod distribution;
pub mod error;
pub mod evaluate;
pub mod harness;
pub mod numeric;
pub mod reduce;
pub mod sample;
pub mod scheme;
pub mod statistic;
pub mod statistics;
pub mod subagging;
pub mod tuning;

pub use distribution::{
    subsampling_ci, Centering, DistributionExport, Interval, SubsamplingDistribution,
};
pub use error::{Error, Result};
pub use evaluate::subsample_statistics;
pub use harness::{
    fit_rate_slope, generate, ingest_csv, population_theta, run_experiment, DataModel,
    ExperimentConfig, ExperimentReport, ExperimentRow, SlopeFit,
};
pub use reduce::{pairwise_mean, pairwise_sum, PAIRWISE_LEAF};
pub use sample::{Sample, Window};
pub use scheme::{make_block_scheme, BlockScheme};
pub use statistic::{GFunc, RateSpec, Statistic};
pub use statistics::{
    huber, kernel_density_at, mean, quantile_stat, BuiltinStatistic, HUBER_K, HUBER_MAX_ITER,
    HUBER_TOL,
};
pub use subagging::{
    clt_ci, sigma_hat_sq, subagg_estimate, subagg_estimate_with, two_level_ci, CiMethod, CiRecord,
    SubaggingOptions, SubaggingResult,
};
pub use tuning::{
    alpha_warning, beta_bounds, complexity_report, delta_bounds, optimal_beta, resolve_scheme,
    subagging_rate, ComplexityReport, Dependence, RateReport, TuningParams,
};

// Compile and run the guide's and README's code blocks as doctests so the
// prose can never drift from the library.
#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/blocks.md")]
    mod blocks {}
    #[doc = include_str!("../../../book/src/distribution.md")]
    mod distribution {}
    #[doc = include_str!("../../../book/src/subagging.md")]
    mod subagging {}
    #[doc = include_str!("../../../book/src/tuning.md")]
    mod tuning {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/determinism.md")]
    mod determinism {}
}
