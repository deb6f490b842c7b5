//! Subagging: averaging the block statistics into a single estimator, with
//! a variance estimate and two inference routes.
//!
//! With disjoint (or gapped) blocks, `h >= b`, the q block statistics are
//! computed on non-overlapping stretches of data, so
//!
//! ```text
//!     theta_bar = (1/q) * sum_j theta_hat_{b,j}
//! ```
//!
//! behaves like an average of q independent draws of the size-b estimator.
//! That buys three things at once: a point estimate that is much cheaper
//! than the full-sample statistic when the statistic costs more than O(n),
//! a variance estimate from the spread of the block statistics, and a CLT
//! for `theta_bar` itself.
//!
//! Inference comes in two flavors:
//!
//! * [`clt_ci`] — a plain normal interval `theta_bar ± z * se`. Valid when
//!   the block length grows fast enough that the aggregated bias vanishes
//!   in the limit (`beta > 1/(1+2(gamma-alpha))`); refused otherwise.
//! * [`two_level_ci`] — subsampling applied to the subagging estimator
//!   itself: outer windows each produce their own subagged estimate, and
//!   the spread of those around the full estimate calibrates an
//!   equal-tailed interval. The asymptotic bias cancels in the differences,
//!   so this route also covers the rate-optimal choice of `beta` where the
//!   CLT interval would be off-center.

use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::distribution::{subsampling_ci, Interval, SubsamplingDistribution};
use crate::error::{Error, Result};
use crate::evaluate::subsample_statistics;
use crate::numeric::normal_quantile;
use crate::reduce::{pairwise_mean, pairwise_sum};
use crate::sample::Sample;
use crate::scheme::BlockScheme;
use crate::statistic::{GFunc, Statistic};
use crate::tuning::{resolve_scheme, TuningParams};

/// How a confidence interval was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiMethod {
    Clt,
    Subsampling,
    TwoLevel,
}

impl std::fmt::Display for CiMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CiMethod::Clt => write!(f, "clt"),
            CiMethod::Subsampling => write!(f, "subsampling"),
            CiMethod::TwoLevel => write!(f, "two_level"),
        }
    }
}

/// A confidence interval together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CiRecord {
    pub method: CiMethod,
    pub level: f64,
    pub lower: f64,
    pub upper: f64,
}

impl CiRecord {
    pub fn new(method: CiMethod, level: f64, interval: Interval) -> Self {
        CiRecord {
            method,
            level,
            lower: interval.lower,
            upper: interval.upper,
        }
    }

    pub fn interval(&self) -> Interval {
        Interval {
            lower: self.lower,
            upper: self.upper,
        }
    }
}

/// Knobs for [`subagg_estimate_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct SubaggingOptions {
    /// Permit `h < b` (overlapping blocks). The point estimate is still
    /// well defined, but the variance estimate and standard error are
    /// withheld because the blocks are no longer independent.
    pub allow_overlap: bool,
    /// Normalize the block variance by `q - 1` instead of `q`. Off by
    /// default; the `1/q` form is the canonical definition here.
    pub unbiased_variance: bool,
}

/// The subagging estimate with its variance estimate and realized tuning.
#[derive(Debug, Clone)]
pub struct SubaggingResult {
    /// `theta_bar`: the mean of the q block statistics.
    pub theta_bar: f64,
    /// `sigma_hat_sq = (b^{2 alpha} / q) * sum_j (theta_hat_j - theta_bar)^2`.
    /// `None` when overlapping blocks were explicitly allowed.
    pub sigma_hat_sq: Option<f64>,
    /// Standard error of `theta_bar`:
    /// `sigma_hat * n^{-(1 - delta + 2 alpha beta)/2}` with the realized
    /// exponents below. For `h = b` this is exactly
    /// `sigma_hat * n^{-(1 - beta + 2 alpha beta)/2}`.
    pub se: Option<f64>,
    /// The block scheme the estimate was computed under.
    pub scheme: BlockScheme,
    /// The statistic's convergence-rate exponent.
    pub alpha: f64,
    /// The statistic's bias-rate exponent, if declared. Used by [`clt_ci`]
    /// to decide whether the normal interval is centered correctly.
    pub gamma: Option<f64>,
    /// `log b / log n`: the block-growth exponent actually realized.
    pub beta_realized: f64,
    /// `log h / log n`: the offset-growth exponent actually realized.
    pub delta_realized: f64,
    /// Trailing observations not covered by any block.
    pub unused_tail: usize,
    /// Attached confidence interval, if one was requested.
    pub ci: Option<CiRecord>,
}

impl SubaggingResult {
    /// `sigma_hat_sq / (q * b^{2 alpha})`: the plug-in estimate of
    /// `Var(theta_bar)`, i.e. the block-statistic variance divided by q.
    pub fn estimator_variance(&self) -> Option<f64> {
        self.sigma_hat_sq.map(|s| {
            let tau_b = (self.scheme.b() as f64).powf(self.alpha);
            s / (tau_b * tau_b) / self.scheme.q() as f64
        })
    }
}

// The JSON record flattens the scheme into q, b, h and omits gamma:
// {theta_bar, sigma_hat_sq, se, q, b, h, alpha, beta_realized,
//  delta_realized, unused_tail, ci}.
impl Serialize for SubaggingResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("SubaggingResult", 11)?;
        s.serialize_field("theta_bar", &self.theta_bar)?;
        s.serialize_field("sigma_hat_sq", &self.sigma_hat_sq)?;
        s.serialize_field("se", &self.se)?;
        s.serialize_field("q", &self.scheme.q())?;
        s.serialize_field("b", &self.scheme.b())?;
        s.serialize_field("h", &self.scheme.h())?;
        s.serialize_field("alpha", &self.alpha)?;
        s.serialize_field("beta_realized", &self.beta_realized)?;
        s.serialize_field("delta_realized", &self.delta_realized)?;
        s.serialize_field("unused_tail", &self.unused_tail)?;
        s.serialize_field("ci", &self.ci)?;
        s.end()
    }
}

/// Block variance of the subsample statistics on the scale of the limit
/// law: `(b^{2 alpha} / q) * sum_j (stats[j] - mean)^2`.
///
/// Needs at least two block statistics to carry any information.
pub fn sigma_hat_sq(stats: &[f64], b: usize, alpha: f64) -> Result<f64> {
    sigma_hat_sq_impl(stats, b, alpha, false)
}

fn sigma_hat_sq_impl(stats: &[f64], b: usize, alpha: f64, unbiased: bool) -> Result<f64> {
    let q = stats.len();
    if q < 2 {
        return Err(Error::InsufficientBlocks { q });
    }
    let mean = pairwise_mean(stats);
    let sq: Vec<f64> = stats.iter().map(|&t| (t - mean) * (t - mean)).collect();
    let denom = if unbiased { (q - 1) as f64 } else { q as f64 };
    let tau_b = (b as f64).powf(alpha);
    Ok(tau_b * tau_b * pairwise_sum(&sq) / denom)
}

/// Subagging with default options: disjoint or gapped blocks only, `1/q`
/// variance normalization.
pub fn subagg_estimate<S: Statistic + ?Sized>(
    sample: &Sample,
    stat: &S,
    scheme: BlockScheme,
) -> Result<SubaggingResult> {
    subagg_estimate_with(sample, stat, scheme, SubaggingOptions::default())
}

/// Subagging with explicit options. See [`SubaggingOptions`].
pub fn subagg_estimate_with<S: Statistic + ?Sized>(
    sample: &Sample,
    stat: &S,
    scheme: BlockScheme,
    options: SubaggingOptions,
) -> Result<SubaggingResult> {
    let overlapping = scheme.h() < scheme.b();
    if overlapping && !options.allow_overlap {
        return Err(Error::OverlappingBlocks {
            b: scheme.b(),
            h: scheme.h(),
        });
    }
    if !overlapping && scheme.q() < 2 {
        // A single block gives a point estimate but no spread to estimate
        // the variance from; refuse rather than return a half-filled record.
        return Err(Error::InsufficientBlocks { q: scheme.q() });
    }
    let rates = stat.rates();
    let stats = subsample_statistics(sample, stat, &scheme)?;
    let theta_bar = pairwise_mean(&stats);

    let n = scheme.n() as f64;
    let beta_realized = (scheme.b() as f64).ln() / n.ln();
    let delta_realized = (scheme.h() as f64).ln() / n.ln();

    let (sigma, se) = if overlapping {
        (None, None)
    } else {
        let s = sigma_hat_sq_impl(&stats, scheme.b(), rates.alpha, options.unbiased_variance)?;
        let exponent = (1.0 - delta_realized + 2.0 * rates.alpha * beta_realized) / 2.0;
        (Some(s), Some(s.sqrt() * n.powf(-exponent)))
    };

    Ok(SubaggingResult {
        theta_bar,
        sigma_hat_sq: sigma,
        se,
        scheme,
        alpha: rates.alpha,
        gamma: rates.gamma,
        beta_realized,
        delta_realized,
        unused_tail: scheme.unused_tail(),
        ci: None,
    })
}

/// Normal-approximation interval `theta_bar ± z_{(1+level)/2} * se`.
///
/// Only valid when the subagged bias vanishes in the limit. For a
/// statistic with declared bias exponent `gamma`, that requires the
/// realized `beta > 1/(1 + 2(gamma - alpha))`; at or below that threshold
/// the interval would be centered off the estimand and the call is refused
/// in favor of [`two_level_ci`]. A statistic with no declared bias
/// exponent (`gamma = None`, e.g. the mean) is treated as unbiased, so the
/// interval is valid for any block growth.
pub fn clt_ci(result: &SubaggingResult, level: f64) -> Result<Interval> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidInput(format!(
            "confidence level must be in (0, 1), got {level}"
        )));
    }
    let se = result.se.ok_or(Error::VarianceUnavailable)?;
    if let Some(gamma) = result.gamma {
        let threshold = 1.0 / (1.0 + 2.0 * (gamma - result.alpha));
        if result.beta_realized <= threshold {
            return Err(Error::AsymptoticBias {
                beta: result.beta_realized,
                threshold,
            });
        }
    }
    let z = normal_quantile((1.0 + level) / 2.0)?;
    Ok(Interval {
        lower: result.theta_bar - z * se,
        upper: result.theta_bar + z * se,
    })
}

/// Two-level interval: subsampling on top of subagging.
///
/// The sample is tiled by disjoint outer windows of length
/// `b_out = ceil(n^{0.7})`. On each window the subagging estimator is
/// recomputed with the block scheme resolved for a sample of size `b_out`
/// under the same tuning, giving `theta_bar_j`. The values
///
/// ```text
///     b_out^{(1 - beta + 2 alpha beta)/2} * (theta_bar_j - theta_bar_full)
/// ```
///
/// form a subsampling distribution for the subagging estimator at its own
/// convergence rate, and an equal-tailed interval is read off it with
/// `tau_n = n^{(1 - beta + 2 alpha beta)/2}`. Any asymptotic bias shifts
/// `theta_bar_j` and `theta_bar_full` alike, so it drops out of the
/// differences — this is the interval to use at the rate-optimal `beta`,
/// where [`clt_ci`] refuses. `alpha` and `beta` are taken from `tuning`.
pub fn two_level_ci<S: Statistic + ?Sized>(
    sample: &Sample,
    stat: &S,
    tuning: &TuningParams,
    level: f64,
) -> Result<Interval> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidInput(format!(
            "confidence level must be in (0, 1), got {level}"
        )));
    }
    let n = sample.n();
    let full_scheme = resolve_scheme(n, tuning)?;
    let full_stats = subsample_statistics(sample, stat, &full_scheme)?;
    let theta_bar_full = pairwise_mean(&full_stats);

    let b_out = (n as f64).powf(0.7).ceil() as usize;
    if b_out >= n {
        return Err(Error::InvalidScheme(format!(
            "two-level outer window length {b_out} must be smaller than the sample size {n}"
        )));
    }
    let outer = BlockScheme::new(n, b_out, b_out)?;
    let inner_scheme = resolve_scheme(b_out, tuning)?;

    let thetas: Vec<Result<f64>> = (1..=outer.q())
        .into_par_iter()
        .map(|j| {
            let (start, _) = outer.block_window(j)?;
            let window = sample.subsample(start, b_out)?;
            let stats = subsample_statistics(&window, stat, &inner_scheme)?;
            Ok(pairwise_mean(&stats))
        })
        .collect();
    let thetas: Vec<f64> = thetas.into_iter().collect::<Result<_>>()?;

    let a = (1.0 - tuning.beta + 2.0 * tuning.alpha * tuning.beta) / 2.0;
    let tau_out = (b_out as f64).powf(a);
    let dist = SubsamplingDistribution::from_subsample_statistics(
        &thetas,
        theta_bar_full,
        tau_out,
        GFunc::Identity,
        outer,
    )?;
    let tau_n = (n as f64).powf(a);
    subsampling_ci(&dist, theta_bar_full, tau_n, level)
}
