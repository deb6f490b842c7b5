//! The subsampling distribution and the confidence intervals read off it.
//!
//! For a statistic with rate `tau_m = m^alpha`, the subsampling distribution
//! built from a block scheme with `q` blocks is the step function
//!
//! ```text
//!     L(x) = (1/q) * #{ j : tau_b * g(theta_hat_{b,j} - center) <= x },
//! ```
//!
//! the empirical CDF of the scaled, centered, g-transformed subsample
//! statistics. Under mild conditions (the statistic has a nondegenerate
//! limit law at rate `tau`, `b -> infinity`, `b/n -> 0`) L consistently
//! estimates the sampling law of `tau_n * g(theta_hat_n - theta)`, which is
//! what makes its quantiles usable for confidence intervals even when the
//! limit law has unknown nuisance parameters.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluate::subsample_statistics;
use crate::sample::Sample;
use crate::scheme::BlockScheme;
use crate::statistic::{GFunc, Statistic};
use crate::statistics::smallest_k_at_least;
use crate::reduce::pairwise_mean;

/// Which estimate the subsample statistics are centered on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Centering {
    /// The full-sample statistic. This is the classical construction and the
    /// one the consistency theory is stated for.
    #[default]
    FullSample,
    /// The average of the subsample statistics. Offered as a convenience for
    /// expensive statistics where the full-sample evaluation is unaffordable;
    /// no asymptotic claims are made for it here.
    SubaggingMean,
}

/// A closed interval `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// The subsampling distribution: sorted scaled deviations plus the scheme
/// and scaling they came from.
#[derive(Debug, Clone)]
pub struct SubsamplingDistribution {
    values: Vec<f64>,
    tau_b: f64,
    center: f64,
    g: GFunc,
    scheme: BlockScheme,
}

impl SubsamplingDistribution {
    /// Builds the distribution from precomputed subsample statistics.
    /// `stats[j]` must be the statistic on block `j + 1` of `scheme`.
    pub fn from_subsample_statistics(
        stats: &[f64],
        center: f64,
        tau_b: f64,
        g: GFunc,
        scheme: BlockScheme,
    ) -> Result<Self> {
        if stats.is_empty() {
            return Err(Error::InvalidInput(
                "subsampling distribution needs at least one subsample statistic".into(),
            ));
        }
        if stats.len() != scheme.q() {
            return Err(Error::InvalidInput(format!(
                "{} subsample statistics do not match the scheme's q = {}",
                stats.len(),
                scheme.q()
            )));
        }
        if !(tau_b > 0.0 && tau_b.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "scaling tau_b must be positive and finite, got {tau_b}"
            )));
        }
        if !center.is_finite() {
            return Err(Error::InvalidInput(format!(
                "center must be finite, got {center}"
            )));
        }
        let mut values: Vec<f64> = stats.iter().map(|&t| tau_b * g.apply(t - center)).collect();
        values.sort_by(f64::total_cmp);
        Ok(SubsamplingDistribution {
            values,
            tau_b,
            center,
            g,
            scheme,
        })
    }

    /// Evaluates `stat` on every block of `scheme` and builds the
    /// distribution with `tau_b = b^alpha` and the requested centering.
    pub fn build<S: Statistic + ?Sized>(
        sample: &Sample,
        stat: &S,
        scheme: BlockScheme,
        g: GFunc,
        centering: Centering,
    ) -> Result<Self> {
        let stats = subsample_statistics(sample, stat, &scheme)?;
        let center = match centering {
            Centering::FullSample => stat.evaluate(sample.full())?,
            Centering::SubaggingMean => pairwise_mean(&stats),
        };
        let tau_b = stat.rates().tau(scheme.b());
        Self::from_subsample_statistics(&stats, center, tau_b, g, scheme)
    }

    /// The sorted scaled deviations (the distribution's jump points).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn q(&self) -> usize {
        self.values.len()
    }

    pub fn tau_b(&self) -> f64 {
        self.tau_b
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn g(&self) -> GFunc {
        self.g
    }

    pub fn scheme(&self) -> BlockScheme {
        self.scheme
    }

    /// The step-function CDF `L(x)`: fraction of values `<= x`.
    /// Right-continuous, with range `{0, 1/q, ..., 1}`.
    pub fn cdf(&self, x: f64) -> f64 {
        let count = self.values.partition_point(|&v| v <= x);
        count as f64 / self.values.len() as f64
    }

    /// The `p`-quantile for `p` in (0, 1]: the smallest jump point `x` with
    /// `L(x) >= p`, i.e. the `ceil(p * q)`-th smallest value. Left-continuous
    /// generalized inverse; always one of the observed values.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "quantile level p must be in (0, 1], got {p}"
            )));
        }
        let q = self.values.len();
        let k = smallest_k_at_least(p * q as f64, q);
        Ok(self.values[k - 1])
    }

    /// Sup-distance `sup_x |L(x) - f(x)|` against a reference CDF `f`,
    /// taking the step function's left limits into account. Useful as a
    /// convergence diagnostic against a limit law.
    pub fn kolmogorov_distance<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let q = self.values.len() as f64;
        let mut sup: f64 = 0.0;
        for (i, &v) in self.values.iter().enumerate() {
            let fv = f(v);
            let above = ((i + 1) as f64 / q - fv).abs();
            let below = (fv - i as f64 / q).abs();
            sup = sup.max(above).max(below);
        }
        sup
    }

    /// Serializable snapshot `{values, tau_b, center, q, b, h}`.
    pub fn export(&self) -> DistributionExport<'_> {
        DistributionExport {
            values: &self.values,
            tau_b: self.tau_b,
            center: self.center,
            q: self.q(),
            b: self.scheme.b(),
            h: self.scheme.h(),
        }
    }
}

/// JSON form of a subsampling distribution.
#[derive(Debug, Serialize)]
pub struct DistributionExport<'a> {
    pub values: &'a [f64],
    pub tau_b: f64,
    pub center: f64,
    pub q: usize,
    pub b: usize,
    pub h: usize,
}

/// Equal-tailed confidence interval for the estimand, read off the
/// subsampling distribution:
///
/// ```text
///     [ theta_hat_n - L^{-1}((1+level)/2) / tau_n ,
///       theta_hat_n - L^{-1}((1-level)/2) / tau_n ]
/// ```
///
/// for `g = identity`. For `g = abs` (or sup-norm) the two-sided symmetric
/// interval `theta_hat_n ± L^{-1}(level) / tau_n` is returned instead, since
/// the absolute deviations carry no sign information to split tails with.
pub fn subsampling_ci(
    dist: &SubsamplingDistribution,
    theta_hat_n: f64,
    tau_n: f64,
    level: f64,
) -> Result<Interval> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidInput(format!(
            "confidence level must be in (0, 1), got {level}"
        )));
    }
    if !(tau_n > 0.0 && tau_n.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "scaling tau_n must be positive and finite, got {tau_n}"
        )));
    }
    match dist.g() {
        GFunc::Identity => {
            let hi = dist.quantile((1.0 + level) / 2.0)?;
            let lo = dist.quantile((1.0 - level) / 2.0)?;
            Ok(Interval {
                lower: theta_hat_n - hi / tau_n,
                upper: theta_hat_n - lo / tau_n,
            })
        }
        GFunc::Abs | GFunc::SupNorm => {
            let r = dist.quantile(level)?;
            Ok(Interval {
                lower: theta_hat_n - r / tau_n,
                upper: theta_hat_n + r / tau_n,
            })
        }
    }
}
