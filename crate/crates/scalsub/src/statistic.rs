//! The statistic abstraction and its rate metadata.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sample::Window;

/// Convergence-rate metadata attached to a statistic.
///
/// * `alpha`: the estimator converges at rate `n^alpha`, i.e. the scaling
///   `tau_n = n^alpha` makes `tau_n * (estimate - target)` converge to a
///   nondegenerate law. `1/2` for regular statistics.
/// * `gamma`: bias exponent, `E[estimate] - target ~ C / n^gamma`. `None`
///   means exactly unbiased (no bias term at any order that matters for
///   tuning). Must exceed `alpha` when present.
/// * `zeta`: cost exponent, evaluating the statistic on `m` points costs
///   `O(m^zeta)`. `None` when unknown; cost reports then assume 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSpec {
    pub alpha: f64,
    pub gamma: Option<f64>,
    pub zeta: Option<f64>,
}

impl RateSpec {
    pub fn new(alpha: f64, gamma: Option<f64>, zeta: Option<f64>) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "rate exponent alpha must be positive and finite, got {alpha}"
            )));
        }
        if let Some(g) = gamma {
            if !(g > alpha) {
                return Err(Error::InvalidInput(format!(
                    "bias exponent gamma = {g} must exceed alpha = {alpha}"
                )));
            }
        }
        if let Some(z) = zeta {
            if !(z >= 1.0) {
                return Err(Error::InvalidInput(format!(
                    "cost exponent zeta = {z} must be at least 1"
                )));
            }
        }
        Ok(RateSpec { alpha, gamma, zeta })
    }

    /// The scaling factor `m^alpha` at sample size `m`.
    pub fn tau(&self, m: usize) -> f64 {
        (m as f64).powf(self.alpha)
    }
}

/// A statistic: a pure map from a window of observations to a real number,
/// together with its rate metadata.
///
/// Implementations must be deterministic functions of the window contents;
/// everything downstream (bitwise reproducibility across thread counts, the
/// subsampling distribution, the subagging variance) relies on that.
pub trait Statistic: Sync {
    /// Evaluates the statistic on a window.
    fn evaluate(&self, window: Window<'_>) -> Result<f64>;

    /// Rate metadata for this statistic.
    fn rates(&self) -> RateSpec;
}

impl<S: Statistic + ?Sized> Statistic for &S {
    fn evaluate(&self, window: Window<'_>) -> Result<f64> {
        (**self).evaluate(window)
    }

    fn rates(&self) -> RateSpec {
        (**self).rates()
    }
}

/// The root transformation `g` applied to centered subsample statistics when
/// building a subsampling distribution: one-sided roots use the identity,
/// two-sided roots the absolute value. `SupNorm` is the multivariate
/// generalization of the absolute value; on the scalar statistics this crate
/// ships it coincides with `Abs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GFunc {
    Identity,
    Abs,
    SupNorm,
}

impl GFunc {
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            GFunc::Identity => x,
            GFunc::Abs | GFunc::SupNorm => x.abs(),
        }
    }
}
