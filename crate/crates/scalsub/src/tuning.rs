//! The rate calculus: which block growth `b ~ c2 * n^beta` and offset
//! growth `h ~ c3 * n^delta` are admissible, which are optimal, and what
//! they cost.
//!
//! The subagging estimator's MSE splits into a squared-bias term of order
//! `n^{-2 beta gamma}` and a variance term of order
//! `n^{-(1 - delta + 2 alpha beta)}`. Balancing the two gives the optimal
//! block-growth exponent `beta* = 1/(1 + 2(gamma - alpha))`; the offset
//! exponent is then best taken at its allowed minimum (`h = b`, i.e.
//! `delta = beta`), which wastes no data. Everything in this module is
//! pure arithmetic on exponents plus the final rounding into a concrete
//! [`BlockScheme`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scheme::BlockScheme;

/// Dependence structure assumed of the data.
///
/// With mixing (short-range dependent) data, adjacent disjoint blocks are
/// still correlated; inserting a gap of `floor(sqrt(b))` observations
/// between consecutive blocks restores the independence approximation the
/// variance estimator relies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dependence {
    #[default]
    Iid,
    Mixing,
}

fn default_scale() -> f64 {
    1.0
}

/// Exponents and scale constants describing how blocks grow with n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TuningParams {
    /// Convergence-rate exponent of the statistic (`tau_n = n^alpha`).
    pub alpha: f64,
    /// Bias-rate exponent (`E theta_hat - theta ~ C n^{-gamma}`), if known.
    #[serde(default)]
    pub gamma: Option<f64>,
    /// Block-growth exponent: `b ~ c2 * n^beta`, `0 < beta < 1`.
    pub beta: f64,
    /// Offset-growth exponent: `h ~ c3 * n^delta`, `beta <= delta < 1`.
    /// `None` means `delta = beta` (contiguous disjoint blocks).
    #[serde(default)]
    pub delta: Option<f64>,
    /// Scale constant for the block length (default 1).
    #[serde(default = "default_scale")]
    pub c2: f64,
    /// Scale constant for the offset (default 1).
    #[serde(default = "default_scale")]
    pub c3: f64,
    #[serde(default)]
    pub dependence: Dependence,
}

impl TuningParams {
    /// Tuning with `delta = beta`, unit scale constants, and iid data.
    pub fn new(alpha: f64, gamma: Option<f64>, beta: f64) -> Result<Self> {
        let params = TuningParams {
            alpha,
            gamma,
            beta,
            delta: None,
            c2: 1.0,
            c3: 1.0,
            dependence: Dependence::Iid,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        self.delta = Some(delta);
        self.validate()?;
        Ok(self)
    }

    pub fn with_scale_constants(mut self, c2: f64, c3: f64) -> Result<Self> {
        self.c2 = c2;
        self.c3 = c3;
        self.validate()?;
        Ok(self)
    }

    pub fn with_dependence(mut self, dependence: Dependence) -> Self {
        self.dependence = dependence;
        self
    }

    /// The offset exponent actually in force (`delta`, defaulting to `beta`).
    pub fn effective_delta(&self) -> f64 {
        self.delta.unwrap_or(self.beta)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "rate exponent alpha must be positive and finite, got {}",
                self.alpha
            )));
        }
        if let Some(gamma) = self.gamma {
            if !(gamma > self.alpha && gamma.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "bias exponent gamma must be finite and exceed alpha = {}, got {gamma}",
                    self.alpha
                )));
            }
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidInput(format!(
                "block-growth exponent beta must lie in (0, 1), got {}",
                self.beta
            )));
        }
        if let Some(delta) = self.delta {
            if !(delta >= self.beta && delta < 1.0) {
                return Err(Error::InvalidInput(format!(
                    "offset exponent delta must lie in [beta, 1) = [{}, 1), got {delta}",
                    self.beta
                )));
            }
        }
        for (name, c) in [("c2", self.c2), ("c3", self.c3)] {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "scale constant {name} must be positive and finite, got {c}"
                )));
            }
        }
        Ok(())
    }
}

/// The MSE-optimal block-growth exponent `1/(1 + 2(gamma - alpha))`,
/// obtained by balancing the squared-bias and variance exponents at
/// `delta = beta`.
///
/// Requires `gamma > alpha > 0`. The optimality argument additionally
/// assumes `alpha <= 1/2`; see [`alpha_warning`] for the advisory when it
/// does not hold (the value is still returned).
pub fn optimal_beta(alpha: f64, gamma: f64) -> Result<f64> {
    check_exponent_pair(alpha, gamma)?;
    Ok(1.0 / (1.0 + 2.0 * (gamma - alpha)))
}

/// Advisory for `alpha > 1/2`: the optimality analysis behind
/// [`optimal_beta`] and [`delta_bounds`] assumes `alpha <= 1/2`, so the
/// formulas still evaluate but their guarantees are not established.
pub fn alpha_warning(alpha: f64) -> Option<String> {
    (alpha > 0.5).then(|| {
        format!(
            "alpha = {alpha} exceeds 1/2; the rate-optimality analysis assumes alpha <= 1/2, \
             so tuned exponents are advisory only"
        )
    })
}

/// Admissible block-growth exponents `[lower, upper)`: the half-open
/// interval `[1/(1 + 2(gamma - alpha)), 1/(2(gamma - alpha)))`, capped at
/// 1 because `beta <= delta < 1`.
///
/// Below the lower endpoint the aggregated bias dominates the limit law;
/// at and above the upper endpoint the variance term no longer vanishes
/// relative to the full-sample rate.
pub fn beta_bounds(alpha: f64, gamma: f64) -> Result<(f64, f64)> {
    check_exponent_pair(alpha, gamma)?;
    let x = gamma - alpha;
    Ok((1.0 / (1.0 + 2.0 * x), (1.0 / (2.0 * x)).min(1.0)))
}

/// Admissible offset exponents for a given `beta`: the closed interval
/// `[max(beta, 1 - 2 beta (gamma - alpha)), 1 + 2 alpha (beta - 1)]`.
///
/// The lower endpoint keeps the variance term no worse than the squared
/// bias; the upper endpoint keeps `theta_bar` at least as fast as the
/// full-sample estimator. At `beta = optimal_beta` the interval's lower
/// endpoint equals `beta` itself. An empty intersection is reported as
/// infeasible, naming the violated bound.
pub fn delta_bounds(alpha: f64, beta: f64, gamma: f64) -> Result<(f64, f64)> {
    check_exponent_pair(alpha, gamma)?;
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidInput(format!(
            "block-growth exponent beta must lie in (0, 1), got {beta}"
        )));
    }
    let bias_floor = 1.0 - 2.0 * beta * (gamma - alpha);
    let upper = 1.0 + 2.0 * alpha * (beta - 1.0);
    let lower = beta.max(bias_floor);
    if lower > upper {
        let detail = if bias_floor > upper {
            format!(
                "bias bound 1 - 2*beta*(gamma - alpha) = {bias_floor} exceeds variance bound \
                 1 + 2*alpha*(beta - 1) = {upper}; beta = {beta} is below alpha/gamma = {}",
                alpha / gamma
            )
        } else {
            format!(
                "beta = {beta} exceeds the variance bound 1 + 2*alpha*(beta - 1) = {upper}, \
                 which happens only for alpha = {alpha} > 1/2"
            )
        };
        return Err(Error::InfeasibleTuning(format!(
            "no admissible offset exponent delta: {detail}"
        )));
    }
    Ok((lower, upper))
}

fn check_exponent_pair(alpha: f64, gamma: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "rate exponent alpha must be positive and finite, got {alpha}"
        )));
    }
    if !(gamma > alpha && gamma.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "bias exponent gamma must be finite and exceed alpha = {alpha}, got {gamma}"
        )));
    }
    Ok(())
}

/// Turns exponents into a concrete block scheme for a sample of size n.
///
/// `b = clamp(round(c2 * n^beta), 2, n)`. The offset is `b` itself for iid
/// data with `delta = beta`; `b + floor(sqrt(b))` for mixing data (the gap
/// restores across-block independence); otherwise
/// `clamp(round(c3 * n^delta), b, n)`. Fails if fewer than two blocks fit.
pub fn resolve_scheme(n: usize, params: &TuningParams) -> Result<BlockScheme> {
    params.validate()?;
    if n == 0 {
        return Err(Error::InvalidInput(
            "sample size must be at least 1".into(),
        ));
    }
    let nf = n as f64;
    let b = ((params.c2 * nf.powf(params.beta)).round() as usize).clamp(2.min(n), n);
    let delta = params.effective_delta();
    let h = match params.dependence {
        Dependence::Mixing => b + (b as f64).sqrt().floor() as usize,
        Dependence::Iid => {
            if delta == params.beta {
                b
            } else {
                ((params.c3 * nf.powf(delta)).round() as usize).clamp(b, n)
            }
        }
    };
    let scheme = BlockScheme::new(n, b, h)?;
    if scheme.q() < 2 {
        return Err(Error::InfeasibleTuning(format!(
            "resolved scheme n = {n}, b = {b}, h = {h} fits only q = {} block(s); \
             need at least 2 — reduce beta or the scale constants",
            scheme.q()
        )));
    }
    Ok(scheme)
}

/// Asymptotic-rate report for the subagging estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateReport {
    /// Exponent of the variance term: `1 - delta + 2 alpha beta`.
    pub variance_exponent: f64,
    /// Exponent of the squared-bias term: `2 beta gamma`. Absent when the
    /// statistic declares no bias exponent (treated as exactly unbiased).
    pub bias_sq_exponent: Option<f64>,
    /// `MSE = Theta(n^{-mse_exponent})`: the smaller of the two exponents.
    pub mse_exponent: f64,
    /// `theta_bar` converges at rate `n^{convergence_rate_exponent}`.
    pub convergence_rate_exponent: f64,
}

/// Computes the MSE decomposition exponents for given tuning exponents.
pub fn subagging_rate(
    alpha: f64,
    gamma: Option<f64>,
    beta: f64,
    delta: f64,
) -> Result<RateReport> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "rate exponent alpha must be positive and finite, got {alpha}"
        )));
    }
    if let Some(g) = gamma {
        if !(g > alpha && g.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "bias exponent gamma must be finite and exceed alpha = {alpha}, got {g}"
            )));
        }
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidInput(format!(
            "block-growth exponent beta must lie in (0, 1), got {beta}"
        )));
    }
    if !(delta >= beta && delta < 1.0) {
        return Err(Error::InvalidInput(format!(
            "offset exponent delta must lie in [beta, 1) = [{beta}, 1), got {delta}"
        )));
    }
    let variance_exponent = 1.0 - delta + 2.0 * alpha * beta;
    let bias_sq_exponent = gamma.map(|g| 2.0 * beta * g);
    let mse_exponent = match bias_sq_exponent {
        Some(bias) => variance_exponent.min(bias),
        None => variance_exponent,
    };
    Ok(RateReport {
        variance_exponent,
        bias_sq_exponent,
        mse_exponent,
        convergence_rate_exponent: mse_exponent / 2.0,
    })
}

/// Operation-count comparison for a statistic costing `O(m^zeta)` on m
/// points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexityReport {
    /// Full-sample evaluation: `n^zeta`.
    pub full_cost: f64,
    /// All q ≈ n/b blocks: `n * b^{zeta - 1}`.
    pub subagg_cost: f64,
    /// Subsampling distribution: blocks plus the full-sample centering
    /// evaluation.
    pub distribution_cost: f64,
    /// `full_cost / subagg_cost`.
    pub savings_ratio: f64,
}

impl std::fmt::Display for ComplexityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "full {:.3e} ops, subagging {:.3e} ops ({:.1}x savings), distribution {:.3e} ops",
            self.full_cost, self.subagg_cost, self.savings_ratio, self.distribution_cost
        )
    }
}

/// Cost report for block length b on a sample of size n.
pub fn complexity_report(n: usize, b: usize, zeta: f64) -> Result<ComplexityReport> {
    if !(zeta > 0.0 && zeta.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "cost exponent zeta must be positive and finite, got {zeta}"
        )));
    }
    if n == 0 || b == 0 || b > n {
        return Err(Error::InvalidInput(format!(
            "need 1 <= b <= n for a cost report, got n = {n}, b = {b}"
        )));
    }
    let nf = n as f64;
    let bf = b as f64;
    let full_cost = nf.powf(zeta);
    let subagg_cost = nf * bf.powf(zeta - 1.0);
    Ok(ComplexityReport {
        full_cost,
        subagg_cost,
        distribution_cost: full_cost + subagg_cost,
        savings_ratio: full_cost / subagg_cost,
    })
}
