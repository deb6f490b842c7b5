//! Deterministic synthetic data and the analytic estimand each model/
//! statistic pair targets.
//!
//! Reproducibility contract: a sample is a pure function of
//! `(model, n, seed, stream)`. Each replication of an experiment gets its
//! own stream of a counter-based generator, so replications can run in any
//! order, on any number of threads, and still produce identical bytes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{normal_pdf, normal_quantile, student_t_pdf};
use crate::sample::Sample;
use crate::statistics::{BuiltinStatistic, StatKind};

/// Synthetic data model for Monte Carlo experiments.
///
/// The first three are iid; `ar1` is the stationary Gaussian AR(1) process
/// `X_t = phi * X_{t-1} + e_t` with unit innovations, the stock example of
/// exponentially mixing dependence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataModel {
    Normal { mu: f64, sigma: f64 },
    Exponential { rate: f64 },
    StudentT { nu: f64 },
    Ar1 { phi: f64 },
}

impl DataModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DataModel::Normal { mu, sigma } => {
                if !mu.is_finite() || !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::InvalidInput(format!(
                        "normal model needs finite mu and sigma > 0, got mu = {mu}, sigma = {sigma}"
                    )));
                }
            }
            DataModel::Exponential { rate } => {
                if !(rate > 0.0 && rate.is_finite()) {
                    return Err(Error::InvalidInput(format!(
                        "exponential model needs rate > 0, got {rate}"
                    )));
                }
            }
            DataModel::StudentT { nu } => {
                if !(nu > 0.0 && nu.is_finite()) {
                    return Err(Error::InvalidInput(format!(
                        "student_t model needs nu > 0, got {nu}"
                    )));
                }
            }
            DataModel::Ar1 { phi } => {
                if !(phi.abs() < 1.0) {
                    return Err(Error::InvalidInput(format!(
                        "ar1 model needs |phi| < 1 for stationarity (and mixing), got {phi}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Variance of one marginal observation (used for the AR(1) quantile
    /// and density targets).
    fn ar1_marginal_var(phi: f64) -> f64 {
        1.0 / (1.0 - phi * phi)
    }
}

/// Draws a univariate sample of size n. Pure in `(model, n, seed, stream)`.
pub fn generate(model: &DataModel, n: usize, seed: u64, stream: u64) -> Result<Sample> {
    model.validate()?;
    if n == 0 {
        return Err(Error::InvalidInput("cannot generate an empty sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let data: Vec<f64> = match *model {
        DataModel::Normal { mu, sigma } => {
            let dist = Normal::new(mu, sigma)
                .map_err(|e| Error::InvalidInput(format!("normal model: {e}")))?;
            (0..n).map(|_| dist.sample(&mut rng)).collect()
        }
        DataModel::Exponential { rate } => {
            let dist = Exp::new(rate)
                .map_err(|e| Error::InvalidInput(format!("exponential model: {e}")))?;
            (0..n).map(|_| dist.sample(&mut rng)).collect()
        }
        DataModel::StudentT { nu } => {
            let dist = StudentT::new(nu)
                .map_err(|e| Error::InvalidInput(format!("student_t model: {e}")))?;
            (0..n).map(|_| dist.sample(&mut rng)).collect()
        }
        DataModel::Ar1 { phi } => {
            // Start in the stationary law so every index has the same
            // marginal distribution; no burn-in needed.
            let mut data = Vec::with_capacity(n);
            let z0: f64 = rng.sample(StandardNormal);
            let mut x = z0 * DataModel::ar1_marginal_var(phi).sqrt();
            data.push(x);
            for _ in 1..n {
                let e: f64 = rng.sample(StandardNormal);
                x = phi * x + e;
                data.push(x);
            }
            data
        }
    };
    Sample::univariate(data)
}

/// The population value the statistic estimates under the model, where a
/// closed form exists; anything else is refused rather than approximated.
pub fn population_theta(model: &DataModel, stat: &BuiltinStatistic) -> Result<f64> {
    model.validate()?;
    let unsupported = |what: &str| {
        Err(Error::InvalidInput(format!(
            "no analytic population value for {what}; coverage cannot be scored"
        )))
    };
    match stat.kind() {
        StatKind::Mean => match *model {
            DataModel::Normal { mu, .. } => Ok(mu),
            DataModel::Exponential { rate } => Ok(1.0 / rate),
            DataModel::StudentT { nu } => {
                if nu > 1.0 {
                    Ok(0.0)
                } else {
                    unsupported(&format!("the mean of student_t with nu = {nu} <= 1"))
                }
            }
            DataModel::Ar1 { .. } => Ok(0.0),
        },
        StatKind::Quantile { p } => match *model {
            DataModel::Normal { mu, sigma } => Ok(mu + sigma * normal_quantile(*p)?),
            DataModel::Exponential { rate } => {
                if *p >= 1.0 {
                    return unsupported("the p = 1 quantile of an unbounded model");
                }
                Ok(-(1.0 - p).ln() / rate)
            }
            DataModel::Ar1 { phi } => {
                Ok(DataModel::ar1_marginal_var(phi).sqrt() * normal_quantile(*p)?)
            }
            DataModel::StudentT { .. } => {
                if (*p - 0.5).abs() < 1e-15 {
                    Ok(0.0) // symmetric about zero
                } else {
                    unsupported("non-median quantiles of student_t")
                }
            }
        },
        StatKind::Huber { .. } => match *model {
            // For symmetric models every M-estimator of location with an
            // odd score targets the center of symmetry.
            DataModel::Normal { mu, .. } => Ok(mu),
            DataModel::StudentT { nu } => {
                if nu > 1.0 {
                    Ok(0.0)
                } else {
                    // Huber is still consistent for the symmetry center,
                    // nu <= 1 included; the mean just stops existing.
                    Ok(0.0)
                }
            }
            DataModel::Ar1 { .. } => Ok(0.0),
            DataModel::Exponential { .. } => {
                unsupported("the Huber location of an asymmetric model")
            }
        },
        StatKind::KernelDensityAt { x0, .. } => match *model {
            DataModel::Normal { mu, sigma } => Ok(normal_pdf((x0 - mu) / sigma) / sigma),
            DataModel::Exponential { rate } => {
                if *x0 < 0.0 {
                    Ok(0.0)
                } else {
                    Ok(rate * (-rate * x0).exp())
                }
            }
            DataModel::StudentT { nu } => Ok(student_t_pdf(*x0, nu)),
            DataModel::Ar1 { phi } => {
                let sd = DataModel::ar1_marginal_var(phi).sqrt();
                Ok(normal_pdf(x0 / sd) / sd)
            }
        },
    }
}
