//! The Monte Carlo experiment driver: replicate, estimate, score coverage,
//! and fit the empirical MSE rate.
//!
//! Reports are byte-reproducible: replication r at grid position i always
//! draws from stream `(i << 32) | r` of the configured seed, results are
//! merged in replication order, and every aggregation uses the crate's
//! fixed pairwise reduction — so the worker count cannot leak into the
//! output (the wall-time field is the one exception, and consumers diffing
//! reports should ignore it).

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::{subsampling_ci, SubsamplingDistribution};
use crate::error::{Error, Result};
use crate::evaluate::subsample_statistics;
use crate::harness::generate::{generate, population_theta, DataModel};
use crate::reduce::pairwise_mean;
use crate::scheme::BlockScheme;
use crate::statistic::{GFunc, Statistic};
use crate::statistics::BuiltinStatistic;
use crate::subagging::{clt_ci, subagg_estimate, two_level_ci, CiMethod};
use crate::tuning::{resolve_scheme, TuningParams};

/// Full description of a Monte Carlo experiment. The JSON schema mirrors
/// the fields exactly; `statistic` is the same `name:key=value` string the
/// CLI takes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub data_model: DataModel,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    #[serde(with = "stat_string")]
    pub statistic: BuiltinStatistic,
    pub tuning: TuningParams,
    pub ci_method: CiMethod,
    pub level: f64,
    pub seed: u64,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
}

mod stat_string {
    use super::BuiltinStatistic;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        stat: &BuiltinStatistic,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&stat.name())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<BuiltinStatistic, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.data_model.validate()?;
        self.tuning.validate()?;
        if self.n_grid.is_empty() {
            return Err(Error::InvalidInput("n_grid must not be empty".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "n_grid must be strictly increasing".into(),
            ));
        }
        if self.replications == 0 {
            return Err(Error::InvalidInput(
                "replications must be at least 1".into(),
            ));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::InvalidInput(format!(
                "confidence level must be in (0, 1), got {}",
                self.level
            )));
        }
        // The tuning exponents drive the block scheme; the statistic's own
        // rate metadata drives the scaling inside the estimates. Letting
        // them disagree silently would make the results meaningless, so a
        // mismatch is a configuration error.
        let rates = self.statistic.rates();
        if self.tuning.alpha != rates.alpha {
            return Err(Error::InvalidInput(format!(
                "tuning.alpha = {} disagrees with the statistic's alpha = {}",
                self.tuning.alpha, rates.alpha
            )));
        }
        if self.tuning.gamma != rates.gamma {
            return Err(Error::InvalidInput(format!(
                "tuning.gamma = {:?} disagrees with the statistic's gamma = {:?}",
                self.tuning.gamma, rates.gamma
            )));
        }
        Ok(())
    }
}

/// Aggregates for one sample size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub n: usize,
    pub b: usize,
    pub h: usize,
    pub q: usize,
    /// Mean of `(estimate - theta)^2` over replications.
    pub empirical_mse: f64,
    /// Mean estimate minus theta.
    pub empirical_bias: f64,
    /// Variance of the estimates around their own mean (1/R normalization,
    /// so `mse = bias^2 + var` up to accumulation order).
    pub empirical_var: f64,
    /// Fraction of intervals containing theta.
    pub coverage: f64,
    pub mean_ci_width: f64,
}

/// OLS slope of `log(mse)` on `log(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub standard_error: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ExperimentRow>,
    /// Present when the grid has at least three sizes and every MSE is
    /// positive (a log-log fit needs both).
    pub mse_slope: Option<SlopeFit>,
    pub seed: u64,
    /// Elapsed seconds; the only field that varies between identical runs.
    pub wall_time_secs: f64,
}

struct RepRecord {
    estimate: f64,
    covered: bool,
    width: f64,
}

/// Runs the configured experiment: for every n in the grid, R replications
/// of generate → resolve scheme → subagging estimate → chosen interval,
/// scored against the analytic population value.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();
    let theta = population_theta(&config.data_model, &config.statistic)?;

    let mut rows = Vec::with_capacity(config.n_grid.len());
    for (n_idx, &n) in config.n_grid.iter().enumerate() {
        let scheme = resolve_scheme(n, &config.tuning)?;
        let reps: Vec<Result<RepRecord>> = (0..config.replications)
            .into_par_iter()
            .map(|rep| {
                one_replication(config, n_idx, n, rep, scheme, theta).map_err(|e| {
                    Error::Replication {
                        n,
                        rep,
                        source: Box::new(e),
                    }
                })
            })
            .collect();
        let reps: Vec<RepRecord> = reps.into_iter().collect::<Result<_>>()?;
        rows.push(aggregate(scheme, &reps, theta));
    }

    let mse_slope = if rows.len() >= 3 && rows.iter().all(|r| r.empirical_mse > 0.0) {
        let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
        let mses: Vec<f64> = rows.iter().map(|r| r.empirical_mse).collect();
        Some(fit_rate_slope(&ns, &mses)?)
    } else {
        None
    };

    Ok(ExperimentReport {
        rows,
        mse_slope,
        seed: config.seed,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

fn one_replication(
    config: &ExperimentConfig,
    n_idx: usize,
    n: usize,
    rep: usize,
    scheme: BlockScheme,
    theta: f64,
) -> Result<RepRecord> {
    let stream = ((n_idx as u64) << 32) | rep as u64;
    let sample = generate(&config.data_model, n, config.seed, stream)?;
    let result = subagg_estimate(&sample, &config.statistic, scheme)?;
    let interval = match config.ci_method {
        CiMethod::Clt => clt_ci(&result, config.level)?,
        CiMethod::Subsampling => {
            let stats = subsample_statistics(&sample, &config.statistic, &scheme)?;
            let theta_hat_n = config.statistic.evaluate(sample.full())?;
            let tau_b = config.statistic.rates().tau(scheme.b());
            let dist = SubsamplingDistribution::from_subsample_statistics(
                &stats,
                theta_hat_n,
                tau_b,
                GFunc::Identity,
                scheme,
            )?;
            let tau_n = config.statistic.rates().tau(n);
            subsampling_ci(&dist, theta_hat_n, tau_n, config.level)?
        }
        CiMethod::TwoLevel => two_level_ci(&sample, &config.statistic, &config.tuning, config.level)?,
    };
    Ok(RepRecord {
        estimate: result.theta_bar,
        covered: interval.contains(theta),
        width: interval.width(),
    })
}

fn aggregate(scheme: BlockScheme, reps: &[RepRecord], theta: f64) -> ExperimentRow {
    let r = reps.len() as f64;
    let estimates: Vec<f64> = reps.iter().map(|x| x.estimate).collect();
    let mean_est = pairwise_mean(&estimates);
    let sq_err: Vec<f64> = estimates.iter().map(|e| (e - theta) * (e - theta)).collect();
    let sq_dev: Vec<f64> = estimates
        .iter()
        .map(|e| (e - mean_est) * (e - mean_est))
        .collect();
    let widths: Vec<f64> = reps.iter().map(|x| x.width).collect();
    ExperimentRow {
        n: scheme.n(),
        b: scheme.b(),
        h: scheme.h(),
        q: scheme.q(),
        empirical_mse: pairwise_mean(&sq_err),
        empirical_bias: mean_est - theta,
        empirical_var: pairwise_mean(&sq_dev),
        coverage: reps.iter().filter(|x| x.covered).count() as f64 / r,
        mean_ci_width: pairwise_mean(&widths),
    }
}

/// Least-squares slope of `log(mse)` against `log(n)`, with its standard
/// error from the residuals. Needs at least three positive points.
pub fn fit_rate_slope(ns: &[f64], mses: &[f64]) -> Result<SlopeFit> {
    if ns.len() != mses.len() {
        return Err(Error::InvalidInput(format!(
            "{} sample sizes but {} mse values",
            ns.len(),
            mses.len()
        )));
    }
    if ns.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "rate fitting needs at least 3 grid points, got {}",
            ns.len()
        )));
    }
    if let Some(&bad) = ns.iter().find(|&&n| !(n > 0.0 && n.is_finite())) {
        return Err(Error::InvalidInput(format!(
            "sample sizes must be positive, got {bad}"
        )));
    }
    if let Some(&bad) = mses.iter().find(|&&m| !(m > 0.0 && m.is_finite())) {
        return Err(Error::InvalidInput(format!(
            "log-log fit needs positive mse values, got {bad}"
        )));
    }
    let xs: Vec<f64> = ns.iter().map(|&n| n.ln()).collect();
    let ys: Vec<f64> = mses.iter().map(|&m| m.ln()).collect();
    let xbar = pairwise_mean(&xs);
    let ybar = pairwise_mean(&ys);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - xbar) * (x - xbar);
        sxy += (x - xbar) * (y - ybar);
    }
    if sxx == 0.0 {
        return Err(Error::InvalidInput(
            "all sample sizes are equal; no slope to fit".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let mut rss = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        let resid = y - intercept - slope * x;
        rss += resid * resid;
    }
    let df = (ns.len() - 2) as f64;
    Ok(SlopeFit {
        slope,
        standard_error: (rss / df / sxx).sqrt(),
    })
}

/// Writes the plottable columns `(n, mse, coverage)` as CSV.
pub fn write_plot_csv(report: &ExperimentReport, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidInput(format!("csv write failed: {other:?}")),
    })?;
    let io_err = |e: csv::Error| -> Error {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::InvalidInput(format!("csv write failed: {other:?}")),
        }
    };
    writer
        .write_record(["n", "mse", "coverage"])
        .map_err(io_err)?;
    for row in &report.rows {
        writer
            .write_record([
                row.n.to_string(),
                row.empirical_mse.to_string(),
                row.coverage.to_string(),
            ])
            .map_err(io_err)?;
    }
    writer.flush()?;
    Ok(())
}

/// Renders the report as an aligned text table for human eyes.
pub fn render_table(report: &ExperimentReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:>9} {:>7} {:>7} {:>6} {:>12} {:>12} {:>12} {:>9} {:>12}\n",
        "n", "b", "h", "q", "mse", "bias", "var", "coverage", "ci_width"
    ));
    for r in &report.rows {
        out.push_str(&format!(
            "{:>9} {:>7} {:>7} {:>6} {:>12.5e} {:>12.5e} {:>12.5e} {:>9.4} {:>12.5e}\n",
            r.n,
            r.b,
            r.h,
            r.q,
            r.empirical_mse,
            r.empirical_bias,
            r.empirical_var,
            r.coverage,
            r.mean_ci_width
        ));
    }
    match &report.mse_slope {
        Some(fit) => out.push_str(&format!(
            "log-log mse slope: {:.4} (se {:.4})\n",
            fit.slope, fit.standard_error
        )),
        None => out.push_str("log-log mse slope: not fitted\n"),
    }
    out.push_str(&format!(
        "seed {}, wall time {:.3}s\n",
        report.seed, report.wall_time_secs
    ));
    out
}
