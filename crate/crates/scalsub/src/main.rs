//! Command-line front end: `estimate`, `distribution`, `ci`, `tune`, `mc`.
//!
//! Exit codes: 0 success, 2 invalid input or configuration, 3 infeasible
//! tuning, 4 numerical failure.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use scalsub::harness::{ingest_csv, render_table, run_experiment, write_plot_csv, ExperimentConfig};
use scalsub::{
    alpha_warning, beta_bounds, clt_ci, complexity_report, delta_bounds, optimal_beta,
    resolve_scheme, subagg_estimate_with, subagging_rate, subsample_statistics, subsampling_ci,
    two_level_ci, BlockScheme, BuiltinStatistic, CiMethod, CiRecord, Centering, Dependence, Error,
    GFunc, Result, Statistic, SubaggingOptions, SubaggingResult, SubsamplingDistribution,
    TuningParams,
};

#[derive(Parser)]
#[command(
    name = "scalsub",
    version,
    about = "Scalable subsampling: block subsampling distributions, subagging estimates, and rate tuning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Subagging point estimate with variance and optional confidence interval
    Estimate(EstimateArgs),
    /// Subsampling distribution of a statistic over the block scheme
    Distribution(DistributionArgs),
    /// Confidence interval for the full-sample statistic via subsampling
    Ci(CiArgs),
    /// Resolve rate exponents into a concrete block scheme and cost report
    Tune(TuneArgs),
    /// Run a Monte Carlo experiment from a JSON config
    Mc(McArgs),
}

#[derive(clap::Args)]
struct EstimateArgs {
    /// CSV input, one observation per row
    #[arg(long)]
    input: PathBuf,
    /// Skip the first CSV row
    #[arg(long)]
    header: bool,
    /// Statistic, e.g. mean | quantile:p=0.5 | huber | kde:x0=0
    #[arg(long)]
    stat: String,
    /// Block length
    #[arg(long)]
    b: usize,
    /// Offset between consecutive block starts
    #[arg(long)]
    h: usize,
    /// Convergence-rate exponent of the statistic (tau_m = m^alpha)
    #[arg(long)]
    alpha: f64,
    /// Bias-rate exponent, if known
    #[arg(long)]
    gamma: Option<f64>,
    /// Attach a confidence interval
    #[arg(long, value_enum)]
    ci: Option<CiChoice>,
    /// Confidence level for --ci
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Permit h < b (variance and se are then withheld)
    #[arg(long)]
    allow_overlap: bool,
    /// Normalize the block variance by q-1 instead of q
    #[arg(long)]
    unbiased_variance: bool,
}

#[derive(clap::Args)]
struct DistributionArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    header: bool,
    #[arg(long)]
    stat: String,
    #[arg(long)]
    b: usize,
    #[arg(long)]
    h: usize,
    #[arg(long)]
    alpha: f64,
    /// Transform applied to the centered block statistics
    #[arg(long, value_enum, default_value = "identity")]
    g: GChoice,
    /// Also write the distribution JSON to this file
    #[arg(long)]
    export: Option<PathBuf>,
}

#[derive(clap::Args)]
struct CiArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    header: bool,
    /// Interval construction (the full-sample statistic is calibrated by
    /// the subsampling distribution)
    #[arg(long, value_enum)]
    method: CiCommandMethod,
    #[arg(long)]
    stat: String,
    #[arg(long)]
    b: usize,
    #[arg(long)]
    h: usize,
    #[arg(long)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "identity")]
    g: GChoice,
    #[arg(long)]
    level: f64,
}

#[derive(clap::Args)]
struct TuneArgs {
    /// Sample size the scheme is for
    #[arg(long)]
    n: usize,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    gamma: f64,
    /// Block-growth exponent; defaults to the MSE-optimal value
    #[arg(long)]
    beta: Option<f64>,
    /// Offset-growth exponent; defaults to the fastest admissible choice
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    c2: f64,
    #[arg(long, default_value_t = 1.0)]
    c3: f64,
    #[arg(long, value_enum, default_value = "iid")]
    dependence: DependenceChoice,
    /// Cost exponent of the statistic (O(m^zeta) on m points), for the
    /// complexity report
    #[arg(long, default_value_t = 1.0)]
    zeta: f64,
}

#[derive(clap::Args)]
struct McArgs {
    /// Experiment description (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Size of the local worker pool (defaults to all cores)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CiChoice {
    Clt,
    TwoLevel,
}

#[derive(Clone, Copy, ValueEnum)]
enum CiCommandMethod {
    Subsampling,
}

#[derive(Clone, Copy, ValueEnum)]
enum GChoice {
    Identity,
    Abs,
}

impl From<GChoice> for GFunc {
    fn from(g: GChoice) -> GFunc {
        match g {
            GChoice::Identity => GFunc::Identity,
            GChoice::Abs => GFunc::Abs,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DependenceChoice {
    Iid,
    Mixing,
}

impl From<DependenceChoice> for Dependence {
    fn from(d: DependenceChoice) -> Dependence {
        match d {
            DependenceChoice::Iid => Dependence::Iid,
            DependenceChoice::Mixing => Dependence::Mixing,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::Distribution(args) => cmd_distribution(args),
        Command::Ci(args) => cmd_ci(args),
        Command::Tune(args) => cmd_tune(args),
        Command::Mc(args) => cmd_mc(args),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn load_statistic(spec: &str, alpha: f64, gamma: Option<f64>) -> Result<BuiltinStatistic> {
    let mut stat: BuiltinStatistic = spec.parse()?;
    stat = stat.with_alpha(alpha)?;
    if gamma.is_some() {
        stat = stat.with_gamma(gamma)?;
    }
    Ok(stat)
}

fn cmd_estimate(args: EstimateArgs) -> Result<()> {
    let sample = ingest_csv(&args.input, args.header)?;
    let stat = load_statistic(&args.stat, args.alpha, args.gamma)?;
    let scheme = BlockScheme::new(sample.n(), args.b, args.h)?;
    let options = SubaggingOptions {
        allow_overlap: args.allow_overlap,
        unbiased_variance: args.unbiased_variance,
    };
    let mut result = subagg_estimate_with(&sample, &stat, scheme, options)?;
    if let Some(choice) = args.ci {
        let (method, interval) = match choice {
            CiChoice::Clt => (CiMethod::Clt, clt_ci(&result, args.level)?),
            CiChoice::TwoLevel => {
                let tuning = realized_tuning(&result)?;
                (
                    CiMethod::TwoLevel,
                    two_level_ci(&sample, &stat, &tuning, args.level)?,
                )
            }
        };
        result.ci = Some(CiRecord::new(method, args.level, interval));
    }
    println!("{}", serde_json::to_string_pretty(&result)?);
    Ok(())
}

/// Tuning parameters matching the scheme the estimate was computed under,
/// so the two-level interval rescales consistently with the realized b, h.
fn realized_tuning(result: &SubaggingResult) -> Result<TuningParams> {
    if result.scheme.overlaps() {
        return Err(Error::InvalidScheme(
            "the two-level interval needs disjoint blocks (h >= b)".into(),
        ));
    }
    let params = TuningParams {
        alpha: result.alpha,
        gamma: result.gamma,
        beta: result.beta_realized,
        delta: Some(result.delta_realized),
        c2: 1.0,
        c3: 1.0,
        dependence: Dependence::Iid,
    };
    params.validate()?;
    Ok(params)
}

fn cmd_distribution(args: DistributionArgs) -> Result<()> {
    let sample = ingest_csv(&args.input, args.header)?;
    let stat = load_statistic(&args.stat, args.alpha, None)?;
    let scheme = BlockScheme::new(sample.n(), args.b, args.h)?;
    let dist = SubsamplingDistribution::build(
        &sample,
        &stat,
        scheme,
        args.g.into(),
        Centering::FullSample,
    )?;
    let rendered = serde_json::to_string_pretty(&dist.export())?;
    if let Some(path) = &args.export {
        std::fs::write(path, &rendered)?;
    }
    println!("{rendered}");
    Ok(())
}

fn cmd_ci(args: CiArgs) -> Result<()> {
    let CiCommandMethod::Subsampling = args.method;
    let sample = ingest_csv(&args.input, args.header)?;
    let stat = load_statistic(&args.stat, args.alpha, None)?;
    let scheme = BlockScheme::new(sample.n(), args.b, args.h)?;
    let stats = subsample_statistics(&sample, &stat, &scheme)?;
    let theta_hat_n = stat.evaluate(sample.full())?;
    let dist = SubsamplingDistribution::from_subsample_statistics(
        &stats,
        theta_hat_n,
        stat.rates().tau(scheme.b()),
        args.g.into(),
        scheme,
    )?;
    let interval = subsampling_ci(&dist, theta_hat_n, stat.rates().tau(sample.n()), args.level)?;
    let record = json!({
        "method": "subsampling",
        "level": args.level,
        "lower": interval.lower,
        "upper": interval.upper,
        "theta_hat_n": theta_hat_n,
    });
    println!("{}", serde_json::to_string_pretty(&record)?);
    Ok(())
}

fn cmd_tune(args: TuneArgs) -> Result<()> {
    let mut warnings = Vec::new();
    if let Some(w) = alpha_warning(args.alpha) {
        warnings.push(w);
    }
    let beta = match args.beta {
        Some(beta) => beta,
        None => optimal_beta(args.alpha, args.gamma)?,
    };
    let (beta_lo, beta_hi) = beta_bounds(args.alpha, args.gamma)?;
    if !(beta >= beta_lo && beta < beta_hi) {
        warnings.push(format!(
            "beta = {beta} is outside the admissible interval [{beta_lo}, {beta_hi})"
        ));
    }

    // For alpha > 1/2 the delta interval is provably empty; the exponents
    // are still evaluable, so degrade to a warning and run with delta =
    // beta unless the caller chose one.
    let (delta_interval, delta) = match delta_bounds(args.alpha, beta, args.gamma) {
        Ok((lo, hi)) => {
            let delta = args.delta.unwrap_or(lo);
            if !(delta >= lo && delta <= hi) {
                warnings.push(format!(
                    "delta = {delta} is outside the admissible interval [{lo}, {hi}]"
                ));
            }
            (Some((lo, hi)), delta)
        }
        Err(e) if args.alpha > 0.5 => {
            warnings.push(e.to_string());
            (None, args.delta.unwrap_or(beta))
        }
        Err(e) => return Err(e),
    };

    let params = TuningParams {
        alpha: args.alpha,
        gamma: Some(args.gamma),
        beta,
        delta: Some(delta),
        c2: args.c2,
        c3: args.c3,
        dependence: args.dependence.into(),
    };
    params.validate()?;
    let scheme = resolve_scheme(args.n, &params)?;
    let rate = subagging_rate(args.alpha, Some(args.gamma), beta, delta)?;
    let complexity = complexity_report(args.n, scheme.b(), args.zeta)?;

    let output = json!({
        "beta": beta,
        "delta": delta,
        "b": scheme.b(),
        "h": scheme.h(),
        "q": scheme.q(),
        "beta_bounds": [beta_lo, beta_hi],
        "delta_bounds": delta_interval.map(|(lo, hi)| vec![lo, hi]),
        "rate": rate,
        "complexity": complexity,
        "warnings": warnings,
    });
    println!("{}", serde_json::to_string_pretty(&output)?);
    Ok(())
}

fn cmd_mc(args: McArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.config)?;
    let config: ExperimentConfig = serde_json::from_str(&text)?;
    let report = match args.workers {
        None => run_experiment(&config)?,
        Some(0) => {
            return Err(Error::InvalidInput(
                "--workers must be at least 1".into(),
            ))
        }
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::InvalidInput(format!("cannot build worker pool: {e}")))?
            .install(|| run_experiment(&config))?,
    };
    eprint!("{}", render_table(&report));
    if let Some(path) = &config.output_path {
        std::fs::write(path, serde_json::to_string_pretty(&report)?)?;
        write_plot_csv(&report, &path.with_extension("csv"))?;
    }
    println!("{}", serde_json::to_string(&report)?);
    Ok(())
}
