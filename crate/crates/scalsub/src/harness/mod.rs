//! Everything around the library proper: deterministic data generation,
//! CSV ingestion, and the Monte Carlo experiment driver that checks
//! coverage and rate claims empirically.

mod experiment;
mod generate;
mod ingest;

pub use experiment::{
    fit_rate_slope, render_table, run_experiment, write_plot_csv, ExperimentConfig,
    ExperimentReport, ExperimentRow, SlopeFit,
};
pub use generate::{generate, population_theta, DataModel};
pub use ingest::ingest_csv;
