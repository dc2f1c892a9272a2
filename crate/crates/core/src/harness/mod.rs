//! Experiment driver: builds graphs and noise schedules from a config, runs
//! many seeds, and writes the averaged curves.

mod config;
mod csv_io;
mod experiment;
mod fit;
mod svg;

pub use config::{
    BuiltGraph, ExperimentConfig, GraphSpec, InitSpec, PerNode, PhiSpec, Radius, RGG_MAX_ATTEMPTS,
};
pub use csv_io::{emit_csv, read_csv, CSV_HEADER};
pub use experiment::{
    record_times, run_experiment, ExperimentOutcome, Trace, TraceRow, RELATIVE_ERROR_FLOOR,
    THREADS_ENV,
};
pub use fit::{
    fit_baseline_rate, fit_rate, fit_series, fit_series_above, RateFit, DEFAULT_TAIL_FRACTION,
    FIT_FLOOR,
};
pub use svg::{emit_svg, render_svg};

mod cli;
pub use cli::cli_main;
