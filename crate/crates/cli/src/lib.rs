//! Batch front-end: loads a TOML run description, runs the requested checks
//! and writes one CSV and one text table per check plus `summary.json`.

pub mod config;
pub mod registry;
pub mod run;

pub use config::{load_config, parse_config, ConfigError, ConfigFile, RunConfig};
pub use registry::CheckName;
pub use run::{emit_plot_data, run_checks, ExitStatus, RunOptions, RunOutcome};

/// Fallback output directory when neither `--out` nor `output_dir` is given.
pub const OUT_DIR_ENV: &str = "DRHARMONIC_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "drharmonic-out";
