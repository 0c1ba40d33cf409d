//! Experiment harness around the `risynth` library: configuration parsing,
//! before/after-optimization comparisons, and CSV/PNG artifact output.
//!
//! Errors split into two kinds that map onto the binary's exit codes:
//! configuration problems (bad document, bad field, bad input file) exit
//! with 1, runtime problems (I/O, optimization failures) with 2.

use thiserror::Error;

pub mod artifacts;
pub mod config;
pub mod experiment;

pub use config::{parse_config, ExperimentConfig};
pub use experiment::{
    efficiency, evaluate_profile, run_experiment, run_sweep, EfficiencyReport, RunOptions,
    RunReport, SweepReport,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl HarnessError {
    pub fn config(e: impl std::fmt::Display) -> Self {
        Self::Config(e.to_string())
    }

    pub fn runtime(e: impl std::fmt::Display) -> Self {
        Self::Runtime(e.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 1,
            Self::Runtime(_) => 2,
        }
    }
}
