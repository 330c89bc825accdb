//! Monte-Carlo experiments, configuration and result files for the `fama` tool.
//!
//! [`experiment`] runs seeded sweeps of the receivers in `fama_core` and
//! aggregates per-trial spectral efficiencies; [`config`] maps TOML files onto
//! experiment specs; [`output`] renders CSV, plot data and run manifests;
//! [`verify`] is the quick oracle suite; [`cli`] ties it together.

pub mod cli;
pub mod config;
pub mod experiment;
pub mod output;
pub mod verify;

pub use config::{Axis, Config, ConfigError};
pub use experiment::{
    compare_strategies, run_experiment, run_experiment_with_workers, CellStats, ExperimentSpec, HarnessError,
    PairwiseDifference, PointComparison, Sweep, SweepResult, TargetUser,
};
