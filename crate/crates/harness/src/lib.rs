//! Experiment orchestration for the `tfactor` library: configuration,
//! threshold sweeps, end-to-end robustness runs, bound calculators and
//! deterministic JSONL/CSV output.

pub mod bounds;
pub mod cli;
pub mod config;
pub mod output;
pub mod robustness;
pub mod stats;
pub mod sweep;
