//! Benchmark harness for moment-based entropy and mutual information
//! estimators: distributions with known ground truths, repeated-trial
//! experiments with bootstrap summaries, acceptance checks, and the CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod bootstrap;
pub mod cli;
pub mod distributions;
pub mod error;
pub mod experiment;
pub mod rng;

pub use distributions::{DistributionSpec, ExactMoments, GroundTruth, Kind, Samples, TruthSource};
pub use error::{BenchError, Result};
pub use experiment::{
    run_experiment, scaling_companion, Estimator, ExperimentConfig, ScalingPair, TrialReport,
};
