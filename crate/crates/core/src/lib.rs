//! Classification benchmarking toolkit built around double discriminant
//! scoring.
//!
//! The crate ingests a binary-outcome tabular dataset (the CHD study schema
//! with seven numeric variables), splits it under four training/testing
//! scenarios, and compares eight classification algorithms with a paired
//! Monte-Carlo design: gradient boosting, an RBF support vector machine,
//! random forest and logistic classifiers driven by the
//! prevalence-equilibrium cutoff, linear and quadratic Gaussian
//! discriminants, and their double-scoring combinations (DDS1 = LD or QD,
//! DDS2 = LD and QD). On top of the harness sit the classifier-cutoff sweep
//! with its equilibrium estimate and the variable-hierarchy searches
//! (exhaustive and Bellman-pruned greedy).

pub mod baselines;
pub mod cli;
pub mod cutoff;
pub mod dataset;
pub mod discriminant;
pub mod error;
pub mod harness;
pub mod hierarchy;
pub mod metrics;
pub mod numcore;
pub mod regressors;
pub mod rng;
pub mod splitter;
pub mod synth;

pub use error::{Error, Result};
