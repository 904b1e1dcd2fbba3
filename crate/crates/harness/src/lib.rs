//! Seeded, parallel verification of dyadic operator inequalities.
//!
//! A JSON [`ExperimentConfig`] names the checks to run. Every trial draws its
//! inputs from `(seed, trial index)` alone, so reports are identical for any
//! number of worker threads.

pub mod checks;
pub mod config;
pub mod error;
pub mod generate;
pub mod inputs;
pub mod run;
pub mod search;

pub use checks::{evaluate, Outcome, Witness};
pub use config::{Check, ExperimentConfig, OperatorKind, Profile, SymbolKind};
pub use error::{HarnessError, Result};
pub use inputs::{OperatorUnderTest, TrialInputs};
pub use run::{
    reevaluate_witness, run_check, run_experiment, CheckRun, CheckSummary, ExperimentReport,
    TrialReport,
};
pub use search::{estimate_ratio_supremum, SearchResult};
