//! Experiment harness: configuration, the convergence study, the oracle
//! case suite, the drift comparison and report files.

pub mod cases;
pub mod config;
pub mod convergence;
pub mod drift;
pub mod report;

pub use cases::{run_cases, CaseCheck, CaseReport};
pub use config::{ConfigLayer, ExperimentConfig, Mode};
pub use convergence::{run_convergence, ConvergenceReport, ConvergenceRow, ConvergenceSummary};
pub use drift::{run_drift_comparison, DriftReport};
