//! Numerics for N-node rings with local join-the-shortest-queue routing.
//!
//! * [`ring_sim`] simulates the ring itself.
//! * [`density_process`] is the proportion-process CTMC over supernode counts.
//! * [`meanfield_ode`] integrates its mean-field limit on a truncated box.
//! * [`jsq_reference`] solves the JSQ(k+1) reference queue exactly.
//! * [`lab`] ties them together into experiments and reports.

pub mod ctmc;
pub mod density_process;
pub mod error;
pub mod jsq_reference;
pub mod lab;
pub mod meanfield_ode;
pub mod ring_sim;
pub mod rng;
pub mod state_space;
pub mod stats;

pub use error::{Error, Result};
pub use state_space::{ProportionVector, SuperNodeVector};

/// Version string embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
