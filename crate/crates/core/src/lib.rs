//! Quantifies the social-welfare gap between FIFO ("fair") transaction
//! inclusion and welfare-optimal block packing.
//!
//! Block building is a 0-1 knapsack problem: choose which mempool
//! transactions enter a block to maximize total net utility under a gas
//! limit. This crate provides:
//!
//! * [`model`] — problem instances built from mempool transactions;
//! * [`packing`] — four packing procedures: the interval relaxation in
//!   closed form, greedy rounding with an `m/(m-1)` approximation
//!   certificate, exact branch-and-bound, and FIFO prefix packing;
//! * [`bounds`] — analytic bounds certifying when optimal packing beats
//!   the expected FIFO welfare, and Monte Carlo soundness checks;
//! * [`dists`] — light- and heavy-tailed utility distributions with
//!   exact-transform samplers;
//! * [`experiment`] — a deterministic, parallel Monte Carlo harness
//!   sweeping block sizes and emitting CSV records.

pub mod bounds;
pub mod dists;
pub mod experiment;
pub mod model;
pub mod packing;

pub use bounds::{check_gap_soundness, compute_gap_bounds, GapBounds, SoundnessReport};
pub use dists::{sample_gas, UtilityDistribution};
pub use experiment::{
    aggregate, run_sweep, run_trial, trial_instance, write_csv, BlockSummary, ExperimentConfig,
    TrialRecord,
};
pub use model::{build_instance, BlockParams, Packing, PackingKind, ProblemInstance, Transaction};
pub use packing::{
    exact_pack, fifo_pack, greedy_pack, permute, solve_relaxation, ApproxCertificate,
    RelaxationSolution,
};
