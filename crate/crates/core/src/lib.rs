//! Joint power control and discrete rate adaptation for concurrently
//! transmitting wireless links, and the TDMA scheduling heuristics built on
//! top of it.
//!
//! - [`model`]: rate tables, node requirements, radio parameters, gains.
//! - [`feasibility`]: Perron-Frobenius test and minimum power vectors.
//! - [`allocation`]: longest-transmission-time-first search, brute-force
//!   oracle and continuous-rate baseline.
//! - [`scheduling`]: subframe assignment and concurrency allocation.
//! - [`channel`]: random deployments and channel gains.
//! - [`experiment`]: seeded sweeps and CSV/JSON result files.

pub mod allocation;
pub mod channel;
pub mod experiment;
pub mod feasibility;
mod linalg;
pub mod model;
pub mod scheduling;

pub use allocation::{brute_force_optimal, continuous_optimal, lttf, AllocationError};
pub use feasibility::{check_rate_vector, min_power_vector, FeasibilityReport, Verdict};
pub use model::{validate_instance, AllocationResult, GainMatrix, Instance, NodeSpec, RadioConfig, RateTable};
pub use scheduling::{
    exhaustive_schedule, schedule, Frame, GroupPricer, LinkPricer, RateModel, ScheduleMetrics, Strategy,
};
