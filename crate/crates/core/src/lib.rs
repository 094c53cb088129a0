//! Constraint-programming solver for resource-constrained job scheduling
//! (RCJS) together with a genetic-programming engine that evolves the
//! variable-ordering tie-breaker used by the solver.
//!
//! The crate is organised bottom-up:
//!
//! * [`instance`]: problem data, the canonical text format, a random
//!   generator and schedule evaluation.
//! * [`cp`]: domains, propagation and depth-first branch and bound.
//! * [`selector`]: priority expression trees and job features.
//! * [`gp`]: the evolutionary loop that trains selectors.
//! * [`oracle`], [`construct`], [`experiment`]: brute-force verification,
//!   a single-pass construction baseline and comparison reports.

pub mod construct;
pub mod cp;
pub mod decimal;
pub mod experiment;
pub mod gp;
pub mod instance;
pub mod oracle;
pub mod selector;

pub use cp::{solve, Model, SolveResult, SolveStatus, SolverConfig};
pub use decimal::Decimal;
pub use instance::{GenConfig, Instance, Job, Schedule};
pub use selector::Selector;
