//! Exact optimization toolkit for integrated container terminal operations:
//! quay crane assignment and scheduling with interference, yard location
//! assignment for inbound shipments, and yard crane scheduling.
//!
//! The crate is organised around an immutable [`Instance`] and its
//! [`DerivedTables`]. On top of those sit the schedule evaluator and
//! validator, an exhaustive [`oracle`], the branch-and-bound [`solver`], the
//! instance [`generator`], the [`mip`] exporter and the [`bench`] harness.

pub mod bench;
pub mod builder;
pub mod derived;
pub mod error;
pub mod gantt;
pub mod generator;
pub mod instance;
pub mod mip;
pub mod oracle;
pub mod schedule;
pub mod solution;
pub mod solver;
pub mod validate;

pub use derived::{build_derived, DerivedTables, InterferenceTuple};
pub use error::{Error, Result};
pub use instance::{Direction, Instance, Shipment, Time};
pub use schedule::{compute_schedule, objective_of};
pub use solution::{Decisions, First, InterferenceKey, Solution, Status};

pub use validate::{validate, Constraint, Violation};
