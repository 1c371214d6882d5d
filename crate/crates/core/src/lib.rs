//! Minimum-weight cycle covers whose cycle lengths are restricted to a set `L`.
//!
//! The crate is organised bottom-up:
//!
//! * [`lset`]: cycle-length sets, their gcd, Frobenius threshold and closure
//!   under addition, plus the finite-core and decomposition constructions.
//! * [`graph`]: complete weighted graphs, metric checks, covers and forests.
//! * [`gw_forest`]: the primal-dual constrained forest algorithm for the
//!   "component size divisible by g" constraint.
//! * [`apx`]: the undirected and directed approximation pipelines and the
//!   cycle refinement procedures.
//! * [`oracles`]: exact brute-force solvers for small instances.
//! * [`instances`]: hard-instance families and random metric generators.

pub mod apx;
pub mod graph;
pub mod gw_forest;
pub mod instances;
pub mod lset;
pub mod oracles;
mod radix_queue;
mod union_find;

pub use apx::{apx_dir, apx_undir, refine_max, refine_min, ApxError, PhaseRecord, PhaseTrace};
pub use instances::{InstanceError, InstanceMeta, InstanceSpec};
pub use graph::{CoverKind, CycleCover, Forest, GraphError, GraphKind, MetricGraph};
pub use gw_forest::{gw_run, GwError, GwOutcome};
pub use lset::{finite_core, s_core, LSetError, LSpec, LengthMode, SCore};
pub use oracles::{exact_cover, exact_feasible_forest, Feasibility, LengthRule, Objective, OracleConfig, OracleError, OracleResult};
