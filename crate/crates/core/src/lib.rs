//! Exact simulation and fairness analysis for the k-server problem.
//!
//! Everything is computed in exact rational arithmetic: metric distances,
//! optimal offline cost (min-cost flow with a brute-force oracle), online
//! algorithm runs (double coverage, paging policies, Balance, greedy),
//! fairness post-processing (pairwise swap transform, phased random
//! swapping, additive and multiplicative correction wrappers) and the
//! audit metrics that report how evenly cost is spread across servers.

pub mod audit;
pub mod fair;
pub mod instances;
pub mod metric;
pub mod online;
pub mod opt;
pub mod rational;
pub mod schedule;
pub mod wrappers;

pub use metric::{FiniteMetric, MetricSpace, Point, TreeEdge, TreeMetric};
pub use rational::Rat;
pub use schedule::{
    ledger_from_schedule, verify_schedule, Configuration, CostLedger, Instance, MovementRecord,
    Schedule, ScheduleStep, StepTag, Trace, TraceRecord,
};
