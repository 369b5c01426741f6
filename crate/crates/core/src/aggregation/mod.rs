//! Per-subgraph summaries: the shared-nothing baseline, the sharing planner
//! and its executor, and structural summaries.

mod elements;
pub mod function;
mod planner;
mod sn;
pub mod structural;

pub use elements::{AggOutcome, ElementTable, OpStats, SubgraphAggregates};
pub use function::{
    AggFunction, AggValue, Buckets, CombineOp, Dimensions, ElementKind, Entry, FunctionError, GroupKey, Partial,
};
pub use planner::{
    build_as_plan, execute_plan, saving, AggPlan, Cluster, PlanError, PlanStep, Source, DEFAULT_THRESHOLD,
};
pub use sn::sn_aggregate;
