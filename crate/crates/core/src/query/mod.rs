//! The query language and its execution into hub graphs.

mod catalog;
mod dataset;
mod exec;
mod parser;

pub use catalog::{parse, resolve, Grouping, QueryError, QuerySpec, SelectorSpec, SourceSpec, SummarySpec};
pub use dataset::{Dataset, DatasetInfo};
pub use exec::{
    execute, zoom_edge, zoom_subset, ExecError, ExecOptions, ExecStats, GroupRow, HaEdge, HaGraph, HubInfo,
    PhaseTimes, Strategy, SummaryValue, TagMethod, ZoomOverrides,
};
pub use parser::{parse_ast, Call, Literal, Pos, QueryAst, SourceExpr, SummarizerExpr, SyntaxError};
