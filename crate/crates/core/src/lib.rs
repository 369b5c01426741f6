//! Hub-based exploration of attributed directed graphs.
//!
//! A query picks hub vertices inside a subgraph of interest, tags every
//! vertex and edge with the hub pairs whose induced subgraph contains it, and
//! summarizes each induced subgraph. Summaries are computed either one
//! subgraph at a time or through a plan that shares partial aggregates
//! between subgraphs with overlapping membership.

pub mod aggregation;
pub mod bench;
pub mod extraction;
pub mod generator;
pub mod graph_store;
pub mod hubs;
pub mod query;
pub mod reachability;
pub mod samples;
pub mod view;
