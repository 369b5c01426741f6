//! Reachability tags of vertices and edges relative to a hub set, and
//! extraction of the subgraph of interest between two anchors.

mod path;
mod tag;
mod tags;

pub use path::extract_path_subgraph;
pub use tag::{HubBits, PairSet, SubgraphSet, Tag, MAX_HUBS};
pub use tags::{
    compute_tags_bounded, compute_tags_indexed, compute_tags_propagation, edge_tag, BoundedTags, ExtractError,
    HopBound,
};
