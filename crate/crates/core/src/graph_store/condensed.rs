use std::sync::Arc;

use super::SccDag;
use crate::aggregation::function::{push_edge_entries, push_vertex_entries, AggFunction, Entry, Partial};
use crate::view::SubgraphView;

/// The SCC condensation of a view, with each super-vertex carrying the
/// pre-aggregated vertex entries of its members and the pre-aggregated edge
/// entries of the edges inside it.
///
/// All members of a component fall into exactly the same induced subgraphs,
/// and so do the edges between them, so both bundles can be delivered as one
/// value wherever the super-vertex goes.
#[derive(Debug, Clone)]
pub struct CondensedGraph {
    scc: Arc<SccDag>,
    vertex_pre: Vec<Vec<Entry>>,
    intra_pre: Vec<Vec<Entry>>,
}

/// Condenses `view` and pre-aggregates `fns` over every component.
pub fn condense_scc(view: &SubgraphView, fns: &[AggFunction]) -> CondensedGraph {
    CondensedGraph::with_scc(view, Arc::new(SccDag::build(view.topology())), fns)
}

impl CondensedGraph {
    /// Pre-aggregates over an existing condensation of `view`.
    pub fn with_scc(view: &SubgraphView, scc: Arc<SccDag>, fns: &[AggFunction]) -> Self {
        let count = scc.component_count();
        let mut vertex_pre = Vec::with_capacity(count);
        let mut intra_pre = Vec::with_capacity(count);
        let mut scratch = Vec::new();
        for c in 0..count as u32 {
            scratch.clear();
            for &v in scc.members(c) {
                push_vertex_entries(fns, view.vertex(v), &mut scratch);
            }
            vertex_pre.push(fold(&scratch, scc.members(c).len() > 1));

            scratch.clear();
            for &e in scc.intra_edges(c) {
                let edge = view.edge(e);
                let src_grp = view.root().vertex(edge.src).grp;
                push_edge_entries(fns, src_grp, edge, &mut scratch);
            }
            intra_pre.push(fold(&scratch, true));
        }
        Self {
            scc,
            vertex_pre,
            intra_pre,
        }
    }

    pub fn scc(&self) -> &Arc<SccDag> {
        &self.scc
    }

    pub fn component_count(&self) -> usize {
        self.scc.component_count()
    }

    /// Pre-aggregated vertex entries of component `c`, sorted by (function, key).
    pub fn vertex_pre(&self, c: u32) -> &[Entry] {
        &self.vertex_pre[c as usize]
    }

    /// Pre-aggregated entries of the edges inside component `c`.
    pub fn intra_edge_pre(&self, c: u32) -> &[Entry] {
        &self.intra_pre[c as usize]
    }
}

fn fold(entries: &[Entry], merge: bool) -> Vec<Entry> {
    if !merge {
        return entries.to_vec();
    }
    Partial::from_entries(entries).to_entries()
}
