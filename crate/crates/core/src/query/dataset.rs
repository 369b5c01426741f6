use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::graph_store::{AttributedGraph, SccDag};
use crate::hubs::StaticCloseness;
use crate::reachability::{build_tc_index, TcIndex, DEFAULT_TC_CAP};
use crate::view::SubgraphView;

/// A registered graph with the structures every query over it reuses: the
/// whole-graph view, its condensation, the closure index over the
/// condensation (when under the size cap) and, once first asked for, the
/// static closeness ranking.
#[derive(Debug)]
pub struct Dataset {
    name: String,
    whole: Arc<SubgraphView>,
    scc: Arc<SccDag>,
    tc: Option<Arc<TcIndex>>,
    closeness: OnceLock<StaticCloseness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DatasetInfo {
    pub name: String,
    pub vertices: usize,
    pub edges: usize,
    pub components: usize,
    pub indexed: bool,
}

impl Dataset {
    pub fn new(name: impl Into<String>, graph: AttributedGraph) -> Self {
        Self::with_cap(name, graph, DEFAULT_TC_CAP)
    }

    pub fn with_cap(name: impl Into<String>, graph: AttributedGraph, tc_cap: usize) -> Self {
        let whole = Arc::new(SubgraphView::whole(Arc::new(graph)));
        let scc = Arc::new(SccDag::build(whole.topology()));
        let tc = build_tc_index(scc.dag(), tc_cap).ok().map(Arc::new);
        Self {
            name: name.into(),
            whole,
            scc,
            tc,
            closeness: OnceLock::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn graph(&self) -> &Arc<AttributedGraph> {
        self.whole.root()
    }

    pub fn whole(&self) -> &Arc<SubgraphView> {
        &self.whole
    }

    pub fn scc(&self) -> &Arc<SccDag> {
        &self.scc
    }

    pub fn tc_index(&self) -> Option<&Arc<TcIndex>> {
        self.tc.as_ref()
    }

    pub fn static_closeness(&self) -> &StaticCloseness {
        self.closeness.get_or_init(|| StaticCloseness::build(&self.whole))
    }

    pub fn info(&self) -> DatasetInfo {
        DatasetInfo {
            name: self.name.clone(),
            vertices: self.whole.vertex_count(),
            edges: self.whole.edge_count(),
            components: self.scc.component_count(),
            indexed: self.tc.is_some(),
        }
    }
}
