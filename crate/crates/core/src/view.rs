//! Subgraph views over a shared root graph.

use std::sync::Arc;

use serde::Serialize;

use crate::graph_store::{AttributedGraph, Digraph, Edge, Vertex, Vid};

/// How a view was derived.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViewOrigin {
    Whole,
    /// Vertices and edges on paths of at most `hops` from `a` to `b`.
    PathBetween { a: Vid, b: Vid, hops: u32 },
    /// The induced subgraph of one hub pair.
    HubPair { x: Vid, y: Vid },
    /// Union of the induced subgraphs among a hub subset.
    HubSubset { hubs: Vec<Vid> },
    Custom,
}

/// A subgraph of a root [`AttributedGraph`], with its own local vertex and
/// edge numbering. Local ids follow root order, so local vertex order is vid
/// order. A view of a view is again a view of the root.
#[derive(Debug, Clone)]
pub struct SubgraphView {
    root: Arc<AttributedGraph>,
    vertices: Vec<u32>,
    edges: Vec<u32>,
    topology: Digraph,
    origin: ViewOrigin,
}

impl SubgraphView {
    pub fn whole(root: Arc<AttributedGraph>) -> Self {
        let vertices = (0..root.vertex_count() as u32).collect();
        let edges = (0..root.edge_count() as u32).collect();
        let topology = root.topology().clone();
        Self {
            root,
            vertices,
            edges,
            topology,
            origin: ViewOrigin::Whole,
        }
    }

    /// Builds a view from root vertex and edge indices. Edges whose endpoints
    /// are not both retained are dropped.
    pub fn from_root_indices(
        root: Arc<AttributedGraph>,
        mut vertices: Vec<u32>,
        mut edges: Vec<u32>,
        origin: ViewOrigin,
    ) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        edges.sort_unstable();
        edges.dedup();
        let local = |r: u32| vertices.binary_search(&r).ok().map(|i| i as u32);
        let mut kept = Vec::with_capacity(edges.len());
        let mut arcs = Vec::with_capacity(edges.len());
        for e in edges {
            let edge = root.edge(e);
            if let (Some(s), Some(t)) = (local(edge.src), local(edge.tgt)) {
                kept.push(e);
                arcs.push((s, t));
            }
        }
        let topology = Digraph::new(vertices.len(), arcs);
        Self {
            root,
            vertices,
            edges: kept,
            topology,
            origin,
        }
    }

    /// Keeps the local vertices and local edges selected by the predicates.
    pub fn restrict(
        &self,
        keep_vertex: impl Fn(u32) -> bool,
        keep_edge: impl Fn(u32) -> bool,
        origin: ViewOrigin,
    ) -> Self {
        let vertices = (0..self.vertex_count() as u32)
            .filter(|&v| keep_vertex(v))
            .map(|v| self.vertices[v as usize])
            .collect();
        let edges = (0..self.edge_count() as u32)
            .filter(|&e| keep_edge(e))
            .map(|e| self.edges[e as usize])
            .collect();
        Self::from_root_indices(self.root.clone(), vertices, edges, origin)
    }

    /// Union of views over the same root.
    pub fn union<'a>(views: impl IntoIterator<Item = &'a SubgraphView>, origin: ViewOrigin) -> Option<Self> {
        let mut root: Option<Arc<AttributedGraph>> = None;
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        for v in views {
            if let Some(r) = &root {
                assert!(Arc::ptr_eq(r, &v.root), "views over different roots");
            } else {
                root = Some(v.root.clone());
            }
            vertices.extend_from_slice(&v.vertices);
            edges.extend_from_slice(&v.edges);
        }
        root.map(|r| Self::from_root_indices(r, vertices, edges, origin))
    }

    pub fn root(&self) -> &Arc<AttributedGraph> {
        &self.root
    }

    pub fn origin(&self) -> &ViewOrigin {
        &self.origin
    }

    pub fn topology(&self) -> &Digraph {
        &self.topology
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_whole(&self) -> bool {
        self.vertices.len() == self.root.vertex_count() && self.edges.len() == self.root.edge_count()
    }

    pub fn root_vertex(&self, local: u32) -> u32 {
        self.vertices[local as usize]
    }

    pub fn root_edge(&self, local: u32) -> u32 {
        self.edges[local as usize]
    }

    pub fn root_vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn root_edges(&self) -> &[u32] {
        &self.edges
    }

    pub fn vertex(&self, local: u32) -> &Vertex {
        self.root.vertex(self.vertices[local as usize])
    }

    pub fn edge(&self, local: u32) -> &Edge {
        self.root.edge(self.edges[local as usize])
    }

    pub fn vid(&self, local: u32) -> Vid {
        self.vertex(local).vid
    }

    pub fn local_of_root(&self, root_idx: u32) -> Option<u32> {
        if self.vertices.len() == self.root.vertex_count() {
            return ((root_idx as usize) < self.vertices.len()).then_some(root_idx);
        }
        self.vertices.binary_search(&root_idx).ok().map(|i| i as u32)
    }

    pub fn local_of_vid(&self, vid: Vid) -> Option<u32> {
        self.root.index_of(vid).and_then(|r| self.local_of_root(r))
    }

    pub fn contains_vid(&self, vid: Vid) -> bool {
        self.local_of_vid(vid).is_some()
    }

    /// Resolves a vertex reference: a decimal vid, or a vertex label.
    pub fn resolve(&self, reference: &str) -> Option<u32> {
        if let Ok(vid) = reference.parse::<Vid>() {
            if let Some(v) = self.local_of_vid(vid) {
                return Some(v);
            }
        }
        (0..self.vertex_count() as u32).find(|&v| self.vertex(v).label.as_deref() == Some(reference))
    }

    /// Total degree (in + out) of a local vertex inside the view.
    pub fn degree(&self, local: u32) -> usize {
        self.topology.in_degree(local) + self.topology.out_degree(local)
    }
}
