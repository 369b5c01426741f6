//! Attributed directed graphs: in-memory tables, delimited-file IO and
//! strongly-connected-component condensation.

mod condensed;
mod digraph;
mod io;
mod scc;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use condensed::{condense_scc, CondensedGraph};
pub use digraph::{Adjacency, Digraph, Direction};
pub use io::{load_graph, read_graph, write_graph, GraphFiles, DEFAULT_DELIMITER};
pub use scc::{topological_order, SccDag};

/// Original vertex identifier as it appears in the vertex table.
pub type Vid = u64;
/// Group-by value of a vertex or edge.
pub type Group = u32;
/// Measure value of a vertex or edge.
pub type Measure = i64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub vid: Vid,
    pub grp: Group,
    pub mr: Measure,
    pub label: Option<String>,
}

impl Vertex {
    pub fn new(vid: Vid, grp: Group, mr: Measure) -> Self {
        Self {
            vid,
            grp,
            mr,
            label: None,
        }
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }
}

/// An edge row keyed by vertex ids, as read from an edge table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub src: Vid,
    pub tgt: Vid,
    pub grp: Group,
    pub mr: Measure,
    pub label: Option<String>,
}

impl EdgeRecord {
    pub fn new(src: Vid, tgt: Vid, grp: Group, mr: Measure) -> Self {
        Self {
            src,
            tgt,
            grp,
            mr,
            label: None,
        }
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }
}

/// An edge whose endpoints are internal vertex indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub src: u32,
    pub tgt: u32,
    pub grp: Group,
    pub mr: Measure,
    pub label: Option<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LoadError {
    #[error("duplicate vertex id {vid}{}", line_suffix(*.line))]
    DuplicateVertex { vid: Vid, line: Option<u64> },
    #[error("edge {src}->{tgt} references unknown vertex {missing}{}", line_suffix(*.line))]
    DanglingEdge {
        src: Vid,
        tgt: Vid,
        missing: Vid,
        line: Option<u64>,
    },
    #[error("{path}: line {line}: {message}")]
    Malformed {
        path: String,
        line: u64,
        message: String,
    },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

fn line_suffix(line: Option<u64>) -> String {
    line.map(|l| format!(" (line {l})")).unwrap_or_default()
}

/// A directed multigraph with the fixed vertex/edge attribute schema.
///
/// Vertices are stored sorted by vid; internal index `i` is the position in
/// that order. Edges are sorted by `(src, tgt)` with input order kept among
/// parallel edges. The graph is immutable once built.
#[derive(Debug, Clone)]
pub struct AttributedGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    index: HashMap<Vid, u32>,
    topology: Digraph,
}

impl AttributedGraph {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<EdgeRecord>) -> Result<Self, LoadError> {
        Self::with_lines(
            vertices.into_iter().map(|v| (v, None)).collect(),
            edges.into_iter().map(|e| (e, None)).collect(),
        )
    }

    pub(crate) fn with_lines(
        mut vertices: Vec<(Vertex, Option<u64>)>,
        edges: Vec<(EdgeRecord, Option<u64>)>,
    ) -> Result<Self, LoadError> {
        vertices.sort_by_key(|(v, _)| v.vid);
        if let Some(w) = vertices.windows(2).find(|w| w[0].0.vid == w[1].0.vid) {
            return Err(LoadError::DuplicateVertex {
                vid: w[1].0.vid,
                line: w[1].1.max(w[0].1),
            });
        }
        let vertices: Vec<Vertex> = vertices
            .into_iter()
            .map(|(mut v, _)| {
                if v.label.as_deref() == Some("") {
                    v.label = None;
                }
                v
            })
            .collect();
        let index: HashMap<Vid, u32> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.vid, i as u32))
            .collect();

        let mut mapped = Vec::with_capacity(edges.len());
        for (e, line) in edges {
            let lookup = |vid: Vid| {
                index.get(&vid).copied().ok_or(LoadError::DanglingEdge {
                    src: e.src,
                    tgt: e.tgt,
                    missing: vid,
                    line,
                })
            };
            let src = lookup(e.src)?;
            let tgt = lookup(e.tgt)?;
            mapped.push(Edge {
                src,
                tgt,
                grp: e.grp,
                mr: e.mr,
                label: e.label.filter(|l| !l.is_empty()),
            });
        }
        mapped.sort_by_key(|e| (e.src, e.tgt));
        let topology = Digraph::new(
            vertices.len(),
            mapped.iter().map(|e| (e.src, e.tgt)).collect(),
        );
        Ok(Self {
            vertices,
            edges: mapped,
            index,
            topology,
        })
    }

    pub fn empty() -> Self {
        Self::new(Vec::new(), Vec::new()).expect("empty graph is valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex(&self, idx: u32) -> &Vertex {
        &self.vertices[idx as usize]
    }

    pub fn edge(&self, idx: u32) -> &Edge {
        &self.edges[idx as usize]
    }

    /// Internal index of a vertex id.
    pub fn index_of(&self, vid: Vid) -> Option<u32> {
        self.index.get(&vid).copied()
    }

    /// First vertex carrying `label`, in vid order.
    pub fn find_by_label(&self, label: &str) -> Option<u32> {
        self.vertices
            .iter()
            .position(|v| v.label.as_deref() == Some(label))
            .map(|i| i as u32)
    }

    pub fn topology(&self) -> &Digraph {
        &self.topology
    }

    pub fn out_degree(&self, vid: Vid) -> Option<usize> {
        self.index_of(vid).map(|i| self.topology.out_degree(i))
    }

    pub fn in_degree(&self, vid: Vid) -> Option<usize> {
        self.index_of(vid).map(|i| self.topology.in_degree(i))
    }

    /// The edge table keyed by vertex ids, in internal order.
    pub fn edge_records(&self) -> impl Iterator<Item = EdgeRecord> + '_ {
        self.edges.iter().map(|e| EdgeRecord {
            src: self.vertices[e.src as usize].vid,
            tgt: self.vertices[e.tgt as usize].vid,
            grp: e.grp,
            mr: e.mr,
            label: e.label.clone(),
        })
    }

    pub fn has_vertex_labels(&self) -> bool {
        self.vertices.iter().any(|v| v.label.is_some())
    }

    pub fn has_edge_labels(&self) -> bool {
        self.edges.iter().any(|e| e.label.is_some())
    }
}

impl PartialEq for AttributedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}
