//! Reachability over condensed DAGs: a transitive-closure bitset index and
//! hop-bounded breadth-first distances.

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

use crate::graph_store::{topological_order, Digraph, Direction};

/// Largest DAG the closure index accepts by default.
pub const DEFAULT_TC_CAP: usize = 100_000;

/// Sentinel distance for unreachable vertices.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IndexError {
    #[error("graph has {n} vertices, above the closure index cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("vertex {id} out of range for an index over {n} vertices")]
    OutOfRange { id: u32, n: usize },
    #[error("graph is not acyclic")]
    Cyclic,
}

mod sealed {
    pub trait Sealed {}
}

/// A reflexive reachability oracle over the vertices of a DAG.
pub trait ReachIndex: sealed::Sealed + Send + Sync {
    fn vertex_count(&self) -> usize;

    /// Whether a directed path `u ⇝ v` exists; `u ⇝ u` always holds.
    fn reaches(&self, u: u32, v: u32) -> Result<bool, IndexError>;
}

/// Transitive closure stored as one bitset row per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TcIndex {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl sealed::Sealed for TcIndex {}

impl ReachIndex for TcIndex {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn reaches(&self, u: u32, v: u32) -> Result<bool, IndexError> {
        for id in [u, v] {
            if id as usize >= self.n {
                return Err(IndexError::OutOfRange { id, n: self.n });
            }
        }
        Ok(self.probe(u, v))
    }
}

impl TcIndex {
    /// Bit probe without range checks.
    #[inline]
    pub fn probe(&self, u: u32, v: u32) -> bool {
        let row = u as usize * self.words;
        self.bits[row + v as usize / 64] >> (v % 64) & 1 == 1
    }

    pub fn row(&self, u: u32) -> &[u64] {
        let start = u as usize * self.words;
        &self.bits[start..start + self.words]
    }

    /// Number of vertices reachable from `u`, including itself.
    pub fn reach_count(&self, u: u32) -> usize {
        self.row(u).iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Builds the closure by OR-ing successor rows in reverse topological order.
pub fn build_tc_index(dag: &Digraph, cap: usize) -> Result<TcIndex, IndexError> {
    let n = dag.vertex_count();
    if n > cap {
        return Err(IndexError::TooLarge { n, cap });
    }
    let order = topological_order(dag).ok_or(IndexError::Cyclic)?;
    let words = n.div_ceil(64).max(1);
    let mut bits = vec![0u64; n * words];
    for &v in order.iter().rev() {
        let vs = v as usize * words;
        bits[vs + v as usize / 64] |= 1 << (v % 64);
        for &w in dag.successors(v) {
            let ws = w as usize * words;
            let (dst, src) = if vs < ws {
                let (a, b) = bits.split_at_mut(ws);
                (&mut a[vs..vs + words], &b[..words])
            } else {
                let (a, b) = bits.split_at_mut(vs);
                (&mut b[..words], &a[ws..ws + words])
            };
            for (d, s) in dst.iter_mut().zip(src) {
                *d |= *s;
            }
        }
    }
    Ok(TcIndex { n, words, bits })
}

/// Breadth-first hop distances from `source`; [`UNREACHABLE`] where no path
/// exists. Traversal stops expanding past `limit` hops.
pub fn bfs_distances(g: &Digraph, source: u32, direction: Direction, limit: Option<u32>) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; g.vertex_count()];
    bfs_into(g, &[source], direction, limit, &mut dist);
    dist
}

/// Multi-source variant of [`bfs_distances`] writing into `dist`.
pub fn bfs_into(g: &Digraph, sources: &[u32], direction: Direction, limit: Option<u32>, dist: &mut [u32]) {
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s as usize] != 0 {
            dist[s as usize] = 0;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        let d = dist[v as usize];
        if limit.is_some_and(|h| d >= h) {
            continue;
        }
        for &w in g.neighbors(v, direction) {
            if dist[w as usize] == UNREACHABLE {
                dist[w as usize] = d + 1;
                queue.push_back(w);
            }
        }
    }
}

/// Vertices within `h` hops of `source`, with their distances.
pub fn bounded_distances(g: &Digraph, source: u32, h: u32, direction: Direction) -> BTreeMap<u32, u32> {
    bfs_distances(g, source, direction, Some(h))
        .into_iter()
        .enumerate()
        .filter(|&(_, d)| d <= h)
        .map(|(v, d)| (v as u32, d))
        .collect()
}
