use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::tag::{PairSet, Tag, MAX_HUBS};
use crate::graph_store::{topological_order, Digraph, Direction};
use crate::reachability::{bfs_distances, IndexError, ReachIndex, UNREACHABLE};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExtractError {
    #[error("hub {hub} is not a vertex of a graph with {n} vertices")]
    HubOutOfRange { hub: u32, n: usize },
    #[error("{0} hubs requested, at most {MAX_HUBS} are supported")]
    TooManyHubs(usize),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error("graph is not acyclic")]
    Cyclic,
}

fn check_hubs(n: usize, hubs: &[u32]) -> Result<(), ExtractError> {
    if hubs.len() > MAX_HUBS {
        return Err(ExtractError::TooManyHubs(hubs.len()));
    }
    match hubs.iter().find(|&&h| h as usize >= n) {
        Some(&hub) => Err(ExtractError::HubOutOfRange { hub, n }),
        None => Ok(()),
    }
}

/// Tags every vertex of `dag` by probing `idx` twice per hub. `hubs[i]` is the
/// vertex of hub position `i`.
pub fn compute_tags_indexed(
    dag: &Digraph,
    hubs: &[u32],
    idx: &dyn ReachIndex,
) -> Result<Vec<Tag>, ExtractError> {
    let n = dag.vertex_count();
    check_hubs(n, hubs)?;
    (0..n as u32)
        .into_par_iter()
        .map(|v| {
            let mut t = Tag::EMPTY;
            for (i, &h) in hubs.iter().enumerate() {
                if idx.reaches(h, v)? {
                    t.s.insert(i);
                }
                if idx.reaches(v, h)? {
                    t.r.insert(i);
                }
            }
            Ok(t)
        })
        .collect()
}

/// Tags every vertex of an acyclic `dag` without an index: `S` lists are
/// pushed to children in topological order and `R` lists to parents in
/// reverse order.
pub fn compute_tags_propagation(dag: &Digraph, hubs: &[u32]) -> Result<Vec<Tag>, ExtractError> {
    let n = dag.vertex_count();
    check_hubs(n, hubs)?;
    let order = topological_order(dag).ok_or(ExtractError::Cyclic)?;
    let mut tags = vec![Tag::EMPTY; n];
    for (i, &h) in hubs.iter().enumerate() {
        tags[h as usize].s.insert(i);
        tags[h as usize].r.insert(i);
    }
    for &v in &order {
        let s = tags[v as usize].s;
        for &w in dag.successors(v) {
            tags[w as usize].s.or_assign(&s);
        }
    }
    for &v in order.iter().rev() {
        let mut r = tags[v as usize].r;
        for &w in dag.successors(v) {
            r.or_assign(&tags[w as usize].r);
        }
        tags[v as usize].r = r;
    }
    Ok(tags)
}

/// Tag of an edge `(s, t)`: `<S(s), R(t)>`.
pub fn edge_tag(tags: &[Tag], s: u32, t: u32) -> Tag {
    Tag::new(tags[s as usize].s, tags[t as usize].r)
}

/// How `betweenness(h)` applies the hop budget to a hub pair `(x, y)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HopBound {
    /// `dist(x, v) + dist(v, y) <= h`.
    #[default]
    Total,
    /// `dist(x, v) <= h` and `dist(v, y) <= h`.
    PerSide,
}

/// Hop-bounded membership of vertices and edges in the subgraph of each hub
/// pair. Not a product of independent source and target sets, so it is kept
/// as explicit pair sets.
#[derive(Debug, Clone)]
pub struct BoundedTags {
    pub vertices: Vec<PairSet>,
    pub edges: Vec<PairSet>,
}

/// Computes `betweenness(h)` memberships over `g` (not condensed: distances
/// inside components matter). An edge `(s, t)` belongs to `(x, y)` when a walk
/// `x ⇝ s → t ⇝ y` fits the budget.
pub fn compute_tags_bounded(
    g: &Digraph,
    hubs: &[u32],
    h: u32,
    bound: HopBound,
) -> Result<BoundedTags, ExtractError> {
    let n = g.vertex_count();
    let k = hubs.len();
    check_hubs(n, hubs)?;
    let (from, to): (Vec<Vec<u32>>, Vec<Vec<u32>>) = hubs
        .par_iter()
        .map(|&x| {
            (
                bfs_distances(g, x, Direction::Forward, Some(h)),
                bfs_distances(g, x, Direction::Reverse, Some(h)),
            )
        })
        .unzip();
    let fits = |dx: u32, extra: u32, dy: u32| {
        if dx == UNREACHABLE || dy == UNREACHABLE {
            return false;
        }
        match bound {
            HopBound::Total => dx as u64 + extra as u64 + dy as u64 <= h as u64,
            HopBound::PerSide => dx + extra <= h && dy + extra <= h,
        }
    };
    let members = |src: u32, tgt: u32, extra: u32| {
        let mut p = PairSet::empty(k);
        for x in 0..k {
            let dx = from[x][src as usize];
            if dx == UNREACHABLE {
                continue;
            }
            for y in 0..k {
                if x != y && fits(dx, extra, to[y][tgt as usize]) {
                    p.insert(x, y);
                }
            }
        }
        p
    };
    let vertices = (0..n as u32).into_par_iter().map(|v| members(v, v, 0)).collect();
    let edges = g.arcs().par_iter().map(|&(s, t)| members(s, t, 1)).collect();
    Ok(BoundedTags { vertices, edges })
}
