//! Summaries that depend on the shape of an induced subgraph rather than on
//! measures alone.

use serde::Serialize;

use crate::extraction::SubgraphSet;
use crate::graph_store::{Direction, Vid};
use crate::reachability::{bfs_distances, UNREACHABLE};
use crate::view::SubgraphView;

/// A shortest hop path between two hubs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathSummary {
    /// `None` when the target is unreachable.
    pub distance: Option<u32>,
    pub vertices: Vec<Vid>,
    /// One relationship type per edge: the edge label, or its `e_grp` when
    /// unlabeled.
    pub labels: Vec<String>,
}

impl PathSummary {
    pub fn unreachable() -> Self {
        Self {
            distance: None,
            vertices: vec![],
            labels: vec![],
        }
    }

    /// Labels joined with `·`.
    pub fn label_chain(&self) -> String {
        self.labels.join("·")
    }
}

/// Shortest path from local `x` to local `y` in `view`. Among equally short
/// paths the one with the lexicographically smallest vid sequence wins; among
/// parallel edges the first in edge-table order supplies the label.
pub fn shortest_path_summary(view: &SubgraphView, x: u32, y: u32) -> PathSummary {
    let to_y = bfs_distances(view.topology(), y, Direction::Reverse, None);
    path_with_distances(view, x, &to_y)
}

/// [`shortest_path_summary`] from `x` given precomputed distances to the target.
pub fn path_with_distances(view: &SubgraphView, x: u32, to_y: &[u32]) -> PathSummary {
    let d = to_y[x as usize];
    if d == UNREACHABLE {
        return PathSummary::unreachable();
    }
    let g = view.topology();
    let mut cur = x;
    let mut vertices = vec![view.vid(x)];
    let mut labels = Vec::with_capacity(d as usize);
    for step in (0..d).rev() {
        // local ids follow vid order, so the smallest id is the smallest vid
        let (e, next) = g
            .out_arcs(cur)
            .filter(|&(_, w)| to_y[w as usize] == step)
            .min_by_key(|&(e, w)| (w, view.root_edge(e)))
            .expect("a vertex at distance d has a successor at d - 1");
        let edge = view.edge(e);
        labels.push(edge.label.clone().unwrap_or_else(|| edge.grp.to_string()));
        vertices.push(view.vid(next));
        cur = next;
    }
    PathSummary {
        distance: Some(d),
        vertices,
        labels,
    }
}

/// Proxy for relationship strength: edges in the subgraph per hop of the
/// shortest path between the hubs, 0 when unreachable.
pub fn relationship_strength(edge_count: u64, distance: Option<u32>) -> f64 {
    match distance {
        Some(d) if d > 0 => edge_count as f64 / d as f64,
        _ => 0.0,
    }
}

/// Maps each value min-max normalized into a display width in `[1, 5]`.
pub fn width_bands(values: &[f64]) -> Vec<u8> {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    values
        .iter()
        .map(|&v| {
            if hi - lo <= f64::EPSILON {
                3
            } else {
                1 + ((v - lo) / (hi - lo) * 4.0).round() as u8
            }
        })
        .collect()
}

/// Number of original vertices in subgraph `(x, y)`, given each element's set
/// and how many original vertices it stands for.
pub fn vertex_count<T: SubgraphSet>(sets: &[T], weights: &[u64], x: usize, y: usize) -> u64 {
    sets.iter()
        .zip(weights)
        .filter(|(s, _)| s.contains_pair(x, y))
        .map(|(_, &w)| w)
        .sum()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::extraction::Tag;
    use crate::graph_store::{AttributedGraph, EdgeRecord, Vertex};

    fn diamond() -> SubgraphView {
        // 0 -> {1, 2} -> 3, with both middle routes equally short
        let g = AttributedGraph::new(
            (0..4).map(|v| Vertex::new(v, 0, 1)).collect(),
            vec![
                EdgeRecord::new(0, 2, 0, 1).labeled("b"),
                EdgeRecord::new(0, 1, 0, 1).labeled("a"),
                EdgeRecord::new(1, 3, 7, 1),
                EdgeRecord::new(2, 3, 0, 1).labeled("c"),
            ],
        )
        .unwrap();
        SubgraphView::whole(Arc::new(g))
    }

    #[test]
    fn same_vertex_is_zero() {
        let p = shortest_path_summary(&diamond(), 2, 2);
        assert_eq!(p.distance, Some(0));
        assert!(p.labels.is_empty());
    }

    #[test]
    fn smallest_vid_route_and_group_fallback() {
        let p = shortest_path_summary(&diamond(), 0, 3);
        assert_eq!(p.distance, Some(2));
        assert_eq!(p.vertices, vec![0, 1, 3]);
        assert_eq!(p.label_chain(), "a·7");
    }

    #[test]
    fn unreachable_is_sentinel() {
        assert_eq!(shortest_path_summary(&diamond(), 3, 0), PathSummary::unreachable());
        assert_eq!(relationship_strength(5, None), 0.0);
    }

    #[test]
    fn bands_span_one_to_five() {
        assert_eq!(width_bands(&[0.0, 5.0, 10.0]), vec![1, 3, 5]);
        assert_eq!(width_bands(&[2.0, 2.0]), vec![3, 3]);
    }

    #[test]
    fn vertex_count_sums_weights() {
        let sets = [Tag::from_lists(&[0], &[1]), Tag::from_lists(&[1], &[0]), Tag::EMPTY];
        assert_eq!(vertex_count(&sets, &[3, 5, 7], 0, 1), 3);
        assert_eq!(vertex_count(&sets, &[3, 5, 7], 1, 1), 0);
    }
}
