use crate::graph_store::Direction;
use crate::reachability::{bfs_distances, UNREACHABLE};
use crate::view::{SubgraphView, ViewOrigin};

/// The subgraph of `view` along paths from `a` to `b` of at most `h` hops:
/// vertices with `dist(a, v) + dist(v, b) <= h` and edges `(s, t)` with
/// `dist(a, s) + 1 + dist(t, b) <= h`. When `b` is reachable but farther than
/// `h`, the budget widens to that distance. `a` and `b` are always kept.
pub fn extract_path_subgraph(view: &SubgraphView, a: u32, b: u32, h: u32) -> SubgraphView {
    let g = view.topology();
    let from_a = bfs_distances(g, a, Direction::Forward, None);
    let to_b = bfs_distances(g, b, Direction::Reverse, None);
    let budget = match from_a[b as usize] {
        UNREACHABLE => h,
        d => h.max(d),
    } as u64;
    let via = |s: u32, extra: u64, t: u32| {
        let (ds, dt) = (from_a[s as usize], to_b[t as usize]);
        ds != UNREACHABLE && dt != UNREACHABLE && ds as u64 + extra + dt as u64 <= budget
    };
    let keep_edge = |e: u32| {
        let (s, t) = g.arc(e);
        via(s, 1, t)
    };
    view.restrict(
        |v| v == a || v == b || via(v, 0, v),
        keep_edge,
        ViewOrigin::PathBetween {
            a: view.vid(a),
            b: view.vid(b),
            hops: budget as u32,
        },
    )
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::graph_store::{AttributedGraph, EdgeRecord, Vertex};

    fn view(n: u64, edges: &[(u64, u64)]) -> SubgraphView {
        let g = AttributedGraph::new(
            (0..n).map(|v| Vertex::new(v, 0, 1)).collect(),
            edges.iter().map(|&(s, t)| EdgeRecord::new(s, t, 0, 1)).collect(),
        )
        .unwrap();
        SubgraphView::whole(Arc::new(g))
    }

    #[test]
    fn same_anchor_zero_hops() {
        let v = view(3, &[(0, 1), (1, 2)]);
        let sub = extract_path_subgraph(&v, 0, 0, 0);
        assert_eq!(sub.root_vertices(), &[0]);
        assert_eq!(sub.edge_count(), 0);
    }

    #[test]
    fn two_hop_path() {
        let v = view(4, &[(0, 1), (1, 2), (2, 3)]);
        let sub = extract_path_subgraph(&v, 0, 2, 2);
        assert_eq!(sub.root_vertices(), &[0, 1, 2]);
        assert_eq!(sub.edge_count(), 2);
    }

    #[test]
    fn budget_widens_to_actual_distance() {
        let v = view(4, &[(0, 1), (1, 2), (2, 3)]);
        let sub = extract_path_subgraph(&v, 0, 3, 1);
        assert_eq!(sub.vertex_count(), 4);
        assert_eq!(sub.origin(), &ViewOrigin::PathBetween { a: 0, b: 3, hops: 3 });
    }

    #[test]
    fn unreachable_anchors_keep_only_themselves() {
        let v = view(3, &[(1, 0)]);
        let sub = extract_path_subgraph(&v, 0, 1, 4);
        assert_eq!(sub.root_vertices(), &[0, 1]);
        assert_eq!(sub.edge_count(), 0);
    }
}
