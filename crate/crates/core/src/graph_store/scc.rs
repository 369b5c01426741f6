use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::Digraph;

/// Strongly connected components of a digraph and the DAG they induce.
///
/// Component ids are assigned in increasing order of their smallest member,
/// so on graphs whose vertex ids follow vid order the numbering is
/// deterministic and tie-breaks by smallest vid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccDag {
    comp_of: Vec<u32>,
    member_offsets: Vec<u32>,
    members: Vec<u32>,
    dag: Digraph,
    inter_edges: Vec<u32>,
    intra_offsets: Vec<u32>,
    intra_edges: Vec<u32>,
    order: Vec<u32>,
}

impl SccDag {
    pub fn build(g: &Digraph) -> Self {
        let n = g.vertex_count();
        let (raw, count) = tarjan(g);

        // renumber by smallest member
        let mut first = vec![u32::MAX; count];
        for v in 0..n {
            let c = raw[v] as usize;
            if first[c] == u32::MAX {
                first[c] = v as u32;
            }
        }
        let mut by_first: Vec<usize> = (0..count).collect();
        by_first.sort_by_key(|&c| first[c]);
        let mut rename = vec![0u32; count];
        for (new, &old) in by_first.iter().enumerate() {
            rename[old] = new as u32;
        }
        let comp_of: Vec<u32> = raw.iter().map(|&c| rename[c as usize]).collect();

        let (member_offsets, members) = group_by(count, (0..n as u32).map(|v| (comp_of[v as usize], v)));

        let mut inter_edges = Vec::new();
        let mut intra = Vec::new();
        let mut dag_arcs = Vec::new();
        for (e, &(s, t)) in g.arcs().iter().enumerate() {
            let (cs, ct) = (comp_of[s as usize], comp_of[t as usize]);
            if cs == ct {
                intra.push((cs, e as u32));
            } else {
                inter_edges.push(e as u32);
                dag_arcs.push((cs, ct));
            }
        }
        let (intra_offsets, intra_edges) = group_by(count, intra.into_iter());
        dag_arcs.sort_unstable();
        dag_arcs.dedup();
        let dag = Digraph::new(count, dag_arcs);
        let order = topological_order(&dag).expect("condensation is acyclic");
        Self {
            comp_of,
            member_offsets,
            members,
            dag,
            inter_edges,
            intra_offsets,
            intra_edges,
            order,
        }
    }

    pub fn component_count(&self) -> usize {
        self.member_offsets.len() - 1
    }

    pub fn component_of(&self, v: u32) -> u32 {
        self.comp_of[v as usize]
    }

    pub fn components(&self) -> &[u32] {
        &self.comp_of
    }

    /// Member vertices of component `c`, ascending.
    pub fn members(&self, c: u32) -> &[u32] {
        let c = c as usize;
        &self.members[self.member_offsets[c] as usize..self.member_offsets[c + 1] as usize]
    }

    /// The condensed DAG with parallel super-edges merged.
    pub fn dag(&self) -> &Digraph {
        &self.dag
    }

    /// Ids of the original edges joining different components, ascending.
    pub fn inter_edges(&self) -> &[u32] {
        &self.inter_edges
    }

    /// Ids of the original edges inside component `c`, ascending.
    pub fn intra_edges(&self, c: u32) -> &[u32] {
        let c = c as usize;
        &self.intra_edges[self.intra_offsets[c] as usize..self.intra_offsets[c + 1] as usize]
    }

    /// Components in topological order.
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    /// True when every component is a single vertex.
    pub fn is_trivial(&self) -> bool {
        self.component_count() == self.comp_of.len()
    }
}

fn group_by(count: usize, items: impl Iterator<Item = (u32, u32)>) -> (Vec<u32>, Vec<u32>) {
    let items: Vec<(u32, u32)> = items.collect();
    let mut offsets = vec![0u32; count + 1];
    for &(k, _) in &items {
        offsets[k as usize + 1] += 1;
    }
    for i in 0..count {
        offsets[i + 1] += offsets[i];
    }
    let mut cursor = offsets.clone();
    let mut values = vec![0u32; items.len()];
    for (k, v) in items {
        values[cursor[k as usize] as usize] = v;
        cursor[k as usize] += 1;
    }
    (offsets, values)
}

/// Iterative Tarjan; returns a component id per vertex and the count.
fn tarjan(g: &Digraph) -> (Vec<u32>, usize) {
    const UNSEEN: u32 = u32::MAX;
    let n = g.vertex_count();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut calls: Vec<(u32, usize)> = Vec::new();
    let mut counter = 0u32;
    let mut count = 0usize;

    for root in 0..n as u32 {
        if index[root as usize] != UNSEEN {
            continue;
        }
        index[root as usize] = counter;
        low[root as usize] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root as usize] = true;
        calls.push((root, 0));

        while let Some(&mut (v, ref mut pos)) = calls.last_mut() {
            let succ = g.successors(v);
            if *pos < succ.len() {
                let w = succ[*pos];
                *pos += 1;
                let wi = w as usize;
                if index[wi] == UNSEEN {
                    index[wi] = counter;
                    low[wi] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[wi] = true;
                    calls.push((w, 0));
                } else if on_stack[wi] {
                    low[v as usize] = low[v as usize].min(index[wi]);
                }
                continue;
            }
            calls.pop();
            if let Some(&(parent, _)) = calls.last() {
                low[parent as usize] = low[parent as usize].min(low[v as usize]);
            }
            if low[v as usize] == index[v as usize] {
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w as usize] = false;
                    comp[w as usize] = count as u32;
                    if w == v {
                        break;
                    }
                }
                count += 1;
            }
        }
    }
    (comp, count)
}

/// Kahn's algorithm, always releasing the smallest ready vertex id first.
/// Returns `None` when the graph has a cycle.
pub fn topological_order(g: &Digraph) -> Option<Vec<u32>> {
    let n = g.vertex_count();
    let mut indegree: Vec<usize> = (0..n as u32).map(|v| g.in_degree(v)).collect();
    let mut ready: BinaryHeap<Reverse<u32>> = (0..n as u32)
        .filter(|&v| indegree[v as usize] == 0)
        .map(Reverse)
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(v)) = ready.pop() {
        order.push(v);
        for &w in g.successors(v) {
            indegree[w as usize] -= 1;
            if indegree[w as usize] == 0 {
                ready.push(Reverse(w));
            }
        }
    }
    (order.len() == n).then_some(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dag_components_are_singletons() {
        let g = Digraph::new(4, vec![(0, 1), (1, 2), (0, 3)]);
        let scc = SccDag::build(&g);
        assert!(scc.is_trivial());
        assert_eq!(scc.components(), &[0, 1, 2, 3]);
        assert_eq!(scc.inter_edges(), &[0, 1, 2]);
    }

    #[test]
    fn three_cycle_collapses() {
        let g = Digraph::new(4, vec![(0, 1), (1, 2), (2, 0), (2, 3)]);
        let scc = SccDag::build(&g);
        assert_eq!(scc.component_count(), 2);
        assert_eq!(scc.members(0), &[0, 1, 2]);
        assert_eq!(scc.members(1), &[3]);
        assert_eq!(scc.intra_edges(0), &[0, 1, 2]);
        assert_eq!(scc.inter_edges(), &[3]);
        assert_eq!(scc.dag().arcs(), &[(0, 1)]);
        assert_eq!(scc.order(), &[0, 1]);
    }

    #[test]
    fn parallel_inter_edges_are_all_kept() {
        let g = Digraph::new(2, vec![(0, 1), (0, 1)]);
        let scc = SccDag::build(&g);
        assert_eq!(scc.inter_edges(), &[0, 1]);
        assert_eq!(scc.dag().edge_count(), 1);
    }

    #[test]
    fn self_loop_is_intra() {
        let g = Digraph::new(2, vec![(0, 0), (0, 1)]);
        let scc = SccDag::build(&g);
        assert_eq!(scc.intra_edges(0), &[0]);
        assert_eq!(scc.dag().arcs(), &[(0, 1)]);
    }

    #[test]
    fn topological_order_cases() {
        assert_eq!(topological_order(&Digraph::new(1, vec![])), Some(vec![0]));
        assert_eq!(
            topological_order(&Digraph::new(3, vec![(0, 1), (1, 2)])),
            Some(vec![0, 1, 2])
        );
        assert_eq!(
            topological_order(&Digraph::new(3, vec![(2, 0), (1, 0)])),
            Some(vec![1, 2, 0])
        );
        assert_eq!(topological_order(&Digraph::new(2, vec![(0, 1), (1, 0)])), None);
    }

    #[test]
    fn deep_chain_does_not_overflow() {
        let n = 200_000u32;
        let arcs: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).chain([(n - 1, 0)]).collect();
        let scc = SccDag::build(&Digraph::new(n as usize, arcs));
        assert_eq!(scc.component_count(), 1);
    }
}
