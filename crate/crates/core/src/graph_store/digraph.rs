/// Compressed adjacency lists over dense vertex ids `0..n`.
///
/// Every entry keeps the id of the edge it came from, so parallel edges stay
/// distinguishable after the lists are built.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Adjacency {
    offsets: Vec<u32>,
    neighbors: Vec<u32>,
    edge_ids: Vec<u32>,
}

impl Adjacency {
    fn build(n: usize, arcs: &[(u32, u32)], reverse: bool) -> Self {
        let mut offsets = vec![0u32; n + 1];
        for &(s, t) in arcs {
            let from = if reverse { t } else { s };
            offsets[from as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut neighbors = vec![0u32; arcs.len()];
        let mut edge_ids = vec![0u32; arcs.len()];
        // arcs are visited in id order, so each list stays sorted by edge id
        for (id, &(s, t)) in arcs.iter().enumerate() {
            let (from, to) = if reverse { (t, s) } else { (s, t) };
            let slot = &mut cursor[from as usize];
            neighbors[*slot as usize] = to;
            edge_ids[*slot as usize] = id as u32;
            *slot += 1;
        }
        Self {
            offsets,
            neighbors,
            edge_ids,
        }
    }

    fn range(&self, v: u32) -> std::ops::Range<usize> {
        self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.neighbors[self.range(v)]
    }

    /// `(edge id, neighbor)` pairs of `v`.
    pub fn arcs(&self, v: u32) -> impl Iterator<Item = (u32, u32)> + '_ {
        let r = self.range(v);
        self.edge_ids[r.clone()]
            .iter()
            .copied()
            .zip(self.neighbors[r].iter().copied())
    }

    pub fn degree(&self, v: u32) -> usize {
        self.range(v).len()
    }
}

/// A directed multigraph stored as forward and reverse adjacency.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    arcs: Vec<(u32, u32)>,
    fwd: Adjacency,
    rev: Adjacency,
}

impl Digraph {
    /// Builds a graph on `n` vertices; edge `i` is `arcs[i]`.
    ///
    /// Panics if an endpoint is `>= n`.
    pub fn new(n: usize, arcs: Vec<(u32, u32)>) -> Self {
        assert!(
            arcs.iter().all(|&(s, t)| (s as usize) < n && (t as usize) < n),
            "arc endpoint out of range"
        );
        let fwd = Adjacency::build(n, &arcs, false);
        let rev = Adjacency::build(n, &arcs, true);
        Self { n, arcs, fwd, rev }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arc(&self, e: u32) -> (u32, u32) {
        self.arcs[e as usize]
    }

    pub fn arcs(&self) -> &[(u32, u32)] {
        &self.arcs
    }

    pub fn successors(&self, v: u32) -> &[u32] {
        self.fwd.neighbors(v)
    }

    pub fn predecessors(&self, v: u32) -> &[u32] {
        self.rev.neighbors(v)
    }

    /// `(edge id, target)` for every edge leaving `v`.
    pub fn out_arcs(&self, v: u32) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.fwd.arcs(v)
    }

    /// `(edge id, source)` for every edge entering `v`.
    pub fn in_arcs(&self, v: u32) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.rev.arcs(v)
    }

    pub fn out_degree(&self, v: u32) -> usize {
        self.fwd.degree(v)
    }

    pub fn in_degree(&self, v: u32) -> usize {
        self.rev.degree(v)
    }

    pub fn neighbors(&self, v: u32, direction: Direction) -> &[u32] {
        match direction {
            Direction::Forward => self.successors(v),
            Direction::Reverse => self.predecessors(v),
        }
    }
}

/// Traversal direction along edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Reverse,
}
