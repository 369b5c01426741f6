use rustc_hash::FxHashMap;
use serde::Serialize;

use super::function::{Entry, Partial};
use crate::extraction::SubgraphSet;

/// Aggregation input: every element (vertex, super-vertex or edge) with the
/// subgraph set it belongs to and the keyed values it contributes. Equal sets
/// are interned so each distinct set is a group.
#[derive(Debug, Clone)]
pub struct ElementTable<T> {
    hub_count: usize,
    sets: Vec<T>,
    index: FxHashMap<T, u32>,
    group_of: Vec<u32>,
    offsets: Vec<usize>,
    entries: Vec<Entry>,
}

impl<T: SubgraphSet> ElementTable<T> {
    pub fn new(hub_count: usize) -> Self {
        Self {
            hub_count,
            sets: Vec::new(),
            index: FxHashMap::default(),
            group_of: Vec::new(),
            offsets: vec![0],
            entries: Vec::new(),
        }
    }

    /// Adds an element. Elements outside every subgraph and elements without
    /// entries are dropped since they can never be delivered.
    pub fn push(&mut self, set: &T, entries: &[Entry]) {
        if entries.is_empty() || set.cardinality() == 0 {
            return;
        }
        let group = match self.index.get(set) {
            Some(&g) => g,
            None => {
                let g = self.sets.len() as u32;
                self.sets.push(set.clone());
                self.index.insert(set.clone(), g);
                g
            }
        };
        self.group_of.push(group);
        self.entries.extend_from_slice(entries);
        self.offsets.push(self.entries.len());
    }

    pub fn hub_count(&self) -> usize {
        self.hub_count
    }

    pub fn len(&self) -> usize {
        self.group_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.group_of.is_empty()
    }

    /// Distinct subgraph sets, indexed by group id.
    pub fn sets(&self) -> &[T] {
        &self.sets
    }

    pub fn group_of(&self, element: usize) -> u32 {
        self.group_of[element]
    }

    pub fn entries(&self, element: usize) -> &[Entry] {
        &self.entries[self.offsets[element]..self.offsets[element + 1]]
    }

    /// Add operations the shared-nothing baseline performs:
    /// `Σ entries(e) · |set(e)|`.
    pub fn sn_closed_form(&self) -> u64 {
        let cards: Vec<u64> = self.sets.iter().map(|s| s.cardinality() as u64).collect();
        (0..self.len())
            .map(|e| self.entries(e).len() as u64 * cards[self.group_of[e] as usize])
            .sum()
    }
}

/// Add operations split by kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OpStats {
    /// Keyed values delivered into subgraph accumulators.
    pub deliveries: u64,
    /// Keyed values folded into group or cluster pre-aggregates.
    pub merges: u64,
}

impl OpStats {
    pub fn total(&self) -> u64 {
        self.deliveries + self.merges
    }
}

impl std::ops::AddAssign for OpStats {
    fn add_assign(&mut self, o: Self) {
        self.deliveries += o.deliveries;
        self.merges += o.merges;
    }
}

/// One accumulator per ordered hub pair `(x, y)`, `x != y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgraphAggregates {
    k: usize,
    cells: Vec<Partial>,
}

impl SubgraphAggregates {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            cells: vec![Partial::default(); k * k],
        }
    }

    pub fn hub_count(&self) -> usize {
        self.k
    }

    pub fn get(&self, x: usize, y: usize) -> &Partial {
        &self.cells[x * self.k + y]
    }

    pub(crate) fn cell_mut(&mut self, x: usize, y: usize) -> &mut Partial {
        &mut self.cells[x * self.k + y]
    }

    /// Delivers `p` to every pair of `dest`, returning the add operations.
    pub(crate) fn deliver<T: SubgraphSet>(&mut self, dest: &T, p: &Partial) -> u64 {
        let mut ops = 0;
        dest.for_each_pair(|x, y| ops += self.cell_mut(x, y).merge(p));
        ops
    }

    /// Pairs whose accumulator received at least one value.
    pub fn non_empty_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.k * self.k)
            .filter(|&i| !self.cells[i].is_empty())
            .map(|i| (i / self.k, i % self.k))
    }
}

/// Aggregates plus the add operations spent producing them.
#[derive(Debug, Clone)]
pub struct AggOutcome {
    pub aggregates: SubgraphAggregates,
    pub ops: OpStats,
}
