use super::elements::{AggOutcome, ElementTable, OpStats, SubgraphAggregates};
use crate::extraction::SubgraphSet;

/// Shared-nothing baseline: every element is added into every subgraph of
/// its set, one subgraph at a time.
pub fn sn_aggregate<T: SubgraphSet>(table: &ElementTable<T>) -> AggOutcome {
    let mut aggregates = SubgraphAggregates::new(table.hub_count());
    let pairs: Vec<Vec<(usize, usize)>> = table
        .sets()
        .iter()
        .map(|s| {
            let mut v = Vec::with_capacity(s.cardinality());
            s.for_each_pair(|x, y| v.push((x, y)));
            v
        })
        .collect();
    let mut deliveries = 0u64;
    for e in 0..table.len() {
        let entries = table.entries(e);
        for &(x, y) in &pairs[table.group_of(e) as usize] {
            let cell = aggregates.cell_mut(x, y);
            deliveries += cell.add_entries(entries);
        }
    }
    AggOutcome {
        aggregates,
        ops: OpStats { deliveries, merges: 0 },
    }
}
