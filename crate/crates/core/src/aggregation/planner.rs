//! The aggregation-sharing planner: same-set grouping followed by greedy
//! clustering of groups around common subgraph sets.

use std::cmp::Reverse;

use rustc_hash::FxHashMap;
use serde::Serialize;
use thiserror::Error;

use super::elements::{AggOutcome, ElementTable, OpStats, SubgraphAggregates};
use super::function::Partial;
use crate::extraction::SubgraphSet;

/// Groups whose set covers fewer subgraphs than this are delivered directly.
pub const DEFAULT_THRESHOLD: usize = 3;

/// Net deliveries avoided by admitting a group with set `nt` into a cluster
/// with common set `ct` and `sz` members:
/// `|ct ∧ nt|·(sz + 1) − |ct|·sz`.
pub fn saving<T: SubgraphSet>(ct: &T, sz: usize, nt: &T) -> i64 {
    let shared = ct.meet_cardinality(nt) as i64;
    shared * (sz as i64 + 1) - ct.cardinality() as i64 * sz as i64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Group(u32),
    Cluster(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanStep<T> {
    /// Merge the source's pre-aggregate into every subgraph of `dest`.
    Deliver { source: Source, dest: T },
    /// Open a cluster whose pre-aggregate starts as the group's.
    Found { cluster: u32, group: u32 },
    /// Fold a group's pre-aggregate into a cluster's.
    Absorb { cluster: u32, group: u32, saving: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster<T> {
    /// Common set: intersection of all member sets.
    pub ct: T,
    pub members: Vec<u32>,
}

impl<T> Cluster<T> {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// A routing of group pre-aggregates to subgraph accumulators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggPlan<T> {
    pub groups: Vec<T>,
    pub steps: Vec<PlanStep<T>>,
    pub clusters: Vec<Cluster<T>>,
    pub threshold: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlanError {
    #[error("group {group} reaches subgraph ({x}, {y}) {count} times")]
    Overlap { group: u32, x: usize, y: usize, count: u32 },
    #[error("group {group} never reaches subgraph ({x}, {y})")]
    Gap { group: u32, x: usize, y: usize },
    #[error("group {group} delivered to ({x}, {y}) outside its set")]
    Stray { group: u32, x: usize, y: usize },
    #[error("group {group} joined cluster {cluster} with non-positive saving {saving}")]
    Unprofitable { group: u32, cluster: u32, saving: i64 },
    #[error("plan has {plan} groups but the table has {table}")]
    Mismatch { plan: usize, table: usize },
    #[error("step references unknown {0}")]
    Dangling(String),
}

/// Builds the sharing plan over the distinct sets of an [`ElementTable`].
///
/// Groups are visited by descending cardinality, ties by set order. A group
/// below `threshold` is delivered directly; otherwise it joins the cluster
/// with the best positive [`saving`], or founds a new one. Joining shrinks
/// the cluster's common set to `st = ct ∧ nt`: the accumulated members are
/// delivered to `ct − st` and the group itself to `nt − st`. When all groups
/// are placed, each cluster's pre-aggregate is delivered to its common set.
pub fn build_as_plan<T: SubgraphSet>(groups: &[T], threshold: usize) -> AggPlan<T> {
    let cards: Vec<usize> = groups.iter().map(SubgraphSet::cardinality).collect();
    let mut queue: Vec<u32> = (0..groups.len() as u32).filter(|&g| cards[g as usize] > 0).collect();
    // group sets are distinct, so the order is total and an unstable sort is
    // deterministic
    queue.sort_unstable_by(|&a, &b| {
        let (a, b) = (a as usize, b as usize);
        Reverse(cards[a]).cmp(&Reverse(cards[b])).then_with(|| groups[a].cmp(&groups[b]))
    });

    let mut steps = Vec::new();
    let mut clusters: Vec<Cluster<T>> = Vec::new();
    // the scan below reads only these, kept apart from member lists
    let mut cts: Vec<T> = Vec::new();
    let mut ct_cards: Vec<i64> = Vec::new();
    let mut sizes: Vec<i64> = Vec::new();
    for g in queue {
        let nt = &groups[g as usize];
        let nt_card = cards[g as usize];
        if nt_card < threshold {
            steps.push(PlanStep::Deliver {
                source: Source::Group(g),
                dest: nt.clone(),
            });
            continue;
        }
        let nt_card = nt_card as i64;
        let mut best: Option<(i64, usize)> = None;
        for (i, ct) in cts.iter().enumerate() {
            let (ct_card, sz) = (ct_cards[i], sizes[i]);
            let floor = best.map_or(0, |b| b.0);
            // |ct ∧ nt| is at most the smaller cardinality
            if ct_card.min(nt_card) * (sz + 1) - ct_card * sz <= floor {
                continue;
            }
            let s = ct.meet_cardinality(nt) as i64 * (sz + 1) - ct_card * sz;
            if s > floor {
                best = Some((s, i));
            }
        }
        match best {
            Some((s, i)) => {
                let cluster = &mut clusters[i];
                let st = cluster.ct.meet(nt);
                for dest in cluster.ct.minus(&st) {
                    steps.push(PlanStep::Deliver {
                        source: Source::Cluster(i as u32),
                        dest,
                    });
                }
                for dest in nt.minus(&st) {
                    steps.push(PlanStep::Deliver {
                        source: Source::Group(g),
                        dest,
                    });
                }
                steps.push(PlanStep::Absorb {
                    cluster: i as u32,
                    group: g,
                    saving: s,
                });
                ct_cards[i] = st.cardinality() as i64;
                sizes[i] += 1;
                cts[i] = st.clone();
                cluster.ct = st;
                cluster.members.push(g);
            }
            None => {
                let id = clusters.len() as u32;
                ct_cards.push(nt_card);
                sizes.push(1);
                cts.push(nt.clone());
                steps.push(PlanStep::Found { cluster: id, group: g });
                clusters.push(Cluster {
                    ct: nt.clone(),
                    members: vec![g],
                });
            }
        }
    }
    for (i, c) in clusters.iter().enumerate() {
        steps.push(PlanStep::Deliver {
            source: Source::Cluster(i as u32),
            dest: c.ct.clone(),
        });
    }
    AggPlan {
        groups: groups.to_vec(),
        steps,
        clusters,
        threshold,
    }
}

impl<T: SubgraphSet> AggPlan<T> {
    /// Subgraph-level deliveries the plan performs, ignoring how many keyed
    /// values each pre-aggregate holds.
    pub fn delivery_pairs(&self) -> u64 {
        self.steps
            .iter()
            .map(|s| match s {
                PlanStep::Deliver { dest, .. } => dest.cardinality() as u64,
                _ => 0,
            })
            .sum()
    }

    /// Checks that every group reaches each subgraph of its set exactly once
    /// and nothing else, and that every admission had a positive saving.
    pub fn audit(&self) -> Result<(), PlanError> {
        let mut members: Vec<Vec<u32>> = Vec::new();
        let mut hits: Vec<FxHashMap<(usize, usize), u32>> = vec![FxHashMap::default(); self.groups.len()];
        let check_group = |g: u32| {
            if (g as usize) < self.groups.len() {
                Ok(())
            } else {
                Err(PlanError::Dangling(format!("group {g}")))
            }
        };
        for step in &self.steps {
            match step {
                PlanStep::Found { cluster, group } => {
                    check_group(*group)?;
                    if *cluster as usize != members.len() {
                        return Err(PlanError::Dangling(format!("cluster {cluster}")));
                    }
                    members.push(vec![*group]);
                }
                PlanStep::Absorb { cluster, group, saving } => {
                    check_group(*group)?;
                    if *saving <= 0 {
                        return Err(PlanError::Unprofitable {
                            group: *group,
                            cluster: *cluster,
                            saving: *saving,
                        });
                    }
                    members
                        .get_mut(*cluster as usize)
                        .ok_or_else(|| PlanError::Dangling(format!("cluster {cluster}")))?
                        .push(*group);
                }
                PlanStep::Deliver { source, dest } => {
                    let targets = match source {
                        Source::Group(g) => {
                            check_group(*g)?;
                            vec![*g]
                        }
                        Source::Cluster(c) => members
                            .get(*c as usize)
                            .ok_or_else(|| PlanError::Dangling(format!("cluster {c}")))?
                            .clone(),
                    };
                    for g in targets {
                        let h = &mut hits[g as usize];
                        dest.for_each_pair(|x, y| *h.entry((x, y)).or_default() += 1);
                    }
                }
            }
        }
        for (g, set) in self.groups.iter().enumerate() {
            let g32 = g as u32;
            let mut seen = 0usize;
            for (&(x, y), &count) in &hits[g] {
                if !set.contains_pair(x, y) {
                    return Err(PlanError::Stray { group: g32, x, y });
                }
                if count != 1 {
                    return Err(PlanError::Overlap { group: g32, x, y, count });
                }
                seen += 1;
            }
            if seen != set.cardinality() {
                let mut gap = None;
                set.for_each_pair(|x, y| {
                    if gap.is_none() && !hits[g].contains_key(&(x, y)) {
                        gap = Some((x, y));
                    }
                });
                let (x, y) = gap.expect("fewer hits than pairs implies a gap");
                return Err(PlanError::Gap { group: g32, x, y });
            }
        }
        Ok(())
    }
}

/// Runs `plan` over the table it was built from. Group pre-aggregates are
/// formed first; folding each element after the first into its group counts
/// one merge per keyed value.
pub fn execute_plan<T: SubgraphSet>(plan: &AggPlan<T>, table: &ElementTable<T>) -> Result<AggOutcome, PlanError> {
    if plan.groups.len() != table.sets().len() {
        return Err(PlanError::Mismatch {
            plan: plan.groups.len(),
            table: table.sets().len(),
        });
    }
    let mut ops = OpStats::default();
    let mut groups = vec![Partial::default(); plan.groups.len()];
    let mut started = vec![false; plan.groups.len()];
    for e in 0..table.len() {
        let g = table.group_of(e) as usize;
        let folded = groups[g].add_entries(table.entries(e));
        if started[g] {
            ops.merges += folded;
        }
        started[g] = true;
    }
    run_steps(plan, &groups, table.hub_count(), ops)
}

fn run_steps<T: SubgraphSet>(
    plan: &AggPlan<T>,
    groups: &[Partial],
    hub_count: usize,
    mut ops: OpStats,
) -> Result<AggOutcome, PlanError> {
    let mut aggregates = SubgraphAggregates::new(hub_count);
    let mut clusters: Vec<Partial> = Vec::with_capacity(plan.clusters.len());
    for step in &plan.steps {
        match step {
            PlanStep::Found { cluster, group } => {
                if *cluster as usize != clusters.len() {
                    return Err(PlanError::Dangling(format!("cluster {cluster}")));
                }
                clusters.push(groups[*group as usize].clone());
            }
            PlanStep::Absorb { cluster, group, .. } => {
                let c = clusters
                    .get_mut(*cluster as usize)
                    .ok_or_else(|| PlanError::Dangling(format!("cluster {cluster}")))?;
                ops.merges += c.merge(&groups[*group as usize]);
            }
            PlanStep::Deliver { source, dest } => {
                let p = match source {
                    Source::Group(g) => &groups[*g as usize],
                    Source::Cluster(c) => clusters
                        .get(*c as usize)
                        .ok_or_else(|| PlanError::Dangling(format!("cluster {c}")))?,
                };
                ops.deliveries += aggregates.deliver(dest, p);
            }
        }
    }
    Ok(AggOutcome { aggregates, ops })
}
