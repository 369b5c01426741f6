//! Hub selection over a subgraph of interest.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph_store::{Direction, Vid};
use crate::reachability::{bfs_distances, UNREACHABLE};
use crate::view::SubgraphView;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HubError {
    #[error("unknown vertex attribute `{0}`")]
    UnknownAttribute(String),
    #[error("attribute `{attr}` cannot be compared with `{value}`")]
    BadValue { attr: String, value: String },
    #[error("vertex `{0}` is not in the subgraph")]
    UnknownVertex(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HubOrigin {
    /// Chosen by the selection function.
    Selected,
    /// A vertex argument of the source function.
    Anchor,
}

/// Hubs in display order: anchors first, then selected vertices, without
/// duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct HubSet {
    vids: Vec<Vid>,
    origins: Vec<HubOrigin>,
}

impl HubSet {
    pub fn new(anchors: &[Vid], selected: &[Vid]) -> Self {
        let mut set = Self::default();
        for &v in anchors {
            set.push(v, HubOrigin::Anchor);
        }
        for &v in selected {
            set.push(v, HubOrigin::Selected);
        }
        set
    }

    fn push(&mut self, vid: Vid, origin: HubOrigin) {
        if !self.vids.contains(&vid) {
            self.vids.push(vid);
            self.origins.push(origin);
        }
    }

    pub fn vids(&self) -> &[Vid] {
        &self.vids
    }

    pub fn origin(&self, i: usize) -> HubOrigin {
        self.origins[i]
    }

    pub fn len(&self) -> usize {
        self.vids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vids.is_empty()
    }

    pub fn position(&self, vid: Vid) -> Option<usize> {
        self.vids.iter().position(|&v| v == vid)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeMode {
    /// In-degree plus out-degree.
    #[default]
    Total,
    Out,
}

/// The `k` vertices of highest degree in `view`, ties by smaller vid. Returns
/// local ids.
pub fn top_max_degree(view: &SubgraphView, k: usize, mode: DegreeMode) -> Vec<u32> {
    let g = view.topology();
    let degree = |v: u32| match mode {
        DegreeMode::Total => g.in_degree(v) + g.out_degree(v),
        DegreeMode::Out => g.out_degree(v),
    };
    let mut all: Vec<u32> = (0..view.vertex_count() as u32).collect();
    // local order is vid order, so the id is the tie-break
    all.sort_by_key(|&v| (std::cmp::Reverse(degree(v)), v));
    all.truncate(k);
    all
}

/// Closeness as a rational: vertices reached over the sum of their hop
/// distances. Zero when nothing else is reachable.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Closeness {
    pub reached: u64,
    pub total_distance: u64,
}

impl Closeness {
    pub fn value(&self) -> f64 {
        if self.reached == 0 {
            0.0
        } else {
            self.reached as f64 / self.total_distance as f64
        }
    }
}

impl Ord for Closeness {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.reached, other.reached) {
            (0, 0) => Ordering::Equal,
            (0, _) => Ordering::Less,
            (_, 0) => Ordering::Greater,
            (a, c) => {
                let lhs = a as u128 * other.total_distance as u128;
                let rhs = c as u128 * self.total_distance as u128;
                lhs.cmp(&rhs)
            }
        }
    }
}

impl PartialOrd for Closeness {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Closeness of local vertex `v` within `view`.
pub fn closeness_centrality(view: &SubgraphView, v: u32) -> Closeness {
    let dist = bfs_distances(view.topology(), v, Direction::Forward, None);
    let mut c = Closeness::default();
    for (w, &d) in dist.iter().enumerate() {
        if w as u32 != v && d != UNREACHABLE {
            c.reached += 1;
            c.total_distance += d as u64;
        }
    }
    c
}

/// Closeness of every vertex of `view`, by local id.
pub fn all_closeness(view: &SubgraphView) -> Vec<Closeness> {
    (0..view.vertex_count() as u32)
        .into_par_iter()
        .map(|v| closeness_centrality(view, v))
        .collect()
}

/// Closeness precomputed on a root graph, with vertices kept sorted by
/// descending value so top-k needs no scan of the values.
#[derive(Debug, Clone)]
pub struct StaticCloseness {
    values: Vec<Closeness>,
    ranked: Vec<u32>,
}

impl StaticCloseness {
    /// `view` should be the whole root graph.
    pub fn build(view: &SubgraphView) -> Self {
        let values = all_closeness(view);
        let mut ranked: Vec<u32> = (0..values.len() as u32).collect();
        ranked.sort_by(|&a, &b| values[b as usize].cmp(&values[a as usize]).then(a.cmp(&b)));
        let ranked = ranked.into_iter().map(|v| view.root_vertex(v)).collect();
        let mut by_root = vec![Closeness::default(); view.root().vertex_count()];
        for (v, c) in values.into_iter().enumerate() {
            by_root[view.root_vertex(v as u32) as usize] = c;
        }
        Self {
            values: by_root,
            ranked,
        }
    }

    /// Stored value of a root vertex.
    pub fn value(&self, root_idx: u32) -> Closeness {
        self.values[root_idx as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureMode {
    /// Ranked by values computed once on the root graph.
    Static,
    /// Recomputed inside the current view.
    Dynamic,
}

/// The `k` vertices of highest closeness, ties by smaller vid. Static mode
/// needs the root-graph index. Returns local ids.
pub fn top_k_closeness(view: &SubgraphView, k: usize, mode: MeasureMode, index: Option<&StaticCloseness>) -> Vec<u32> {
    match (mode, index) {
        (MeasureMode::Static, Some(idx)) => idx
            .ranked
            .iter()
            .filter_map(|&r| view.local_of_root(r))
            .take(k)
            .collect(),
        _ => {
            let values = all_closeness(view);
            let mut all: Vec<u32> = (0..values.len() as u32).collect();
            all.sort_by(|&a, &b| values[b as usize].cmp(&values[a as usize]).then(a.cmp(&b)));
            all.truncate(k);
            all
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    Equals,
    Above,
}

/// A comparison of one vertex attribute against a literal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttrPredicate {
    pub attr: String,
    pub cmp: Comparison,
    pub value: String,
}

/// All vertices of `view` satisfying `pred`, in vid order. Attributes are
/// `vid`, `v_grp`, `v_mr` and `label` (alias `name`).
pub fn select_by_attribute(view: &SubgraphView, pred: &AttrPredicate) -> Result<Vec<u32>, HubError> {
    let bad = || HubError::BadValue {
        attr: pred.attr.clone(),
        value: pred.value.clone(),
    };
    let numeric = |f: fn(&crate::graph_store::Vertex) -> i128| -> Result<Vec<u32>, HubError> {
        let target: i128 = pred.value.parse().map_err(|_| bad())?;
        Ok((0..view.vertex_count() as u32)
            .filter(|&v| {
                let x = f(view.vertex(v));
                match pred.cmp {
                    Comparison::Equals => x == target,
                    Comparison::Above => x > target,
                }
            })
            .collect())
    };
    match pred.attr.to_ascii_lowercase().as_str() {
        "vid" => numeric(|v| v.vid as i128),
        "v_grp" => numeric(|v| v.grp as i128),
        "v_mr" => numeric(|v| v.mr as i128),
        "label" | "name" => Ok((0..view.vertex_count() as u32)
            .filter(|&v| match view.vertex(v).label.as_deref() {
                Some(l) => match pred.cmp {
                    Comparison::Equals => l == pred.value,
                    Comparison::Above => l > pred.value.as_str(),
                },
                None => false,
            })
            .collect()),
        _ => Err(HubError::UnknownAttribute(pred.attr.clone())),
    }
}
