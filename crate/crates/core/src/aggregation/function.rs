//! Distributive and algebraic aggregate functions over vertex and edge
//! measures, and the partial aggregates they produce.

use std::fmt;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph_store::{Edge, Group, Measure, Vertex};

/// Which table a function reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    Vertex,
    Edge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombineOp {
    Sum,
    Count,
    Min,
    Max,
    /// Carried as `(sum, count)` and divided when read.
    Avg,
}

impl CombineOp {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s.to_ascii_lowercase().as_str() {
            "sum" => Self::Sum,
            "count" => Self::Count,
            "min" => Self::Min,
            "max" => Self::Max,
            "avg" => Self::Avg,
            _ => return None,
        })
    }
}

/// Thresholds splitting a measure into Low / Middle / High.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Buckets {
    /// Smallest measure counted as Middle.
    pub middle: Measure,
    /// Smallest measure counted as High.
    pub high: Measure,
}

impl Default for Buckets {
    fn default() -> Self {
        Self { middle: 5, high: 20 }
    }
}

impl Buckets {
    pub const NAMES: [&'static str; 3] = ["Low", "Middle", "High"];

    pub fn bucket(&self, m: Measure) -> u32 {
        if m >= self.high {
            2
        } else if m >= self.middle {
            1
        } else {
            0
        }
    }
}

/// Group-by dimensions. For edge functions `v_grp` is the group of the edge's
/// source vertex, obtained by joining the edge table with the vertex table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimensions {
    None,
    VGrp,
    EGrp,
    VGrpEGrp,
    MeasureBucket(Buckets),
}

impl Dimensions {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s.to_ascii_lowercase().as_str() {
            "none" | "" => Self::None,
            "v_grp" | "vgrp" => Self::VGrp,
            "e_grp" | "egrp" => Self::EGrp,
            "v_grp_e_grp" | "vgrpegrp" | "v_grp*e_grp" => Self::VGrpEGrp,
            "bucket" => Self::MeasureBucket(Buckets::default()),
            _ => return None,
        })
    }

    pub fn column_names(&self) -> Vec<&'static str> {
        match self {
            Self::None => vec![],
            Self::VGrp => vec!["v_grp"],
            Self::EGrp => vec!["e_grp"],
            Self::VGrpEGrp => vec!["v_grp", "e_grp"],
            Self::MeasureBucket(_) => vec!["bucket"],
        }
    }
}

/// A group-by key; unused slots are zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct GroupKey(pub u32, pub u32);

/// An accumulator value. Combining is associative and commutative, and
/// [`AggValue::identity`] is neutral for every operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AggValue {
    Sum(i64),
    Count(u64),
    Min(i64),
    Max(i64),
    Avg { sum: i64, count: u64 },
}

impl AggValue {
    pub fn lift(op: CombineOp, m: Measure) -> Self {
        match op {
            CombineOp::Sum => Self::Sum(m),
            CombineOp::Count => Self::Count(1),
            CombineOp::Min => Self::Min(m),
            CombineOp::Max => Self::Max(m),
            CombineOp::Avg => Self::Avg { sum: m, count: 1 },
        }
    }

    pub fn identity(op: CombineOp) -> Self {
        match op {
            CombineOp::Sum => Self::Sum(0),
            CombineOp::Count => Self::Count(0),
            CombineOp::Min => Self::Min(i64::MAX),
            CombineOp::Max => Self::Max(i64::MIN),
            CombineOp::Avg => Self::Avg { sum: 0, count: 0 },
        }
    }

    /// Folds `other` into `self`. Panics if the operators differ.
    pub fn combine(&mut self, other: &AggValue) {
        match (self, other) {
            (Self::Sum(a), Self::Sum(b)) => *a = a.wrapping_add(*b),
            (Self::Count(a), Self::Count(b)) => *a += b,
            (Self::Min(a), Self::Min(b)) => *a = (*a).min(*b),
            (Self::Max(a), Self::Max(b)) => *a = (*a).max(*b),
            (Self::Avg { sum, count }, Self::Avg { sum: s, count: c }) => {
                *sum = sum.wrapping_add(*s);
                *count += c;
            }
            (a, b) => panic!("combining mismatched aggregates {a:?} and {b:?}"),
        }
    }

    /// The finalized value; AVG divides, everything else is exact.
    pub fn value(&self) -> f64 {
        match *self {
            Self::Sum(v) | Self::Min(v) | Self::Max(v) => v as f64,
            Self::Count(c) => c as f64,
            Self::Avg { sum, count } => {
                if count == 0 {
                    0.0
                } else {
                    sum as f64 / count as f64
                }
            }
        }
    }
}

impl fmt::Display for AggValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Sum(v) | Self::Min(v) | Self::Max(v) => write!(f, "{v}"),
            Self::Count(c) => write!(f, "{c}"),
            Self::Avg { .. } => write!(f, "{}", self.value()),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FunctionError {
    #[error("vertex function `{0}` cannot group by edge dimensions")]
    EdgeDimensionOnVertex(String),
}

/// A registered aggregate: which measure it reads, how it groups and how it
/// combines.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AggFunction {
    name: String,
    kind: ElementKind,
    dims: Dimensions,
    op: CombineOp,
}

impl AggFunction {
    pub fn new(
        name: impl Into<String>,
        kind: ElementKind,
        dims: Dimensions,
        op: CombineOp,
    ) -> Result<Self, FunctionError> {
        let name = name.into();
        if kind == ElementKind::Vertex
            && matches!(dims, Dimensions::EGrp | Dimensions::VGrpEGrp | Dimensions::MeasureBucket(_))
        {
            return Err(FunctionError::EdgeDimensionOnVertex(name));
        }
        Ok(Self {
            name,
            kind,
            dims,
            op,
        })
    }

    /// SUM of `v_mr` grouped by `v_grp`: the vertex half of the aggregate
    /// graph over (v_grp, e_grp).
    pub fn sum_v_mr() -> Self {
        Self::new("SumVMrByVGrpEGrp", ElementKind::Vertex, Dimensions::VGrp, CombineOp::Sum)
            .expect("valid")
    }

    /// SUM of `e_mr` grouped by (source `v_grp`, `e_grp`): the edge half of the
    /// aggregate graph.
    pub fn sum_e_mr() -> Self {
        Self::new("SumEMrByVGrpEGrp", ElementKind::Edge, Dimensions::VGrpEGrp, CombineOp::Sum)
            .expect("valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ElementKind {
        self.kind
    }

    pub fn dims(&self) -> Dimensions {
        self.dims
    }

    pub fn op(&self) -> CombineOp {
        self.op
    }

    pub fn vertex_entry(&self, v: &Vertex) -> (GroupKey, AggValue) {
        debug_assert_eq!(self.kind, ElementKind::Vertex);
        let key = match self.dims {
            Dimensions::VGrp => GroupKey(v.grp, 0),
            _ => GroupKey::default(),
        };
        (key, AggValue::lift(self.op, v.mr))
    }

    /// `src_grp` is the `v_grp` of the edge's source vertex.
    pub fn edge_entry(&self, src_grp: Group, e: &Edge) -> (GroupKey, AggValue) {
        debug_assert_eq!(self.kind, ElementKind::Edge);
        let key = match self.dims {
            Dimensions::None => GroupKey::default(),
            Dimensions::VGrp => GroupKey(src_grp, 0),
            Dimensions::EGrp => GroupKey(e.grp, 0),
            Dimensions::VGrpEGrp => GroupKey(src_grp, e.grp),
            Dimensions::MeasureBucket(b) => GroupKey(b.bucket(e.mr), 0),
        };
        (key, AggValue::lift(self.op, e.mr))
    }

    /// Key columns rendered for display.
    pub fn key_values(&self, key: GroupKey) -> Vec<String> {
        match self.dims {
            Dimensions::None => vec![],
            Dimensions::VGrp | Dimensions::EGrp => vec![key.0.to_string()],
            Dimensions::VGrpEGrp => vec![key.0.to_string(), key.1.to_string()],
            Dimensions::MeasureBucket(_) => vec![Buckets::NAMES[key.0 as usize].to_string()],
        }
    }
}

/// Appends the entries vertex `v` contributes to every vertex function in `fns`.
pub fn push_vertex_entries(fns: &[AggFunction], v: &Vertex, out: &mut Vec<Entry>) {
    for (i, f) in fns.iter().enumerate() {
        if f.kind == ElementKind::Vertex {
            let (key, value) = f.vertex_entry(v);
            out.push(Entry { func: i as u16, key, value });
        }
    }
}

/// Appends the entries edge `e` contributes to every edge function in `fns`.
pub fn push_edge_entries(fns: &[AggFunction], src_grp: Group, e: &Edge, out: &mut Vec<Entry>) {
    for (i, f) in fns.iter().enumerate() {
        if f.kind == ElementKind::Edge {
            let (key, value) = f.edge_entry(src_grp, e);
            out.push(Entry { func: i as u16, key, value });
        }
    }
}

/// One keyed value contributed by an element to function `func`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Entry {
    pub func: u16,
    pub key: GroupKey,
    pub value: AggValue,
}

/// A pre-aggregated bundle of keyed values across several functions.
///
/// Every method that folds values in reports the number of add operations it
/// performed: one per keyed value folded.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Partial {
    cells: FxHashMap<(u16, GroupKey), AggValue>,
}

impl Partial {
    pub fn from_entries(entries: &[Entry]) -> Self {
        let mut p = Self::default();
        p.add_entries(entries);
        p
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn add(&mut self, func: u16, key: GroupKey, value: &AggValue) {
        self.cells
            .entry((func, key))
            .and_modify(|v| v.combine(value))
            .or_insert(*value);
    }

    pub fn add_entries(&mut self, entries: &[Entry]) -> u64 {
        for e in entries {
            self.add(e.func, e.key, &e.value);
        }
        entries.len() as u64
    }

    pub fn merge(&mut self, other: &Partial) -> u64 {
        for (&(f, k), v) in &other.cells {
            self.add(f, k, v);
        }
        other.len() as u64
    }

    pub fn get(&self, func: u16, key: GroupKey) -> Option<&AggValue> {
        self.cells.get(&(func, key))
    }

    pub fn iter(&self) -> impl Iterator<Item = (u16, GroupKey, &AggValue)> {
        self.cells.iter().map(|(&(f, k), v)| (f, k, v))
    }

    /// Entries in `(func, key)` order.
    pub fn sorted(&self) -> Vec<(u16, GroupKey, AggValue)> {
        let mut out: Vec<_> = self.iter().map(|(f, k, v)| (f, k, *v)).collect();
        out.sort_by_key(|&(f, k, _)| (f, k));
        out
    }

    pub fn to_entries(&self) -> Vec<Entry> {
        self.sorted()
            .into_iter()
            .map(|(func, key, value)| Entry { func, key, value })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_function_rejects_edge_dimensions() {
        let err = AggFunction::new("x", ElementKind::Vertex, Dimensions::EGrp, CombineOp::Sum);
        assert!(err.is_err());
        assert!(AggFunction::new("x", ElementKind::Vertex, Dimensions::VGrp, CombineOp::Max).is_ok());
    }

    #[test]
    fn identity_is_neutral() {
        for op in [CombineOp::Sum, CombineOp::Count, CombineOp::Min, CombineOp::Max, CombineOp::Avg] {
            let v = AggValue::lift(op, 17);
            let mut a = AggValue::identity(op);
            a.combine(&v);
            assert_eq!(a, v);
        }
    }

    #[test]
    fn avg_is_sum_over_count() {
        let mut a = AggValue::lift(CombineOp::Avg, 3);
        a.combine(&AggValue::lift(CombineOp::Avg, 6));
        assert_eq!(a, AggValue::Avg { sum: 9, count: 2 });
        assert_eq!(a.value(), 4.5);
    }

    #[test]
    fn buckets_split_at_thresholds() {
        let b = Buckets { middle: 5, high: 20 };
        assert_eq!(b.bucket(4), 0);
        assert_eq!(b.bucket(5), 1);
        assert_eq!(b.bucket(19), 1);
        assert_eq!(b.bucket(20), 2);
    }

    #[test]
    fn partial_merge_counts_keyed_values() {
        let e = |k, v| Entry {
            func: 0,
            key: GroupKey(k, 0),
            value: AggValue::Sum(v),
        };
        let mut a = Partial::from_entries(&[e(1, 2), e(2, 3)]);
        let b = Partial::from_entries(&[e(1, 5)]);
        assert_eq!(a.merge(&b), 1);
        assert_eq!(a.get(0, GroupKey(1, 0)), Some(&AggValue::Sum(7)));
        assert_eq!(a.len(), 2);
    }
}
