//! Query execution: subgraph of interest, hubs, tags, aggregation and the
//! resulting hub graph, plus zoom navigation.

use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use super::catalog::{Grouping, QuerySpec, SelectorSpec, SourceSpec, SummarySpec};
use super::dataset::Dataset;
use crate::aggregation::function::{push_edge_entries, push_vertex_entries};
use crate::aggregation::structural::{path_with_distances, relationship_strength, width_bands, PathSummary};
use crate::aggregation::{
    build_as_plan, execute_plan, sn_aggregate, AggFunction, AggOutcome, AggValue, CombineOp, Dimensions,
    ElementKind, ElementTable, OpStats, PlanError, SubgraphAggregates, DEFAULT_THRESHOLD,
};
use crate::extraction::{
    compute_tags_bounded, compute_tags_indexed, compute_tags_propagation, edge_tag, extract_path_subgraph,
    BoundedTags, ExtractError, SubgraphSet, Tag,
};
use crate::graph_store::{CondensedGraph, Direction, Group, Measure, SccDag, Vid};
use crate::hubs::{select_by_attribute, top_k_closeness, top_max_degree, HubError, HubOrigin, HubSet};
use crate::reachability::{bfs_distances, build_tc_index, ReachIndex, DEFAULT_TC_CAP};
use crate::view::{SubgraphView, ViewOrigin};

#[derive(Debug, Error)]
pub enum ExecError {
    #[error("vertex `{0}` not found in the subgraph of interest")]
    UnknownVertex(String),
    #[error(transparent)]
    Hub(#[from] HubError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error("aggregation plan rejected: {0}")]
    Plan(#[from] PlanError),
    #[error("no edge between hubs {x} and {y}")]
    UnknownEdge { x: Vid, y: Vid },
    #[error("vertex {0} is not a hub of this graph")]
    NotAHub(Vid),
    #[error("subset zoom needs at least two hubs, got {0}")]
    SubsetTooSmall(usize),
}

/// Which aggregation algorithm computes measure summaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Strategy {
    SharedNothing,
    /// Sharing plan; sets below `threshold` subgraphs bypass clustering.
    Sharing { threshold: usize },
}

impl Default for Strategy {
    fn default() -> Self {
        Self::Sharing {
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TagMethod {
    /// Closure-index probes, falling back to propagation above the size cap.
    #[default]
    Indexed,
    Propagation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecOptions {
    pub strategy: Strategy,
    pub tag_method: TagMethod,
    /// Audit the sharing plan before running it.
    pub verify_plan: bool,
    pub tc_cap: usize,
}

impl Default for ExecOptions {
    fn default() -> Self {
        Self {
            strategy: Strategy::default(),
            tag_method: TagMethod::default(),
            verify_plan: false,
            tc_cap: DEFAULT_TC_CAP,
        }
    }
}

/// Wall time per pipeline phase, in seconds. `total` spans tagging through
/// aggregation; hub selection is timed on its own.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct PhaseTimes {
    pub select: f64,
    pub tag: f64,
    pub sg_ext: f64,
    pub plan: f64,
    pub agg: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ExecStats {
    pub times: PhaseTimes,
    pub ops: OpStats,
    /// What the shared-nothing baseline would spend on the same table.
    pub sn_ops: u64,
    pub elements: usize,
    pub groups: usize,
    pub clusters: usize,
    pub components: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HubInfo {
    pub vid: Vid,
    pub name: Option<String>,
    pub v_grp: Group,
    pub v_mr: Measure,
    pub origin: HubOrigin,
}

/// One row of a grouped summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupRow {
    pub group_key: Vec<String>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SummaryValue {
    Scalar(f64),
    Table(Vec<GroupRow>),
    Path {
        distance: Option<u32>,
        labels: Vec<String>,
        vertices: Vec<Vid>,
        text: String,
    },
}

impl SummaryValue {
    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            Self::Scalar(v) => Some(*v),
            _ => None,
        }
    }

    /// Value of the row whose key joins to `key`.
    pub fn row(&self, key: &str) -> Option<f64> {
        match self {
            Self::Table(rows) => rows.iter().find(|r| r.group_key.join(",") == key).map(|r| r.value),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HaEdge {
    pub src: Vid,
    pub dst: Vid,
    pub summaries: Vec<(String, SummaryValue)>,
    pub width_band: u8,
}

impl HaEdge {
    pub fn summary(&self, name: &str) -> Option<&SummaryValue> {
        self.summaries.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

#[derive(Debug, Clone)]
enum Membership {
    Reach { scc: Arc<SccDag>, tags: Vec<Tag> },
    Bounded(BoundedTags),
}

/// The hub graph a query produces, with what is needed to zoom into it.
#[derive(Debug, Clone)]
pub struct HaGraph {
    pub hubs: Vec<HubInfo>,
    pub edges: Vec<HaEdge>,
    pub stats: ExecStats,
    pub spec: QuerySpec,
    view: Arc<SubgraphView>,
    hub_locals: Vec<u32>,
    membership: Membership,
    aggregates: SubgraphAggregates,
    functions: Vec<AggFunction>,
}

/// Executes a query over a dataset.
pub fn execute(ds: &Dataset, spec: &QuerySpec, opts: &ExecOptions) -> Result<HaGraph, ExecError> {
    let whole = ds.whole().clone();
    match &spec.source {
        SourceSpec::Whole { .. } => run(ds, whole, &[], spec, opts),
        SourceSpec::Between { a, b, hops, .. } => {
            let la = whole.resolve(a).ok_or_else(|| ExecError::UnknownVertex(a.clone()))?;
            let lb = whole.resolve(b).ok_or_else(|| ExecError::UnknownVertex(b.clone()))?;
            let view = Arc::new(extract_path_subgraph(&whole, la, lb, *hops));
            run(ds, view, &[whole.vid(la), whole.vid(lb)], spec, opts)
        }
    }
}

/// Parameters a zoom may change; everything else is inherited.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ZoomOverrides {
    pub k: Option<usize>,
    pub selector: Option<SelectorSpec>,
    pub grouping: Option<Grouping>,
}

impl ZoomOverrides {
    fn apply(&self, parent: &QuerySpec) -> QuerySpec {
        let mut spec = parent.clone();
        if let Some(s) = &self.selector {
            spec.selector = s.clone();
        }
        if let Some(k) = self.k {
            spec.selector = spec.selector.with_k(k);
        }
        if let Some(g) = self.grouping {
            spec.grouping = g;
        }
        spec
    }
}

/// Re-runs the parent's query over the subgraph of edge `(x, y)` with `x`
/// and `y` as anchors.
pub fn zoom_edge(
    ds: &Dataset,
    parent: &HaGraph,
    x: Vid,
    y: Vid,
    overrides: &ZoomOverrides,
    opts: &ExecOptions,
) -> Result<HaGraph, ExecError> {
    let view = Arc::new(parent.edge_view(x, y)?);
    run(ds, view, &[x, y], &overrides.apply(&parent.spec), opts)
}

/// Re-runs the parent's query over the union of the subgraphs among `vids`.
pub fn zoom_subset(
    ds: &Dataset,
    parent: &HaGraph,
    vids: &[Vid],
    overrides: &ZoomOverrides,
    opts: &ExecOptions,
) -> Result<HaGraph, ExecError> {
    let mut uniq: Vec<Vid> = Vec::new();
    for &v in vids {
        parent.hub_position(v).ok_or(ExecError::NotAHub(v))?;
        if !uniq.contains(&v) {
            uniq.push(v);
        }
    }
    if uniq.len() < 2 {
        return Err(ExecError::SubsetTooSmall(uniq.len()));
    }
    let mut parts = Vec::new();
    for &x in &uniq {
        for &y in &uniq {
            if x != y && parent.edge(x, y).is_some() {
                parts.push(parent.edge_view(x, y)?);
            }
        }
    }
    let root = parent.view.root().clone();
    let hubs_only = SubgraphView::from_root_indices(
        root.clone(),
        uniq.iter().filter_map(|&v| root.index_of(v)).collect(),
        vec![],
        ViewOrigin::Custom,
    );
    parts.push(hubs_only);
    let view = SubgraphView::union(&parts, ViewOrigin::HubSubset { hubs: uniq.clone() }).expect("non-empty");
    run(ds, Arc::new(view), &uniq, &overrides.apply(&parent.spec), opts)
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

/// Internal function slots appended after the query's own measures.
struct Slots {
    measures: Vec<Option<usize>>,
    vertex_count: Option<usize>,
    edge_count: Option<usize>,
}

fn functions_for(summaries: &[SummarySpec]) -> (Vec<AggFunction>, Slots) {
    let mut fns = Vec::new();
    let measures = summaries
        .iter()
        .map(|s| match s {
            SummarySpec::Measure { function, .. } => {
                fns.push(function.clone());
                Some(fns.len() - 1)
            }
            _ => None,
        })
        .collect();
    let mut internal = |needed: bool, name: &str, kind: ElementKind| {
        needed.then(|| {
            fns.push(AggFunction::new(name, kind, Dimensions::None, CombineOp::Count).expect("valid"));
            fns.len() - 1
        })
    };
    let vertex_count = internal(
        summaries.contains(&SummarySpec::VertexCount),
        "vertexCount",
        ElementKind::Vertex,
    );
    let edge_count = internal(
        summaries.contains(&SummarySpec::RelationshipStrength),
        "edgeCount",
        ElementKind::Edge,
    );
    (
        fns,
        Slots {
            measures,
            vertex_count,
            edge_count,
        },
    )
}

fn select(ds: &Dataset, view: &SubgraphView, selector: &SelectorSpec) -> Result<Vec<u32>, ExecError> {
    Ok(match selector {
        SelectorSpec::TopDegree { k, mode } => top_max_degree(view, *k, *mode),
        SelectorSpec::TopCloseness { k, mode } => {
            let index = matches!(mode, crate::hubs::MeasureMode::Static).then(|| ds.static_closeness());
            top_k_closeness(view, *k, *mode, index)
        }
        SelectorSpec::Attr(p) => select_by_attribute(view, p)?,
    })
}

fn table_stats<T: SubgraphSet>(table: &ElementTable<T>, stats: &mut ExecStats) {
    stats.elements = table.len();
    stats.groups = table.sets().len();
    stats.sn_ops = table.sn_closed_form();
}

/// Runs the chosen strategy. The table is consumed so that freeing it counts
/// towards aggregation time.
fn aggregate<T: SubgraphSet>(
    table: ElementTable<T>,
    opts: &ExecOptions,
    times: &mut PhaseTimes,
    stats: &mut ExecStats,
) -> Result<AggOutcome, ExecError> {
    match opts.strategy {
        Strategy::SharedNothing => {
            let t = Instant::now();
            let out = sn_aggregate(&table);
            drop(table);
            times.agg += secs(t.elapsed());
            Ok(out)
        }
        Strategy::Sharing { threshold } => {
            let t = Instant::now();
            let plan = build_as_plan(table.sets(), threshold);
            if opts.verify_plan {
                plan.audit()?;
            }
            times.plan = secs(t.elapsed());
            stats.clusters = plan.clusters.len();
            let t = Instant::now();
            let out = execute_plan(&plan, &table)?;
            drop((plan, table));
            times.agg += secs(t.elapsed());
            Ok(out)
        }
    }
}

fn run(
    ds: &Dataset,
    view: Arc<SubgraphView>,
    anchors: &[Vid],
    spec: &QuerySpec,
    opts: &ExecOptions,
) -> Result<HaGraph, ExecError> {
    let mut times = PhaseTimes::default();
    let mut stats = ExecStats::default();

    let t = Instant::now();
    let selected: Vec<Vid> = select(ds, &view, &spec.selector)?
        .into_iter()
        .map(|l| view.vid(l))
        .collect();
    let hub_set = HubSet::new(anchors, &selected);
    let hub_locals: Vec<u32> = hub_set
        .vids()
        .iter()
        .map(|&v| {
            view.local_of_vid(v)
                .ok_or_else(|| ExecError::UnknownVertex(v.to_string()))
        })
        .collect::<Result<_, _>>()?;
    times.select = secs(t.elapsed());

    let (functions, slots) = functions_for(&spec.summaries);
    let k = hub_locals.len();
    let start = Instant::now();

    let (membership, outcome) = match spec.grouping {
        Grouping::Betweenness => {
            let t = Instant::now();
            let scc = if view.is_whole() {
                ds.scc().clone()
            } else {
                Arc::new(SccDag::build(view.topology()))
            };
            let hub_comps: Vec<u32> = hub_locals.iter().map(|&v| scc.component_of(v)).collect();
            let tags = match opts.tag_method {
                TagMethod::Propagation => compute_tags_propagation(scc.dag(), &hub_comps)?,
                TagMethod::Indexed => {
                    let owned;
                    let idx: Option<&dyn ReachIndex> = match ds.tc_index() {
                        Some(tc) if view.is_whole() => Some(tc.as_ref()),
                        _ => {
                            owned = build_tc_index(scc.dag(), opts.tc_cap).ok();
                            owned.as_ref().map(|t| t as &dyn ReachIndex)
                        }
                    };
                    match idx {
                        Some(idx) => compute_tags_indexed(scc.dag(), &hub_comps, idx)?,
                        None => compute_tags_propagation(scc.dag(), &hub_comps)?,
                    }
                }
            };
            times.tag = secs(t.elapsed());
            stats.components = scc.component_count();

            let t = Instant::now();
            let condensed = CondensedGraph::with_scc(&view, scc.clone(), &functions);
            let mut table = ElementTable::<Tag>::new(k);
            let mut scratch = Vec::new();
            for c in 0..scc.component_count() as u32 {
                scratch.clear();
                scratch.extend_from_slice(condensed.vertex_pre(c));
                scratch.extend_from_slice(condensed.intra_edge_pre(c));
                table.push(&tags[c as usize], &scratch);
            }
            for &e in scc.inter_edges() {
                let edge = view.edge(e);
                let (s, t) = view.topology().arc(e);
                scratch.clear();
                push_edge_entries(&functions, view.root().vertex(edge.src).grp, edge, &mut scratch);
                let et = edge_tag(&tags, scc.component_of(s), scc.component_of(t));
                table.push(&et, &scratch);
            }
            drop(condensed);
            table_stats(&table, &mut stats);
            times.sg_ext = secs(t.elapsed());
            let outcome = aggregate(table, opts, &mut times, &mut stats)?;
            (Membership::Reach { scc, tags }, outcome)
        }
        Grouping::Bounded { hops, bound } => {
            let t = Instant::now();
            let bt = compute_tags_bounded(view.topology(), &hub_locals, hops, bound)?;
            times.tag = secs(t.elapsed());
            stats.components = view.vertex_count();

            let t = Instant::now();
            let mut table = ElementTable::new(k);
            let mut scratch = Vec::new();
            for v in 0..view.vertex_count() as u32 {
                scratch.clear();
                push_vertex_entries(&functions, view.vertex(v), &mut scratch);
                table.push(&bt.vertices[v as usize], &scratch);
            }
            for e in 0..view.edge_count() as u32 {
                let edge = view.edge(e);
                scratch.clear();
                push_edge_entries(&functions, view.root().vertex(edge.src).grp, edge, &mut scratch);
                table.push(&bt.edges[e as usize], &scratch);
            }
            table_stats(&table, &mut stats);
            times.sg_ext = secs(t.elapsed());
            let outcome = aggregate(table, opts, &mut times, &mut stats)?;
            (Membership::Bounded(bt), outcome)
        }
    };
    stats.ops = outcome.ops;

    let t = Instant::now();
    let mut graph = HaGraph {
        hubs: hub_set
            .vids()
            .iter()
            .enumerate()
            .map(|(i, &vid)| {
                let v = view.vertex(hub_locals[i]);
                HubInfo {
                    vid,
                    name: v.label.clone(),
                    v_grp: v.grp,
                    v_mr: v.mr,
                    origin: hub_set.origin(i),
                }
            })
            .collect(),
        edges: vec![],
        stats,
        spec: spec.clone(),
        view,
        hub_locals,
        membership,
        aggregates: outcome.aggregates,
        functions,
    };
    graph.edges = graph.summarize(&slots)?;
    times.agg += secs(t.elapsed());
    times.total = secs(start.elapsed());
    graph.stats.times = times;
    Ok(graph)
}

impl HaGraph {
    pub fn view(&self) -> &Arc<SubgraphView> {
        &self.view
    }

    pub fn hub_vids(&self) -> Vec<Vid> {
        self.hubs.iter().map(|h| h.vid).collect()
    }

    pub fn hub_position(&self, vid: Vid) -> Option<usize> {
        self.hubs.iter().position(|h| h.vid == vid)
    }

    pub fn edge(&self, x: Vid, y: Vid) -> Option<&HaEdge> {
        self.edges.iter().find(|e| e.src == x && e.dst == y)
    }

    pub fn aggregates(&self) -> &SubgraphAggregates {
        &self.aggregates
    }

    pub fn functions(&self) -> &[AggFunction] {
        &self.functions
    }

    fn present(&self, x: usize, y: usize) -> bool {
        match &self.membership {
            Membership::Reach { scc, tags } => {
                tags[scc.component_of(self.hub_locals[y]) as usize].s.contains(x)
            }
            Membership::Bounded(bt) => bt.vertices.iter().any(|p| p.contains(x, y)),
        }
    }

    fn pair_view(&self, x: usize, y: usize) -> SubgraphView {
        let origin = ViewOrigin::HubPair {
            x: self.hubs[x].vid,
            y: self.hubs[y].vid,
        };
        match &self.membership {
            Membership::Reach { scc, tags } => {
                let comp = |v: u32| &tags[scc.component_of(v) as usize];
                self.view.restrict(
                    |v| comp(v).contains(x, y),
                    |e| {
                        let (s, t) = self.view.topology().arc(e);
                        comp(s).s.contains(x) && comp(t).r.contains(y)
                    },
                    origin,
                )
            }
            Membership::Bounded(bt) => self.view.restrict(
                |v| bt.vertices[v as usize].contains(x, y),
                |e| bt.edges[e as usize].contains(x, y),
                origin,
            ),
        }
    }

    /// The induced subgraph behind edge `(x, y)`.
    pub fn edge_view(&self, x: Vid, y: Vid) -> Result<SubgraphView, ExecError> {
        let missing = || ExecError::UnknownEdge { x, y };
        let px = self.hub_position(x).ok_or_else(missing)?;
        let py = self.hub_position(y).ok_or_else(missing)?;
        if px == py || !self.present(px, py) {
            return Err(missing());
        }
        Ok(self.pair_view(px, py))
    }

    fn count(&self, slot: Option<usize>, x: usize, y: usize) -> u64 {
        slot.and_then(|f| self.aggregates.get(x, y).get(f as u16, Default::default()))
            .map_or(0, |v| match v {
                AggValue::Count(c) => *c,
                _ => 0,
            })
    }

    fn measure_value(&self, func: usize, x: usize, y: usize) -> SummaryValue {
        let f = &self.functions[func];
        let cell = self.aggregates.get(x, y);
        let mut rows: Vec<_> = cell
            .iter()
            .filter(|(fi, _, _)| *fi as usize == func)
            .map(|(_, key, v)| (key, *v))
            .collect();
        if f.dims() == Dimensions::None {
            return SummaryValue::Scalar(rows.first().map_or(0.0, |(_, v)| v.value()));
        }
        rows.sort_by_key(|(key, _)| *key);
        SummaryValue::Table(
            rows.into_iter()
                .map(|(key, v)| GroupRow {
                    group_key: f.key_values(key),
                    value: v.value(),
                })
                .collect(),
        )
    }

    fn summarize(&self, slots: &Slots) -> Result<Vec<HaEdge>, ExecError> {
        let k = self.hubs.len();
        let wants_paths = self
            .spec
            .summaries
            .iter()
            .any(|s| matches!(s, SummarySpec::RelationshipType | SummarySpec::RelationshipStrength));
        let bounded = matches!(self.membership, Membership::Bounded(_));
        // Under plain reachability every shortest x-y path of the parent view
        // lies inside the pair's subgraph, so one reverse search per target
        // hub serves all pairs.
        let to_hub: Vec<Vec<u32>> = if wants_paths && !bounded {
            self.hub_locals
                .iter()
                .map(|&h| bfs_distances(self.view.topology(), h, Direction::Reverse, None))
                .collect()
        } else {
            vec![]
        };

        let mut edges = Vec::new();
        let mut strengths = Vec::new();
        for x in 0..k {
            for y in 0..k {
                if x == y || !self.present(x, y) {
                    continue;
                }
                let path = if !wants_paths {
                    None
                } else if bounded {
                    let pv = self.pair_view(x, y);
                    let lx = pv.local_of_vid(self.hubs[x].vid).expect("hub in its own subgraph");
                    let ly = pv.local_of_vid(self.hubs[y].vid);
                    Some(match ly {
                        Some(ly) => {
                            let d = bfs_distances(pv.topology(), ly, Direction::Reverse, None);
                            path_with_distances(&pv, lx, &d)
                        }
                        None => PathSummary::unreachable(),
                    })
                } else {
                    Some(path_with_distances(&self.view, self.hub_locals[x], &to_hub[y]))
                };
                let mut strength = None;
                let summaries = self
                    .spec
                    .summaries
                    .iter()
                    .zip(&slots.measures)
                    .map(|(s, slot)| {
                        let value = match s {
                            SummarySpec::Measure { .. } => self.measure_value(slot.expect("measure slot"), x, y),
                            SummarySpec::VertexCount => SummaryValue::Scalar(self.count(slots.vertex_count, x, y) as f64),
                            SummarySpec::RelationshipType => {
                                let p = path.clone().expect("paths computed");
                                SummaryValue::Path {
                                    distance: p.distance,
                                    text: p.label_chain(),
                                    labels: p.labels,
                                    vertices: p.vertices,
                                }
                            }
                            SummarySpec::RelationshipStrength => {
                                let d = path.as_ref().and_then(|p| p.distance);
                                let v = relationship_strength(self.count(slots.edge_count, x, y), d);
                                strength = Some(v);
                                SummaryValue::Scalar(v)
                            }
                        };
                        (s.name().to_string(), value)
                    })
                    .collect();
                strengths.push(strength);
                edges.push(HaEdge {
                    src: self.hubs[x].vid,
                    dst: self.hubs[y].vid,
                    summaries,
                    width_band: 3,
                });
            }
        }
        if strengths.iter().all(Option::is_some) && !strengths.is_empty() {
            let values: Vec<f64> = strengths.into_iter().map(|s| s.unwrap_or(0.0)).collect();
            for (e, band) in edges.iter_mut().zip(width_bands(&values)) {
                e.width_band = band;
            }
        }
        Ok(edges)
    }
}
