//! HTTP API: dataset listing, query execution, zoom navigation and edge
//! details over a session store of hub graphs.

mod manifest;
mod session;

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use hubgraph_core::extraction::HopBound;
use hubgraph_core::graph_store::Vid;
use hubgraph_core::hubs::HubOrigin;
use hubgraph_core::query::{
    execute, parse, zoom_edge, zoom_subset, DatasetInfo, ExecError, ExecOptions, ExecStats, Grouping, HaGraph,
    Strategy, SummarySpec, SummaryValue, ZoomOverrides,
};

pub use manifest::{DatasetEntry, Manifest, ManifestError};
pub use session::{Session, SessionStore};

#[derive(Debug, Serialize)]
struct ErrorBody {
    code: &'static str,
    message: String,
}

/// An error response: `{"error": {"code", "message"}}`.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            body: ErrorBody {
                code,
                message: message.into(),
            },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.body }))).into_response()
    }
}

impl From<ExecError> for ApiError {
    fn from(e: ExecError) -> Self {
        let (status, code) = match &e {
            ExecError::UnknownEdge { .. } => (StatusCode::NOT_FOUND, "unknown_edge"),
            ExecError::NotAHub(_) => (StatusCode::NOT_FOUND, "unknown_hub"),
            ExecError::UnknownVertex(_) => (StatusCode::BAD_REQUEST, "unknown_vertex"),
            ExecError::SubsetTooSmall(_) => (StatusCode::BAD_REQUEST, "subset_too_small"),
            _ => (StatusCode::UNPROCESSABLE_ENTITY, "execution_failed"),
        };
        Self::new(status, code, e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::new(e.status(), "bad_request", e.body_text())
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyName {
    SharedNothing,
    #[default]
    Sharing,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryRequest {
    pub dataset: String,
    pub text: String,
    #[serde(default)]
    pub strategy: StrategyName,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ZoomMode {
    Edge,
    Subset,
}

/// Changes to the parent query applied by a zoom. `hops` bounds membership
/// to that many hops; `hops: 0` lifts any bound.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverridesBody {
    pub k: Option<usize>,
    pub hops: Option<u32>,
    pub bound: Option<HopBound>,
}

impl OverridesBody {
    fn to_overrides(&self) -> ZoomOverrides {
        let grouping = self.hops.map(|h| match h {
            0 => Grouping::Betweenness,
            hops => Grouping::Bounded {
                hops,
                bound: self.bound.unwrap_or_default(),
            },
        });
        ZoomOverrides {
            k: self.k,
            grouping,
            ..Default::default()
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZoomRequest {
    pub ha_id: String,
    pub mode: ZoomMode,
    pub edge: Option<[Vid; 2]>,
    pub vertices: Option<Vec<Vid>>,
    #[serde(default)]
    pub overrides: OverridesBody,
}

#[derive(Debug, Serialize)]
struct HubAttrs {
    v_grp: u32,
    v_mr: i64,
}

#[derive(Debug, Serialize)]
struct HubJson {
    vid: Vid,
    name: Option<String>,
    attrs: HubAttrs,
    origin: HubOrigin,
}

#[derive(Debug, Serialize)]
struct EdgeJson<'a> {
    src: Vid,
    dst: Vid,
    summaries: BTreeMap<&'a str, &'a SummaryValue>,
    width_band: u8,
    subgraph_ref: String,
}

#[derive(Debug, Serialize)]
struct HaJson<'a> {
    id: &'a str,
    dataset: &'a str,
    parent_id: Option<&'a str>,
    hubs: Vec<HubJson>,
    edges: Vec<EdgeJson<'a>>,
    view: ViewSize,
    stats: &'a ExecStats,
}

#[derive(Debug, Serialize)]
struct ViewSize {
    vertices: usize,
    edges: usize,
}

fn ha_json(s: &Session) -> serde_json::Value {
    let g = &s.graph;
    let body = HaJson {
        id: &s.id,
        dataset: s.dataset.name(),
        parent_id: s.parent.as_deref(),
        hubs: g
            .hubs
            .iter()
            .map(|h| HubJson {
                vid: h.vid,
                name: h.name.clone(),
                attrs: HubAttrs {
                    v_grp: h.v_grp,
                    v_mr: h.v_mr,
                },
                origin: h.origin,
            })
            .collect(),
        edges: g
            .edges
            .iter()
            .map(|e| EdgeJson {
                src: e.src,
                dst: e.dst,
                summaries: e.summaries.iter().map(|(n, v)| (n.as_str(), v)).collect(),
                width_band: e.width_band,
                subgraph_ref: format!("/ha/{}/edge/{}/{}/details", s.id, e.src, e.dst),
            })
            .collect(),
        view: ViewSize {
            vertices: g.view().vertex_count(),
            edges: g.view().edge_count(),
        },
        stats: &g.stats,
    };
    serde_json::to_value(body).expect("hub graph serializes")
}

/// One grouped summary laid out as a table: key columns then `value`.
#[derive(Debug, Serialize)]
struct DetailTable {
    summary: String,
    columns: Vec<String>,
    rows: Vec<Vec<serde_json::Value>>,
}

#[derive(Debug, Serialize)]
struct EdgeDetails {
    src: Vid,
    dst: Vid,
    vertices: usize,
    edges: usize,
    tables: Vec<DetailTable>,
}

fn details(g: &HaGraph, x: Vid, y: Vid) -> Result<EdgeDetails, ApiError> {
    let edge = g.edge(x, y).ok_or(ExecError::UnknownEdge { x, y })?;
    let view = g.edge_view(x, y)?;
    let mut tables = Vec::new();
    for (spec, (name, value)) in g.spec.summaries.iter().zip(&edge.summaries) {
        let SummarySpec::Measure { function, .. } = spec else {
            continue;
        };
        let mut columns: Vec<String> = function.dims().column_names().iter().map(|c| c.to_string()).collect();
        columns.push("value".into());
        let rows = match value {
            SummaryValue::Scalar(v) => vec![vec![serde_json::json!(v)]],
            SummaryValue::Table(rows) => rows
                .iter()
                .map(|r| {
                    let mut row: Vec<serde_json::Value> = r.group_key.iter().map(|k| serde_json::json!(k)).collect();
                    row.push(serde_json::json!(r.value));
                    row
                })
                .collect(),
            SummaryValue::Path { .. } => continue,
        };
        tables.push(DetailTable {
            summary: name.clone(),
            columns,
            rows,
        });
    }
    Ok(EdgeDetails {
        src: x,
        dst: y,
        vertices: view.vertex_count(),
        edges: view.edge_count(),
        tables,
    })
}

fn unknown_ha(id: &str) -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "unknown_ha", format!("no hub graph `{id}`"))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
}

async fn healthz() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

async fn list_datasets(State(store): State<Arc<SessionStore>>) -> Json<Vec<DatasetInfo>> {
    Json(store.datasets().iter().map(|d| d.info()).collect())
}

async fn run_query(
    State(store): State<Arc<SessionStore>>,
    body: Result<Json<QueryRequest>, JsonRejection>,
) -> ApiResult<serde_json::Value> {
    let Json(req) = body?;
    let ds = store
        .dataset(&req.dataset)
        .cloned()
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "unknown_dataset", format!("no dataset `{}`", req.dataset)))?;
    let spec = parse(&req.text).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "query_error", e.to_string()))?;
    let opts = ExecOptions {
        strategy: match req.strategy {
            StrategyName::SharedNothing => Strategy::SharedNothing,
            StrategyName::Sharing => Strategy::default(),
        },
        ..Default::default()
    };
    let session = blocking(move || {
        let graph = execute(&ds, &spec, &opts)?;
        Ok(store.insert(ds, None, graph))
    })
    .await?;
    Ok(Json(ha_json(&session)))
}

async fn zoom(
    State(store): State<Arc<SessionStore>>,
    body: Result<Json<ZoomRequest>, JsonRejection>,
) -> ApiResult<serde_json::Value> {
    let Json(req) = body?;
    let parent = store.get(&req.ha_id).ok_or_else(|| unknown_ha(&req.ha_id))?;
    let session = blocking(move || {
        let overrides = req.overrides.to_overrides();
        let opts = ExecOptions::default();
        let ds = parent.dataset.clone();
        let graph = match req.mode {
            ZoomMode::Edge => {
                let [x, y] = req
                    .edge
                    .ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, "bad_request", "edge zoom needs `edge`"))?;
                zoom_edge(&ds, &parent.graph, x, y, &overrides, &opts)?
            }
            ZoomMode::Subset => {
                let vs = req.vertices.as_deref().ok_or_else(|| {
                    ApiError::new(StatusCode::BAD_REQUEST, "bad_request", "subset zoom needs `vertices`")
                })?;
                zoom_subset(&ds, &parent.graph, vs, &overrides, &opts)?
            }
        };
        Ok(store.insert(ds, Some(parent.id.clone()), graph))
    })
    .await?;
    Ok(Json(ha_json(&session)))
}

async fn get_ha(State(store): State<Arc<SessionStore>>, Path(id): Path<String>) -> ApiResult<serde_json::Value> {
    let s = store.get(&id).ok_or_else(|| unknown_ha(&id))?;
    Ok(Json(ha_json(&s)))
}

async fn edge_details(
    State(store): State<Arc<SessionStore>>,
    Path((id, x, y)): Path<(String, Vid, Vid)>,
) -> ApiResult<serde_json::Value> {
    let s = store.get(&id).ok_or_else(|| unknown_ha(&id))?;
    let d = blocking(move || details(&s.graph, x, y)).await?;
    Ok(Json(serde_json::to_value(d).expect("details serialize")))
}

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/datasets", get(list_datasets))
        .route("/query", post(run_query))
        .route("/zoom", post(zoom))
        .route("/ha/{id}", get(get_ha))
        .route("/ha/{id}/edge/{x}/{y}/details", get(edge_details))
        .with_state(store)
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: SocketAddr, source: std::io::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Loads the manifest's datasets and serves until the process ends.
pub async fn serve(addr: SocketAddr, manifest: &Manifest) -> Result<(), ServeError> {
    let store = Arc::new(SessionStore::new(manifest.load()?));
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|source| ServeError::Bind { addr, source })?;
    axum::serve(listener, router(store)).await?;
    Ok(())
}
