use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use hubgraph_core::graph_store::{write_graph, GraphFiles};
use hubgraph_core::query::Dataset;
use hubgraph_core::samples::{social_graph, SQ1};
use hubgraph_server::{router, Manifest, SessionStore};

fn app() -> Router {
    router(Arc::new(SessionStore::new(vec![Dataset::new("twitter", social_graph())])))
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

fn vid_of(ha: &Value, name: &str) -> u64 {
    ha["hubs"]
        .as_array()
        .unwrap()
        .iter()
        .find(|h| h["name"] == name)
        .unwrap()["vid"]
        .as_u64()
        .unwrap()
}

async fn sq1(app: &Router) -> Value {
    let (status, ha) = call(app, "POST", "/query", Some(json!({"dataset": "twitter", "text": SQ1}))).await;
    assert_eq!(status, StatusCode::OK, "{ha}");
    ha
}

#[tokio::test]
async fn health_and_datasets() {
    let app = app();
    let (status, body) = call(&app, "GET", "/healthz", None).await;
    assert_eq!((status, body), (StatusCode::OK, json!({"status": "ok"})));
    let (_, list) = call(&app, "GET", "/datasets", None).await;
    let g = social_graph();
    assert_eq!(list.as_array().unwrap().len(), 1);
    assert_eq!(list[0]["name"], "twitter");
    assert_eq!(list[0]["vertices"], g.vertex_count());
    assert_eq!(list[0]["edges"], g.edge_count());
    assert!(list[0]["components"].as_u64().unwrap() > 0);
}

#[tokio::test]
async fn query_returns_four_hubs() {
    let app = app();
    let ha = sq1(&app).await;
    assert_eq!(ha["hubs"].as_array().unwrap().len(), 4);
    assert_eq!(ha["parent_id"], Value::Null);
    let (k, f) = (vid_of(&ha, "kristy"), vid_of(&ha, "karlfun"));
    let edge = ha["edges"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["src"] == k && e["dst"] == f)
        .unwrap();
    assert_eq!(edge["summaries"]["vertexCount"], 19.0);
    assert_eq!(edge["summaries"]["relationshipType"]["distance"], 3);
    assert_eq!(edge["summaries"]["relationshipType"]["text"], "friend·friend·friend");

    let id = ha["id"].as_str().unwrap();
    let (status, again) = call(&app, "GET", &format!("/ha/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(again["edges"], ha["edges"]);
}

#[tokio::test]
async fn repeated_queries_get_fresh_ids() {
    let app = app();
    let (a, b) = (sq1(&app).await, sq1(&app).await);
    assert_ne!(a["id"], b["id"]);
    assert_eq!(a["hubs"], b["hubs"]);
    assert_eq!(a["edges"].as_array().unwrap().len(), b["edges"].as_array().unwrap().len());
}

#[tokio::test]
async fn zoom_edge_records_lineage() {
    let app = app();
    let ha = sq1(&app).await;
    let (k, f) = (vid_of(&ha, "kristy"), vid_of(&ha, "karlfun"));
    let body = json!({"ha_id": ha["id"], "mode": "edge", "edge": [k, f]});
    let (status, child) = call(&app, "POST", "/zoom", Some(body)).await;
    assert_eq!(status, StatusCode::OK, "{child}");
    assert_eq!(child["parent_id"], ha["id"]);
    assert_eq!(child["view"]["vertices"], 19);
    let anchors: Vec<u64> = child["hubs"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|h| h["origin"] == "anchor")
        .map(|h| h["vid"].as_u64().unwrap())
        .collect();
    assert_eq!(anchors, [k, f]);
}

#[tokio::test]
async fn zoom_overrides_and_subset() {
    let app = app();
    let ha = sq1(&app).await;
    let (k, f) = (vid_of(&ha, "kristy"), vid_of(&ha, "karlfun"));
    let body = json!({"ha_id": ha["id"], "mode": "edge", "edge": [k, f], "overrides": {"k": 0}});
    let (_, child) = call(&app, "POST", "/zoom", Some(body)).await;
    assert_eq!(child["hubs"].as_array().unwrap().len(), 2);

    let d = vid_of(&ha, "David");
    let body = json!({"ha_id": ha["id"], "mode": "subset", "vertices": [k, d]});
    let (status, sub) = call(&app, "POST", "/zoom", Some(body)).await;
    assert_eq!(status, StatusCode::OK, "{sub}");
    assert_eq!(sub["hubs"][0]["vid"], k);

    let body = json!({"ha_id": ha["id"], "mode": "subset", "vertices": [k]});
    let (status, err) = call(&app, "POST", "/zoom", Some(body)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["error"]["code"], "subset_too_small");
}

#[tokio::test]
async fn missing_things_are_404_with_codes() {
    let app = app();
    let ha = sq1(&app).await;
    let (k, f) = (vid_of(&ha, "kristy"), vid_of(&ha, "karlfun"));
    let body = json!({"ha_id": ha["id"], "mode": "edge", "edge": [f, k]});
    let (status, err) = call(&app, "POST", "/zoom", Some(body)).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(err["error"]["code"], "unknown_edge");

    let (status, err) = call(&app, "GET", "/ha/nope", None).await;
    assert_eq!((status, &err["error"]["code"]), (StatusCode::NOT_FOUND, &json!("unknown_ha")));

    let body = json!({"dataset": "nope", "text": SQ1});
    let (status, err) = call(&app, "POST", "/query", Some(body)).await;
    assert_eq!((status, &err["error"]["code"]), (StatusCode::NOT_FOUND, &json!("unknown_dataset")));

    let id = ha["id"].as_str().unwrap();
    let (status, err) = call(&app, "GET", &format!("/ha/{id}/edge/{f}/{k}/details"), None).await;
    assert_eq!((status, &err["error"]["code"]), (StatusCode::NOT_FOUND, &json!("unknown_edge")));
}

#[tokio::test]
async fn bad_bodies_are_400() {
    let app = app();
    let body = json!({"dataset": "twitter", "text": "SELECT x()"});
    let (status, err) = call(&app, "POST", "/query", Some(body)).await;
    assert_eq!((status, &err["error"]["code"]), (StatusCode::BAD_REQUEST, &json!("query_error")));
    let (status, err) = call(&app, "POST", "/query", Some(json!({"text": SQ1}))).await;
    assert!(status.is_client_error());
    assert_eq!(err["error"]["code"], "bad_request");
}

#[tokio::test]
async fn details_tabulate_grouped_summaries() {
    let app = app();
    let text = "SELECT TopMaxDegreeVertices(G, 3) FROM WholeGraph(G) GROUP BY betweenness() \
                SUMMARIZE BY SumVMrByVGrpEGrp(), SumEMrByVGrpEGrp(), vertexCount()";
    let (_, ha) = call(&app, "POST", "/query", Some(json!({"dataset": "twitter", "text": text}))).await;
    let e = &ha["edges"][0];
    let id = ha["id"].as_str().unwrap();
    let uri = format!("/ha/{id}/edge/{}/{}/details", e["src"], e["dst"]);
    assert_eq!(e["subgraph_ref"], uri);
    let (status, d) = call(&app, "GET", &uri, None).await;
    assert_eq!(status, StatusCode::OK, "{d}");
    let tables = d["tables"].as_array().unwrap();
    assert_eq!(tables.len(), 2);
    assert_eq!(tables[0]["columns"], json!(["v_grp", "value"]));
    assert_eq!(tables[1]["columns"], json!(["v_grp", "e_grp", "value"]));
    let rows = tables[0]["rows"].as_array().unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.as_array().unwrap().len() == 2));
    assert!(d["vertices"].as_u64().unwrap() as f64 == e["summaries"]["vertexCount"].as_f64().unwrap());
}

#[test]
fn manifest_loads_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    write_graph(&social_graph(), &GraphFiles::in_dir(dir.path().join("twitter"))).unwrap();
    let path = dir.path().join("datasets.toml");
    std::fs::write(
        &path,
        "[[dataset]]\nname = \"twitter\"\nvertices = \"twitter/vertices.tsv\"\nedges = \"twitter/edges.tsv\"\n",
    )
    .unwrap();
    let loaded = Manifest::from_file(&path).unwrap().load().unwrap();
    assert_eq!(loaded[0].info().vertices, social_graph().vertex_count());

    std::fs::write(&path, "[[dataset]]\nname = \"x\"\nvertices = \"missing.tsv\"\nedges = \"e.tsv\"\n").unwrap();
    let err = Manifest::from_file(&path).unwrap().load().unwrap_err();
    assert!(err.to_string().contains("missing.tsv"), "{err}");
}
