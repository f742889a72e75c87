//! HTTP JSON API over a loaded influence graph.
//!
//! | method | path | purpose |
//! |---|---|---|
//! | GET | `/api/meta` | graph statistics |
//! | GET | `/api/nodes?query=` | title search, at most 50 hits |
//! | POST | `/api/summarize` | run a summary; body is `source` plus config fields |
//! | GET | `/api/cluster/{job}/{id}/members` | paged members of one cluster |

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::net::SocketAddr;
use std::sync::{Arc, Mutex, RwLock};
use std::time::Duration;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::Semaphore;

use crate::document::{by_in_degree, summarize_document, DocumentOptions, SummaryDocument, SCHEMA_VERSION};
use crate::error::Error;
use crate::graph::{maximal_influence_graph, InfluenceGraph};
use crate::summarize::SummarizeConfig;

pub const MAX_K: usize = 40;
pub const MAX_SEARCH_HITS: usize = 50;
pub const DEFAULT_PAGE: usize = 50;
pub const JOB_TIMEOUT: Duration = Duration::from_secs(120);

struct Job {
    graph: Arc<InfluenceGraph>,
    /// Members per cluster, highest in-degree first.
    members: Vec<Vec<usize>>,
    doc: SummaryDocument,
}

/// Shared server state. The graph slot is empty while loading.
pub struct AppState {
    graph: RwLock<Option<Arc<InfluenceGraph>>>,
    jobs: Mutex<HashMap<String, Arc<Job>>>,
    workers: Semaphore,
    timeout: Duration,
    options: DocumentOptions,
}

impl AppState {
    pub fn loading(options: DocumentOptions) -> Self {
        let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
        AppState {
            graph: RwLock::new(None),
            jobs: Mutex::new(HashMap::new()),
            workers: Semaphore::new(cores.min(8)),
            timeout: JOB_TIMEOUT,
            options: DocumentOptions {
                include_members: true,
                include_timings: true,
                ..options
            },
        }
    }

    pub fn ready(graph: InfluenceGraph, options: DocumentOptions) -> Self {
        let s = Self::loading(options);
        s.set_graph(graph);
        s
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn set_graph(&self, graph: InfluenceGraph) {
        *self.graph.write().expect("graph lock") = Some(Arc::new(graph));
        self.jobs.lock().expect("job lock").clear();
    }

    fn graph(&self) -> Result<Arc<InfluenceGraph>, ApiError> {
        self.graph
            .read()
            .expect("graph lock")
            .clone()
            .ok_or_else(|| ApiError(StatusCode::SERVICE_UNAVAILABLE, "graph is still loading".into()))
    }
}

#[derive(Debug)]
pub struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::UnknownNode(_) => StatusCode::NOT_FOUND,
            Error::Argument(_) | Error::Dimension(_) | Error::Validation(_) | Error::Json(_) => {
                StatusCode::BAD_REQUEST
            }
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError(status, e.to_string())
    }
}

fn bad_request(msg: impl Into<String>) -> ApiError {
    ApiError(StatusCode::BAD_REQUEST, msg.into())
}

fn not_found(msg: impl Into<String>) -> ApiError {
    ApiError(StatusCode::NOT_FOUND, msg.into())
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/meta", get(meta))
        .route("/api/nodes", get(nodes))
        .route("/api/summarize", post(summarize))
        .route("/api/cluster/{job}/{id}/members", get(members))
        .with_state(state)
}

/// Binds `addr` and serves until the process ends.
pub async fn serve(state: Arc<AppState>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}

async fn meta(State(state): State<Arc<AppState>>) -> Result<Json<Value>, ApiError> {
    let g = state.graph()?;
    let titled = g.metas().iter().filter(|m| m.title.is_some()).count();
    Ok(Json(json!({
        "schema_version": SCHEMA_VERSION,
        "node_count": g.node_count(),
        "edge_count": g.edge_count(),
        "titled_nodes": titled,
        "max_k": MAX_K,
    })))
}

#[derive(Deserialize)]
struct NodeQuery {
    #[serde(default)]
    query: String,
}

#[derive(Serialize)]
struct NodeHit<'a> {
    id: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    title: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    year: Option<i32>,
    in_degree: usize,
    out_degree: usize,
}

fn hit(g: &InfluenceGraph, i: usize) -> NodeHit<'_> {
    let m = g.meta(i);
    NodeHit {
        id: g.node_id(i),
        title: m.title.as_deref(),
        year: m.year,
        in_degree: g.in_degree(i),
        out_degree: g.out_degree(i),
    }
}

async fn nodes(
    State(state): State<Arc<AppState>>,
    Query(q): Query<NodeQuery>,
) -> Result<Json<Value>, ApiError> {
    let g = state.graph()?;
    let needle = q.query.to_lowercase();
    let hits: Vec<NodeHit> = (0..g.node_count())
        .filter(|&i| {
            g.meta(i)
                .title
                .as_deref()
                .is_some_and(|t| t.to_lowercase().contains(&needle))
        })
        .take(MAX_SEARCH_HITS)
        .map(|i| hit(&g, i))
        .collect();
    Ok(Json(json!({ "query": q.query, "hits": hits })))
}

/// Splits a request body into the source id and a validated config. When
/// `k` is given without `l`, `l` follows `2k`.
fn parse_request(mut body: Value) -> Result<(String, SummarizeConfig), ApiError> {
    let obj = body
        .as_object_mut()
        .ok_or_else(|| bad_request("request body must be a JSON object"))?;
    let source = match obj.remove("source") {
        Some(Value::String(s)) if !s.is_empty() => s,
        _ => return Err(bad_request("`source` (node id) is required")),
    };
    let l_given = obj.contains_key("l");
    let mut cfg: SummarizeConfig =
        serde_json::from_value(body).map_err(|e| bad_request(format!("invalid config: {e}")))?;
    if !l_given {
        cfg.l = 2 * cfg.k;
    }
    if cfg.k > MAX_K {
        return Err(bad_request(format!("k must be <= {MAX_K}, got {}", cfg.k)));
    }
    cfg.validate(None)?;
    Ok((source, cfg))
}

fn job_id(source: &str, cfg: &SummarizeConfig) -> String {
    let key = serde_json::to_string(&(source, cfg)).expect("config serializes");
    let mut h = DefaultHasher::new();
    key.hash(&mut h);
    format!("{:016x}", h.finish())
}

async fn summarize(
    State(state): State<Arc<AppState>>,
    Json(body): Json<Value>,
) -> Result<Json<SummaryDocument>, ApiError> {
    let g = state.graph()?;
    let (source, cfg) = parse_request(body)?;
    let id = job_id(&source, &cfg);
    if let Some(job) = state.jobs.lock().expect("job lock").get(&id) {
        let mut doc = job.doc.clone();
        doc.cached = Some(true);
        return Ok(Json(doc));
    }
    let _permit = state
        .workers
        .acquire()
        .await
        .map_err(|_| ApiError(StatusCode::SERVICE_UNAVAILABLE, "shutting down".into()))?;
    let options = state.options.clone();
    let task = tokio::task::spawn_blocking(move || -> Result<Job, Error> {
        let sub = Arc::new(maximal_influence_graph(&g, &source)?);
        cfg.validate(Some(sub.node_count()))?;
        let mut doc = summarize_document(&sub, &cfg, &options)?;
        let members = doc
            .clusters
            .iter_mut()
            .map(|c| {
                let ids = c.members.take().unwrap_or_default();
                let idx: Vec<usize> = ids.iter().filter_map(|id| sub.index_of(id)).collect();
                by_in_degree(&sub, &idx)
            })
            .collect();
        Ok(Job {
            graph: sub,
            members,
            doc,
        })
    });
    let job = match tokio::time::timeout(state.timeout, task).await {
        Err(_) => {
            return Err(ApiError(
                StatusCode::GATEWAY_TIMEOUT,
                format!("summarization exceeded {} s", state.timeout.as_secs()),
            ))
        }
        Ok(Err(join)) => return Err(ApiError(StatusCode::INTERNAL_SERVER_ERROR, join.to_string())),
        Ok(Ok(result)) => result?,
    };
    let job = Job {
        doc: SummaryDocument {
            job: Some(id.clone()),
            ..job.doc
        },
        ..job
    };
    let mut doc = job.doc.clone();
    doc.cached = Some(false);
    state.jobs.lock().expect("job lock").insert(id, Arc::new(job));
    Ok(Json(doc))
}

#[derive(Deserialize)]
struct MemberQuery {
    #[serde(default)]
    sort: Option<String>,
    #[serde(default)]
    limit: Option<usize>,
    #[serde(default)]
    offset: Option<usize>,
}

async fn members(
    State(state): State<Arc<AppState>>,
    Path((job, cluster)): Path<(String, usize)>,
    Query(q): Query<MemberQuery>,
) -> Result<Json<Value>, ApiError> {
    state.graph()?;
    let entry = state
        .jobs
        .lock()
        .expect("job lock")
        .get(&job)
        .cloned()
        .ok_or_else(|| not_found(format!("unknown job `{job}`")))?;
    let list = entry
        .members
        .get(cluster)
        .ok_or_else(|| not_found(format!("job `{job}` has no cluster {cluster}")))?;
    let mut order = list.clone();
    match q.sort.as_deref().unwrap_or("indegree") {
        "indegree" => {}
        "id" => order.sort_by(|&a, &b| entry.graph.node_id(a).cmp(entry.graph.node_id(b))),
        other => return Err(bad_request(format!("unknown sort `{other}` (indegree, id)"))),
    }
    let offset = q.offset.unwrap_or(0);
    let limit = q.limit.unwrap_or(DEFAULT_PAGE).min(1000);
    let page: Vec<NodeHit> = order
        .iter()
        .skip(offset)
        .take(limit)
        .map(|&i| hit(&entry.graph, i))
        .collect();
    Ok(Json(json!({
        "job": job,
        "cluster": cluster,
        "total": order.len(),
        "offset": offset,
        "limit": limit,
        "members": page,
    })))
}
