//! JSON over HTTP. Every body carries `"v": 1`; errors are `{"v":1,"error":..}`.
//!
//! The caller names itself with the `x-user` header (a user IRI, which is
//! also the graph its writes go to). Views are tied together into usage
//! transitions by a session id from `?session=` or the `x-session` header.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::Utc;
use scholarec_core::analytics::{self, Metric};
use scholarec_core::grammars::{
    self, DiscoverRequest, GrammarRegistry, NewsRequest, RecommendError, RefereeRequest, RegistryError,
};
use scholarec_core::ingest::{concept_quads, concept_term};
use scholarec_core::ns;
use scholarec_core::quadstore::{is_absolute_iri, QuadStore, Term};
use scholarec_core::schema::{self, load_vocabulary, relations, RelationKind, SchemaError, Vocabulary};
use scholarec_core::timestamp::{self, Timestamp};
use scholarec_core::walker::{RankedList, Walker, WalkerConfig, WalkerError};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::view::{resource_view, search, ResourceView};

pub struct AppState {
    pub store: RwLock<QuadStore>,
    pub vocab: Vocabulary,
    pub grammars: GrammarRegistry,
    sessions: Mutex<HashMap<(String, String), String>>,
}

impl AppState {
    pub fn new(store: QuadStore, grammars: GrammarRegistry) -> Arc<Self> {
        Arc::new(AppState {
            store: RwLock::new(store),
            vocab: load_vocabulary(),
            grammars,
            sessions: Mutex::new(HashMap::new()),
        })
    }
}

type Shared = Arc<AppState>;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }

    fn bad(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }

    fn not_found(what: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, format!("unknown resource {what}"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = serde_json::json!({ "v": 1, "error": self.message });
        (self.status, Json(body)).into_response()
    }
}

impl From<RecommendError> for ApiError {
    fn from(e: RecommendError) -> Self {
        match e {
            RecommendError::UnknownResource(r) | RecommendError::Walker(WalkerError::UnknownSeed(r)) => {
                ApiError::not_found(&r)
            }
            other => ApiError::bad(other.to_string()),
        }
    }
}

impl From<RegistryError> for ApiError {
    fn from(e: RegistryError) -> Self {
        match e {
            RegistryError::Unknown(_) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
            _ => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::bad(e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError::bad(e.body_text())
    }
}

type ApiResult<T> = Result<Json<Envelope<T>>, ApiError>;

#[derive(Serialize)]
pub struct Envelope<T> {
    v: u8,
    #[serde(flatten)]
    body: T,
}

fn ok<T>(body: T) -> ApiResult<T> {
    Ok(Json(Envelope { v: 1, body }))
}

#[derive(Serialize)]
pub struct Results {
    results: RankedList,
}

fn results(list: RankedList) -> ApiResult<Results> {
    ok(Results { results: list })
}

fn user(headers: &HeaderMap) -> Result<Term, ApiError> {
    let value = headers
        .get("x-user")
        .ok_or_else(|| ApiError::new(StatusCode::UNAUTHORIZED, "missing x-user header"))?;
    let iri = value.to_str().map_err(|_| ApiError::bad("x-user is not text"))?;
    if !is_absolute_iri(iri) {
        return Err(ApiError::bad(format!("x-user {iri:?} is not an absolute IRI")));
    }
    Ok(Term::iri(iri))
}

fn read(state: &AppState) -> std::sync::RwLockReadGuard<'_, QuadStore> {
    state.store.read().unwrap_or_else(|e| e.into_inner())
}

fn write(state: &AppState) -> std::sync::RwLockWriteGuard<'_, QuadStore> {
    state.store.write().unwrap_or_else(|e| e.into_inner())
}

fn parse_time(text: Option<&str>) -> Result<Timestamp, ApiError> {
    match text {
        None => Ok(Utc::now()),
        Some(t) => timestamp::parse(t).ok_or_else(|| ApiError::bad(format!("bad timestamp {t:?}"))),
    }
}

/// A concept given as an IRI or as a free-text label.
fn concept_of(text: &str) -> Term {
    let expanded = ns::expand(text);
    if is_absolute_iri(&expanded) {
        Term::iri(expanded)
    } else {
        concept_term(text)
    }
}

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/resource/{*id}", get(view))
        .route("/search", get(search_handler))
        .route("/discover", post(discover))
        .route("/reasoner", post(reasoner))
        .route("/tag", post(tag))
        .route("/organize", get(organize))
        .route("/news", get(news))
        .route("/stats/{metric}", get(stats))
        .with_state(state)
}

#[derive(Deserialize)]
struct ViewQuery {
    session: Option<String>,
}

async fn view(
    State(state): State<Shared>,
    Path(id): Path<String>,
    query: Result<Query<ViewQuery>, QueryRejection>,
    headers: HeaderMap,
) -> ApiResult<ResourceView> {
    let Query(query) = query?;
    let id = id.trim_start_matches('/').to_string();
    let term = Term::iri(id.as_str());
    let view = {
        let store = read(&state);
        if !store.mentions(&term) {
            return Err(ApiError::not_found(&id));
        }
        resource_view(&store, &state.vocab, &term)
    };
    let session = query
        .session
        .or_else(|| headers.get("x-session").and_then(|v| v.to_str().ok()).map(str::to_string));
    if let (Some(session), Ok(user)) = (session, user(&headers)) {
        let previous = {
            let mut sessions = state.sessions.lock().unwrap_or_else(|e| e.into_inner());
            sessions.insert((user.value().to_string(), session), id.clone())
        };
        if let Some(previous) = previous {
            let mut store = write(&state);
            schema::record_usage(&mut store, &user, &Term::iri(previous), &term, Utc::now())
                .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
        }
    }
    ok(view)
}

#[derive(Deserialize)]
struct SearchQuery {
    #[serde(default)]
    q: String,
}

async fn search_handler(
    State(state): State<Shared>,
    query: Result<Query<SearchQuery>, QueryRejection>,
) -> ApiResult<Results> {
    let Query(query) = query?;
    if query.q.trim().is_empty() {
        return Err(ApiError::bad("empty query"));
    }
    results(search(&read(&state), &query.q))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct DiscoverBody {
    seeds: Vec<String>,
    #[serde(default)]
    return_types: Vec<String>,
    #[serde(default)]
    cfg: WalkerConfig,
}

async fn discover(
    State(state): State<Shared>,
    body: Result<Json<DiscoverBody>, JsonRejection>,
) -> ApiResult<Results> {
    let Json(body) = body?;
    let req = DiscoverRequest {
        seeds: body.seeds,
        return_types: body.return_types,
    };
    let store = read(&state);
    let walker = Walker::new(&store, &state.vocab);
    results(grammars::discover(&walker, &req, &body.cfg)?)
}

#[derive(Deserialize)]
struct ReasonerBody {
    name: String,
    #[serde(default)]
    params: Value,
    #[serde(default)]
    cfg: WalkerConfig,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct NewsParams {
    concept: String,
    now: Option<String>,
    half_life: Option<f64>,
}

#[derive(Deserialize)]
struct SeedParams {
    seeds: Vec<String>,
}

fn params<T: for<'de> Deserialize<'de>>(value: Value) -> Result<T, ApiError> {
    serde_json::from_value(value).map_err(|e| ApiError::bad(format!("params: {e}")))
}

async fn reasoner(
    State(state): State<Shared>,
    headers: HeaderMap,
    body: Result<Json<ReasonerBody>, JsonRejection>,
) -> ApiResult<Results> {
    let Json(body) = body?;
    let store = read(&state);
    let walker = Walker::new(&store, &state.vocab);
    let list = match body.name.as_str() {
        "referee" => grammars::referees(&walker, &params::<RefereeRequest>(body.params)?, &body.cfg)?,
        "discover" => grammars::discover(&walker, &params::<DiscoverRequest>(body.params)?, &body.cfg)?,
        "news" => {
            let p: NewsParams = params(body.params)?;
            let req = news_request(&headers, &p.concept, p.now.as_deref(), p.half_life)?;
            grammars::news(&walker, &req, &body.cfg)?
        }
        name => {
            let grammar = state.grammars.load(name)?;
            let p: SeedParams = params(body.params)?;
            let seeds: Vec<Term> = p.seeds.iter().map(|s| Term::iri(s.as_str())).collect();
            walker
                .execute(&grammar, &seeds, &body.cfg)
                .map_err(RecommendError::from)?
        }
    };
    results(list)
}

#[derive(Deserialize)]
struct TagBody {
    concept: String,
    resource: String,
    weight: f64,
    now: Option<String>,
}

#[derive(Serialize)]
struct Tagged {
    node: Term,
    concept: String,
    resource: String,
}

async fn tag(
    State(state): State<Shared>,
    headers: HeaderMap,
    body: Result<Json<TagBody>, JsonRejection>,
) -> ApiResult<Tagged> {
    let user = user(&headers)?;
    let Json(body) = body?;
    let at = parse_time(body.now.as_deref())?;
    let resource = Term::iri(body.resource.as_str());
    let concept = concept_of(&body.concept);
    let mut store = write(&state);
    if !store.mentions(&resource) {
        return Err(ApiError::not_found(&body.resource));
    }
    let is_concept = state.vocab.is_instance(&store, &concept, &ns::core("Concept"));
    if !is_concept {
        if is_absolute_iri(&ns::expand(&body.concept)) {
            return Err(ApiError::bad(format!("{} is not a core:Concept", concept.value())));
        }
        // A new label: declare the concept in the tagger's own graph.
        for q in concept_quads(&body.concept, &user) {
            store.insert(q).map_err(|e| ApiError::bad(e.to_string()))?;
        }
    }
    let node = schema::tag(&mut store, &user, &concept, &resource, body.weight, at).map_err(|e| match e {
        SchemaError::WeightOutOfRange(_) => ApiError::bad(e.to_string()),
        other => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, other.to_string()),
    })?;
    ok(Tagged {
        node,
        concept: concept.value().to_string(),
        resource: body.resource,
    })
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct FolderEntry {
    resource: String,
    weight: Option<f64>,
    insert_time: Option<Timestamp>,
}

#[derive(Serialize)]
struct Folder {
    concept: String,
    title: Option<String>,
    resources: Vec<FolderEntry>,
}

#[derive(Serialize)]
struct Folders {
    user: String,
    folders: Vec<Folder>,
}

async fn organize(State(state): State<Shared>, headers: HeaderMap) -> ApiResult<Folders> {
    let user = user(&headers)?;
    let store = read(&state);
    let mut by_concept: BTreeMap<String, Vec<FolderEntry>> = BTreeMap::new();
    for r in relations(&store, RelationKind::Related, Some(&user)) {
        by_concept.entry(r.subject.value().to_string()).or_default().push(FolderEntry {
            resource: r.object.value().to_string(),
            weight: r.weight,
            insert_time: r.insert_time,
        });
    }
    let title = Term::iri(ns::core("title"));
    let folders = by_concept
        .into_iter()
        .map(|(concept, mut resources)| {
            resources.sort_by(|a, b| a.resource.cmp(&b.resource));
            let title = store
                .match_quads(Some(&Term::iri(concept.as_str())), Some(&title), None, None)
                .first()
                .map(|q| q.o.value().to_string());
            Folder {
                concept,
                title,
                resources,
            }
        })
        .collect();
    ok(Folders {
        user: user.value().to_string(),
        folders,
    })
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct NewsQuery {
    concept: String,
    now: Option<String>,
    half_life: Option<f64>,
}

fn news_request(headers: &HeaderMap, concept: &str, now: Option<&str>, half_life: Option<f64>) -> Result<NewsRequest, ApiError> {
    Ok(NewsRequest {
        user: user(headers)?.value().to_string(),
        concept: concept_of(concept).value().to_string(),
        now: parse_time(now)?,
        half_life_secs: half_life.unwrap_or(grammars::DEFAULT_HALF_LIFE_SECS),
    })
}

async fn news(
    State(state): State<Shared>,
    headers: HeaderMap,
    query: Result<Query<NewsQuery>, QueryRejection>,
) -> ApiResult<Results> {
    user(&headers)?;
    let Query(q) = query?;
    let req = news_request(&headers, &q.concept, q.now.as_deref(), q.half_life)?;
    let store = read(&state);
    let walker = Walker::new(&store, &state.vocab);
    results(grammars::news(&walker, &req, &WalkerConfig::default())?)
}

#[derive(Deserialize)]
struct StatsQuery {
    resource: String,
    other: Option<String>,
    year: Option<i32>,
}

async fn stats(
    State(state): State<Shared>,
    Path(metric): Path<String>,
    query: Result<Query<StatsQuery>, QueryRejection>,
) -> ApiResult<analytics::MetricReport> {
    let metric: Metric = metric.parse().map_err(ApiError::bad)?;
    let Query(q) = query?;
    let store = read(&state);
    let resource = Term::iri(q.resource.as_str());
    if !store.mentions(&resource) {
        return Err(ApiError::not_found(&q.resource));
    }
    let other = q.other.as_deref().map(Term::iri);
    ok(analytics::report(&store, metric, &resource, other.as_ref(), q.year).map_err(ApiError::bad)?)
}

pub async fn serve(state: Shared, addr: std::net::SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
