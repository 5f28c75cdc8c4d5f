use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use scholarec_core::grammars::GrammarRegistry;
use scholarec_core::ns;
use scholarec_core::quadstore::{QuadStore, Term};
use scholarec_core::schema::{relations, RelationKind};
use scholarec_service::{router, AppState};
use serde_json::{json, Value};
use tower::ServiceExt;

const COMMUNITY: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/fixtures/community_news.nq"));
const KRS: &str = "http://knowledgereefsystems.com/krs/";

fn krs(name: &str) -> String {
    format!("{KRS}{name}")
}

fn fixture() -> (Arc<AppState>, Router) {
    let mut store = QuadStore::new();
    store.load_nquads(COMMUNITY).unwrap();
    store
        .load_nquads(
            r#"
<http://x.org/paperA> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://knowledgereefsystems.com/2007/11/core#Article> <http://x.org/g> .
<http://x.org/paperA> <http://knowledgereefsystems.com/2007/11/core#title> "Graph Walkers in Practice" <http://x.org/g> .
<http://x.org/paperB> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://knowledgereefsystems.com/2007/11/core#Article> <http://x.org/g> .
<http://x.org/paperB> <http://knowledgereefsystems.com/2007/11/core#title> "Citation Networks" <http://x.org/g> .
<http://x.org/paperB> <http://knowledgereefsystems.com/2007/11/core#abstract> "We study graph structure of citations." <http://x.org/g> .
<http://x.org/paperA> <http://knowledgereefsystems.com/2007/11/core#cites> <http://x.org/paperB> <http://x.org/g> .
<http://x.org/alice> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://knowledgereefsystems.com/2007/11/core#Person> <http://x.org/g> .
<http://x.org/bob> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://knowledgereefsystems.com/2007/11/core#Person> <http://x.org/g> .
<http://x.org/alice> <http://knowledgereefsystems.com/2007/11/core#created> <http://x.org/paperA> <http://x.org/g> .
<http://x.org/bob> <http://knowledgereefsystems.com/2007/11/core#created> <http://x.org/paperB> <http://x.org/g> .
"#,
        )
        .unwrap();
    let state = AppState::new(store, GrammarRegistry::builtin());
    let app = router(state.clone());
    (state, app)
}

async fn call(app: &Router, method: &str, uri: &str, user: Option<&str>, body: Option<Value>) -> (StatusCode, Value, String) {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(u) = user {
        req = req.header("x-user", u);
    }
    let body = match body {
        Some(b) => {
            req = req.header("content-type", "application/json");
            Body::from(b.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let text = String::from_utf8(bytes.to_vec()).unwrap();
    let value = serde_json::from_str(&text).unwrap_or(Value::Null);
    (status, value, text)
}

fn resources(v: &Value) -> Vec<String> {
    v["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["resource"].as_str().unwrap().to_string())
        .collect()
}

fn enc(iri: &str) -> String {
    iri.replace(':', "%3A").replace('/', "%2F")
}

#[tokio::test]
async fn news_on_community_fixture() {
    let (_, app) = fixture();
    let uri = "/news?concept=semantic%20web&now=2008-06-08T00:00:00Z";
    let (status, body, _) = call(&app, "GET", uri, Some(&krs("marko")), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["v"], 1);
    assert_eq!(resources(&body), [krs("apepe"), krs("article1")]);
}

#[tokio::test]
async fn news_needs_a_user() {
    let (_, app) = fixture();
    let (status, body, _) = call(&app, "GET", "/news?concept=java", None, None).await;
    assert_eq!(status, StatusCode::UNAUTHORIZED);
    assert_eq!(body["v"], 1);
    assert!(body["error"].is_string());
}

#[tokio::test]
async fn person_view_has_abbreviation() {
    let (_, app) = fixture();
    let (status, body, _) = call(&app, "GET", &format!("/resource/{}", enc(&krs("apepe"))), None, None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["abbrev"], "Pe");
    assert_eq!(body["title"], "Alberto Pepe");
    assert_eq!(body["types"][0], ns::core("Person"));
    let tags = body["tags"].as_array().unwrap();
    assert_eq!(tags.len(), 1);
    assert_eq!(tags[0]["tagger"], krs("josh"));
}

#[tokio::test]
async fn unencoded_iri_path_also_works() {
    let (_, app) = fixture();
    let (status, body, _) = call(&app, "GET", "/resource/http://x.org/paperA", None, None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["outgoing"][ns::core("cites")][0]["iri"], "http://x.org/paperB");
    assert_eq!(body["incoming"][ns::core("created")][0]["iri"], "http://x.org/alice");
}

#[tokio::test]
async fn unknown_resource_is_404() {
    let (_, app) = fixture();
    let (status, _, _) = call(&app, "GET", "/resource/http://x.org/nothing", None, None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

fn usage_count(state: &AppState, user: &str) -> Vec<(String, String, usize)> {
    let store = state.store.read().unwrap();
    relations(&store, RelationKind::Usage, Some(&Term::iri(user)))
        .into_iter()
        .map(|r| (r.subject.value().to_string(), r.object.value().to_string(), r.usage_stamps.len()))
        .collect()
}

#[tokio::test]
async fn views_in_a_session_record_usage() {
    let (state, app) = fixture();
    let u = "http://x.org/reader";
    call(&app, "GET", "/resource/http://x.org/paperA?session=s1", Some(u), None).await;
    assert!(usage_count(&state, u).is_empty());
    call(&app, "GET", "/resource/http://x.org/paperB?session=s1", Some(u), None).await;
    assert_eq!(usage_count(&state, u), [("http://x.org/paperA".into(), "http://x.org/paperB".into(), 1)]);
    // Re-viewing the same resource is not a transition.
    call(&app, "GET", "/resource/http://x.org/paperB?session=s1", Some(u), None).await;
    assert_eq!(usage_count(&state, u).len(), 1);
}

#[tokio::test]
async fn interleaved_sessions_do_not_mix() {
    let (state, app) = fixture();
    let u = "http://x.org/reader";
    let view = |iri: &str, s: &str| format!("/resource/{iri}?session={s}");
    call(&app, "GET", &view("http://x.org/paperA", "one"), Some(u), None).await;
    call(&app, "GET", &view("http://x.org/alice", "two"), Some(u), None).await;
    call(&app, "GET", &view("http://x.org/paperB", "one"), Some(u), None).await;
    call(&app, "GET", &view("http://x.org/bob", "two"), Some(u), None).await;
    let mut got = usage_count(&state, u);
    got.sort();
    assert_eq!(
        got,
        [
            ("http://x.org/alice".into(), "http://x.org/bob".into(), 1),
            ("http://x.org/paperA".into(), "http://x.org/paperB".into(), 1),
        ]
    );
}

#[tokio::test]
async fn session_header_works_without_query() {
    let (state, app) = fixture();
    let u = "http://x.org/reader";
    for iri in ["http://x.org/paperA", "http://x.org/paperB"] {
        let req = Request::get(format!("/resource/{iri}"))
            .header("x-user", u)
            .header("x-session", "h")
            .body(Body::empty())
            .unwrap();
        assert_eq!(app.clone().oneshot(req).await.unwrap().status(), StatusCode::OK);
    }
    assert_eq!(usage_count(&state, u).len(), 1);
}

#[tokio::test]
async fn search_ranks_and_validates() {
    let (_, app) = fixture();
    let (status, body, _) = call(&app, "GET", "/search?q=graph", None, None).await;
    assert_eq!(status, StatusCode::OK);
    // paperA matches in its title, paperB only in its abstract.
    let got = resources(&body);
    assert_eq!(got, ["http://x.org/paperA", "http://x.org/paperB"]);
    let (_, body, _) = call(&app, "GET", "/search?q=zebra", None, None).await;
    assert!(resources(&body).is_empty());
    let (status, _, _) = call(&app, "GET", "/search?q=%20", None, None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _, _) = call(&app, "GET", "/search", None, None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn tag_then_organize() {
    let (state, app) = fixture();
    let u = "http://x.org/reader";
    let body = json!({"concept": "graph theory", "resource": "http://x.org/paperA", "weight": 0.5});
    let (status, _, _) = call(&app, "POST", "/tag", Some(u), Some(body)).await;
    assert_eq!(status, StatusCode::OK);
    let (status, body, _) = call(&app, "GET", "/organize", Some(u), None).await;
    assert_eq!(status, StatusCode::OK);
    let folders = body["folders"].as_array().unwrap();
    assert_eq!(folders.len(), 1);
    assert_eq!(folders[0]["title"], "graph theory");
    assert_eq!(folders[0]["resources"][0]["resource"], "http://x.org/paperA");
    assert_eq!(folders[0]["resources"][0]["weight"], 0.5);
    // Every quad the write created lives in the tagger's graph.
    let store = state.store.read().unwrap();
    let g = Term::iri(u);
    let in_graph = store.match_quads(None, None, None, Some(&g)).len();
    assert_eq!(in_graph, 7);
}

#[tokio::test]
async fn tag_validation() {
    let (_, app) = fixture();
    let u = Some("http://x.org/reader");
    let heavy = json!({"concept": "java", "resource": "http://x.org/paperA", "weight": 1.5});
    assert_eq!(call(&app, "POST", "/tag", u, Some(heavy)).await.0, StatusCode::BAD_REQUEST);
    let missing = json!({"concept": "java", "resource": "http://x.org/none", "weight": 0.5});
    assert_eq!(call(&app, "POST", "/tag", u, Some(missing)).await.0, StatusCode::NOT_FOUND);
    let not_concept = json!({"concept": "http://x.org/alice", "resource": "http://x.org/paperA", "weight": 0.5});
    assert_eq!(call(&app, "POST", "/tag", u, Some(not_concept)).await.0, StatusCode::BAD_REQUEST);
    let anon = json!({"concept": "java", "resource": "http://x.org/paperA", "weight": 0.5});
    assert_eq!(call(&app, "POST", "/tag", None, Some(anon)).await.0, StatusCode::UNAUTHORIZED);
    let (status, _, _) = call(&app, "POST", "/tag", u, Some(json!({"concept": 3}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn tagging_changes_the_feed() {
    let (_, app) = fixture();
    let news = "/news?concept=semantic%20web&now=2008-06-08T00:00:00Z";
    let marko = krs("marko");
    let body = json!({
        "concept": "semantic web",
        "resource": krs("gary"),
        "weight": 1.0,
        "now": "2008-06-07T00:00:00Z",
    });
    assert_eq!(call(&app, "POST", "/tag", Some(&marko), Some(body)).await.0, StatusCode::OK);
    let (_, feed, _) = call(&app, "GET", news, Some(&marko), None).await;
    assert!(resources(&feed).contains(&krs("software1")));
}

#[tokio::test]
async fn reasoner_referee_and_unknown() {
    let (_, app) = fixture();
    let body = json!({"name": "referee", "params": {"article": "http://x.org/paperA"}});
    let (status, v, _) = call(&app, "POST", "/reasoner", None, Some(body)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(resources(&v), ["http://x.org/bob"]);
    let (status, v, _) = call(&app, "POST", "/reasoner", None, Some(json!({"name": "unknown"}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["v"], 1);
    let named = json!({"name": "coauthorship", "params": {"seeds": ["http://x.org/alice"]}});
    assert_eq!(call(&app, "POST", "/reasoner", None, Some(named)).await.0, StatusCode::OK);
    let missing = json!({"name": "referee", "params": {"article": "http://x.org/none"}});
    assert_eq!(call(&app, "POST", "/reasoner", None, Some(missing)).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn discover_endpoint() {
    let (_, app) = fixture();
    let body = json!({"seeds": ["http://x.org/paperA"], "returnTypes": ["core:Person"]});
    let (status, v, _) = call(&app, "POST", "/discover", None, Some(body)).await;
    assert_eq!(status, StatusCode::OK);
    let got = resources(&v);
    assert!(got.contains(&"http://x.org/alice".to_string()));
    assert!(!got.contains(&"http://x.org/paperB".to_string()));
    let bad = json!({"seeds": ["http://x.org/paperA"], "returnTypes": ["core:Nope"]});
    assert_eq!(call(&app, "POST", "/discover", None, Some(bad)).await.0, StatusCode::BAD_REQUEST);
    let unknown = json!({"seeds": ["http://x.org/none"]});
    assert_eq!(call(&app, "POST", "/discover", None, Some(unknown)).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn stats_endpoint() {
    let (_, app) = fixture();
    let (status, v, _) = call(&app, "GET", "/stats/citation_count?resource=http%3A%2F%2Fx.org%2FpaperB", None, None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["value"], 1.0);
    assert_eq!(v["metric"], "citation_count");
    let (status, _, _) = call(&app, "GET", "/stats/pagerank?resource=http%3A%2F%2Fx.org%2FpaperB", None, None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _, _) = call(&app, "GET", "/stats/h_index?resource=http%3A%2F%2Fx.org%2Fnone", None, None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn identical_requests_give_identical_bytes() {
    let (_, app) = fixture();
    let marko = krs("marko");
    let requests: Vec<(&str, &str, Option<Value>)> = vec![
        ("GET", "/news?concept=semantic%20web&now=2008-06-08T00:00:00Z", None),
        ("POST", "/discover", Some(json!({"seeds": ["http://x.org/paperA", krs("apepe")]}))),
        ("POST", "/reasoner", Some(json!({"name": "referee", "params": {"article": "http://x.org/paperA"}}))),
        ("GET", "/search?q=graph", None),
        ("GET", "/resource/http://x.org/paperA", None),
        ("GET", "/organize", None),
    ];
    for (method, uri, body) in requests {
        let (_, _, first) = call(&app, method, uri, Some(&marko), body.clone()).await;
        let (_, _, second) = call(&app, method, uri, Some(&marko), body).await;
        assert_eq!(first, second, "{method} {uri}");
    }
}
