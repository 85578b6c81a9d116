use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use hashigo::attempt_log::{read_log, regrade, AttemptLog};
use hashigo::server::{router, AppState};
use hashigo_core::config::EngineConfig;
use hashigo_core::dsl::load_library;
use hashigo_core::ink::{save_ink, Sketch};
use hashigo_core::synth::{glyph, render, render_canonical, DrawSpec, RenderOptions};
use hashigo_core::tutor::{load_lessons, Engine, MessageCatalog};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn data() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn engine() -> Engine {
    let lib = load_library(&data().join("shapes")).unwrap();
    Engine::new(lib, EngineConfig::default(), MessageCatalog::shipped())
}

fn app(log_dir: Option<&std::path::Path>) -> (Router, Arc<AppState>) {
    let e = engine();
    let lessons = load_lessons(&data().join("lessons"), &e.library).unwrap();
    let log = log_dir.map(|d| AttemptLog::open(d).unwrap());
    let state = Arc::new(AppState::new(e, lessons, log).with_clock(Arc::new(|| "2026-01-01T00:00:00.000Z".into())));
    (router(state.clone()), state)
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<String>) -> (StatusCode, Value) {
    let (status, bytes, _) = call_raw(app, method, uri, body).await;
    let v = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap_or(Value::Null) };
    (status, v)
}

async fn call_raw(app: &Router, method: &str, uri: &str, body: Option<String>) -> (StatusCode, Vec<u8>, String) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header(header::CONTENT_TYPE, "application/json")
        .body(body.map(Body::from).unwrap_or_else(Body::empty))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let ctype = resp
        .headers()
        .get(header::CONTENT_TYPE)
        .map(|v| v.to_str().unwrap().to_string())
        .unwrap_or_default();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, bytes, ctype)
}

fn ink(sketch: &Sketch) -> String {
    save_ink(sketch)
}

fn stroke_body(sketch: &Sketch, i: usize) -> String {
    let points: Vec<Value> = sketch.strokes[i].points.iter().map(|p| json!([p.x, p.y, p.t])).collect();
    json!({ "points": points }).to_string()
}

async fn new_session(app: &Router, lesson: &str) -> (String, Value) {
    let (status, body) = call(app, "POST", "/api/sessions", Some(json!({ "lessonId": lesson }).to_string())).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    (body["sessionId"].as_str().unwrap().to_string(), body)
}

#[tokio::test]
async fn full_lesson_flow() {
    let dir = tempfile::tempdir().unwrap();
    let (app, state) = app(Some(dir.path()));

    let (id, created) = new_session(&app, "chapter1").await;
    assert_eq!(created["prompt"]["shapeName"], "Ichi");
    assert_eq!(created["index"], 0);
    assert_eq!(created["total"], 4);

    let ichi = render_canonical("Ichi").unwrap();
    let (s, st) = call(&app, "POST", &format!("/api/sessions/{id}/strokes"), Some(stroke_body(&ichi, 0))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(st["status"], "complete");
    let (s, c) = call(&app, "POST", &format!("/api/sessions/{id}/submit"), Some(ink(&ichi))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(c["overallPass"], true);
    assert_eq!(c["nextItem"]["shapeName"], "Ten");

    // Live highlighting of 十, stroke by stroke.
    let ten = render_canonical("Ten").unwrap();
    let uri = format!("/api/sessions/{id}/strokes");
    assert_eq!(call(&app, "POST", &uri, Some(stroke_body(&ten, 0))).await.1["status"], "consistent");
    let (_, second) = call(&app, "POST", &uri, Some(stroke_body(&ten, 1))).await;
    assert_eq!(second["status"], "complete");
    assert_eq!(second["strokeCount"], 2);

    // A reversed first stroke is visually right but does not advance.
    let mut spec = DrawSpec::canonical(2);
    spec.reversed[0] = true;
    let reversed = render(&glyph("Ten").unwrap(), &spec, &RenderOptions::default());
    let (_, c) = call(&app, "POST", &format!("/api/sessions/{id}/submit"), Some(ink(&reversed))).await;
    assert_eq!(c["visualMatched"], true);
    assert_eq!(c["overallPass"], false);
    assert_eq!(c["responsePanel"], "Visually correct — technique errors");
    assert_eq!(c["critiquePanel"][0], "Stroke 1: drawn right-to-left; write left-to-right");
    assert_eq!(c["technique"]["directionViolations"][0]["ordinal"], 1);
    assert_eq!(c["nextItem"]["shapeName"], "Ten");

    let (_, c) = call(&app, "POST", &format!("/api/sessions/{id}/submit"), Some(ink(&ten))).await;
    assert_eq!(c["overallPass"], true);
    assert_eq!(c["nextItem"]["shapeName"], "Mouth");

    let (_, p) = call(&app, "POST", &format!("/api/sessions/{id}/next"), None).await;
    assert_eq!(p["prompt"]["shapeName"], "Ancient");
    let (_, p) = call(&app, "GET", &format!("/api/sessions/{id}/prompt"), None).await;
    assert_eq!(p["index"], 3);

    let ancient = render_canonical("Ancient").unwrap();
    let (_, c) = call(&app, "POST", &format!("/api/sessions/{id}/submit"), Some(ink(&ancient))).await;
    assert_eq!(c["overallPass"], true);
    assert_eq!(c["nextItem"], Value::Null);

    let (s, e) = call(&app, "POST", &format!("/api/sessions/{id}/submit"), Some(ink(&ancient))).await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert_eq!(e["error"]["code"], "lesson_finished");

    let (s, r) = call(&app, "GET", &format!("/api/sessions/{id}/report"), None).await;
    assert_eq!(s, StatusCode::OK);
    let rows = r["perItem"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1]["attemptsUsed"], 2);
    assert_eq!(rows[1]["techniqueOk"], true);
    assert_eq!(r["visualAccuracy"], 1.0);
    assert_eq!(r["techniqueAmongVisual"], 1.0);

    // Four graded attempts were logged and re-grade identically.
    let log_path = state.log().unwrap().path().to_path_buf();
    let records = read_log(&log_path).unwrap();
    assert_eq!(records.len(), 4);
    assert!(records.iter().all(|r| r.attempt.session_id == id && r.lesson_id == "chapter1"));
    assert_eq!(records.iter().filter(|r| r.overall_pass).count(), 3);
    let summary = regrade(&records, &engine());
    assert_eq!((summary.compared, summary.reproduced), (4, 4));
}

#[tokio::test]
async fn errors_use_the_error_envelope() {
    let (app, _) = app(None);
    let (s, e) = call(&app, "GET", "/api/sessions/nope/prompt", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(e["error"]["code"], "unknown_session");
    assert!(e["error"]["message"].is_string());

    let (s, e) = call(&app, "POST", "/api/sessions", Some("{not json".into())).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(e["error"]["code"], "bad_request");
    let (s, _) = call(&app, "POST", "/api/sessions", Some(json!({ "lesson": "x" }).to_string())).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, e) = call(&app, "POST", "/api/sessions", Some(json!({ "lessonId": "x" }).to_string())).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(e["error"]["code"], "unknown_lesson");

    let (id, _) = new_session(&app, "chapter1").await;
    let (s, _) = call(&app, "POST", &format!("/api/sessions/{id}/submit"), Some("[]".into())).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let bad_stroke = json!({ "points": [[0, 0, 5], [1, 1, 2]] }).to_string();
    let (s, _) = call(&app, "POST", &format!("/api/sessions/{id}/strokes"), Some(bad_stroke)).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, e) = call(&app, "GET", "/api/nothing", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(e["error"]["code"], "not_found");
}

#[tokio::test]
async fn lessons_and_shapes() {
    let (app, _) = app(None);
    let (s, l) = call(&app, "GET", "/api/lessons", None).await;
    assert_eq!(s, StatusCode::OK);
    let ids: Vec<&str> = l.as_array().unwrap().iter().map(|x| x["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["chapter1", "chapter2", "elements"]);

    let (s, body, ctype) = call_raw(&app, "GET", "/api/shapes/Ten", None).await;
    assert_eq!(s, StatusCode::OK);
    assert!(ctype.starts_with("text/plain"));
    let text = String::from_utf8(body).unwrap();
    assert!(text.starts_with("name: Ten\n"));
    let reparsed = hashigo_core::dsl::parse_description(&text).unwrap();
    assert_eq!(reparsed.name, "Ten");
    let (s, _) = call(&app, "GET", "/api/shapes/Nope", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn submit_is_a_pure_function_of_item_and_ink() {
    let (app, _) = app(None);
    let (a, _) = new_session(&app, "elements").await;
    let (b, _) = new_session(&app, "elements").await;
    let ten = ink(&render_canonical("Ten").unwrap());
    // Session b has live strokes pending; they must not affect grading.
    let ichi = render_canonical("Ichi").unwrap();
    call(&app, "POST", &format!("/api/sessions/{b}/strokes"), Some(stroke_body(&ichi, 0))).await;
    let (_, ca) = call(&app, "POST", &format!("/api/sessions/{a}/submit"), Some(ten.clone())).await;
    let (_, cb) = call(&app, "POST", &format!("/api/sessions/{b}/submit"), Some(ten)).await;
    assert_eq!(ca, cb);
}

#[tokio::test]
async fn concurrent_sessions_log_whole_records() {
    let dir = tempfile::tempdir().unwrap();
    let (app, state) = app(Some(dir.path()));
    let ten = ink(&render_canonical("Ten").unwrap());
    let mut tasks = Vec::new();
    for _ in 0..8 {
        let app = app.clone();
        let ten = ten.clone();
        tasks.push(tokio::spawn(async move {
            let (id, _) = new_session(&app, "elements").await;
            for _ in 0..3 {
                let (s, _) = call(&app, "POST", &format!("/api/sessions/{id}/submit"), Some(ten.clone())).await;
                assert_eq!(s, StatusCode::OK);
            }
            id
        }));
    }
    let mut ids = Vec::new();
    for t in tasks {
        ids.push(t.await.unwrap());
    }
    let records = read_log(state.log().unwrap().path()).unwrap();
    assert_eq!(records.len(), 24);
    for id in ids {
        let mine: Vec<usize> = records
            .iter()
            .filter(|r| r.attempt.session_id == id)
            .map(|r| r.attempt.item_index)
            .collect();
        // Per-session requests are processed in order: 十 passes, then
        // 十 ink fails twice as 口.
        assert_eq!(mine, [0, 1, 1]);
    }
}
