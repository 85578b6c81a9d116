//! HTTP service for the drawing client.

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use hashigo_core::ink::{load_ink, parse_stroke_value, InkStroke, Sketch};
use hashigo_core::recognizer::{incremental_status, IncrementalStatus};
use hashigo_core::segmenter::segment;
use hashigo_core::tutor::{Engine, Lesson, LessonItem, Session};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::Mutex;

use crate::attempt_log::{AttemptLog, AttemptLogRecord};

pub type Clock = Arc<dyn Fn() -> String + Send + Sync>;

pub fn utc_now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

struct LiveSession {
    session: Session,
    /// Strokes posted one at a time since the last submit or skip.
    live: Vec<InkStroke>,
}

pub struct AppState {
    engine: Arc<Engine>,
    lessons: BTreeMap<String, Lesson>,
    sessions: RwLock<HashMap<String, Arc<Mutex<LiveSession>>>>,
    log: Option<Arc<AttemptLog>>,
    clock: Clock,
}

impl AppState {
    pub fn new(engine: Engine, lessons: BTreeMap<String, Lesson>, log: Option<AttemptLog>) -> Self {
        AppState {
            engine: Arc::new(engine),
            lessons,
            sessions: RwLock::new(HashMap::new()),
            log: log.map(Arc::new),
            clock: Arc::new(utc_now),
        }
    }

    pub fn with_clock(mut self, clock: Clock) -> Self {
        self.clock = clock;
        self
    }

    pub fn log(&self) -> Option<&AttemptLog> {
        self.log.as_deref()
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<LiveSession>>, ApiError> {
        self.sessions
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("unknown_session", format!("no session `{id}`")))
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    fn not_found(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, code, message)
    }

    fn finished() -> Self {
        Self::new(StatusCode::CONFLICT, "lesson_finished", "the lesson has no remaining items")
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": { "code": self.code, "message": self.message } });
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn parse_json<T: for<'de> Deserialize<'de>>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed JSON body: {e}")))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PromptView {
    pub session_id: String,
    pub lesson_id: String,
    pub index: usize,
    pub total: usize,
    pub prompt: Option<LessonItem>,
}

fn prompt_view(s: &Session) -> PromptView {
    PromptView {
        session_id: s.id.clone(),
        lesson_id: s.lesson.id.clone(),
        index: s.cursor(),
        total: s.lesson.items.len(),
        prompt: s.next_prompt().cloned(),
    }
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct CreateSession {
    lesson_id: String,
}

async fn create_session(State(st): State<Arc<AppState>>, body: Bytes) -> ApiResult<(StatusCode, Json<PromptView>)> {
    let req: CreateSession = parse_json(&body)?;
    let lesson = st
        .lessons
        .get(&req.lesson_id)
        .cloned()
        .ok_or_else(|| ApiError::not_found("unknown_lesson", format!("no lesson `{}`", req.lesson_id)))?;
    let id = uuid::Uuid::new_v4().to_string();
    let session = Session::new(id.clone(), lesson);
    let view = prompt_view(&session);
    st.sessions.write().unwrap_or_else(|e| e.into_inner()).insert(
        id,
        Arc::new(Mutex::new(LiveSession {
            session,
            live: Vec::new(),
        })),
    );
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_prompt(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<PromptView>> {
    let s = st.session(&id)?;
    let s = s.lock().await;
    Ok(Json(prompt_view(&s.session)))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StrokeStatus {
    pub status: IncrementalStatus,
    pub stroke_count: usize,
    pub primitive_count: usize,
}

async fn post_stroke(State(st): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult<Json<StrokeStatus>> {
    let mut value: Value = parse_json(&body)?;
    let s = st.session(&id)?;
    let mut s = s.lock().await;
    let shape = s.session.next_prompt().ok_or_else(ApiError::finished)?.shape_name.clone();
    let next_id = s.live.len();
    // Strokes are renumbered in arrival order.
    match value.as_object_mut() {
        Some(obj) => {
            obj.insert("id".into(), json!(next_id));
        }
        None => return Err(ApiError::bad_request("stroke must be a JSON object")),
    }
    let stroke = parse_stroke_value(&value, next_id).map_err(|e| ApiError::bad_request(e.to_string()))?;
    if let (Some(last), Some(first)) = (s.live.last().and_then(|l| l.points.last()), stroke.points.first()) {
        if first.t < last.t {
            return Err(ApiError::bad_request("stroke starts before the previous stroke ended"));
        }
    }
    let mut strokes = s.live.clone();
    strokes.push(stroke);
    let sketch = Sketch::new(strokes, 0.0, 0.0).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let cfg = &st.engine.config;
    let seg = segment(&sketch, &cfg.segmenter).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let status = incremental_status(&seg.primitives, &shape, &st.engine.library, &cfg.tolerance)
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?;
    s.live = sketch.strokes;
    Ok(Json(StrokeStatus {
        status,
        stroke_count: s.live.len(),
        primitive_count: seg.primitives.len(),
    }))
}

async fn submit(State(st): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
    let sketch = load_ink(&body).map_err(|e| ApiError::bad_request(format!("invalid ink: {e}")))?;
    let s = st.session(&id)?;
    let mut s = s.lock().await;
    let ts = (st.clock)();
    let engine = st.engine.clone();
    let (attempt, critique) = s.session.submit(&sketch, &engine, &ts).ok_or_else(ApiError::finished)?;
    s.live.clear();
    if let Some(log) = &st.log {
        let record = AttemptLogRecord {
            lesson_id: s.session.lesson.id.clone(),
            config_fingerprint: engine.config.fingerprint(),
            overall_pass: critique.overall_pass,
            attempt,
        };
        log.append(&record)
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "log_write", e.to_string()))?;
    }
    Ok(Json(critique).into_response())
}

async fn next(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<PromptView>> {
    let s = st.session(&id)?;
    let mut s = s.lock().await;
    s.session.advance();
    s.live.clear();
    Ok(Json(prompt_view(&s.session)))
}

async fn report(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    let s = st.session(&id)?;
    let s = s.lock().await;
    Ok(Json(s.session.report()).into_response())
}

async fn lessons(State(st): State<Arc<AppState>>) -> Json<Vec<Lesson>> {
    Json(st.lessons.values().cloned().collect())
}

async fn shape(State(st): State<Arc<AppState>>, Path(name): Path<String>) -> ApiResult<Response> {
    let desc = st
        .engine
        .library
        .get(&name)
        .ok_or_else(|| ApiError::not_found("unknown_shape", format!("no shape `{name}`")))?;
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], desc.serialize()).into_response())
}

async fn fallback() -> ApiError {
    ApiError::not_found("not_found", "no such endpoint")
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}/prompt", get(get_prompt))
        .route("/api/sessions/{id}/strokes", post(post_stroke))
        .route("/api/sessions/{id}/submit", post(submit))
        .route("/api/sessions/{id}/next", post(next))
        .route("/api/sessions/{id}/report", get(report))
        .route("/api/lessons", get(lessons))
        .route("/api/shapes/{name}", get(shape))
        .fallback(fallback)
        .with_state(state)
}

/// Serves until ctrl-c, then syncs the attempt log.
pub async fn serve(addr: SocketAddr, state: Arc<AppState>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state.clone()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    if let Some(log) = state.log() {
        log.sync().map_err(std::io::Error::other)?;
    }
    Ok(())
}
