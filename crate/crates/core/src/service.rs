//! HTTP front end: one reporting session per id, one report store.

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex as StdMutex};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tokio::sync::Mutex;
use tower_http::services::ServeDir;

use crate::bundle::{list_app_ids, read_file, AppBundle, BuildError};
use crate::resolver::RankingParams;
use crate::session::{
    BugReport, Edit, ReportFields, ReportStore, ReportSummary, ReportingSession, SessionError, UpdateResult,
};
use crate::similarity::{EmbeddingError, EmbeddingStore};

/// Closed registry of error codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    UnknownApp,
    UnknownSession,
    SessionClosed,
    StaleText,
    UnknownReport,
    BadRequest,
    PersistenceFailure,
    Internal,
}

impl ErrorCode {
    fn status(self) -> StatusCode {
        match self {
            ErrorCode::UnknownApp | ErrorCode::UnknownSession | ErrorCode::UnknownReport => StatusCode::NOT_FOUND,
            ErrorCode::SessionClosed | ErrorCode::StaleText => StatusCode::CONFLICT,
            ErrorCode::BadRequest => StatusCode::BAD_REQUEST,
            ErrorCode::PersistenceFailure | ErrorCode::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: ErrorCode,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<serde_json::Value>,
}

impl ApiError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        ApiError { code, message: message.into(), detail: None }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.code.status(), Json(self)).into_response()
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let code = match &e {
            SessionError::Closed => ErrorCode::SessionClosed,
            SessionError::Stale(_) => ErrorCode::StaleText,
            SessionError::BadToken(_) => ErrorCode::Internal,
            SessionError::Persistence(_) => ErrorCode::PersistenceFailure,
        };
        ApiError::new(code, e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::new(ErrorCode::BadRequest, e.body_text())
    }
}

#[derive(Debug, Error)]
pub enum ServeError {
    #[error(transparent)]
    Artifacts(#[from] BuildError),
    #[error("bad vectors file {path}: {source}")]
    Vectors { path: PathBuf, source: EmbeddingError },
    #[error("invalid ranking parameters: {0}")]
    Params(String),
    #[error("cannot open reports dir: {0}")]
    Reports(SessionError),
    #[error("no apps found in {0}")]
    NoApps(PathBuf),
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: SocketAddr, source: std::io::Error },
    #[error("server failed: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub apps_dir: PathBuf,
    pub models_dir: PathBuf,
    pub reports_dir: PathBuf,
    pub vectors: PathBuf,
    pub port: u16,
    pub params: RankingParams,
    /// Static UI assets served under `/`, when set.
    pub ui_dir: Option<PathBuf>,
}

/// Shared state behind the router.
pub struct AppState {
    apps: BTreeMap<String, Arc<AppBundle>>,
    store: Arc<EmbeddingStore>,
    params: RankingParams,
    reports: ReportStore,
    sessions: StdMutex<HashMap<String, Arc<Mutex<ReportingSession>>>>,
}

impl AppState {
    pub fn new(apps: Vec<AppBundle>, store: Arc<EmbeddingStore>, params: RankingParams, reports: ReportStore) -> Self {
        AppState {
            apps: apps.into_iter().map(|a| (a.app_id().to_string(), Arc::new(a))).collect(),
            store,
            params,
            reports,
            sessions: StdMutex::new(HashMap::new()),
        }
    }

    /// Loads every app in the configured dirs. Fails on the first missing
    /// or malformed artifact.
    pub fn load(config: &ServiceConfig) -> Result<Self, ServeError> {
        config.params.validate().map_err(ServeError::Params)?;
        let text = read_file(&config.vectors)?;
        let store = EmbeddingStore::load_vectors(&text)
            .map_err(|source| ServeError::Vectors { path: config.vectors.clone(), source })?;
        let ids = list_app_ids(&config.apps_dir)?;
        if ids.is_empty() {
            return Err(ServeError::NoApps(config.apps_dir.clone()));
        }
        let apps = ids
            .iter()
            .map(|id| AppBundle::load(&config.apps_dir, &config.models_dir, id))
            .collect::<Result<Vec<_>, _>>()?;
        let reports = ReportStore::open(&config.reports_dir).map_err(ServeError::Reports)?;
        Ok(AppState::new(apps, Arc::new(store), config.params, reports))
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<ReportingSession>>, ApiError> {
        self.sessions
            .lock()
            .expect("session table poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(ErrorCode::UnknownSession, format!("no session `{id}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppInfo {
    pub app_id: String,
    pub initial_screen: String,
    pub screens: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionOpened {
    pub session_id: String,
    pub initial_screen: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRequest {
    pub full_text: String,
    pub edit: Edit,
    #[serde(default)]
    pub revision: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Submitted {
    pub report_id: String,
}

#[derive(Debug, Deserialize)]
struct ReportQuery {
    app_id: Option<String>,
}

type Shared = Arc<AppState>;

pub fn router(state: Shared, ui_dir: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/healthz", get(healthz))
        .route("/apps", get(list_apps))
        .route("/apps/{id}/sessions", post(open_session))
        .route("/sessions/{id}/events", post(post_event))
        .route("/sessions/{id}/submit", post(submit))
        .route("/reports", get(list_reports))
        .route("/reports/{id}", get(get_report))
        .with_state(state);
    match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

async fn healthz(State(st): State<Shared>) -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ready", "apps": st.apps.len() }))
}

async fn list_apps(State(st): State<Shared>) -> Json<Vec<AppInfo>> {
    Json(
        st.apps
            .values()
            .map(|a| AppInfo {
                app_id: a.app_id().to_string(),
                initial_screen: a.gm().screen_name(a.gm().initial_screen()).to_string(),
                screens: a.spec.screens.len(),
            })
            .collect(),
    )
}

async fn open_session(State(st): State<Shared>, UrlPath(id): UrlPath<String>) -> Result<Json<SessionOpened>, ApiError> {
    let app = st
        .apps
        .get(&id)
        .cloned()
        .ok_or_else(|| ApiError::new(ErrorCode::UnknownApp, format!("no app `{id}`")))?;
    let initial_screen = app.gm().screen_name(app.gm().initial_screen()).to_string();
    let session = ReportingSession::open(app, st.store.clone(), st.params);
    let session_id = session.session_id().to_string();
    st.sessions
        .lock()
        .expect("session table poisoned")
        .insert(session_id.clone(), Arc::new(Mutex::new(session)));
    log::info!("session {session_id} opened for {id}");
    Ok(Json(SessionOpened { session_id, initial_screen }))
}

async fn post_event(
    State(st): State<Shared>,
    UrlPath(id): UrlPath<String>,
    body: Result<Json<EventRequest>, JsonRejection>,
) -> Result<Json<UpdateResult>, ApiError> {
    let Json(req) = body?;
    let session = st.session(&id)?;
    let mut s = session.lock().await;
    Ok(Json(s.on_text_change(&req.full_text, &req.edit, req.revision)?))
}

async fn submit(
    State(st): State<Shared>,
    UrlPath(id): UrlPath<String>,
    body: Result<Json<ReportFields>, JsonRejection>,
) -> Result<Json<Submitted>, ApiError> {
    let Json(fields) = body?;
    let session = st.session(&id)?;
    let mut s = session.lock().await;
    let report = s.submit(fields, &st.reports)?;
    log::info!("session {id} submitted report {}", report.id);
    Ok(Json(Submitted { report_id: report.id }))
}

async fn list_reports(
    State(st): State<Shared>,
    Query(q): Query<ReportQuery>,
) -> Result<Json<Vec<ReportSummary>>, ApiError> {
    Ok(Json(st.reports.list(q.app_id.as_deref())?))
}

async fn get_report(State(st): State<Shared>, UrlPath(id): UrlPath<String>) -> Result<Json<BugReport>, ApiError> {
    st.reports
        .get(&id)?
        .map(Json)
        .ok_or_else(|| ApiError::new(ErrorCode::UnknownReport, format!("no report `{id}`")))
}

/// Handle to a running server.
pub struct ServiceHandle {
    pub addr: SocketAddr,
    shutdown: Option<tokio::sync::oneshot::Sender<()>>,
    task: tokio::task::JoinHandle<std::io::Result<()>>,
}

impl ServiceHandle {
    /// Stops accepting connections and waits for in-flight requests.
    pub async fn shutdown(mut self) -> Result<(), ServeError> {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        self.task.await.map_err(|e| std::io::Error::other(e.to_string()))??;
        Ok(())
    }

    /// Waits for the server to stop on its own (Ctrl-C).
    pub async fn wait(mut self) -> Result<(), ServeError> {
        let _keep = self.shutdown.take();
        self.task.await.map_err(|e| std::io::Error::other(e.to_string()))??;
        Ok(())
    }
}

/// Loads artifacts, binds `127.0.0.1:port` (0 picks a free port) and starts
/// serving. The server also stops on Ctrl-C.
pub async fn serve(config: &ServiceConfig) -> Result<ServiceHandle, ServeError> {
    let state = Arc::new(AppState::load(config)?);
    let addr = SocketAddr::from(([127, 0, 0, 1], config.port));
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|source| ServeError::Bind { addr, source })?;
    let addr = listener.local_addr()?;
    let app = router(state, config.ui_dir.as_deref());
    let (tx, rx) = tokio::sync::oneshot::channel::<()>();
    let task = tokio::spawn(async move {
        axum::serve(listener, app)
            .with_graceful_shutdown(async move {
                tokio::select! {
                    _ = rx => {}
                    _ = tokio::signal::ctrl_c() => {}
                }
            })
            .await
    });
    log::info!("listening on {addr}");
    Ok(ServiceHandle { addr, shutdown: Some(tx), task })
}
