//! HTTP/JSON service that lets a person act as the oracle of a learner.
//!
//! | method | path | body | reply |
//! |---|---|---|---|
//! | `POST` | `/sessions` | [`CreateSession`] | 201, [`SessionView`] |
//! | `GET` | `/sessions/{id}` | | [`SessionView`] |
//! | `POST` | `/sessions/{id}/answer` | [`AnswerRequest`] | [`SessionView`] |
//! | `GET` | `/sessions/{id}/network` | | [`NetworkView`] |
//! | `DELETE` | `/sessions/{id}` | | 204 |
//!
//! Errors are `{"error": "..."}` with 400 (bad config), 404 (unknown
//! session) or 409 (stale `query_id`, or no question outstanding).

mod session;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;
use tower_http::cors::CorsLayer;

pub use session::{
    AnswerRequest, CreateSession, EdgeView, HistoryEntry, NetworkView, PrunedView, QueryView,
    Session, SessionError, SessionState, SessionView, StatsView,
};

#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    /// Write `{id}.json` here after every change.
    pub snapshot_dir: Option<PathBuf>,
    /// Send permissive cross-origin headers (local UI development).
    pub cors: bool,
}

type SessionRef = Arc<Mutex<Session>>;

/// Shared state: the session store. Each session is locked on its own, so
/// different sessions proceed in parallel.
#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<RwLock<HashMap<String, SessionRef>>>,
    snapshot_dir: Option<PathBuf>,
}

impl AppState {
    pub fn new(snapshot_dir: Option<PathBuf>) -> Self {
        AppState {
            sessions: Arc::default(),
            snapshot_dir,
        }
    }

    pub fn session_count(&self) -> usize {
        self.sessions.read().expect("session store poisoned").len()
    }

    fn get(&self, id: &str) -> Result<SessionRef, SessionError> {
        self.sessions
            .read()
            .expect("session store poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| SessionError::NotFound(id.to_string()))
    }

    fn snapshot(&self, s: &Session) {
        let Some(dir) = &self.snapshot_dir else {
            return;
        };
        #[derive(Serialize)]
        struct Snapshot<'a> {
            session: SessionView,
            history: &'a [HistoryEntry],
            network: NetworkView,
        }
        let snap = Snapshot {
            session: s.view(),
            history: s.history(),
            network: s.network_view(),
        };
        let path = dir.join(format!("{}.json", s.id()));
        let written = std::fs::create_dir_all(dir).and_then(|_| {
            std::fs::write(
                &path,
                serde_json::to_vec_pretty(&snap).expect("snapshot serializes"),
            )
        });
        if let Err(e) = written {
            eprintln!("warning: cannot write snapshot {}: {e}", path.display());
        }
    }
}

struct ApiError(SessionError);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match self.0 {
            SessionError::Invalid(_) => StatusCode::BAD_REQUEST,
            SessionError::NotFound(_) => StatusCode::NOT_FOUND,
            SessionError::Stale { .. } | SessionError::NotAwaiting(_) => StatusCode::CONFLICT,
        };
        (
            status,
            Json(serde_json::json!({ "error": self.0.to_string() })),
        )
            .into_response()
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        ApiError(e)
    }
}

async fn create(
    State(st): State<AppState>,
    Json(req): Json<CreateSession>,
) -> Result<impl IntoResponse, ApiError> {
    let id = uuid::Uuid::new_v4().simple().to_string();
    let session = Session::create(id.clone(), &req)?;
    st.snapshot(&session);
    let view = session.view();
    st.sessions
        .write()
        .expect("session store poisoned")
        .insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(view)))
}

async fn show(
    State(st): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<SessionView>, ApiError> {
    let s = st.get(&id)?;
    let view = s.lock().expect("session poisoned").view();
    Ok(Json(view))
}

async fn answer(
    State(st): State<AppState>,
    Path(id): Path<String>,
    Json(req): Json<AnswerRequest>,
) -> Result<Json<SessionView>, ApiError> {
    let s = st.get(&id)?;
    let mut guard = s.lock().expect("session poisoned");
    guard.answer(req)?;
    st.snapshot(&guard);
    Ok(Json(guard.view()))
}

async fn network(
    State(st): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<NetworkView>, ApiError> {
    let s = st.get(&id)?;
    let view = s.lock().expect("session poisoned").network_view();
    Ok(Json(view))
}

async fn remove(
    State(st): State<AppState>,
    Path(id): Path<String>,
) -> Result<StatusCode, ApiError> {
    st.sessions
        .write()
        .expect("session store poisoned")
        .remove(&id)
        .map(|_| StatusCode::NO_CONTENT)
        .ok_or(ApiError(SessionError::NotFound(id)))
}

pub fn router(state: AppState, cors: bool) -> Router {
    let app = Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(show).delete(remove))
        .route("/sessions/{id}/answer", post(answer))
        .route("/sessions/{id}/network", get(network))
        .with_state(state);
    if cors {
        app.layer(CorsLayer::permissive())
    } else {
        app
    }
}

/// Serves until the process is stopped.
pub async fn serve(addr: SocketAddr, cfg: ServiceConfig) -> std::io::Result<()> {
    let app = router(AppState::new(cfg.snapshot_dir), cfg.cors);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app).await
}
