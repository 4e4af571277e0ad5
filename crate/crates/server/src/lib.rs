//! HTTP service for elicitation sessions.
//!
//! Sessions live in an in-memory registry, each behind its own lock so
//! requests to different sessions run independently. With a data directory,
//! every session is written to `<dir>/<id>.json` after each change and
//! reloaded at startup. Learning runs on the blocking thread pool.
//!
//! | method | path                        | body                    | reply                        |
//! |--------|-----------------------------|-------------------------|------------------------------|
//! | POST   | `/sessions`                 | [`api::CreateSession`]  | 201 [`api::Created`]         |
//! | GET    | `/sessions/{id}`            |                         | 200 [`api::Status`]          |
//! | GET    | `/sessions/{id}/next`       |                         | 200 [`api::NextComparison`], 204 when finished |
//! | POST   | `/sessions/{id}/preference` | [`api::Answer`]         | 200 [`api::Progress`]        |
//! | POST   | `/sessions/{id}/learn`      | `LearnConfig` (optional) | 200 [`api::LearnResponse`] |
//! | GET    | `/sessions/{id}/export`     |                         | 200 session document         |
//!
//! Unknown sessions give 404, malformed or invalid input 400, and answers
//! that do not match the outstanding question 409.

pub mod api;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::extract::{Path as UrlPath, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use prefforge::elicitation::{default_pipeline, Session};
use prefforge::generation::generate_comparisons;
use prefforge::model::{ComparisonSet, Preference};
use prefforge::objective::{global_error, render_rules};
use prefforge::{io, learn_objective, LearnConfig};
use tokio::sync::{Mutex, RwLock};
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;
use tracing::{info, warn};

use api::{Answer, ApiError, Body, CreateSession, Created, LearnResponse, NextComparison, Progress, Status};

type Shared = Arc<Mutex<Session>>;

#[derive(Clone, Debug, Default)]
pub struct ServerConfig {
    /// Where sessions are persisted; in-memory only when unset.
    pub data_dir: Option<PathBuf>,
    /// Static files (the browser UI) served for every path the API does not claim.
    pub static_dir: Option<PathBuf>,
}

pub struct AppState {
    sessions: RwLock<HashMap<String, Shared>>,
    data_dir: Option<PathBuf>,
}

impl AppState {
    /// Empty registry, or the sessions found in `config.data_dir`.
    pub fn new(config: &ServerConfig) -> prefforge::Result<Self> {
        let mut sessions = HashMap::new();
        if let Some(dir) = &config.data_dir {
            std::fs::create_dir_all(dir).map_err(|source| prefforge::Error::Io {
                path: dir.clone(),
                source,
            })?;
            for (id, session) in load_dir(dir)? {
                sessions.insert(id, Arc::new(Mutex::new(session)));
            }
        }
        Ok(Self {
            sessions: RwLock::new(sessions),
            data_dir: config.data_dir.clone(),
        })
    }

    pub async fn session_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.sessions.read().await.keys().cloned().collect();
        ids.sort();
        ids
    }

    async fn get(&self, id: &str) -> Result<Shared, ApiError> {
        self.sessions
            .read()
            .await
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(id))
    }

    fn persist(&self, id: &str, session: &Session) -> Result<(), ApiError> {
        if let Some(dir) = &self.data_dir {
            io::save(dir.join(format!("{id}.json")), session)?;
        }
        Ok(())
    }
}

fn load_dir(dir: &Path) -> prefforge::Result<Vec<(String, Session)>> {
    let io_err = |source| prefforge::Error::Io {
        path: dir.to_owned(),
        source,
    };
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io_err)? {
        let path = entry.map_err(io_err)?.path();
        if path.extension().is_none_or(|e| e != "json") {
            continue;
        }
        let Some(id) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        match io::load::<Session>(&path) {
            Ok(session) => out.push((id.to_owned(), session)),
            Err(e) => warn!(path = %path.display(), error = %e, "skipping unreadable session file"),
        }
    }
    Ok(out)
}

pub fn router(state: Arc<AppState>, static_dir: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(status))
        .route("/sessions/{id}/next", get(next))
        .route("/sessions/{id}/preference", post(preference))
        .route("/sessions/{id}/learn", post(learn))
        .route("/sessions/{id}/export", get(export))
        .with_state(state);
    let app = match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    app.layer(CorsLayer::permissive())
}

/// Binds `addr` and serves until Ctrl-C.
pub async fn serve(addr: SocketAddr, config: ServerConfig) -> anyhow::Result<()> {
    let state = Arc::new(AppState::new(&config)?);
    let loaded = state.session_ids().await.len();
    let listener = tokio::net::TcpListener::bind(addr).await?;
    info!(addr = %listener.local_addr()?, sessions = loaded, "listening");
    axum::serve(listener, router(state, config.static_dir.as_deref()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

fn source_set(req: &CreateSession) -> Result<ComparisonSet, ApiError> {
    let sources = [req.set.is_some(), req.set_file.is_some(), req.instances.is_some()];
    if sources.iter().filter(|s| **s).count() != 1 {
        return Err(ApiError::bad_request("give exactly one of set, set_file and instances"));
    }
    if req.generation.is_some() && req.instances.is_none() {
        return Err(ApiError::bad_request("generation applies to instances only"));
    }
    let mut set = if let Some(set) = &req.set {
        let violations = set.validate();
        if !violations.is_empty() {
            return Err(prefforge::Error::Invariant(violations).into());
        }
        set.clone()
    } else if let Some(path) = &req.set_file {
        io::load::<ComparisonSet>(path).map_err(|e| ApiError::bad_request(e.to_string()))?
    } else {
        let catalog = req.instances.as_ref().expect("one source is present");
        let violations = catalog.validate();
        if !violations.is_empty() {
            return Err(prefforge::Error::Invariant(violations).into());
        }
        let gen = req.generation.clone().unwrap_or_default();
        generate_comparisons(&catalog.schema, &catalog.instances, &gen)?.set
    };
    // A session collects its own answers.
    set.preferences.clear();
    Ok(set)
}

async fn create_session(
    State(state): State<Arc<AppState>>,
    Body(req): Body<CreateSession>,
) -> Result<(StatusCode, Json<Created>), ApiError> {
    let set = source_set(&req)?;
    let pipeline = req
        .pipeline
        .clone()
        .unwrap_or_else(|| default_pipeline(&set.schema, req.max_questions));
    let session = Session::new(set, pipeline, req.max_questions, req.measure_tolerance, req.seed)?;
    let id = uuid::Uuid::new_v4().to_string();
    state.persist(&id, &session)?;
    state
        .sessions
        .write()
        .await
        .insert(id.clone(), Arc::new(Mutex::new(session)));
    info!(session = %id, "created");
    Ok((StatusCode::CREATED, Json(Created { session_id: id })))
}

async fn status(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Result<Json<Status>, ApiError> {
    let shared = state.get(&id).await?;
    let session = shared.lock().await;
    Ok(Json(Status::of(&id, &session)))
}

async fn next(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Result<Response, ApiError> {
    let shared = state.get(&id).await?;
    let mut session = shared.lock().await;
    let before = (session.pending.clone(), session.cursor);
    let comparison = session.next_comparison();
    if (session.pending.clone(), session.cursor) != before {
        state.persist(&id, &session)?;
    }
    Ok(match comparison {
        Some(c) => Json(NextComparison::new(&session, &c)).into_response(),
        None => StatusCode::NO_CONTENT.into_response(),
    })
}

async fn preference(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    Body(answer): Body<Answer>,
) -> Result<Json<Progress>, ApiError> {
    let shared = state.get(&id).await?;
    let mut session = shared.lock().await;
    session.submit_preference(Preference::new(answer.comparison_id, answer.verdict))?;
    state.persist(&id, &session)?;
    Ok(Json(Progress::of(&session)))
}

async fn learn(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    Body(config): Body<LearnConfig>,
) -> Result<Json<LearnResponse>, ApiError> {
    let shared = state.get(&id).await?;
    // Copy the answers out so the session stays usable while learning runs.
    let set = shared.lock().await.set.answered_subset();
    if set.comparisons.is_empty() {
        return Err(ApiError::bad_request("no answered comparisons to learn from"));
    }
    let response = tokio::task::spawn_blocking(move || -> prefforge::Result<LearnResponse> {
        let learned = learn_objective(&set, &config)?;
        let train = global_error(&learned.function, &set, &config.error_model()?)?;
        Ok(LearnResponse {
            rendered: render_rules(&learned.function),
            function: learned.function,
            report: learned.report,
            train,
        })
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    Ok(Json(response))
}

async fn export(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Result<Response, ApiError> {
    let shared = state.get(&id).await?;
    let text = io::to_json(&*shared.lock().await)?;
    Ok(([(header::CONTENT_TYPE, "application/json")], text).into_response())
}
