//! Request and response bodies, and the mapping from library errors to HTTP
//! statuses.

use std::path::PathBuf;

use axum::extract::rejection::BytesRejection;
use axum::extract::{FromRequest, Request};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use prefforge::elicitation::{Session, StrategyPipeline};
use prefforge::generation::GenerationConfig;
use prefforge::learner::LearnReport;
use prefforge::model::{Comparison, ComparisonSet, InstanceCatalog, Solution, Verdict};
use prefforge::objective::{GlobalError, ObjectiveFunction};
use prefforge::{Error, Violation};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    /// Comparison set given inline.
    #[serde(default)]
    pub set: Option<ComparisonSet>,
    /// Path of a comparison set document on the server's filesystem.
    #[serde(default)]
    pub set_file: Option<PathBuf>,
    /// Problem instances to pair up with `generation`.
    #[serde(default)]
    pub instances: Option<InstanceCatalog>,
    #[serde(default)]
    pub generation: Option<GenerationConfig>,
    #[serde(default = "default_max_questions")]
    pub max_questions: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tolerance")]
    pub measure_tolerance: f64,
    /// Defaults to the standard strategy pipeline for the set's schema.
    #[serde(default)]
    pub pipeline: Option<StrategyPipeline>,
}

fn default_max_questions() -> usize {
    50
}

fn default_tolerance() -> f64 {
    1.0
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Created {
    pub session_id: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MeasureValue {
    pub id: String,
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SolutionView {
    pub id: String,
    pub instance_id: String,
    pub measures: Vec<MeasureValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub display: Option<String>,
}

/// One question as shown to the user.
#[derive(Debug, Serialize, Deserialize)]
pub struct NextComparison {
    pub comparison_id: String,
    pub stage: usize,
    pub stage_label: String,
    pub asked: usize,
    pub max_questions: usize,
    pub sol1: SolutionView,
    pub sol2: SolutionView,
}

impl NextComparison {
    pub fn new(session: &Session, c: &Comparison) -> Self {
        let view = |s: &Solution| SolutionView {
            id: s.id.clone(),
            instance_id: s.instance_id.clone(),
            measures: session
                .set
                .schema
                .measures
                .iter()
                .zip(&s.measures)
                .map(|(m, v)| MeasureValue {
                    id: m.id.clone(),
                    label: m.label.clone(),
                    value: *v,
                })
                .collect(),
            display: s.display.clone(),
        };
        Self {
            comparison_id: c.id.clone(),
            stage: session.cursor,
            stage_label: session.stage_label().unwrap_or_default(),
            asked: session.asked.len(),
            max_questions: session.max_questions,
            sol1: view(&c.sol1),
            sol2: view(&c.sol2),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Answer {
    pub comparison_id: String,
    pub verdict: Verdict,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Progress {
    pub asked: usize,
    pub max_questions: usize,
    pub finished: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage_label: Option<String>,
}

impl Progress {
    pub fn of(session: &Session) -> Self {
        Self {
            asked: session.asked.len(),
            max_questions: session.max_questions,
            finished: session.is_finished(),
            stage_label: session.stage_label(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Status {
    pub session_id: String,
    pub comparisons: usize,
    pub asked: usize,
    pub max_questions: usize,
    pub finished: bool,
    pub stage: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage_label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pending: Option<String>,
    pub consistency_flags: Vec<String>,
    pub log: Vec<String>,
}

impl Status {
    pub fn of(id: &str, session: &Session) -> Self {
        Self {
            session_id: id.to_owned(),
            comparisons: session.set.comparisons.len(),
            asked: session.asked.len(),
            max_questions: session.max_questions,
            finished: session.is_finished(),
            stage: session.cursor,
            stage_label: session.stage_label(),
            pending: session.pending.as_ref().map(|q| q.comparison_id.clone()),
            consistency_flags: session.consistency_flags(),
            log: session.log.clone(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LearnResponse {
    pub function: ObjectiveFunction,
    pub report: LearnReport,
    /// Error of the learned function on the answered comparisons.
    pub train: GlobalError,
    pub rendered: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<Violation>,
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            body: ErrorBody {
                error: message.into(),
                violations: Vec::new(),
            },
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }

    pub fn not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, format!("no session {id:?}"))
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Protocol(_) => StatusCode::CONFLICT,
            Error::Io { .. } => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        let violations = match &e {
            Error::Invariant(v) => v.clone(),
            _ => Vec::new(),
        };
        Self {
            status,
            body: ErrorBody {
                error: e.to_string(),
                violations,
            },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

/// JSON request body whose every failure, syntax or shape, is a 400.
/// An empty body reads as `{}`.
pub struct Body<T>(pub T);

impl<S: Send + Sync, T: DeserializeOwned> FromRequest<S> for Body<T> {
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, Self::Rejection> {
        let bytes = axum::body::Bytes::from_request(req, state)
            .await
            .map_err(|e: BytesRejection| ApiError::bad_request(e.body_text()))?;
        let text: &[u8] = if bytes.iter().all(u8::is_ascii_whitespace) {
            b"{}"
        } else {
            &bytes
        };
        serde_json::from_slice(text)
            .map(Body)
            .map_err(|e| ApiError::bad_request(format!("malformed body: {e}")))
    }
}
