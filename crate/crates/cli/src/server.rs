use std::sync::{Arc, OnceLock};
use std::time::Instant;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use termcoder_core::{Coder, EncodingResult, TermEntry};

use crate::review::{ReviewDecision, ReviewError, ReviewLog, ReviewRecord};

pub const DEFAULT_MAX_TERMS: usize = 6;
pub const DEFAULT_SEARCH_LIMIT: usize = 20;
pub const MAX_SEARCH_LIMIT: usize = 200;
/// Request bodies above this size are refused.
pub const BODY_LIMIT: usize = 1 << 20;

/// Shared by all requests. The coder is set once the dictionary has loaded.
#[derive(Debug)]
pub struct AppState {
    coder: OnceLock<Arc<Coder>>,
    review_log: ReviewLog,
}

impl AppState {
    pub fn new(review_log: ReviewLog) -> Self {
        AppState {
            coder: OnceLock::new(),
            review_log,
        }
    }

    pub fn with_coder(coder: Coder, review_log: ReviewLog) -> Self {
        let state = Self::new(review_log);
        state.set_coder(coder);
        state
    }

    /// Marks the service ready. Later calls are ignored.
    pub fn set_coder(&self, coder: Coder) {
        let _ = self.coder.set(Arc::new(coder));
    }

    fn coder(&self) -> Result<Arc<Coder>, ApiError> {
        self.coder.get().cloned().ok_or_else(|| ApiError {
            status: StatusCode::SERVICE_UNAVAILABLE,
            message: "dictionary is still loading".into(),
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub c3_threshold: Option<f64>,
    pub c4_threshold: Option<f64>,
    pub enable_c5: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncodeRequest {
    pub text: String,
    pub max_terms: Option<usize>,
    #[serde(default)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodeResponse {
    #[serde(flatten)]
    pub result: EncodingResult,
    pub timing_ms: f64,
}

#[derive(Debug, Deserialize)]
pub struct TermsQuery {
    pub q: Option<String>,
    pub limit: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermHit {
    pub llt_id: String,
    pub llt_text: String,
    pub pt_id: String,
    pub pt_text: String,
}

impl From<&TermEntry> for TermHit {
    fn from(e: &TermEntry) -> Self {
        TermHit {
            llt_id: e.llt_id.clone(),
            llt_text: e.llt_text.clone(),
            pt_id: e.pt_id.clone(),
            pt_text: e.pt_text.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Health {
    pub ready: bool,
    /// Official terms, pseudo terms excluded.
    pub terms: usize,
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            message: message.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = serde_json::json!({ "error": self.message });
        (self.status, Json(body)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        Self::bad_request(r.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        Self::bad_request(r.body_text())
    }
}

impl From<ReviewError> for ApiError {
    fn from(e: ReviewError) -> Self {
        let status = match e {
            ReviewError::UnknownTerm(_) | ReviewError::MissingField(_) => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError {
            status,
            message: e.to_string(),
        }
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/encode", post(encode))
        .route("/api/terms", get(terms))
        .route("/api/review", post(review))
        .layer(axum::extract::DefaultBodyLimit::max(BODY_LIMIT))
        .with_state(state)
}

async fn health(State(state): State<Arc<AppState>>) -> Json<Health> {
    let terms = state
        .coder
        .get()
        .map_or(0, |c| c.terminology().stats().term_count);
    Json(Health {
        ready: state.coder.get().is_some(),
        terms,
    })
}

async fn encode(
    State(state): State<Arc<AppState>>,
    body: Result<Json<EncodeRequest>, JsonRejection>,
) -> Result<Json<EncodeResponse>, ApiError> {
    let coder = state.coder()?;
    let Json(req) = body?;
    let max_terms = req.max_terms.unwrap_or(DEFAULT_MAX_TERMS);
    if max_terms == 0 {
        return Err(ApiError::bad_request("max_terms must be at least 1"));
    }
    let mut selection = coder.config().selection();
    let o = req.overrides;
    selection.c3_threshold = o.c3_threshold.unwrap_or(selection.c3_threshold);
    selection.c4_threshold = o.c4_threshold.unwrap_or(selection.c4_threshold);
    selection.enable_c5 = o.enable_c5.unwrap_or(selection.enable_c5);
    if !selection.c3_threshold.is_finite() || !selection.c4_threshold.is_finite() {
        return Err(ApiError::bad_request("thresholds must be finite"));
    }
    let response = tokio::task::spawn_blocking(move || {
        let start = Instant::now();
        let result = coder.encode_custom(&req.text, max_terms, &selection);
        EncodeResponse {
            result,
            timing_ms: start.elapsed().as_secs_f64() * 1e3,
        }
    })
    .await
    .map_err(|e| ApiError {
        status: StatusCode::INTERNAL_SERVER_ERROR,
        message: e.to_string(),
    })?;
    Ok(Json(response))
}

async fn terms(
    State(state): State<Arc<AppState>>,
    query: Result<Query<TermsQuery>, QueryRejection>,
) -> Result<Json<Vec<TermHit>>, ApiError> {
    let coder = state.coder()?;
    let Query(query) = query?;
    let q = query.q.as_deref().map(str::trim).unwrap_or_default();
    if q.is_empty() {
        return Err(ApiError::bad_request("query parameter q must not be empty"));
    }
    let limit = query
        .limit
        .unwrap_or(DEFAULT_SEARCH_LIMIT)
        .clamp(1, MAX_SEARCH_LIMIT);
    let hits = coder
        .terminology()
        .search_prefix(q, limit)
        .into_iter()
        .map(TermHit::from)
        .collect();
    Ok(Json(hits))
}

async fn review(
    State(state): State<Arc<AppState>>,
    body: Result<Json<ReviewDecision>, JsonRejection>,
) -> Result<Json<ReviewRecord>, ApiError> {
    let coder = state.coder()?;
    let Json(decision) = body?;
    decision.validate(coder.terminology())?;
    Ok(Json(state.review_log.append(decision)?))
}
