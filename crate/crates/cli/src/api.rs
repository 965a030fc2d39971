//! JSON-over-HTTP access to one game and its strategy.
//!
//! All handlers are stateless; the client carries the position. Malformed
//! requests get 400 and positions off the board get 422.

use std::collections::HashMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use latgame::format::region_points;
use latgame::strat::AffineStratification;
use latgame::strategy::{congruent, CongruenceOptions, Engine};
use latgame::{linalg, Classification, Error};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

pub struct AppState {
    engine: Engine,
    strat: Option<AffineStratification>,
}

impl AppState {
    pub fn new(engine: Engine, strat: Option<AffineStratification>) -> Self {
        Self { engine, strat }
    }

    fn mode(&self) -> &'static str {
        let game = self.engine.game();
        let gens = &game.board().defeated_generators;
        if gens.is_empty() {
            "normal"
        } else if gens.len() == 1 && linalg::is_zero(&gens[0]) {
            "misere"
        } else {
            "custom"
        }
    }
}

type Shared = Arc<AppState>;

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/api/meta", get(meta))
        .route("/api/region", get(region))
        .route("/api/classify", post(classify))
        .route("/api/move", post(winning_move))
        .route("/api/play", post(play))
        .route("/api/congruent", post(congruence))
        .with_state(state)
}

struct ApiError {
    status: StatusCode,
    kind: String,
    message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        Self { status: StatusCode::BAD_REQUEST, kind: "malformed_request".into(), message: message.into() }
    }

    fn off_board(pos: &[i64]) -> Self {
        Error::PositionOffBoard(pos.to_vec()).into()
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::DimensionMismatch { .. } | Error::Format(_) => StatusCode::BAD_REQUEST,
            Error::PositionOffBoard(_) | Error::RegionTooLarge { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        Self { status, kind: e.kind().into(), message: e.to_string() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({"error": self.kind, "message": self.message}))).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn body<T: DeserializeOwned>(bytes: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::bad_request(e.to_string()))
}

fn check_pos(state: &AppState, pos: &[i64]) -> Result<(), ApiError> {
    let d = state.engine.game().dim();
    if pos.len() != d {
        return Err(ApiError::bad_request(format!("position has {} coordinates, expected {d}", pos.len())));
    }
    Ok(())
}

/// Runs exact computations off the async workers.
async fn blocking<T, F>(state: Shared, f: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce(&AppState) -> Result<T, ApiError> + Send + 'static,
{
    tokio::task::spawn_blocking(move || f(&state))
        .await
        .map_err(|e| ApiError { status: StatusCode::INTERNAL_SERVER_ERROR, kind: "internal".into(), message: e.to_string() })?
}

#[derive(Serialize)]
struct Meta {
    d: usize,
    gamma: Vec<Vec<i64>>,
    mode: &'static str,
    ell: Vec<i64>,
    orthant: bool,
    has_strategy: bool,
}

async fn meta(State(state): State<Shared>) -> Json<Meta> {
    let game = state.engine.game();
    Json(Meta {
        d: game.dim(),
        gamma: game.moves().to_vec(),
        mode: state.mode(),
        ell: game.ell().to_vec(),
        orthant: game.cone().is_orthant(),
        has_strategy: state.engine.strategy().is_some(),
    })
}

async fn region(State(state): State<Shared>, Query(q): Query<HashMap<String, String>>) -> Response {
    let level = match q.get("level").map(|s| s.parse::<i64>()) {
        Some(Ok(l)) => l,
        _ => return ApiError::bad_request("query parameter level must be an integer").into_response(),
    };
    let result = blocking(state, move |s| {
        let region = s.engine.oracle().region(level)?.restrict(level);
        Ok(json!({"level": level, "points": region_points(&region)}))
    })
    .await;
    match result {
        Ok(v) => Json(v).into_response(),
        Err(e) => e.into_response(),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PosRequest {
    pos: Vec<i64>,
}

async fn classify(State(state): State<Shared>, bytes: Bytes) -> ApiResult<serde_json::Value> {
    let req: PosRequest = body(&bytes)?;
    check_pos(&state, &req.pos)?;
    let pos = req.pos.clone();
    let label = blocking(state, move |s| Ok(s.engine.classify(&req.pos)?)).await?;
    if label == Classification::OffBoard {
        return Err(ApiError::off_board(&pos));
    }
    Ok(Json(json!({"label": label})))
}

async fn winning_move(State(state): State<Shared>, bytes: Bytes) -> ApiResult<serde_json::Value> {
    let req: PosRequest = body(&bytes)?;
    check_pos(&state, &req.pos)?;
    let moves = blocking(state, move |s| Ok(s.engine.winning_moves(&req.pos)?)).await?;
    Ok(Json(json!({"moves": moves})))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PlayRequest {
    pos: Vec<i64>,
    #[serde(rename = "move")]
    mv: Vec<i64>,
}

#[derive(Serialize)]
struct PlayResponse {
    /// Position after the human move.
    after_move: Vec<i64>,
    /// The engine's reply, absent when it has no winning move.
    reply: Option<Vec<i64>>,
    /// Position after the reply, or `after_move` when there is none.
    position: Vec<i64>,
    label: Classification,
    no_winning_move: bool,
    /// The engine's legal moves when it has no winning move.
    legal_moves: Vec<Vec<i64>>,
}

async fn play(State(state): State<Shared>, bytes: Bytes) -> ApiResult<PlayResponse> {
    let req: PlayRequest = body(&bytes)?;
    check_pos(&state, &req.pos)?;
    check_pos(&state, &req.mv)?;
    let resp = blocking(state, move |s| {
        let game = s.engine.game();
        if !game.board_contains(&req.pos) {
            return Err(ApiError::off_board(&req.pos));
        }
        if !game.moves().contains(&req.mv) {
            return Err(ApiError {
                status: StatusCode::UNPROCESSABLE_ENTITY,
                kind: "illegal_move".into(),
                message: format!("{:?} is not in the rule set", req.mv),
            });
        }
        let after = linalg::sub(&req.pos, &req.mv);
        if !game.board_contains(&after) {
            return Err(ApiError::off_board(&after));
        }
        let winning = s.engine.winning_moves(&after)?;
        let (reply, position, legal_moves) = match winning.first() {
            Some(g) => (Some(g.clone()), linalg::sub(&after, g), Vec::new()),
            None => {
                let legal = game.legal_moves(&after)?.into_iter().map(<[i64]>::to_vec).collect();
                (None, after.clone(), legal)
            }
        };
        let label = s.engine.classify(&position)?;
        Ok(PlayResponse { after_move: after, no_winning_move: reply.is_none(), reply, position, label, legal_moves })
    })
    .await?;
    Ok(Json(resp))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CongruentRequest {
    p: Vec<i64>,
    q: Vec<i64>,
    #[serde(default)]
    radius: Option<i64>,
    #[serde(default)]
    trials: Option<usize>,
}

async fn congruence(State(state): State<Shared>, bytes: Bytes) -> ApiResult<serde_json::Value> {
    let req: CongruentRequest = body(&bytes)?;
    check_pos(&state, &req.p)?;
    check_pos(&state, &req.q)?;
    let verdict = blocking(state, move |s| {
        let mut opts = CongruenceOptions { radius: req.radius, ..CongruenceOptions::default() };
        if let Some(t) = req.trials {
            opts.trials = t;
        }
        Ok(congruent(&s.engine, s.strat.as_ref(), &req.p, &req.q, &opts)?)
    })
    .await?;
    Ok(Json(serde_json::to_value(verdict).expect("verdict serializes")))
}
