//! HTTP and WebSocket front end for [`gesture_rps::Session`].
//!
//! | route | method | body | reply |
//! |---|---|---|---|
//! | `/sessions` | POST | `{locale?, seed?, config?}` | `201 {session_id, seed, state}` |
//! | `/sessions/{id}/state` | GET | | game snapshot |
//! | `/sessions/{id}/command` | POST | `{cmd, arg?}` | game snapshot |
//! | `/sessions/{id}/frames` | WebSocket | frames | `{type: frame|state|error, ...}` |
//!
//! Frames arrive either as binary messages in the [`gesture_rps::wire`]
//! layout or as JSON text with base64 RGBA. Each session sits behind its own
//! mutex so its frames, commands and countdown ticks form one ordered stream.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use gesture_rps::config::Settings;
use gesture_rps::session::{SessionError, SessionEvent, SessionOutput};
use gesture_rps::{
    synthetic, wire, Command, Frame, FrameRole, GameSnapshot, Session, SessionOptions,
};
use serde::Serialize;
use tokio::sync::{broadcast, Mutex, RwLock};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub settings: Settings,
    pub locale_dir: Option<PathBuf>,
    /// Delay between countdown ticks.
    pub tick_interval: Duration,
    /// Required frame size; `None` accepts any size.
    pub frame_size: Option<(usize, usize)>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            settings: Settings::default(),
            locale_dir: None,
            tick_interval: Duration::from_secs(1),
            frame_size: Some((synthetic::WIDTH, synthetic::HEIGHT)),
        }
    }
}

struct Slot {
    session: Session,
    /// Pushes countdown states to every socket attached to the session.
    updates: broadcast::Sender<SessionOutput>,
}

type SlotHandle = Arc<Mutex<Slot>>;

#[derive(Clone)]
pub struct AppState {
    config: Arc<ServiceConfig>,
    sessions: Arc<RwLock<HashMap<String, SlotHandle>>>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        Self {
            config: Arc::new(config),
            sessions: Arc::default(),
        }
    }

    async fn slot(&self, id: &str) -> Result<SlotHandle, ApiError> {
        self.sessions
            .read()
            .await
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(id))
    }

    pub async fn session_count(&self) -> usize {
        self.sessions.read().await.len()
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/state", get(get_state))
        .route("/sessions/{id}/command", post(post_command))
        .route("/sessions/{id}/frames", get(frames_socket))
        .with_state(state)
}

#[derive(Debug, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    status: StatusCode,
    pub code: String,
    pub message: String,
}

impl ApiError {
    fn not_found(id: &str) -> Self {
        Self {
            status: StatusCode::NOT_FOUND,
            code: "unknown_session".into(),
            message: format!("no session with id {id}"),
        }
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let status = match e.code() {
            "illegal_transition" => StatusCode::CONFLICT,
            "config_invalid" | "locale_invalid" => StatusCode::BAD_REQUEST,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        Self {
            status,
            code: e.code().into(),
            message: e.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self)).into_response()
    }
}

#[derive(Debug, Serialize)]
struct Created {
    session_id: String,
    seed: u64,
    state: GameSnapshot,
}

async fn create_session(
    State(app): State<AppState>,
    options: Option<Json<SessionOptions>>,
) -> Result<(StatusCode, Json<Created>), ApiError> {
    let options = options.map(|Json(o)| o).unwrap_or_default();
    let id = uuid::Uuid::new_v4().to_string();
    let session = Session::new(
        id.clone(),
        &app.config.settings,
        &options,
        app.config.locale_dir.clone(),
    )?;
    let created = Created {
        session_id: id.clone(),
        seed: session.seed(),
        state: session.snapshot(),
    };
    let (updates, _) = broadcast::channel(64);
    app.sessions
        .write()
        .await
        .insert(id.clone(), Arc::new(Mutex::new(Slot { session, updates })));
    tracing::info!(session = %id, seed = created.seed, "session created");
    Ok((StatusCode::CREATED, Json(created)))
}

async fn get_state(
    State(app): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<GameSnapshot>, ApiError> {
    let slot = app.slot(&id).await?;
    let snapshot = slot.lock().await.session.snapshot();
    Ok(Json(snapshot))
}

async fn post_command(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Json(cmd): Json<Command>,
) -> Result<Json<GameSnapshot>, ApiError> {
    let slot = app.slot(&id).await?;
    let starts_countdown = cmd == Command::NextRound;
    let snapshot = slot.lock().await.session.command(cmd)?;
    if starts_countdown {
        spawn_countdown(slot, app.config.tick_interval);
    }
    Ok(Json(snapshot))
}

/// Ticks the session until its countdown resolves, pushing every state to
/// attached sockets.
fn spawn_countdown(slot: SlotHandle, interval: Duration) {
    tokio::spawn(async move {
        loop {
            tokio::time::sleep(interval).await;
            let mut guard = slot.lock().await;
            let output = guard.session.handle(SessionEvent::Tick);
            let done = guard.session.countdown().is_none();
            // No receivers is fine: the state stays queryable over HTTP.
            let _ = guard.updates.send(output);
            if done {
                break;
            }
        }
    });
}

async fn frames_socket(
    State(app): State<AppState>,
    Path(id): Path<String>,
    ws: WebSocketUpgrade,
) -> Result<Response, ApiError> {
    let slot = app.slot(&id).await?;
    let frame_size = app.config.frame_size;
    Ok(ws.on_upgrade(move |socket| serve_frames(socket, slot, frame_size)))
}

/// A rejected message: error code and description.
type Rejection = (&'static str, String);

fn decode(
    msg: &Message,
    frame_size: Option<(usize, usize)>,
) -> Result<(Frame, FrameRole), Rejection> {
    let decoded = match msg {
        Message::Binary(bytes) => wire::decode_binary(bytes),
        Message::Text(text) => wire::decode_json(text.as_str()),
        _ => unreachable!("control frames are filtered by the caller"),
    };
    let (frame, role) = decoded.map_err(|e| ("bad_frame", e.to_string()))?;
    if let Some((w, h)) = frame_size {
        if (frame.width(), frame.height()) != (w, h) {
            return Err((
                "frame_size",
                format!(
                    "frames must be {w}x{h}, got {}x{}",
                    frame.width(),
                    frame.height()
                ),
            ));
        }
    }
    Ok((frame, role))
}

async fn send(socket: &mut WebSocket, output: &SessionOutput) -> bool {
    let text = serde_json::to_string(output).expect("session outputs always serialize");
    socket.send(Message::Text(text.into())).await.is_ok()
}

async fn serve_frames(mut socket: WebSocket, slot: SlotHandle, frame_size: Option<(usize, usize)>) {
    let mut updates = slot.lock().await.updates.subscribe();
    loop {
        tokio::select! {
            incoming = socket.recv() => {
                let msg = match incoming {
                    Some(Ok(msg @ (Message::Binary(_) | Message::Text(_)))) => msg,
                    Some(Ok(Message::Close(_))) | None | Some(Err(_)) => break,
                    Some(Ok(_)) => continue,
                };
                let output = match decode(&msg, frame_size) {
                    Ok((frame, role)) => slot.lock().await.session.handle(SessionEvent::Frame(role, frame)),
                    Err((code, message)) => SessionOutput::Error { code: code.into(), message },
                };
                if !send(&mut socket, &output).await {
                    break;
                }
            }
            update = updates.recv() => {
                match update {
                    Ok(output) => {
                        if !send(&mut socket, &output).await {
                            break;
                        }
                    }
                    Err(broadcast::error::RecvError::Lagged(_)) => continue,
                    Err(broadcast::error::RecvError::Closed) => break,
                }
            }
        }
    }
}
