//! The live session service. One task owns the [`LiveSession`]; HTTP
//! handlers talk to it through a command queue and read published
//! snapshots, so no handler ever sees a half-applied frame.

use std::net::SocketAddr;
use std::convert::Infallible;
use std::path::Path;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use axum::extract::rejection::JsonRejection;
use axum::body::Body;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::broadcast::error::RecvError;
use tokio::sync::{broadcast, mpsc, oneshot, watch};
use tokio::time::{interval_at, Instant, MissedTickBehavior};

use sctkit::multicopter::FlightMode;
use sctkit::runtime::{LiveSession, RuntimeError, Snapshot, TransitionMatrix};
use sctkit::StateId;

use crate::commands::read_sup;
use crate::{status, ServeArgs};

const QUEUE: usize = 256;
const STREAM_BUFFER: usize = 1024;

/// Reply to a state mutation, sent once the next decision period has run.
#[derive(Debug, Clone, Serialize)]
struct Ack {
    mode: FlightMode,
    state: StateId,
    period: u64,
}

#[derive(Debug)]
enum Reject {
    Invalid(String),
    Halted(RuntimeError),
}

type Reply = oneshot::Sender<Result<Ack, Reject>>;

#[derive(Debug)]
enum Command {
    Set { updates: Vec<(String, String)>, reply: Reply },
}

#[derive(Debug, Deserialize)]
struct InjectBody {
    group: String,
    event: String,
}

#[derive(Debug, Deserialize)]
struct RcBody {
    stick: Option<String>,
    switch: Option<String>,
}

#[derive(Clone)]
struct AppState {
    commands: mpsc::Sender<Command>,
    snapshots: watch::Receiver<Snapshot>,
    stream: broadcast::Sender<String>,
    shutdown: watch::Receiver<bool>,
}

pub fn serve(a: &ServeArgs) -> Result<u8> {
    let matrix = read_sup(&a.sup)?;
    for (flag, v) in [("--delta", a.delta), ("--detect-interval", a.detect_interval)] {
        if !(v.is_finite() && v > 0.0) {
            bail!("{flag} must be a positive number of seconds, got {v}");
        }
    }
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(run_service(Arc::new(matrix), a))
}

async fn run_service(matrix: Arc<TransitionMatrix>, a: &ServeArgs) -> Result<u8> {
    let addr = format!("{}:{}", a.host, a.port);
    let listener = tokio::net::TcpListener::bind(&addr)
        .await
        .with_context(|| format!("cannot listen on {addr} (port in use?)"))?;
    let bound: SocketAddr = listener.local_addr()?;

    let mut live = LiveSession::new(&matrix);
    live.state.delta = a.delta;
    live.state.detect_interval = a.detect_interval;
    let (snap_tx, snap_rx) = watch::channel(live.snapshot());
    let (cmd_tx, cmd_rx) = mpsc::channel(QUEUE);
    let (stream_tx, _) = broadcast::channel(STREAM_BUFFER);
    let (stop_tx, stop_rx) = watch::channel(false);

    let timing = (Duration::from_secs_f64(a.delta), Duration::from_secs_f64(a.detect_interval));
    let ticker = tokio::spawn(tick_loop(live, matrix, timing, cmd_rx, snap_tx, stream_tx.clone(), stop_rx.clone()));

    let app = Router::new()
        .route("/state", get(get_state))
        .route("/inject", post(post_inject))
        .route("/rc", post(post_rc))
        .route("/events", get(get_events))
        .with_state(AppState { commands: cmd_tx, snapshots: snap_rx, stream: stream_tx, shutdown: stop_rx });

    println!("listening on http://{bound}");
    log::info!("serving {} (delta {}s, detect interval {}s)", a.sup.display(), a.delta, a.detect_interval);
    axum::serve(listener, app)
        .with_graceful_shutdown(async move {
            shutdown_signal().await;
            log::info!("shutting down");
            let _ = stop_tx.send(true);
        })
        .await?;

    let live = ticker.await?;
    write_log(&a.log, &live)?;
    println!("log written to {}", a.log.display());
    Ok(status::OK)
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = term => {}
    }
}

fn write_log(path: &Path, live: &LiveSession) -> Result<()> {
    let doc = json!({
        "mode": live.state.mode,
        "state": live.state.current,
        "period": live.state.period,
        "fault": live.fault,
        "log": live.state.log,
    });
    std::fs::write(path, serde_json::to_string_pretty(&doc)? + "\n").with_context(|| format!("cannot write {}", path.display()))
}

/// Owns the session: applies queued commands every sensing interval and
/// runs one decision step every period. Returns the session on shutdown.
async fn tick_loop(
    mut live: LiveSession,
    matrix: Arc<TransitionMatrix>,
    (delta, detect): (Duration, Duration),
    mut commands: mpsc::Receiver<Command>,
    snapshots: watch::Sender<Snapshot>,
    stream: broadcast::Sender<String>,
    mut stop: watch::Receiver<bool>,
) -> LiveSession {
    let mut decide = interval_at(Instant::now() + delta, delta);
    decide.set_missed_tick_behavior(MissedTickBehavior::Delay);
    let mut sense = interval_at(Instant::now() + detect, detect);
    sense.set_missed_tick_behavior(MissedTickBehavior::Delay);
    let mut pending: Vec<Reply> = Vec::new();

    loop {
        tokio::select! {
            _ = stop.changed() => break,
            _ = sense.tick() => {
                while let Ok(cmd) = commands.try_recv() {
                    let Command::Set { updates, reply } = cmd;
                    if let Some(f) = &live.fault {
                        let _ = reply.send(Err(Reject::Halted(f.clone())));
                        continue;
                    }
                    match apply(&mut live, &updates) {
                        Ok(()) => pending.push(reply),
                        Err(msg) => {
                            let _ = reply.send(Err(Reject::Invalid(msg)));
                        }
                    }
                }
            }
            _ = decide.tick() => {
                match live.tick(&matrix) {
                    Ok(rec) => {
                        log::debug!("period {}: {} via {:?}", rec.period, rec.mode, rec.mce);
                        let ack = Ack { mode: rec.mode, state: rec.state, period: rec.period };
                        snapshots.send_replace(live.snapshot());
                        if let Ok(line) = serde_json::to_string(&rec) {
                            let _ = stream.send(line);
                        }
                        for r in pending.drain(..) {
                            let _ = r.send(Ok(ack.clone()));
                        }
                    }
                    Err(RuntimeError::Halted) => {}
                    Err(e) => {
                        log::warn!("session halted: {e}");
                        snapshots.send_replace(live.snapshot());
                        let _ = stream.send(json!({ "fault": e }).to_string());
                        for r in pending.drain(..) {
                            let _ = r.send(Err(Reject::Halted(e.clone())));
                        }
                    }
                }
            }
        }
    }
    live
}

/// Applies every update or none of them.
fn apply(live: &mut LiveSession, updates: &[(String, String)]) -> Result<(), String> {
    let mut trial = live.sensed;
    for (group, event) in updates {
        trial.set(group, event)?;
    }
    live.sensed = trial;
    Ok(())
}

fn error(code: StatusCode, message: impl Into<String>) -> Response {
    (code, Json(json!({ "error": message.into() }))).into_response()
}

async fn get_state(State(s): State<AppState>) -> Json<Snapshot> {
    Json(s.snapshots.borrow().clone())
}

/// Queues the updates and waits for the acknowledgment of the next tick.
async fn submit(s: &AppState, updates: Vec<(String, String)>) -> Response {
    let (tx, rx) = oneshot::channel();
    if s.commands.send(Command::Set { updates, reply: tx }).await.is_err() {
        return error(StatusCode::SERVICE_UNAVAILABLE, "session is shutting down");
    }
    match rx.await {
        Ok(Ok(ack)) => Json(ack).into_response(),
        Ok(Err(Reject::Invalid(m))) => error(StatusCode::BAD_REQUEST, m),
        Ok(Err(Reject::Halted(e))) => {
            (StatusCode::CONFLICT, Json(json!({ "error": e.to_string(), "fault": e }))).into_response()
        }
        Err(_) => error(StatusCode::SERVICE_UNAVAILABLE, "session is shutting down"),
    }
}

async fn post_inject(State(s): State<AppState>, body: Result<Json<InjectBody>, JsonRejection>) -> Response {
    match body {
        Ok(Json(b)) => submit(&s, vec![(b.group, b.event)]).await,
        Err(r) => error(StatusCode::BAD_REQUEST, r.body_text()),
    }
}

async fn post_rc(State(s): State<AppState>, body: Result<Json<RcBody>, JsonRejection>) -> Response {
    let b = match body {
        Ok(Json(b)) => b,
        Err(r) => return error(StatusCode::BAD_REQUEST, r.body_text()),
    };
    let updates: Vec<(String, String)> = [("stick", b.stick), ("switch", b.switch)]
        .into_iter()
        .filter_map(|(g, v)| v.map(|v| (g.to_string(), v)))
        .collect();
    if updates.is_empty() {
        return error(StatusCode::BAD_REQUEST, "expected `stick` and/or `switch`");
    }
    submit(&s, updates).await
}

/// Newline-delimited JSON: one step record (or fault report) per line.
async fn get_events(State(s): State<AppState>) -> Response {
    let rx = s.stream.subscribe();
    let stream = futures::stream::unfold((rx, s.shutdown.clone()), |(mut rx, mut stop)| async move {
        loop {
            if *stop.borrow() {
                return None;
            }
            tokio::select! {
                _ = stop.changed() => return None,
                msg = rx.recv() => match msg {
                    Ok(line) => return Some((Ok::<_, Infallible>(line + "\n"), (rx, stop))),
                    Err(RecvError::Lagged(n)) => log::warn!("event subscriber lagged by {n} records"),
                    Err(RecvError::Closed) => return None,
                },
            }
        }
    });
    ([(header::CONTENT_TYPE, "application/x-ndjson")], Body::from_stream(stream)).into_response()
}
