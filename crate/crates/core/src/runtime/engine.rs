//! The periodic decision step: feed one frame through the matrix until a
//! single MCE lands on an accepting state.

use serde::Serialize;
use thiserror::Error;

use crate::automaton::{StateId, Trace};
use crate::multicopter::catalog::{is_mce, FlightMode};

use super::frame::{EventFrame, Frame};
use super::matrix::TransitionMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RuntimeError {
    #[error("period {period}: deadlock at state {state}, no frame event and no MCE defined")]
    Deadlock { period: u64, state: StateId },
    #[error("period {period}: ambiguous at state {state}, candidates {}", .candidates.join(", "))]
    Ambiguity { period: u64, state: StateId, candidates: Vec<String> },
    #[error("period {period}: MCE led to non-accepting state {state}")]
    NotAccepting { period: u64, state: StateId },
    #[error("period {period}: invalid frame: {message}")]
    InvalidFrame { period: u64, message: String },
    #[error("session is halted after an earlier fault")]
    Halted,
}

/// One decision period, as logged and published.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub period: u64,
    pub mode: FlightMode,
    /// `None` when nothing in the frame applied and the mode was kept.
    pub mce: Option<String>,
    pub consumed: Trace,
    pub state: StateId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionState {
    pub current: StateId,
    pub mode: FlightMode,
    /// Index of the next decision period.
    pub period: u64,
    /// Decision period, seconds.
    pub delta: f64,
    /// Sensing interval, seconds.
    pub detect_interval: f64,
    pub log: Vec<StepRecord>,
}

pub const DEFAULT_DELTA: f64 = 1.0;
pub const DEFAULT_DETECT_INTERVAL: f64 = 0.01;

impl SessionState {
    pub fn new(matrix: &TransitionMatrix) -> Self {
        let current = matrix.initial();
        SessionState {
            current,
            mode: matrix.mode_of(current).unwrap_or(FlightMode::PowerOff),
            period: 0,
            delta: DEFAULT_DELTA,
            detect_interval: DEFAULT_DETECT_INTERVAL,
            log: Vec::new(),
        }
    }
}

/// Advances `session` by one period. Power events take priority over the
/// rest of the frame; otherwise the unique frame event defined at the
/// present state is consumed until only an MCE remains. Events the path
/// never asks for are discarded. If nothing applies at the starting state
/// (powered off without power-on, for instance) the mode is kept and the
/// record carries no MCE.
pub fn decision_step(
    session: &mut SessionState,
    frame: &Frame,
    matrix: &TransitionMatrix,
) -> Result<StepRecord, RuntimeError> {
    let period = session.period;
    let start = session.current;
    let mut q = start;
    let mut pending = frame.events();
    let mut consumed = Vec::new();
    let record = loop {
        let defined: Vec<(usize, StateId)> = pending
            .iter()
            .enumerate()
            .filter_map(|(i, ev)| matrix.lookup(q, ev).map(|d| (i, d)))
            .collect();
        let power = defined.iter().find(|(i, _)| Some(pending[*i]) == frame.power);
        let pick = match (power, defined.len()) {
            (Some(&p), _) => Some(p),
            (None, 1) => Some(defined[0]),
            (None, 0) => None,
            (None, _) => {
                return Err(RuntimeError::Ambiguity {
                    period,
                    state: q,
                    candidates: defined.iter().map(|(i, _)| pending[*i].to_string()).collect(),
                })
            }
        };
        if let Some((i, d)) = pick {
            let ev = pending.remove(i);
            if Some(ev) == frame.power {
                // A power change ends the period's checks.
                pending.clear();
            }
            consumed.push(ev.to_string());
            q = d;
            continue;
        }
        let mces: Vec<_> = matrix.outgoing(q).iter().filter(|r| is_mce(&r.event)).collect();
        match mces.len() {
            0 if q == start => {
                break StepRecord { period, mode: session.mode, mce: None, consumed: Trace(consumed), state: q };
            }
            0 => return Err(RuntimeError::Deadlock { period, state: q }),
            1 => {
                let row = mces[0];
                consumed.push(row.event.clone());
                let mode = matrix
                    .mode_of(row.destination)
                    .ok_or(RuntimeError::NotAccepting { period, state: row.destination })?;
                break StepRecord {
                    period,
                    mode,
                    mce: Some(row.event.clone()),
                    consumed: Trace(consumed),
                    state: row.destination,
                };
            }
            _ => {
                return Err(RuntimeError::Ambiguity {
                    period,
                    state: q,
                    candidates: mces.iter().map(|r| r.event.clone()).collect(),
                })
            }
        }
    };
    session.current = record.state;
    session.mode = record.mode;
    session.period += 1;
    session.log.push(record.clone());
    Ok(record)
}

/// Folds [`decision_step`] over `frames` from the initial state. The
/// returned session holds the timeline in its log.
pub fn run_scenario(matrix: &TransitionMatrix, frames: &[EventFrame]) -> Result<SessionState, RuntimeError> {
    let mut session = SessionState::new(matrix);
    for (k, raw) in frames.iter().enumerate() {
        let frame = raw
            .validate()
            .map_err(|message| RuntimeError::InvalidFrame { period: k as u64, message })?;
        decision_step(&mut session, &frame, matrix)?;
    }
    Ok(session)
}
