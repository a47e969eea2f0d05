//! A live session: the latest sensed values plus the decision state.
//! Health readings and the switch persist until changed; a stick action
//! other than the neutral one and a power event apply to one tick only.

use serde::Serialize;

use crate::automaton::StateId;
use crate::multicopter::catalog::FlightMode;
use crate::multicopter::policy::Stick;

use super::engine::{decision_step, RuntimeError, SessionState, StepRecord};
use super::frame::Frame;
use super::matrix::TransitionMatrix;

pub const LOG_TAIL: usize = 20;

#[derive(Debug, Clone, Serialize)]
pub struct Snapshot {
    pub mode: FlightMode,
    pub state: StateId,
    pub period: u64,
    pub log_tail: Vec<StepRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fault: Option<RuntimeError>,
}

#[derive(Debug, Clone)]
pub struct LiveSession {
    pub state: SessionState,
    pub sensed: Frame,
    pub fault: Option<RuntimeError>,
}

impl LiveSession {
    pub fn new(matrix: &TransitionMatrix) -> Self {
        LiveSession { state: SessionState::new(matrix), sensed: Frame::default(), fault: None }
    }

    /// Sets one group's value. `group` is a health group label, `stick`,
    /// `switch` or `power`.
    pub fn inject(&mut self, group: &str, event: &str) -> Result<(), String> {
        self.sensed.set(group, event)
    }

    /// Runs one decision period on the sensed frame. After a fault every
    /// further tick fails with [`RuntimeError::Halted`].
    pub fn tick(&mut self, matrix: &TransitionMatrix) -> Result<StepRecord, RuntimeError> {
        if self.fault.is_some() {
            return Err(RuntimeError::Halted);
        }
        let result = decision_step(&mut self.state, &self.sensed, matrix);
        self.sensed.stick = Stick::Normal;
        self.sensed.power = None;
        if let Err(e) = &result {
            self.fault = Some(e.clone());
        }
        result
    }

    pub fn snapshot(&self) -> Snapshot {
        let log = &self.state.log;
        Snapshot {
            mode: self.state.mode,
            state: self.state.current,
            period: self.state.period,
            log_tail: log[log.len().saturating_sub(LOG_TAIL)..].to_vec(),
            fault: self.fault.clone(),
        }
    }
}
