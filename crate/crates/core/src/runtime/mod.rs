//! Supervisor execution: transition matrix, decision step, scenario replay
//! and live sessions.

pub mod engine;
pub mod frame;
pub mod matrix;
pub mod session;

pub use engine::{decision_step, run_scenario, RuntimeError, SessionState, StepRecord, DEFAULT_DELTA, DEFAULT_DETECT_INTERVAL};
pub use frame::{EventFrame, Frame};
pub use matrix::{export_matrix, parse_sup, write_sup, MatrixRow, TransitionMatrix};
pub use session::{LiveSession, Snapshot};
