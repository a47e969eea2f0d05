//! Supervisory control synthesis for discrete-event systems, with a
//! multicopter failsafe model and the runtime that executes its supervisor.

pub mod aut_format;
pub mod automaton;
pub mod composition;
pub mod error;
pub mod multicopter;
pub mod runtime;
pub mod synthesis;

pub use aut_format::{parse_aut, write_aut};
pub use automaton::{
    language_equivalent, Alphabet, Automaton, AutomatonBuilder, Controllability, EventDef, EventId, StateId, Trace,
    Violation,
};
pub use composition::{allevents, selfloop_automaton, selfloop_complete, sync, sync_all, sync_with_pairs};
pub use error::{Error, ParseError, Result};
pub use synthesis::{
    check_controllable, diagnose_blocking, is_controllable, oracle_supremal, supcon, BlockingDiagnosis,
    ControllabilityViolation, SynthesisReport,
};
