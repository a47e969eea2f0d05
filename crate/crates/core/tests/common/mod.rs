#![allow(dead_code)]

use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use sctkit::multicopter::{synthesize_failsafe, FlightMode, Health, Stick, Switch};
use sctkit::runtime::{export_matrix, Frame, SessionState, TransitionMatrix};
use sctkit::{Alphabet, Automaton, EventDef, SynthesisReport};

pub mod sr;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// `n` events named `e0..`, the first `uncontrollable` of them uncontrollable.
pub fn alphabet(n: usize, uncontrollable: usize) -> Alphabet {
    Alphabet::new((0..n).map(|i| {
        let name = format!("e{i}");
        if i < uncontrollable {
            EventDef::uncontrollable(name)
        } else {
            EventDef::controllable(name)
        }
    }))
    .unwrap()
}

/// A random deterministic automaton; each (state, event) pair has a
/// transition with probability `density`.
pub fn random_automaton(rng: &mut ChaCha8Rng, name: &str, sigma: &Alphabet, max_states: usize, density: f64) -> Automaton {
    let n = rng.gen_range(1..=max_states);
    let mut delta = Vec::new();
    for s in 0..n {
        for e in 0..sigma.len() {
            if rng.gen_bool(density) {
                delta.push((s, e, rng.gen_range(0..n)));
            }
        }
    }
    let mut states: Vec<usize> = (0..n).collect();
    states.shuffle(rng);
    let marked_count = rng.gen_range(0..=n);
    Automaton::from_parts(name, sigma.clone(), n, 0, states[..marked_count].iter().copied(), delta).unwrap()
}

/// Random plant/spec pair: plant ≤5 states over ≤4 events with at least one
/// uncontrollable event, spec ≤4 states over the same alphabet.
pub fn random_instance(rng: &mut ChaCha8Rng) -> (Automaton, Automaton) {
    let events = rng.gen_range(1..=4);
    let unc = rng.gen_range(1..=events);
    let sigma = alphabet(events, unc);
    let g = random_automaton(rng, "G", &sigma, 5, 0.6);
    let e = random_automaton(rng, "E", &sigma, 4, 0.7);
    (g, e)
}

pub struct Failsafe {
    pub report: SynthesisReport,
    pub matrix: TransitionMatrix,
    pub seconds: f64,
}

/// The bundled supervisor, synthesized once per test binary.
pub fn failsafe() -> &'static Failsafe {
    static CELL: OnceLock<Failsafe> = OnceLock::new();
    CELL.get_or_init(|| {
        let t = std::time::Instant::now();
        let report = synthesize_failsafe().expect("bundled model synthesizes");
        let seconds = t.elapsed().as_secs_f64();
        let matrix = export_matrix(&report).unwrap();
        Failsafe { report, matrix, seconds }
    })
}

/// A session resting at the accepting state of `mode`.
pub fn session_in(matrix: &TransitionMatrix, mode: FlightMode) -> SessionState {
    let mut s = SessionState::new(matrix);
    let (&q, _) = matrix.accepting().iter().find(|(_, &m)| m == mode).unwrap();
    s.current = q;
    s.mode = mode;
    s
}

/// Frame with the given stick and switch and nominal health except `faults`.
pub fn frame(stick: Stick, switch: Switch, faults: &[&str]) -> Frame {
    let health = faults.iter().fold(Health::default(), |h, f| h.with(f));
    Frame::new(stick, switch, health)
}
