//! End-to-end synthesis: complete every specification over the plant
//! alphabet, compose them, and run `supcon` against the plant.

use std::collections::BTreeMap;

use crate::automaton::{Alphabet, Automaton, StateId};
use crate::composition::{allevents, selfloop_complete, sync_all};
use crate::error::{Error, Result};
use crate::synthesis::{is_controllable, supcon, SynthesisReport};

use super::catalog::{is_mce, FlightMode};
use super::plant::build_plant;
use super::specs::build_all_specs;

pub fn complete_specs(specs: &[Automaton], sigma: &Alphabet) -> Result<Vec<Automaton>> {
    specs.iter().map(|e| selfloop_complete(e, sigma)).collect()
}

/// Completes `specs` over the plant alphabet and composes them.
pub fn compose_specs(plant: &Automaton, specs: &[Automaton]) -> Result<Automaton> {
    // Same construction as completing each spec against allevents(plant).
    let sigma = allevents(plant).alphabet().clone();
    Ok(sync_all(&complete_specs(specs, &sigma)?)?.with_name("E"))
}

pub fn build_full_specification() -> Result<Automaton> {
    compose_specs(&build_plant(), &build_all_specs())
}

/// `supcon(PLANT, E)` for an arbitrary specification list.
pub fn synthesize_with(specs: &[Automaton]) -> Result<SynthesisReport> {
    let plant = build_plant();
    let e = compose_specs(&plant, specs)?;
    let mut report = supcon(&plant, &e)?;
    report.supervisor = report.supervisor.with_name("SUPER");
    Ok(report)
}

/// Mode behind each marked state: the initial state is powered off, every
/// other marked state is named by the MCE events entering it.
pub fn accepting_modes(sup: &Automaton) -> Result<BTreeMap<StateId, FlightMode>> {
    let mut modes = BTreeMap::new();
    if sup.is_empty() {
        return Ok(modes);
    }
    if sup.is_marked(sup.initial()) {
        modes.insert(sup.initial(), FlightMode::PowerOff);
    }
    for (_, ev, d) in sup.transitions() {
        if !sup.is_marked(d) {
            continue;
        }
        let name = sup.alphabet().name(ev);
        let mode = FlightMode::from_mce(name)
            .ok_or_else(|| Error::Supervisor(format!("marked state {d} entered by non-MCE event `{name}`")))?;
        if let Some(prev) = modes.insert(d, mode) {
            if prev != mode {
                return Err(Error::Supervisor(format!("marked state {d} labeled both {prev} and {mode}")));
            }
        }
    }
    if let Some(m) = sup.marked().iter().find(|m| !modes.contains_key(m)) {
        return Err(Error::Supervisor(format!("marked state {m} has no mode label")));
    }
    Ok(modes)
}

/// States where more than one MCE is enabled.
pub fn multiple_mce_states(a: &Automaton) -> Vec<(StateId, Vec<String>)> {
    let mut out = Vec::new();
    for q in 0..a.state_count() {
        let mces: Vec<String> = a
            .successors(q)
            .map(|(ev, _)| a.alphabet().name(ev))
            .filter(|n| is_mce(n))
            .map(String::from)
            .collect();
        if mces.len() > 1 {
            out.push((q, mces));
        }
    }
    out
}

/// Runs the bundled model and checks the supervisor: nonblocking,
/// controllable, one MCE per decision, and one marked state per mode.
pub fn synthesize_failsafe() -> Result<SynthesisReport> {
    let report = synthesize_with(&build_all_specs())?;
    if let Some(d) = &report.closed_loop_blocking {
        return Err(Error::Supervisor(format!("closed loop is blocking: {d}")));
    }
    if report.empty {
        return Err(Error::Supervisor("supervisor is empty".into()));
    }
    let sup = &report.supervisor;
    if !is_controllable(sup, &build_plant())? {
        return Err(Error::Supervisor("supervisor is not controllable".into()));
    }
    if let Some((q, mces)) = multiple_mce_states(sup).first() {
        return Err(Error::Supervisor(format!("state {q} enables {}", mces.join(", "))));
    }
    let modes = accepting_modes(sup)?;
    let distinct: std::collections::BTreeSet<_> = modes.values().collect();
    if modes.len() != 8 || distinct.len() != 8 {
        return Err(Error::Supervisor(format!("expected 8 mode-labeled marked states, found {}", modes.len())));
    }
    Ok(report)
}
