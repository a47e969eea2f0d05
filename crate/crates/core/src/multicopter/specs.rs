//! Control specifications: the ground arm gate, one specification per
//! airborne (mode, stick, switch-set) cell, and the three faulty variants
//! used as negative examples.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::automaton::{Automaton, AutomatonBuilder, StateId};
use crate::error::{Error, Result};

use super::catalog::{sub_alphabet, FlightMode, HealthGroup, ATES, MCES, STICK_EVENTS, SWITCH_EVENTS};
use super::policy::{decide, Health, Stick, Switch};

pub const SPEC_COUNT: usize = 25;
pub const EXAMPLE_COUNT: usize = 3;

/// An airborne cell: the mode the multicopter is in, the stick action of
/// the period, and the switch positions the specification decides for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpecCell {
    pub mode: FlightMode,
    pub stick: Stick,
    pub switches: &'static [Switch],
}

const ANY: &[Switch] = &Switch::ALL;
const N: &[Switch] = &[Switch::Normal];
const R: &[Switch] = &[Switch::Rtl];
const L: &[Switch] = &[Switch::Land];
const RL: &[Switch] = &[Switch::Rtl, Switch::Land];

/// Cells of specifications 2..=25, in order.
pub const CELLS: [SpecCell; 24] = {
    use FlightMode::*;
    use Stick::*;
    const fn c(mode: FlightMode, stick: Stick, switches: &'static [Switch]) -> SpecCell {
        SpecCell { mode, stick, switches }
    }
    [
        c(Loiter, Arm, ANY),
        c(Loiter, Disarm, ANY),
        c(AltitudeHold, Arm, ANY),
        c(AltitudeHold, Disarm, ANY),
        c(Loiter, Normal, N),
        c(Loiter, Normal, RL),
        c(AltitudeHold, Normal, N),
        c(AltitudeHold, Normal, R),
        c(AltitudeHold, Normal, L),
        c(Stabilize, Arm, ANY),
        c(Stabilize, Disarm, ANY),
        c(Stabilize, Normal, N),
        c(Stabilize, Normal, R),
        c(Stabilize, Normal, L),
        c(Rtl, Arm, ANY),
        c(Rtl, Disarm, ANY),
        c(Rtl, Normal, N),
        c(Rtl, Normal, R),
        c(Rtl, Normal, L),
        c(Al, Arm, ANY),
        c(Al, Disarm, ANY),
        c(Al, Normal, N),
        c(Al, Normal, R),
        c(Al, Normal, L),
    ]
};

pub fn cell(j: usize) -> Result<SpecCell> {
    if !(2..=SPEC_COUNT).contains(&j) {
        return Err(Error::IndexOutOfRange { index: j, max: SPEC_COUNT });
    }
    Ok(CELLS[j - 2])
}

fn spec_name(j: usize) -> String {
    format!("SPEC{j}")
}

/// Ground arm gate.
pub fn spec_1() -> Automaton {
    let names: Vec<&str> = ["MIE2", "MIE3", "MIE4", "MIE5", "MIE6", "MIE7", "MIE8"]
        .into_iter()
        .chain(MCES)
        .chain(["ATE1", "ATE2", "ATE9", "ATE10", "ATE11", "ATE12", "ATE13", "ATE14", "ATE15"])
        .collect();
    let sigma = sub_alphabet(names.iter().copied());
    let checks = ["ATE1", "ATE2", "ATE9", "ATE10", "ATE11", "ATE12", "ATE13", "ATE14", "ATE15"];
    let mut b = AutomatonBuilder::new(spec_name(1), sigma);
    b.states(8).mark(0).mark(1);
    // S0: any mode but standby.
    b.transition(0, "MCE2", 1).unwrap();
    b.selfloops(0, names.iter().copied().filter(|&e| e != "MCE2")).unwrap();
    // S1: standby.
    b.transition(1, "MIE2", 7).unwrap();
    b.transition(1, "MIE3", 2).unwrap();
    b.transition(1, "MIE4", 6).unwrap();
    b.transition(1, "MIE5", 6).unwrap();
    // S2: arm requested, checks running.
    b.selfloops(2, ["ATE1", "ATE9", "ATE11"]).unwrap();
    b.transition(2, "ATE13", 5).unwrap();
    for bad in ["ATE2", "ATE10", "ATE12", "ATE14", "ATE15"] {
        b.transition(2, bad, 4).unwrap();
    }
    // S5: checks passed, switch decides.
    b.transition(5, "MIE6", 3).unwrap();
    b.transition(5, "MIE7", 6).unwrap();
    b.transition(5, "MIE8", 6).unwrap();
    b.transition(3, "MCE4", 0).unwrap();
    // S4: a check failed.
    b.selfloops(4, checks.iter().copied().chain(SWITCH_EVENTS)).unwrap();
    b.transition(4, "MCE3", 0).unwrap();
    // S6: no arm, stay in standby.
    b.selfloops(6, checks.iter().copied().chain(SWITCH_EVENTS)).unwrap();
    b.transition(6, "MCE2", 1).unwrap();
    b.transition(7, "MCE1", 0).unwrap();
    b.build().unwrap()
}

/// Manual return and manual landing from loiter.
pub fn spec_7() -> Automaton {
    let ates: Vec<&str> = ATES[..15].iter().copied().chain(["ATE18", "ATE19"]).collect();
    let names: Vec<&str> = STICK_EVENTS.into_iter().chain(SWITCH_EVENTS).chain(MCES).chain(ates.iter().copied()).collect();
    let sigma = sub_alphabet(names.iter().copied());
    let mut b = AutomatonBuilder::new(spec_name(7), sigma);
    b.states(6).mark(0).mark(1);
    b.transition(0, "MCE4", 1).unwrap();
    b.selfloops(0, names.iter().copied().filter(|&e| e != "MCE4")).unwrap();
    b.transition(1, "MIE3", 0).unwrap();
    b.transition(1, "MIE4", 0).unwrap();
    b.transition(1, "MIE5", 2).unwrap();
    b.transition(2, "MIE6", 0).unwrap();
    b.transition(2, "MIE7", 3).unwrap();
    b.transition(2, "MIE8", 5).unwrap();
    // S3: return requested; every gate condition must hold.
    for ev in &ates {
        let pass = ["ATE1", "ATE3", "ATE5", "ATE7", "ATE9", "ATE11", "ATE13", "ATE14", "ATE19"].contains(ev);
        b.transition(3, ev, if pass { 3 } else { 4 }).unwrap();
    }
    b.transition(3, "MCE7", 0).unwrap();
    b.selfloops(4, ates.iter().copied()).unwrap();
    b.transition(4, "MCE4", 1).unwrap();
    b.selfloops(5, ates.iter().copied()).unwrap();
    b.transition(5, "MCE8", 0).unwrap();
    b.build().unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Outcome {
    Release,
    Mode(FlightMode),
}

/// Decision variables in plant order: the switch, then each health group.
fn level_events(level: usize) -> &'static [&'static str] {
    if level == 0 {
        &SWITCH_EVENTS
    } else {
        HealthGroup::ALL[level - 1].events()
    }
}

struct DiagramBuilder<'a> {
    b: AutomatonBuilder,
    memo: HashMap<(usize, Vec<Outcome>), StateId>,
    terminals: HashMap<FlightMode, StateId>,
    nodes: Vec<(StateId, usize, Vec<StateId>)>,
    tested: BTreeSet<usize>,
    cell: &'a SpecCell,
}

impl DiagramBuilder<'_> {
    /// Reduced decision diagram for `table`, the outcome over every
    /// assignment of the variables from `level` on (last one fastest).
    fn build(&mut self, mut level: usize, mut table: Vec<Outcome>) -> StateId {
        loop {
            if table.iter().all(|o| *o == table[0]) {
                return match table[0] {
                    Outcome::Release => 0,
                    Outcome::Mode(m) => *self.terminals.entry(m).or_insert_with(|| self.b.add_state()),
                };
            }
            let chunk = table.len() / level_events(level).len();
            let first = &table[..chunk];
            if table.chunks(chunk).all(|c| c == first) {
                table.truncate(chunk);
                level += 1;
            } else {
                break;
            }
        }
        if let Some(&q) = self.memo.get(&(level, table.clone())) {
            return q;
        }
        let q = self.b.add_state();
        self.memo.insert((level, table.clone()), q);
        self.tested.insert(level);
        let chunk = table.len() / level_events(level).len();
        let children = table.chunks(chunk).map(|c| self.build(level + 1, c.to_vec())).collect();
        self.nodes.push((q, level, children));
        q
    }
}

/// Specification for one airborne cell, derived from [`decide`].
pub fn build_cell_spec(name: impl Into<String>, cell: &SpecCell, rule: impl Fn(Switch, &Health) -> FlightMode) -> Automaton {
    let healths = Health::all();
    let mut table = Vec::with_capacity(3 * healths.len());
    for sw in Switch::ALL {
        for h in &healths {
            table.push(if cell.switches.contains(&sw) { Outcome::Mode(rule(sw, h)) } else { Outcome::Release });
        }
    }
    // Placeholder alphabet; the real one is known only after the diagram is built.
    let full = super::catalog::catalog_alphabet();
    let mut d = DiagramBuilder {
        b: AutomatonBuilder::new("cell", full),
        memo: HashMap::new(),
        terminals: HashMap::new(),
        nodes: Vec::new(),
        tested: BTreeSet::from([0]),
        cell,
    };
    d.b.states(2).mark(0).mark(1);
    let root = d.build(0, table);

    let tested_events: Vec<&str> = d.tested.iter().flat_map(|&l| level_events(l).iter().copied()).collect();
    let names: Vec<&str> = STICK_EVENTS
        .into_iter()
        .chain(SWITCH_EVENTS)
        .chain(MCES)
        .chain(tested_events.iter().copied().filter(|e| e.starts_with("ATE")))
        .collect();
    let mode_mce = d.cell.mode.mce();

    let b = &mut d.b;
    b.transition(0, mode_mce, 1).unwrap();
    b.selfloops(0, names.iter().copied().filter(|&e| e != mode_mce)).unwrap();
    for stick in STICK_EVENTS {
        b.transition(1, stick, if stick == cell.stick.event() { root } else { 0 }).unwrap();
    }
    for (q, level, children) in &d.nodes {
        for (ev, &child) in level_events(*level).iter().zip(children) {
            b.transition(*q, ev, child).unwrap();
        }
        let others = d.tested.iter().filter(|&l| l != level).flat_map(|&l| level_events(l).iter().copied());
        b.selfloops(*q, others).unwrap();
    }
    for (&mode, &q) in &d.terminals {
        b.selfloops(q, tested_events.iter().copied()).unwrap();
        b.transition(q, mode.mce(), if mode == cell.mode { 1 } else { 0 }).unwrap();
    }
    let built = b.build().unwrap();
    restrict_alphabet(&built, name.into(), &names)
}

fn restrict_alphabet(a: &Automaton, name: String, names: &[&str]) -> Automaton {
    let sigma = sub_alphabet(names.iter().copied());
    let to_new = a.alphabet().translation(&sigma);
    let delta: Vec<_> = a
        .transitions()
        .map(|(s, e, d)| (s, to_new[e].expect("transition event kept in the alphabet"), d))
        .collect();
    Automaton::from_parts(name, sigma, a.state_count(), a.initial(), a.marked().iter().copied(), delta)
        .expect("restricted specification is well formed")
}

fn cell_rule(cell: SpecCell) -> impl Fn(Switch, &Health) -> FlightMode {
    move |sw, h| decide(cell.mode, cell.stick, sw, h).expect("airborne modes always decide")
}

/// Generic construction for cell `j`, including `j = 7`, which
/// [`build_spec`] replaces by its hand-drawn equivalent.
pub fn build_generated_spec(j: usize) -> Result<Automaton> {
    let c = cell(j)?;
    Ok(build_cell_spec(spec_name(j), &c, cell_rule(c)))
}

pub fn build_spec(j: usize) -> Result<Automaton> {
    match j {
        1 => Ok(spec_1()),
        7 => Ok(spec_7()),
        _ => build_generated_spec(j),
    }
}

pub fn build_all_specs() -> Vec<Automaton> {
    (1..=SPEC_COUNT).map(|j| build_spec(j).unwrap()).collect()
}

/// The complete specification list for negative experiment `k`:
/// 1 drops the battery selfloops from spec 1's no-arm state,
/// 2 adds a copy of spec 1 whose no-arm state commands ground-error instead,
/// 3 adds a loiter return spec that ignores battery, link and distance.
pub fn build_example(k: usize) -> Result<Vec<Automaton>> {
    let mut specs = build_all_specs();
    match k {
        1 => {
            let mut b = AutomatonBuilder::from(&specs[0]);
            for ev in ["ATE13", "ATE14", "ATE15"] {
                b.remove_transition(6, ev);
            }
            specs[0] = b.build()?.with_name("SPEC1-EX1");
        }
        2 => {
            let mut b = AutomatonBuilder::from(&specs[0]);
            b.remove_transition(6, "MCE2");
            b.transition(6, "MCE3", 1)?;
            specs.push(b.build()?.with_name("EX2"));
        }
        3 => {
            let c = SpecCell { mode: FlightMode::Loiter, stick: Stick::Normal, switches: R };
            specs.push(build_cell_spec("EX3", &c, |_, h| {
                if h.navigation_ok() {
                    FlightMode::Rtl
                } else {
                    FlightMode::Loiter
                }
            }));
        }
        _ => return Err(Error::IndexOutOfRange { index: k, max: EXAMPLE_COUNT }),
    }
    Ok(specs)
}

#[derive(Debug, Clone, Serialize)]
pub struct SpecInfo {
    pub index: usize,
    pub name: String,
    pub requirements: Vec<&'static str>,
    pub description: String,
}

fn cell_requirements(c: &SpecCell) -> Vec<&'static str> {
    use FlightMode::*;
    let mut r = Vec::new();
    if c.stick == Stick::Disarm {
        r.push("SR2");
    }
    for sw in c.switches {
        let add: &[&str] = match (c.mode, sw) {
            (Loiter | AltitudeHold | Stabilize, Switch::Normal) => &["SR2", "SR3", "SR4", "SR5", "SR6"],
            (Loiter | AltitudeHold | Stabilize, Switch::Rtl) => &["SR7"],
            (Loiter | AltitudeHold | Stabilize, Switch::Land) => &["SR8"],
            (Rtl, _) => &["SR9", "SR10"],
            (Al, Switch::Normal) => &["SR11", "SR13"],
            (Al, Switch::Rtl) => &["SR12", "SR13"],
            (Al, Switch::Land) => &["SR13"],
            _ => &[],
        };
        r.extend_from_slice(add);
    }
    r.sort_by_key(|s| s[2..].parse::<u32>().unwrap());
    r.dedup();
    r
}

pub fn spec_manifest() -> Vec<SpecInfo> {
    let mut out = vec![SpecInfo {
        index: 1,
        name: spec_name(1),
        requirements: vec!["SR1"],
        description: "arm gate in STANDBY".into(),
    }];
    for (i, c) in CELLS.iter().enumerate() {
        let sw: Vec<&str> = c.switches.iter().map(|s| s.event()).collect();
        out.push(SpecInfo {
            index: i + 2,
            name: spec_name(i + 2),
            requirements: cell_requirements(c),
            description: format!("{} with stick {} and switch {}", c.mode, c.stick.event(), sw.join("/")),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn narrated_specs_have_stated_sizes() {
        assert_eq!(spec_1().counts(), (8, 24, 68));
        assert_eq!(spec_7().counts(), (6, 31, 91));
        assert_eq!(spec_1().marked().iter().copied().collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn index_bounds() {
        assert!(build_spec(0).is_err());
        assert!(build_spec(26).is_err());
        assert!(build_example(4).is_err());
        assert_eq!(build_all_specs().len(), 25);
    }

    #[test]
    fn generated_specs_are_well_formed() {
        for j in 2..=SPEC_COUNT {
            let s = build_spec(j).unwrap();
            assert!(s.validate().is_empty(), "{}", s.name());
            assert!(s.is_nonblocking(), "{}", s.name());
            assert_eq!(s.marked().len(), 2);
        }
    }

    #[test]
    fn manifest_covers_every_requirement() {
        let m = spec_manifest();
        assert_eq!(m.len(), 25);
        let all: BTreeSet<&str> = m.iter().flat_map(|s| s.requirements.iter().copied()).collect();
        assert_eq!(all.len(), 13);
    }
}
