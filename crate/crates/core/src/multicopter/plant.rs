//! The plant: every physically possible event sequence of the multicopter.
//!
//! Power and ground states come first. Standby runs a check chain (stick,
//! equipment, switch) before choosing a mode; the airborne hub runs a longer
//! chain (stick, switch, every health group) into the pre-decision state.
//! Alternatives within one group share their successor, so the plant itself
//! never distinguishes them.

use crate::automaton::{Automaton, AutomatonBuilder, StateId};

use super::catalog::{catalog_alphabet, HealthGroup, MCES, STICK_EVENTS, SWITCH_EVENTS};

pub const POWER_OFF: StateId = 0;
pub const STANDBY: StateId = 3;
pub const GROUND_DECISION: StateId = 12;
pub const GROUND_ERROR: StateId = 13;
pub const AIR_HUB: StateId = 14;
pub const AIR_DECISION: StateId = 26;

const GROUND_GROUPS: [HealthGroup; 7] = [
    HealthGroup::Ins,
    HealthGroup::Gps,
    HealthGroup::Barometer,
    HealthGroup::Compass,
    HealthGroup::Propulsors,
    HealthGroup::Rc,
    HealthGroup::Battery,
];

fn chain(b: &mut AutomatonBuilder, from: StateId, steps: &[&[&str]]) -> StateId {
    let mut at = from;
    for events in steps {
        let next = b.add_state();
        for ev in events.iter() {
            b.transition(at, ev, next).expect("catalog event");
        }
        at = next;
    }
    at
}

pub fn build_plant() -> Automaton {
    let mut b = AutomatonBuilder::new("PLANT", catalog_alphabet());
    b.states(4).initial(POWER_OFF);
    // 0 -MIE1-> 1 -MCE2-> 3, 3 -MIE2-> 2 -MCE1-> 0
    b.transition(0, "MIE1", 1).unwrap();
    b.transition(1, "MCE2", STANDBY).unwrap();
    b.transition(STANDBY, "MIE2", 2).unwrap();
    b.transition(2, "MCE1", POWER_OFF).unwrap();

    let mut ground: Vec<&[&str]> = vec![&STICK_EVENTS];
    ground.extend(GROUND_GROUPS.iter().map(|g| g.events()));
    ground.push(&SWITCH_EVENTS);
    let decision = chain(&mut b, STANDBY, &ground);
    debug_assert_eq!(decision, GROUND_DECISION);

    let ge = b.add_state();
    let hub = b.add_state();
    debug_assert_eq!((ge, hub), (GROUND_ERROR, AIR_HUB));
    b.transition(GROUND_DECISION, "MCE2", STANDBY).unwrap();
    b.transition(GROUND_DECISION, "MCE3", GROUND_ERROR).unwrap();
    b.transition(GROUND_DECISION, "MCE4", AIR_HUB).unwrap();
    b.transition(GROUND_ERROR, "MIE2", 2).unwrap();

    let mut air: Vec<&[&str]> = vec![&STICK_EVENTS, &SWITCH_EVENTS];
    air.extend(HealthGroup::ALL.iter().map(|g| g.events()));
    let decision = chain(&mut b, AIR_HUB, &air);
    debug_assert_eq!(decision, AIR_DECISION);
    b.transition(AIR_DECISION, "MCE2", STANDBY).unwrap();
    b.transition(AIR_DECISION, "MCE3", GROUND_ERROR).unwrap();
    for mce in &MCES[3..] {
        b.transition(AIR_DECISION, mce, AIR_HUB).unwrap();
    }

    for m in [POWER_OFF, STANDBY, GROUND_ERROR, AIR_HUB] {
        b.mark(m);
    }
    b.build().expect("plant is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example_reaches_pre_decision_state() {
        let p = build_plant();
        let frame = ["MIE5", "MIE6", "ATE1", "ATE3", "ATE5", "ATE7", "ATE9", "ATE11", "ATE13", "ATE16", "ATE18", "ATE20"];
        let mut q = AIR_HUB;
        for ev in frame {
            q = p.step_name(q, ev).unwrap();
        }
        assert_eq!(q, AIR_DECISION);
    }

    #[test]
    fn plant_is_trim() {
        let p = build_plant();
        assert!(p.validate().is_empty());
        assert!(p.is_nonblocking());
        assert_eq!(p.reachable().len(), p.state_count());
    }
}
