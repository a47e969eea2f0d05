//! The 37-event catalog: pilot inputs (MIE), mode commands (MCE) and
//! automatic trigger events (ATE), with their exclusive groups.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::automaton::{Alphabet, EventDef};

pub const MIES: [&str; 8] = ["MIE1", "MIE2", "MIE3", "MIE4", "MIE5", "MIE6", "MIE7", "MIE8"];
pub const MCES: [&str; 8] = ["MCE1", "MCE2", "MCE3", "MCE4", "MCE5", "MCE6", "MCE7", "MCE8"];
pub const ATES: [&str; 21] = [
    "ATE1", "ATE2", "ATE3", "ATE4", "ATE5", "ATE6", "ATE7", "ATE8", "ATE9", "ATE10", "ATE11", "ATE12", "ATE13",
    "ATE14", "ATE15", "ATE16", "ATE17", "ATE18", "ATE19", "ATE20", "ATE21",
];

pub const POWER_EVENTS: [&str; 2] = ["MIE1", "MIE2"];
pub const STICK_EVENTS: [&str; 3] = ["MIE3", "MIE4", "MIE5"];
pub const SWITCH_EVENTS: [&str; 3] = ["MIE6", "MIE7", "MIE8"];

pub fn is_mce(name: &str) -> bool {
    MCES.contains(&name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FlightMode {
    PowerOff,
    Standby,
    GroundError,
    Loiter,
    AltitudeHold,
    Stabilize,
    Rtl,
    Al,
}

impl FlightMode {
    /// Table order: `MCE{k}` switches to `ALL[k-1]`.
    pub const ALL: [FlightMode; 8] = [
        FlightMode::PowerOff,
        FlightMode::Standby,
        FlightMode::GroundError,
        FlightMode::Loiter,
        FlightMode::AltitudeHold,
        FlightMode::Stabilize,
        FlightMode::Rtl,
        FlightMode::Al,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn mce(self) -> &'static str {
        MCES[self.index()]
    }

    pub fn from_mce(name: &str) -> Option<FlightMode> {
        MCES.iter().position(|&m| m == name).map(|i| Self::ALL[i])
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FlightMode::PowerOff => "POWER_OFF",
            FlightMode::Standby => "STANDBY",
            FlightMode::GroundError => "GROUND_ERROR",
            FlightMode::Loiter => "LOITER",
            FlightMode::AltitudeHold => "ALTITUDE_HOLD",
            FlightMode::Stabilize => "STABILIZE",
            FlightMode::Rtl => "RTL",
            FlightMode::Al => "AL",
        }
    }

    pub fn is_airborne(self) -> bool {
        self.index() >= FlightMode::Loiter.index()
    }
}

impl fmt::Display for FlightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FlightMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown flight mode `{s}`"))
    }
}

/// The ten health/status groups, in the order the plant consumes them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HealthGroup {
    Ins,
    Gps,
    Barometer,
    Compass,
    Propulsors,
    Rc,
    Battery,
    Altitude,
    Distance,
    Throttle,
}

impl HealthGroup {
    pub const ALL: [HealthGroup; 10] = [
        HealthGroup::Ins,
        HealthGroup::Gps,
        HealthGroup::Barometer,
        HealthGroup::Compass,
        HealthGroup::Propulsors,
        HealthGroup::Rc,
        HealthGroup::Battery,
        HealthGroup::Altitude,
        HealthGroup::Distance,
        HealthGroup::Throttle,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            HealthGroup::Ins => "INS",
            HealthGroup::Gps => "GPS",
            HealthGroup::Barometer => "barometer",
            HealthGroup::Compass => "compass",
            HealthGroup::Propulsors => "propulsors",
            HealthGroup::Rc => "RC",
            HealthGroup::Battery => "battery",
            HealthGroup::Altitude => "altitude",
            HealthGroup::Distance => "distance",
            HealthGroup::Throttle => "throttle",
        }
    }

    pub fn from_label(label: &str) -> Option<HealthGroup> {
        Self::ALL.into_iter().find(|g| g.label() == label)
    }

    /// Members in catalog order; for the first six groups index 0 is healthy.
    pub fn events(self) -> &'static [&'static str] {
        match self {
            HealthGroup::Ins => &ATES[0..2],
            HealthGroup::Gps => &ATES[2..4],
            HealthGroup::Barometer => &ATES[4..6],
            HealthGroup::Compass => &ATES[6..8],
            HealthGroup::Propulsors => &ATES[8..10],
            HealthGroup::Rc => &ATES[10..12],
            HealthGroup::Battery => &ATES[12..15],
            HealthGroup::Altitude => &ATES[15..17],
            HealthGroup::Distance => &ATES[17..19],
            HealthGroup::Throttle => &ATES[19..21],
        }
    }

    pub fn of_event(name: &str) -> Option<HealthGroup> {
        Self::ALL.into_iter().find(|g| g.events().contains(&name))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExclusiveGroup {
    pub label: String,
    pub members: Vec<String>,
    /// Exactly one member per frame; otherwise at most one.
    pub exactly_one: bool,
}

#[derive(Debug, Clone)]
pub struct EventCatalog {
    pub mies: Vec<EventDef>,
    pub mces: Vec<EventDef>,
    pub ates: Vec<EventDef>,
    pub groups: Vec<ExclusiveGroup>,
}

impl EventCatalog {
    pub fn len(&self) -> usize {
        self.mies.len() + self.mces.len() + self.ates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.mies.iter().chain(&self.mces).chain(&self.ates).cloned()).expect("catalog names are unique")
    }

    pub fn group_of(&self, event: &str) -> Option<&ExclusiveGroup> {
        self.groups.iter().find(|g| g.members.iter().any(|m| m == event))
    }
}

pub fn build_event_catalog() -> EventCatalog {
    let group = |label: &str, members: &[&str], exactly_one: bool| ExclusiveGroup {
        label: label.to_string(),
        members: members.iter().map(|m| m.to_string()).collect(),
        exactly_one,
    };
    let mut groups = vec![
        group("power", &POWER_EVENTS, false),
        group("stick", &STICK_EVENTS, true),
        group("switch", &SWITCH_EVENTS, true),
    ];
    groups.extend(HealthGroup::ALL.iter().map(|g| group(g.label(), g.events(), true)));
    EventCatalog {
        mies: MIES.iter().map(|&n| EventDef::controllable(n)).collect(),
        mces: MCES.iter().map(|&n| EventDef::controllable(n)).collect(),
        ates: ATES.iter().map(|&n| EventDef::uncontrollable(n)).collect(),
        groups,
    }
}

/// The full 37-event alphabet in catalog order.
pub fn catalog_alphabet() -> Alphabet {
    build_event_catalog().alphabet()
}

/// Sub-alphabet of the catalog, keeping catalog order.
pub fn sub_alphabet<'a>(names: impl IntoIterator<Item = &'a str>) -> Alphabet {
    let wanted: std::collections::BTreeSet<&str> = names.into_iter().collect();
    let full = catalog_alphabet();
    let events: Vec<EventDef> = full.iter().filter(|e| wanted.contains(e.name())).cloned().collect();
    assert_eq!(events.len(), wanted.len(), "sub-alphabet names must come from the catalog");
    Alphabet::new(events).expect("catalog names are unique")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_arithmetic() {
        let c = build_event_catalog();
        assert_eq!((c.mies.len(), c.mces.len(), c.ates.len()), (8, 8, 21));
        let sigma = c.alphabet();
        assert_eq!(sigma.len(), 37);
        assert_eq!(sigma.uncontrollable().count(), 21);
        assert!(c.ates.iter().all(|e| !e.is_controllable()));
    }

    #[test]
    fn groups_partition_the_non_mce_events() {
        let c = build_event_catalog();
        let mut seen: Vec<&str> = c.groups.iter().flat_map(|g| g.members.iter().map(String::as_str)).collect();
        seen.sort();
        let mut expected: Vec<&str> = MIES.iter().chain(ATES.iter()).copied().collect();
        expected.sort();
        assert_eq!(seen, expected);
        assert_eq!(c.groups.len(), 13);
        assert!(!c.group_of("MIE1").unwrap().exactly_one);
    }

    #[test]
    fn mce_mode_bijection() {
        for (k, mode) in FlightMode::ALL.into_iter().enumerate() {
            assert_eq!(mode.mce(), format!("MCE{}", k + 1));
            assert_eq!(FlightMode::from_mce(mode.mce()), Some(mode));
            assert_eq!(mode.as_str().parse::<FlightMode>().unwrap(), mode);
            assert_eq!(serde_json::to_string(&mode).unwrap(), format!("\"{mode}\""));
        }
    }
}
