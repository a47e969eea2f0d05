//! Reference decision function: which mode the safety requirements select
//! for one period's pilot inputs and health readings. The specification
//! builders encode it as automata; the conformance tests replay against it.

use serde::{Deserialize, Serialize};

use super::catalog::{FlightMode, HealthGroup, STICK_EVENTS, SWITCH_EVENTS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stick {
    Arm,
    Disarm,
    Normal,
}

impl Stick {
    pub const ALL: [Stick; 3] = [Stick::Arm, Stick::Disarm, Stick::Normal];

    pub fn event(self) -> &'static str {
        STICK_EVENTS[self as usize]
    }

    pub fn from_event(name: &str) -> Option<Stick> {
        STICK_EVENTS.iter().position(|&e| e == name).map(|i| Self::ALL[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Switch {
    Normal,
    Rtl,
    Land,
}

impl Switch {
    pub const ALL: [Switch; 3] = [Switch::Normal, Switch::Rtl, Switch::Land];

    pub fn event(self) -> &'static str {
        SWITCH_EVENTS[self as usize]
    }

    pub fn from_event(name: &str) -> Option<Switch> {
        SWITCH_EVENTS.iter().position(|&e| e == name).map(|i| Self::ALL[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Battery {
    Adequate,
    ReturnOnly,
    Critical,
}

/// One reading per health group, stored as the member index within the group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Health([u8; 10]);

impl Default for Health {
    /// All equipment healthy, battery adequate, altitude and distance above
    /// their thresholds, throttle normal.
    fn default() -> Self {
        Health([0, 0, 0, 0, 0, 0, 0, 1, 1, 1])
    }
}

impl Health {
    pub fn event(&self, g: HealthGroup) -> &'static str {
        g.events()[self.0[g.index()] as usize]
    }

    /// Sets the group's reading; returns false if `event` is not a member.
    pub fn set(&mut self, g: HealthGroup, event: &str) -> bool {
        match g.events().iter().position(|&e| e == event) {
            Some(i) => {
                self.0[g.index()] = i as u8;
                true
            }
            None => false,
        }
    }

    pub fn with(mut self, event: &str) -> Self {
        let g = HealthGroup::of_event(event).unwrap_or_else(|| panic!("`{event}` is not a health event"));
        self.set(g, event);
        self
    }

    pub fn events(&self) -> [&'static str; 10] {
        HealthGroup::ALL.map(|g| self.event(g))
    }

    /// Every combination of readings (`2^9 · 3 = 1536`), in a fixed order.
    pub fn all() -> Vec<Health> {
        let sizes = HealthGroup::ALL.map(|g| g.events().len());
        let total: usize = sizes.iter().product();
        (0..total)
            .map(|mut k| {
                let mut h = [0u8; 10];
                for (i, &n) in sizes.iter().enumerate().rev() {
                    h[i] = (k % n) as u8;
                    k /= n;
                }
                Health(h)
            })
            .collect()
    }

    fn ok(&self, g: HealthGroup) -> bool {
        self.0[g.index()] == 0
    }

    pub fn battery(&self) -> Battery {
        match self.0[HealthGroup::Battery.index()] {
            0 => Battery::Adequate,
            1 => Battery::ReturnOnly,
            _ => Battery::Critical,
        }
    }

    pub fn altitude_low(&self) -> bool {
        self.0[HealthGroup::Altitude.index()] == 0
    }

    pub fn near_base(&self) -> bool {
        self.0[HealthGroup::Distance.index()] == 0
    }

    pub fn throttle_low(&self) -> bool {
        self.0[HealthGroup::Throttle.index()] == 0
    }

    /// INS, GPS, barometer, compass and propulsors all healthy.
    pub fn navigation_ok(&self) -> bool {
        use HealthGroup::*;
        [Ins, Gps, Barometer, Compass, Propulsors].iter().all(|&g| self.ok(g))
    }

    /// The conditions checked before arming.
    pub fn arm_ok(&self) -> bool {
        self.ok(HealthGroup::Ins)
            && self.ok(HealthGroup::Propulsors)
            && self.ok(HealthGroup::Rc)
            && self.battery() == Battery::Adequate
    }

    pub fn rc_ok(&self) -> bool {
        self.ok(HealthGroup::Rc)
    }

    /// Best hover mode the sensors support.
    pub fn hover_level(&self) -> FlightMode {
        if !self.ok(HealthGroup::Barometer) {
            FlightMode::Stabilize
        } else if !self.ok(HealthGroup::Gps) || !self.ok(HealthGroup::Compass) {
            FlightMode::AltitudeHold
        } else {
            FlightMode::Loiter
        }
    }

    fn can_return(&self) -> bool {
        self.navigation_ok() && self.battery() != Battery::Critical
    }

    fn disarm(&self) -> FlightMode {
        if self.ok(HealthGroup::Ins) && self.ok(HealthGroup::Propulsors) {
            FlightMode::Standby
        } else {
            FlightMode::GroundError
        }
    }

    fn manual_rtl_ok(&self) -> bool {
        self.navigation_ok() && self.rc_ok() && self.battery() != Battery::Critical && !self.near_base()
    }
}

fn rung(mode: FlightMode) -> u8 {
    match mode {
        FlightMode::Loiter => 2,
        FlightMode::AltitudeHold => 1,
        _ => 0,
    }
}

/// Degrade at once, recover one rung per decision period.
fn ladder(current: FlightMode, h: &Health) -> FlightMode {
    let target = h.hover_level();
    if rung(target) <= rung(current) {
        target
    } else if rung(current) == 0 {
        FlightMode::AltitudeHold
    } else {
        FlightMode::Loiter
    }
}

/// Mode selected for a complete decision period starting in `mode`.
/// `None` for modes that only a power event can leave.
pub fn decide(mode: FlightMode, stick: Stick, switch: Switch, h: &Health) -> Option<FlightMode> {
    use FlightMode::*;
    let next = match mode {
        PowerOff | GroundError => return None,
        Standby => match stick {
            Stick::Arm if !h.arm_ok() => GroundError,
            Stick::Arm if switch == Switch::Normal => Loiter,
            _ => Standby,
        },
        Loiter | AltitudeHold | Stabilize => {
            if stick == Stick::Disarm && h.altitude_low() {
                h.disarm()
            } else {
                match switch {
                    Switch::Land => Al,
                    Switch::Rtl if h.manual_rtl_ok() => Rtl,
                    Switch::Rtl => mode,
                    Switch::Normal => {
                        if h.altitude_low() && h.throttle_low() {
                            h.disarm()
                        } else if !h.ok(HealthGroup::Ins) || !h.ok(HealthGroup::Propulsors) {
                            Al
                        } else if !h.rc_ok() {
                            if h.can_return() { Rtl } else { Al }
                        } else {
                            match h.battery() {
                                Battery::Critical => Al,
                                Battery::ReturnOnly if h.navigation_ok() => Rtl,
                                Battery::ReturnOnly => Al,
                                Battery::Adequate => ladder(mode, h),
                            }
                        }
                    }
                }
            }
        }
        Rtl => {
            if stick == Stick::Disarm && h.altitude_low() {
                h.disarm()
            } else if switch == Switch::Land
                || !h.navigation_ok()
                || h.battery() == Battery::Critical
                || h.near_base()
            {
                Al
            } else if switch == Switch::Normal && h.rc_ok() && h.battery() == Battery::Adequate {
                Loiter
            } else {
                Rtl
            }
        }
        Al => {
            if h.altitude_low() || h.throttle_low() {
                h.disarm()
            } else {
                match switch {
                    Switch::Normal if h.arm_ok() => h.hover_level(),
                    Switch::Rtl if h.manual_rtl_ok() => Rtl,
                    _ => Al,
                }
            }
        }
    };
    Some(next)
}
