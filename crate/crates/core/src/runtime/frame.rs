//! Event frames: everything detected during one decision period.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::multicopter::catalog::{HealthGroup, POWER_EVENTS};
use crate::multicopter::policy::{Health, Stick, Switch};

/// A frame as it appears in scenario files, with unvalidated names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventFrame {
    pub stick: String,
    pub switch: String,
    #[serde(default)]
    pub power: Option<String>,
    /// Group label to event, one entry per health group.
    pub health: BTreeMap<String, String>,
}

/// A validated frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Frame {
    pub stick: Stick,
    pub switch: Switch,
    pub power: Option<&'static str>,
    pub health: Health,
}

impl Default for Frame {
    /// Normal stick, normal-flight switch, nominal health.
    fn default() -> Self {
        Frame { stick: Stick::Normal, switch: Switch::Normal, power: None, health: Health::default() }
    }
}

impl Frame {
    pub fn new(stick: Stick, switch: Switch, health: Health) -> Self {
        Frame { stick, switch, power: None, health }
    }

    /// Sets one group's value. `group` is a health group label, `stick`,
    /// `switch` or `power`.
    pub fn set(&mut self, group: &str, event: &str) -> Result<(), String> {
        match group {
            "stick" => self.stick = Stick::from_event(event).ok_or_else(|| format!("`{event}` is not a stick action"))?,
            "switch" => self.switch = Switch::from_event(event).ok_or_else(|| format!("`{event}` is not a switch position"))?,
            "power" => self.power = Some(power_event(event).ok_or_else(|| format!("`{event}` is not a power event"))?),
            label => {
                let g = HealthGroup::from_label(label).ok_or_else(|| format!("unknown group `{label}`"))?;
                if !self.health.set(g, event) {
                    return Err(format!("`{event}` is not a member of group {label}"));
                }
            }
        }
        Ok(())
    }

    pub fn with_power(mut self, event: &str) -> Self {
        self.power = Some(power_event(event).unwrap_or_else(|| panic!("`{event}` is not a power event")));
        self
    }

    /// Detected events: power (if any), stick, switch, then health in group order.
    pub fn events(&self) -> Vec<&'static str> {
        let mut out = Vec::with_capacity(13);
        out.extend(self.power);
        out.push(self.stick.event());
        out.push(self.switch.event());
        out.extend(self.health.events());
        out
    }

    pub fn to_event_frame(&self) -> EventFrame {
        EventFrame {
            stick: self.stick.event().into(),
            switch: self.switch.event().into(),
            power: self.power.map(String::from),
            health: HealthGroup::ALL.iter().map(|&g| (g.label().to_string(), self.health.event(g).to_string())).collect(),
        }
    }

    /// Every valid frame without a power event: `3 · 3 · 1536 = 13824`.
    pub fn all_without_power() -> Vec<Frame> {
        let healths = Health::all();
        let mut out = Vec::with_capacity(9 * healths.len());
        for stick in Stick::ALL {
            for switch in Switch::ALL {
                out.extend(healths.iter().map(|&h| Frame::new(stick, switch, h)));
            }
        }
        out
    }
}

pub(crate) fn power_event(name: &str) -> Option<&'static str> {
    POWER_EVENTS.iter().copied().find(|&p| p == name)
}

impl EventFrame {
    /// Checks every exclusive group: one stick action, one switch position,
    /// at most one power event and exactly one reading per health group.
    pub fn validate(&self) -> Result<Frame, String> {
        let stick = Stick::from_event(&self.stick).ok_or_else(|| format!("`{}` is not a stick action", self.stick))?;
        let switch =
            Switch::from_event(&self.switch).ok_or_else(|| format!("`{}` is not a switch position", self.switch))?;
        let power = match &self.power {
            None => None,
            Some(p) => Some(power_event(p).ok_or_else(|| format!("`{p}` is not a power event"))?),
        };
        let mut health = Health::default();
        for (label, event) in &self.health {
            let g = HealthGroup::from_label(label).ok_or_else(|| format!("unknown health group `{label}`"))?;
            if !health.set(g, event) {
                return Err(format!("`{event}` is not a member of group {label}"));
            }
        }
        if let Some(g) = HealthGroup::ALL.iter().find(|g| !self.health.contains_key(g.label())) {
            return Err(format!("missing health group {}", g.label()));
        }
        Ok(Frame { stick, switch, power, health })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_validation() {
        let f = Frame::default().with_power("MIE1");
        let json = serde_json::to_string(&f.to_event_frame()).unwrap();
        let back: EventFrame = serde_json::from_str(&json).unwrap();
        assert_eq!(back.validate().unwrap(), f);
        assert_eq!(f.events().len(), 13);

        let mut bad = back.clone();
        bad.health.insert("RC".into(), "ATE1".into());
        assert!(bad.validate().unwrap_err().contains("RC"));
        let mut missing = back;
        missing.health.remove("GPS");
        assert!(missing.validate().unwrap_err().contains("GPS"));
    }

    #[test]
    fn frame_space() {
        assert_eq!(Frame::all_without_power().len(), 13824);
    }
}
