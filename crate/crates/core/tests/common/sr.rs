//! Safety-requirement scenarios replayed on the synthesized supervisor.

use sctkit::multicopter::{FlightMode, Stick, Switch};
use sctkit::runtime::{decision_step, TransitionMatrix};

use super::{frame, session_in};

use FlightMode::*;
use Stick::{Arm, Disarm, Normal as Neutral};
use Switch::{Land, Normal, Rtl as ToRtl};

pub struct SrCase {
    pub name: &'static str,
    pub from: FlightMode,
    pub stick: Stick,
    pub switch: Switch,
    pub faults: &'static [&'static str],
    pub expected: FlightMode,
}

const fn case(
    name: &'static str,
    from: FlightMode,
    stick: Stick,
    switch: Switch,
    faults: &'static [&'static str],
    expected: FlightMode,
) -> SrCase {
    SrCase { name, from, stick, switch, faults, expected }
}

pub const CASES: &[SrCase] = &[
    case("SR1 arm with healthy checks", Standby, Arm, Normal, &[], Loiter),
    case("SR1 arm with INS fault", Standby, Arm, Normal, &["ATE2"], GroundError),
    case("SR1 arm with battery only able to return", Standby, Arm, Normal, &["ATE14"], GroundError),
    case("SR1 arm with switch on RTL", Standby, Arm, ToRtl, &[], Standby),
    case("SR1 no arm action", Standby, Disarm, Normal, &[], Standby),
    case("SR2 manual disarm near ground", Loiter, Disarm, Normal, &["ATE16"], Standby),
    case("SR2 automatic disarm near ground", Loiter, Neutral, Normal, &["ATE16", "ATE20"], Standby),
    case("SR3 GPS fault degrades to altitude hold", Loiter, Neutral, Normal, &["ATE4"], AltitudeHold),
    case("SR3 compass fault degrades to altitude hold", Loiter, Neutral, Normal, &["ATE8"], AltitudeHold),
    case("SR3 barometer fault degrades to stabilize", Loiter, Neutral, Normal, &["ATE6"], Stabilize),
    case("SR3 recovery climbs one rung", Stabilize, Neutral, Normal, &[], AltitudeHold),
    case("SR3 recovery reaches loiter", AltitudeHold, Neutral, Normal, &[], Loiter),
    case("SR4 link loss with healthy navigation returns", Loiter, Neutral, Normal, &["ATE12"], Rtl),
    case("SR4 link loss with GPS fault lands", Loiter, Neutral, Normal, &["ATE12", "ATE4"], Al),
    case("SR5 battery able to return", Loiter, Neutral, Normal, &["ATE14"], Rtl),
    case("SR5 battery unable to return", Loiter, Neutral, Normal, &["ATE15"], Al),
    case("SR6 INS fault lands", Loiter, Neutral, Normal, &["ATE2"], Al),
    case("SR6 propulsor fault lands", AltitudeHold, Neutral, Normal, &["ATE10"], Al),
    case("SR7 manual return granted", Loiter, Neutral, ToRtl, &[], Rtl),
    case("SR7 manual return refused on low battery", Loiter, Neutral, ToRtl, &["ATE15"], Loiter),
    case("SR7 manual return refused on compass fault", Stabilize, Neutral, ToRtl, &["ATE8"], Stabilize),
    case("SR8 manual landing", AltitudeHold, Neutral, Land, &[], Al),
    case("SR9 return switched to normal flight", Rtl, Neutral, Normal, &[], Loiter),
    case("SR9 return switched to landing", Rtl, Neutral, Land, &[], Al),
    case("SR10 near base lands", Rtl, Neutral, ToRtl, &["ATE18"], Al),
    case("SR10 battery unable to return lands", Rtl, Neutral, ToRtl, &["ATE15"], Al),
    case("SR10 barometer fault lands", Rtl, Neutral, ToRtl, &["ATE6"], Al),
    case("SR11 landing switched to normal flight", Al, Neutral, Normal, &[], Loiter),
    case("SR11 normal flight refused on link loss", Al, Neutral, Normal, &["ATE12"], Al),
    case("SR12 landing switched to return", Al, Neutral, ToRtl, &[], Rtl),
    case("SR12 return refused near base", Al, Neutral, ToRtl, &["ATE18"], Al),
    case("SR13 low altitude disarms", Al, Neutral, Land, &["ATE16"], Standby),
    case("SR13 low throttle disarms", Al, Neutral, Land, &["ATE20"], Standby),
];

/// Replays one case; returns the mode reached.
pub fn run(matrix: &TransitionMatrix, c: &SrCase) -> Result<FlightMode, String> {
    let mut s = session_in(matrix, c.from);
    let f = frame(c.stick, c.switch, c.faults);
    decision_step(&mut s, &f, matrix).map(|r| r.mode).map_err(|e| e.to_string())
}
