//! The supervisor flattened to `(source, destination, event)` rows, and its
//! `.sup` text form.
//!
//! ```text
//! initial 0
//! accepting 0=POWER_OFF 3=STANDBY
//! matrix
//!   0,1,MIE1
//!   1,3,MCE2
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::ops::Range;

use serde::Serialize;

use crate::automaton::{Alphabet, Automaton, StateId};
use crate::error::{Error, ParseError, Result};
use crate::multicopter::catalog::{catalog_alphabet, FlightMode};
use crate::multicopter::pipeline::accepting_modes;
use crate::synthesis::SynthesisReport;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct MatrixRow {
    pub source: StateId,
    pub destination: StateId,
    pub event: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionMatrix {
    /// Sorted by `(source, event)`.
    rows: Vec<MatrixRow>,
    by_source: Vec<Range<usize>>,
    initial: StateId,
    accepting: BTreeMap<StateId, FlightMode>,
}

impl TransitionMatrix {
    /// Builds a matrix from rows in any order; rejects duplicate
    /// `(source, event)` pairs.
    pub fn new(
        initial: StateId,
        accepting: BTreeMap<StateId, FlightMode>,
        mut rows: Vec<MatrixRow>,
    ) -> Result<Self> {
        rows.sort_by(|a, b| (a.source, &a.event).cmp(&(b.source, &b.event)));
        if let Some(w) = rows.windows(2).find(|w| w[0].source == w[1].source && w[0].event == w[1].event) {
            return Err(Error::Nondeterministic { state: w[0].source, event: w[0].event.clone() });
        }
        let states = rows
            .iter()
            .map(|r| r.source.max(r.destination) + 1)
            .chain(accepting.keys().map(|&k| k + 1))
            .chain([initial + 1])
            .max()
            .unwrap_or(0);
        let mut by_source = vec![0..0; states];
        let mut i = 0;
        while i < rows.len() {
            let s = rows[i].source;
            let start = i;
            while i < rows.len() && rows[i].source == s {
                i += 1;
            }
            by_source[s] = start..i;
        }
        Ok(TransitionMatrix { rows, by_source, initial, accepting })
    }

    pub fn from_automaton(a: &Automaton, accepting: BTreeMap<StateId, FlightMode>) -> Result<Self> {
        let rows = a
            .transitions()
            .map(|(s, e, d)| MatrixRow { source: s, destination: d, event: a.alphabet().name(e).to_string() })
            .collect();
        Self::new(a.initial(), accepting, rows)
    }

    pub fn rows(&self) -> &[MatrixRow] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn state_count(&self) -> usize {
        self.by_source.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn accepting(&self) -> &BTreeMap<StateId, FlightMode> {
        &self.accepting
    }

    pub fn mode_of(&self, q: StateId) -> Option<FlightMode> {
        self.accepting.get(&q).copied()
    }

    pub fn outgoing(&self, q: StateId) -> &[MatrixRow] {
        match self.by_source.get(q) {
            Some(r) => &self.rows[r.clone()],
            None => &[],
        }
    }

    /// Destination of `event` at `q`; a binary search within `q`'s rows.
    pub fn lookup(&self, q: StateId, event: &str) -> Option<StateId> {
        let rows = self.outgoing(q);
        rows.binary_search_by(|r| r.event.as_str().cmp(event)).ok().map(|i| rows[i].destination)
    }

    /// Rebuilds the automaton over `alphabet`; accepting states become marked.
    pub fn to_automaton(&self, name: &str, alphabet: &Alphabet) -> Result<Automaton> {
        let mut delta = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            let e = alphabet.id(&r.event).ok_or_else(|| Error::UnknownEvent(r.event.clone()))?;
            delta.push((r.source, e, r.destination));
        }
        Automaton::from_parts(name, alphabet.clone(), self.state_count(), self.initial, self.accepting.keys().copied(), delta)
    }

    pub fn to_catalog_automaton(&self) -> Result<Automaton> {
        self.to_automaton("SUPER", &catalog_alphabet())
    }
}

/// Flattens a synthesized failsafe supervisor. Refuses blocking or empty
/// results and supervisors without one marked state per flight mode.
pub fn export_matrix(report: &SynthesisReport) -> Result<TransitionMatrix> {
    if report.is_blocking() || !report.nonblocking {
        return Err(Error::Supervisor("refusing to export a blocking supervisor".into()));
    }
    let sup = &report.supervisor;
    let modes = accepting_modes(sup)?;
    let distinct: BTreeSet<FlightMode> = modes.values().copied().collect();
    if modes.len() != FlightMode::ALL.len() || distinct.len() != FlightMode::ALL.len() {
        return Err(Error::Supervisor(format!(
            "expected one marked state per flight mode, found {} marked states for {} modes",
            modes.len(),
            distinct.len()
        )));
    }
    TransitionMatrix::from_automaton(sup, modes)
}

pub fn write_sup(m: &TransitionMatrix) -> String {
    let mut out = String::new();
    writeln!(out, "initial {}", m.initial).unwrap();
    out.push_str("accepting");
    for (q, mode) in &m.accepting {
        write!(out, " {q}={mode}").unwrap();
    }
    out.push_str("\nmatrix\n");
    for r in &m.rows {
        writeln!(out, "  {},{},{}", r.source, r.destination, r.event).unwrap();
    }
    out
}

pub fn parse_sup(text: &str) -> Result<TransitionMatrix> {
    let mut initial = None;
    let mut accepting = None;
    let mut rows = Vec::new();
    let mut in_matrix = false;
    let mut seen = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |msg: String| Error::Parse(ParseError::new(line_no, msg));
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        if in_matrix {
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            let [s, d, ev] = parts[..] else {
                return Err(err(format!("expected `<src>,<dst>,<event>`, got `{line}`")));
            };
            let source: StateId = s.parse().map_err(|_| err(format!("bad source `{s}`")))?;
            let destination: StateId = d.parse().map_err(|_| err(format!("bad destination `{d}`")))?;
            if ev.is_empty() {
                return Err(err("empty event name".into()));
            }
            if !seen.insert((source, ev.to_string())) {
                return Err(err(format!("duplicate row for state {source} on `{ev}`")));
            }
            rows.push(MatrixRow { source, destination, event: ev.to_string() });
            continue;
        }
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match key {
            "initial" => initial = Some(rest.trim().parse().map_err(|_| err(format!("bad initial state `{rest}`")))?),
            "accepting" => {
                let mut map = BTreeMap::new();
                for item in rest.split_whitespace() {
                    let (q, mode) = item.split_once('=').ok_or_else(|| err(format!("expected `<state>=<MODE>`, got `{item}`")))?;
                    let q: StateId = q.parse().map_err(|_| err(format!("bad accepting state `{q}`")))?;
                    let mode: FlightMode = mode.parse().map_err(err)?;
                    if map.insert(q, mode).is_some() {
                        return Err(err(format!("state {q} listed twice")));
                    }
                }
                accepting = Some(map);
            }
            "matrix" => in_matrix = true,
            other => return Err(err(format!("unexpected key `{other}`"))),
        }
    }
    let initial = initial.ok_or_else(|| ParseError::new(0, "missing `initial` line"))?;
    let accepting = accepting.ok_or_else(|| ParseError::new(0, "missing `accepting` line"))?;
    if !in_matrix {
        return Err(ParseError::new(0, "missing `matrix` section").into());
    }
    TransitionMatrix::new(initial, accepting, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{language_equivalent, AutomatonBuilder, EventDef};

    fn toy() -> (Automaton, BTreeMap<StateId, FlightMode>) {
        let sigma = Alphabet::new([EventDef::controllable("MIE1"), EventDef::controllable("MCE2"), EventDef::controllable("MIE2")]).unwrap();
        let mut b = AutomatonBuilder::new("toy", sigma);
        b.states(2).mark(0).mark(1);
        b.transition(0, "MIE1", 1).unwrap().transition(1, "MCE2", 1).unwrap().transition(1, "MIE2", 0).unwrap();
        let modes = BTreeMap::from([(0, FlightMode::PowerOff), (1, FlightMode::Standby)]);
        (b.build().unwrap(), modes)
    }

    #[test]
    fn toy_rows_follow_table_layout() {
        let (a, modes) = toy();
        let m = TransitionMatrix::from_automaton(&a, modes).unwrap();
        assert_eq!(m.row_count(), 3);
        let text = write_sup(&m);
        assert!(text.contains("\n  0,1,MIE1\n"));
        assert_eq!(text, "initial 0\naccepting 0=POWER_OFF 1=STANDBY\nmatrix\n  0,1,MIE1\n  1,1,MCE2\n  1,0,MIE2\n");
        let back = parse_sup(&text).unwrap();
        assert_eq!(write_sup(&back), text);
        assert!(language_equivalent(&back.to_automaton("toy", a.alphabet()).unwrap(), &a).unwrap());
        assert_eq!(m.lookup(1, "MIE2"), Some(0));
        assert_eq!(m.lookup(1, "MIE1"), None);
    }

    #[test]
    fn parse_rejects_duplicates_with_line() {
        let text = "initial 0\naccepting 0=POWER_OFF\nmatrix\n  0,0,MIE1\n  0,0,MIE1\n";
        match parse_sup(text).unwrap_err() {
            Error::Parse(p) => assert_eq!(p.line, 5),
            e => panic!("{e}"),
        }
        assert!(parse_sup("initial 0\naccepting 0=NOWHERE\nmatrix\n").is_err());
    }
}
