//! The line-oriented `.aut` text format.
//!
//! ```text
//! # comment
//! name spec-1
//! states 3
//! initial 0
//! marked 0 2
//! events
//!   MIE1 c
//!   ATE1 u
//! trans
//!   0 MIE1 1
//!   1 ATE1 2
//! ```
//!
//! The empty automaton is written with `states 0` and `initial none`.
//! Writing is canonical (events in alphabet order, transitions by source then
//! event), so parse followed by write reproduces a written file byte for byte.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::automaton::{Alphabet, Automaton, Controllability, EventDef, StateId};
use crate::error::{Error, ParseError, Result};

pub fn write_aut(a: &Automaton) -> String {
    let mut out = String::new();
    writeln!(out, "name {}", a.name()).unwrap();
    writeln!(out, "states {}", a.state_count()).unwrap();
    if a.is_empty() {
        writeln!(out, "initial none").unwrap();
    } else {
        writeln!(out, "initial {}", a.initial()).unwrap();
    }
    out.push_str("marked");
    for m in a.marked() {
        write!(out, " {m}").unwrap();
    }
    out.push('\n');
    out.push_str("events\n");
    for e in a.alphabet().iter() {
        let tag = if e.is_controllable() { 'c' } else { 'u' };
        writeln!(out, "  {} {}", e.name(), tag).unwrap();
    }
    out.push_str("trans\n");
    for (s, ev, d) in a.transitions() {
        writeln!(out, "  {} {} {}", s, a.alphabet().name(ev), d).unwrap();
    }
    out
}

#[derive(PartialEq)]
enum Section {
    Header,
    Events,
    Trans,
}

pub fn parse_aut(text: &str) -> Result<Automaton> {
    let mut name: Option<String> = None;
    let mut states: Option<usize> = None;
    let mut initial: Option<Option<StateId>> = None;
    let mut marked: Option<Vec<(usize, StateId)>> = None;
    let mut events = Vec::new();
    let mut trans: Vec<(usize, StateId, String, StateId)> = Vec::new();
    let mut section = Section::Header;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse(ParseError::new(line_no, msg));
        match trimmed {
            "events" => {
                section = Section::Events;
                continue;
            }
            "trans" => {
                section = Section::Trans;
                continue;
            }
            _ => {}
        }
        let mut words = trimmed.split_whitespace();
        match section {
            Section::Header => {
                let key = words.next().unwrap();
                let rest = trimmed[key.len()..].trim();
                match key {
                    "name" => name = Some(rest.to_string()),
                    "states" => {
                        states = Some(rest.parse().map_err(|_| err(format!("bad state count `{rest}`")))?);
                    }
                    "initial" => {
                        initial = Some(if rest == "none" {
                            None
                        } else {
                            Some(rest.parse().map_err(|_| err(format!("bad initial state `{rest}`")))?)
                        });
                    }
                    "marked" => {
                        let mut list = Vec::new();
                        for w in words {
                            list.push((line_no, w.parse().map_err(|_| err(format!("bad marked state `{w}`")))?));
                        }
                        marked = Some(list);
                    }
                    other => return Err(err(format!("unexpected header key `{other}`"))),
                }
            }
            Section::Events => {
                let (Some(ev), Some(tag), None) = (words.next(), words.next(), words.next()) else {
                    return Err(err("expected `<name> <c|u>`".into()));
                };
                let c = match tag {
                    "c" => Controllability::Controllable,
                    "u" => Controllability::Uncontrollable,
                    _ => return Err(err(format!("bad controllability tag `{tag}`"))),
                };
                events.push((line_no, EventDef::new(ev, c)));
            }
            Section::Trans => {
                let (Some(s), Some(ev), Some(d), None) = (words.next(), words.next(), words.next(), words.next())
                else {
                    return Err(err("expected `<src> <event> <dst>`".into()));
                };
                let s = s.parse().map_err(|_| err(format!("bad source state `{s}`")))?;
                let d = d.parse().map_err(|_| err(format!("bad target state `{d}`")))?;
                trans.push((line_no, s, ev.to_string(), d));
            }
        }
    }

    let missing = |what: &str| Error::Parse(ParseError::new(0, format!("missing `{what}` line")));
    let name = name.ok_or_else(|| missing("name"))?;
    let n = states.ok_or_else(|| missing("states"))?;
    let initial = initial.ok_or_else(|| missing("initial"))?;
    let marked = marked.unwrap_or_default();

    let mut seen = BTreeSet::new();
    for (line, e) in &events {
        if !seen.insert(e.name().to_string()) {
            return Err(ParseError::new(*line, format!("duplicate event `{}`", e.name())).into());
        }
    }
    let alphabet = Alphabet::new(events.into_iter().map(|(_, e)| e))?;

    let initial = match (initial, n) {
        (None, 0) => 0,
        (None, _) => return Err(ParseError::new(0, "`initial none` requires `states 0`").into()),
        (Some(i), _) if i >= n => {
            return Err(ParseError::new(0, format!("initial state {i} out of range (states {n})")).into())
        }
        (Some(i), _) => i,
    };
    for &(line, m) in &marked {
        if m >= n {
            return Err(ParseError::new(line, format!("marked state {m} out of range (states {n})")).into());
        }
    }
    let mut delta = BTreeMap::new();
    for (line, s, ev, d) in trans {
        let id = alphabet
            .id(&ev)
            .ok_or_else(|| ParseError::new(line, format!("unknown event `{ev}`")))?;
        if s >= n || d >= n {
            return Err(ParseError::new(line, format!("state out of range in `{s} {ev} {d}` (states {n})")).into());
        }
        if delta.insert((s, id), d).is_some() {
            return Err(ParseError::new(line, format!("duplicate transition from {s} on `{ev}`")).into());
        }
    }
    Automaton::from_parts(name, alphabet, n, initial, marked.into_iter().map(|(_, m)| m), delta.into_iter().map(|((s, e), d)| (s, e, d)))
}
