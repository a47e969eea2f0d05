//! Deterministic finite automata with marker states over a
//! controllability-partitioned alphabet.
//!
//! States are dense indices `0..state_count`. The automaton with zero states
//! is the designated empty automaton: its closed and marked behaviors are both
//! the empty language.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type StateId = usize;
pub type EventId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Controllability {
    Controllable,
    Uncontrollable,
}

impl Controllability {
    pub fn is_controllable(self) -> bool {
        self == Controllability::Controllable
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EventDef {
    name: String,
    controllability: Controllability,
}

impl EventDef {
    pub fn new(name: impl Into<String>, controllability: Controllability) -> Self {
        Self { name: name.into(), controllability }
    }

    pub fn controllable(name: impl Into<String>) -> Self {
        Self::new(name, Controllability::Controllable)
    }

    pub fn uncontrollable(name: impl Into<String>) -> Self {
        Self::new(name, Controllability::Uncontrollable)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn controllability(&self) -> Controllability {
        self.controllability
    }

    pub fn is_controllable(&self) -> bool {
        self.controllability.is_controllable()
    }
}

/// An ordered set of events. Equality between alphabets is decided by name
/// set (see [`Alphabet::same_names`]); the order only fixes serialization.
#[derive(Debug, Clone, Default)]
pub struct Alphabet {
    events: Vec<EventDef>,
    index: HashMap<String, EventId>,
}

impl Alphabet {
    pub fn new(events: impl IntoIterator<Item = EventDef>) -> Result<Self> {
        let mut alphabet = Alphabet::default();
        for event in events {
            alphabet.push(event)?;
        }
        Ok(alphabet)
    }

    fn push(&mut self, event: EventDef) -> Result<EventId> {
        if event.name.is_empty() {
            return Err(Error::UnknownEvent(String::new()));
        }
        if self.index.contains_key(&event.name) {
            return Err(Error::DuplicateEvent(event.name));
        }
        let id = self.events.len();
        self.index.insert(event.name.clone(), id);
        self.events.push(event);
        Ok(id)
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &EventDef> + '_ {
        self.events.iter()
    }

    pub fn event(&self, id: EventId) -> &EventDef {
        &self.events[id]
    }

    pub fn name(&self, id: EventId) -> &str {
        &self.events[id].name
    }

    pub fn id(&self, name: &str) -> Option<EventId> {
        self.index.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn get(&self, name: &str) -> Option<&EventDef> {
        self.id(name).map(|id| &self.events[id])
    }

    pub fn names(&self) -> BTreeSet<&str> {
        self.events.iter().map(|e| e.name.as_str()).collect()
    }

    pub fn same_names(&self, other: &Alphabet) -> bool {
        self.len() == other.len() && self.events.iter().all(|e| other.contains(&e.name))
    }

    pub fn is_subset_of(&self, other: &Alphabet) -> bool {
        self.events.iter().all(|e| other.contains(&e.name))
    }

    pub fn controllable(&self) -> impl Iterator<Item = EventId> + '_ {
        (0..self.len()).filter(|&i| self.events[i].is_controllable())
    }

    pub fn uncontrollable(&self) -> impl Iterator<Item = EventId> + '_ {
        (0..self.len()).filter(|&i| !self.events[i].is_controllable())
    }

    /// Name-union of two alphabets, keeping `self`'s order first. A shared
    /// name with different controllability tags is an error.
    pub fn union(&self, other: &Alphabet) -> Result<Alphabet> {
        let mut out = self.clone();
        for event in &other.events {
            match out.get(&event.name) {
                Some(existing) if existing.controllability != event.controllability => {
                    return Err(Error::ControllabilityConflict(event.name.clone()));
                }
                Some(_) => {}
                None => {
                    out.push(event.clone())?;
                }
            }
        }
        Ok(out)
    }

    /// Maps every event of `self` to the id of the same-named event in `other`.
    pub(crate) fn translation(&self, other: &Alphabet) -> Vec<Option<EventId>> {
        self.events.iter().map(|e| other.id(&e.name)).collect()
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.same_names(other)
    }
}

/// A finite string of event names.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Trace(pub Vec<String>);

impl Trace {
    pub fn empty() -> Self {
        Trace(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn events(&self) -> impl Iterator<Item = &str> + '_ {
        self.0.iter().map(String::as_str)
    }
}

impl<S: Into<String>> FromIterator<S> for Trace {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Trace(iter.into_iter().map(Into::into).collect())
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "ε")
        } else {
            write!(f, "{}", self.0.join(" "))
        }
    }
}

/// One broken invariant, with the coordinates needed to find it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    InitialOutOfRange { initial: StateId, state_count: usize },
    MarkedOutOfRange { state: StateId },
    MarkedInEmpty { state: StateId },
    SourceOutOfRange { source: StateId, event: String },
    TargetOutOfRange { source: StateId, event: String, target: StateId },
    UnknownEventId { source: StateId, event: EventId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InitialOutOfRange { initial, state_count } => {
                write!(f, "initial out of range: {initial} >= {state_count}")
            }
            Violation::MarkedOutOfRange { state } => write!(f, "marked state {state} out of range"),
            Violation::MarkedInEmpty { state } => {
                write!(f, "marked state {state} in automaton without states")
            }
            Violation::SourceOutOfRange { source, event } => {
                write!(f, "transition source {source} on `{event}` out of range")
            }
            Violation::TargetOutOfRange { source, event, target } => {
                write!(f, "transition {source} --{event}--> {target}: target out of range")
            }
            Violation::UnknownEventId { source, event } => {
                write!(f, "transition from {source} uses event id {event} outside the alphabet")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Automaton {
    name: String,
    alphabet: Alphabet,
    state_count: usize,
    initial: StateId,
    marked: BTreeSet<StateId>,
    delta: BTreeMap<(StateId, EventId), StateId>,
}

impl Automaton {
    /// Assembles an automaton without range checks; run [`Automaton::validate`]
    /// afterwards. Determinism is still enforced: a repeated `(source, event)`
    /// pair is rejected.
    pub fn from_parts_unchecked(
        name: impl Into<String>,
        alphabet: Alphabet,
        state_count: usize,
        initial: StateId,
        marked: impl IntoIterator<Item = StateId>,
        transitions: impl IntoIterator<Item = (StateId, EventId, StateId)>,
    ) -> Result<Self> {
        let mut delta = BTreeMap::new();
        for (src, ev, dst) in transitions {
            if delta.insert((src, ev), dst).is_some() {
                let event = if ev < alphabet.len() { alphabet.name(ev).to_string() } else { ev.to_string() };
                return Err(Error::Nondeterministic { state: src, event });
            }
        }
        Ok(Self {
            name: name.into(),
            alphabet,
            state_count,
            initial,
            marked: marked.into_iter().collect(),
            delta,
        })
    }

    /// Like [`Automaton::from_parts_unchecked`], but fails on any violation.
    pub fn from_parts(
        name: impl Into<String>,
        alphabet: Alphabet,
        state_count: usize,
        initial: StateId,
        marked: impl IntoIterator<Item = StateId>,
        transitions: impl IntoIterator<Item = (StateId, EventId, StateId)>,
    ) -> Result<Self> {
        let a = Self::from_parts_unchecked(name, alphabet, state_count, initial, marked, transitions)?;
        let violations = a.validate();
        if violations.is_empty() {
            Ok(a)
        } else {
            Err(Error::Invalid { name: a.name, violations })
        }
    }

    pub fn empty(name: impl Into<String>, alphabet: Alphabet) -> Self {
        Self {
            name: name.into(),
            alphabet,
            state_count: 0,
            initial: 0,
            marked: BTreeSet::new(),
            delta: BTreeMap::new(),
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.state_count;
        if n == 0 {
            out.extend(self.marked.iter().map(|&state| Violation::MarkedInEmpty { state }));
        } else {
            if self.initial >= n {
                out.push(Violation::InitialOutOfRange { initial: self.initial, state_count: n });
            }
            out.extend(
                self.marked
                    .iter()
                    .filter(|&&s| s >= n)
                    .map(|&state| Violation::MarkedOutOfRange { state }),
            );
        }
        for (&(src, ev), &dst) in &self.delta {
            if ev >= self.alphabet.len() {
                out.push(Violation::UnknownEventId { source: src, event: ev });
                continue;
            }
            let event = self.alphabet.name(ev).to_string();
            if src >= n {
                out.push(Violation::SourceOutOfRange { source: src, event: event.clone() });
            }
            if dst >= n {
                out.push(Violation::TargetOutOfRange { source: src, event, target: dst });
            }
        }
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn is_empty(&self) -> bool {
        self.state_count == 0
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn marked(&self) -> &BTreeSet<StateId> {
        &self.marked
    }

    pub fn is_marked(&self, q: StateId) -> bool {
        self.marked.contains(&q)
    }

    pub fn transition_count(&self) -> usize {
        self.delta.len()
    }

    /// `(states, events, transitions)`.
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.state_count, self.alphabet.len(), self.delta.len())
    }

    pub fn step(&self, q: StateId, ev: EventId) -> Option<StateId> {
        self.delta.get(&(q, ev)).copied()
    }

    pub fn step_name(&self, q: StateId, name: &str) -> Option<StateId> {
        self.step(q, self.alphabet.id(name)?)
    }

    /// Outgoing transitions of `q` as `(event, target)`, in event-id order.
    pub fn successors(&self, q: StateId) -> impl Iterator<Item = (EventId, StateId)> + '_ {
        self.delta.range((q, 0)..(q + 1, 0)).map(|(&(_, ev), &dst)| (ev, dst))
    }

    /// All transitions as `(source, event, target)`, ordered by source then event id.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, EventId, StateId)> + '_ {
        self.delta.iter().map(|(&(s, e), &d)| (s, e, d))
    }

    /// Replays a string from the initial state; `None` if it leaves L(G).
    pub fn replay<'a>(&self, events: impl IntoIterator<Item = &'a str>) -> Option<StateId> {
        if self.is_empty() {
            return None;
        }
        let mut q = self.initial;
        for name in events {
            q = self.step_name(q, name)?;
        }
        Some(q)
    }

    pub fn replay_trace(&self, trace: &Trace) -> Option<StateId> {
        self.replay(trace.events())
    }

    pub fn accepts(&self, trace: &Trace) -> bool {
        self.replay_trace(trace).is_some_and(|q| self.is_marked(q))
    }

    pub fn reachable(&self) -> BTreeSet<StateId> {
        if self.is_empty() {
            return BTreeSet::new();
        }
        let mut seen = vec![false; self.state_count];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(q) = queue.pop_front() {
            for (_, dst) in self.successors(q) {
                if !seen[dst] {
                    seen[dst] = true;
                    queue.push_back(dst);
                }
            }
        }
        indices(&seen)
    }

    pub fn coreachable(&self) -> BTreeSet<StateId> {
        let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); self.state_count];
        for (src, _, dst) in self.transitions() {
            preds[dst].push(src);
        }
        let mut seen = vec![false; self.state_count];
        let mut queue: VecDeque<StateId> = self.marked.iter().copied().collect();
        for &q in &queue {
            seen[q] = true;
        }
        while let Some(q) = queue.pop_front() {
            for &p in &preds[q] {
                if !seen[p] {
                    seen[p] = true;
                    queue.push_back(p);
                }
            }
        }
        indices(&seen)
    }

    pub fn is_nonblocking(&self) -> bool {
        let co = self.coreachable();
        self.reachable().iter().all(|q| co.contains(q))
    }

    /// Restriction to reachable and coreachable states, renumbered in
    /// breadth-first order from the initial state.
    pub fn trim(&self) -> Automaton {
        let co = self.coreachable();
        let mut keep = vec![false; self.state_count];
        for q in self.reachable() {
            keep[q] = co.contains(&q);
        }
        self.restrict(&keep).0
    }

    /// Keeps the states flagged in `keep` that are reachable from the initial
    /// state through kept states; renumbers them in BFS order. Returns the new
    /// automaton and, for every new state, its old index. An unkept initial
    /// state yields the empty automaton.
    pub fn restrict(&self, keep: &[bool]) -> (Automaton, Vec<StateId>) {
        if self.is_empty() || !keep[self.initial] {
            return (Automaton::empty(self.name.clone(), self.alphabet.clone()), Vec::new());
        }
        let mut new_id = vec![usize::MAX; self.state_count];
        let mut old_of = vec![self.initial];
        new_id[self.initial] = 0;
        let mut delta = BTreeMap::new();
        let mut i = 0;
        while i < old_of.len() {
            let q = old_of[i];
            for (ev, dst) in self.successors(q) {
                if !keep[dst] {
                    continue;
                }
                if new_id[dst] == usize::MAX {
                    new_id[dst] = old_of.len();
                    old_of.push(dst);
                }
                delta.insert((i, ev), new_id[dst]);
            }
            i += 1;
        }
        let marked = old_of
            .iter()
            .enumerate()
            .filter(|(_, &q)| self.is_marked(q))
            .map(|(i, _)| i)
            .collect();
        let out = Automaton {
            name: self.name.clone(),
            alphabet: self.alphabet.clone(),
            state_count: old_of.len(),
            initial: 0,
            marked,
            delta,
        };
        (out, old_of)
    }

    /// All marked strings of length at most `max_len`. Exponential in
    /// `max_len`; meant for small oracle instances.
    pub fn enumerate_marked_strings(&self, max_len: usize) -> BTreeSet<Trace> {
        let mut out = BTreeSet::new();
        if self.is_empty() {
            return out;
        }
        let mut prefix = Vec::new();
        self.enumerate_from(self.initial, max_len, &mut prefix, &mut out);
        out
    }

    fn enumerate_from(&self, q: StateId, budget: usize, prefix: &mut Vec<String>, out: &mut BTreeSet<Trace>) {
        if self.is_marked(q) {
            out.insert(Trace(prefix.clone()));
        }
        if budget == 0 {
            return;
        }
        for (ev, dst) in self.successors(q) {
            prefix.push(self.alphabet.name(ev).to_string());
            self.enumerate_from(dst, budget - 1, prefix, out);
            prefix.pop();
        }
    }

    /// All strings of the closed behavior of length at most `max_len`.
    pub fn enumerate_strings(&self, max_len: usize) -> BTreeSet<Trace> {
        let mut out = BTreeSet::new();
        if self.is_empty() {
            return out;
        }
        let mut stack = vec![(self.initial, Vec::<String>::new())];
        while let Some((q, s)) = stack.pop() {
            if s.len() < max_len {
                for (ev, dst) in self.successors(q) {
                    let mut t = s.clone();
                    t.push(self.alphabet.name(ev).to_string());
                    stack.push((dst, t));
                }
            }
            out.insert(Trace(s));
        }
        out
    }
}

fn indices(flags: &[bool]) -> BTreeSet<StateId> {
    flags.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| i).collect()
}

/// Decides `Lm(a) = Lm(b)` and `L(a) = L(b)` by walking both transition
/// structures in lockstep. Alphabets must agree as name sets.
pub fn language_equivalent(a: &Automaton, b: &Automaton) -> Result<bool> {
    if !a.alphabet.same_names(&b.alphabet) {
        return Err(Error::AlphabetMismatch(format!(
            "`{}` and `{}` have different event sets",
            a.name, b.name
        )));
    }
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return Ok(true),
        (true, false) | (false, true) => return Ok(false),
        _ => {}
    }
    let to_b = a.alphabet.translation(&b.alphabet);
    let mut seen = std::collections::HashSet::new();
    let mut queue = VecDeque::from([(a.initial, b.initial)]);
    seen.insert((a.initial, b.initial));
    while let Some((p, q)) = queue.pop_front() {
        if a.is_marked(p) != b.is_marked(q) {
            return Ok(false);
        }
        for (ev, eb) in to_b.iter().enumerate() {
            let eb = eb.expect("same name sets");
            match (a.step(p, ev), b.step(q, eb)) {
                (None, None) => {}
                (Some(p2), Some(q2)) => {
                    if seen.insert((p2, q2)) {
                        queue.push_back((p2, q2));
                    }
                }
                _ => return Ok(false),
            }
        }
    }
    Ok(true)
}

/// Incremental construction by event name.
#[derive(Debug, Clone)]
pub struct AutomatonBuilder {
    name: String,
    alphabet: Alphabet,
    state_count: usize,
    initial: StateId,
    marked: BTreeSet<StateId>,
    delta: BTreeMap<(StateId, EventId), StateId>,
}

impl AutomatonBuilder {
    pub fn new(name: impl Into<String>, alphabet: Alphabet) -> Self {
        Self {
            name: name.into(),
            alphabet,
            state_count: 0,
            initial: 0,
            marked: BTreeSet::new(),
            delta: BTreeMap::new(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn states(&mut self, n: usize) -> &mut Self {
        self.state_count = n;
        self
    }

    pub fn add_state(&mut self) -> StateId {
        self.state_count += 1;
        self.state_count - 1
    }

    pub fn initial(&mut self, q: StateId) -> &mut Self {
        self.initial = q;
        self
    }

    pub fn mark(&mut self, q: StateId) -> &mut Self {
        self.marked.insert(q);
        self
    }

    pub fn transition(&mut self, src: StateId, event: &str, dst: StateId) -> Result<&mut Self> {
        let ev = self.alphabet.id(event).ok_or_else(|| Error::UnknownEvent(event.to_string()))?;
        if self.delta.insert((src, ev), dst).is_some() {
            return Err(Error::Nondeterministic { state: src, event: event.to_string() });
        }
        Ok(self)
    }

    /// Adds a selfloop at `q` for each listed event.
    pub fn selfloops<'a>(&mut self, q: StateId, events: impl IntoIterator<Item = &'a str>) -> Result<&mut Self> {
        for e in events {
            self.transition(q, e, q)?;
        }
        Ok(self)
    }

    pub fn remove_transition(&mut self, src: StateId, event: &str) -> Option<StateId> {
        let ev = self.alphabet.id(event)?;
        self.delta.remove(&(src, ev))
    }

    pub fn build(&self) -> Result<Automaton> {
        Automaton::from_parts(
            self.name.clone(),
            self.alphabet.clone(),
            self.state_count,
            self.initial,
            self.marked.iter().copied(),
            self.delta.iter().map(|(&(s, e), &d)| (s, e, d)),
        )
    }
}

impl From<&Automaton> for AutomatonBuilder {
    fn from(a: &Automaton) -> Self {
        Self {
            name: a.name.clone(),
            alphabet: a.alphabet.clone(),
            state_count: a.state_count,
            initial: a.initial,
            marked: a.marked.clone(),
            delta: a.delta.clone(),
        }
    }
}
