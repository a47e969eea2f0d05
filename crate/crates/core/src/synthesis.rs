//! Controllability, supremal controllable sublanguage synthesis, blocking
//! diagnosis, and a brute-force supremality oracle for small instances.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::automaton::{Automaton, EventId, StateId, Trace};
use crate::composition::sync_with_pairs;
use crate::error::{Error, Result};

/// `(states, events, transitions)`.
pub type Counts = (usize, usize, usize);

/// Largest product the subset-enumeration oracle accepts.
pub const ORACLE_STATE_LIMIT: usize = 16;

/// A shortest string `prefix` in the closed behavior of the candidate after
/// which the plant can execute the uncontrollable `event` but the candidate
/// cannot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControllabilityViolation {
    pub prefix: Trace,
    pub event: String,
}

impl fmt::Display for ControllabilityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "after `{}` the plant can execute uncontrollable `{}`", self.prefix, self.event)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockingDiagnosis {
    /// Shortest string from the initial state to `stuck_state`.
    pub witness: Trace,
    pub stuck_state: StateId,
    pub defined_events_at_stuck: BTreeSet<String>,
}

impl fmt::Display for BlockingDiagnosis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "state {} cannot reach a marker state; witness: {}", self.stuck_state, self.witness)?;
        if self.defined_events_at_stuck.is_empty() {
            write!(f, " (no events defined there)")
        } else {
            let evs: Vec<&str> = self.defined_events_at_stuck.iter().map(String::as_str).collect();
            write!(f, " (defined there: {})", evs.join(", "))
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthesisReport {
    pub supervisor: Automaton,
    /// Plant state behind each supervisor state.
    pub plant_states: Vec<StateId>,
    pub plant_counts: Counts,
    pub spec_counts: Counts,
    pub product_counts: Counts,
    pub supervisor_counts: Counts,
    pub nonblocking: bool,
    pub empty: bool,
    /// Pruning passes until the fixpoint.
    pub iterations: usize,
    /// Blocking found in the unrestricted closed loop `sync(plant, spec)`:
    /// the specifications leave some plant string without a way to complete.
    pub closed_loop_blocking: Option<BlockingDiagnosis>,
}

impl SynthesisReport {
    /// True when the specification set is unusable as designed: the closed
    /// loop blocks, or nothing survives synthesis.
    pub fn is_blocking(&self) -> bool {
        self.empty || self.closed_loop_blocking.is_some()
    }
}

impl fmt::Display for SynthesisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |(s, e, t): Counts| format!("{s} states, {e} events, {t} transitions");
        writeln!(f, "plant:      {}", row(self.plant_counts))?;
        writeln!(f, "spec:       {}", row(self.spec_counts))?;
        writeln!(f, "product:    {}", row(self.product_counts))?;
        writeln!(f, "supervisor: {}", row(self.supervisor_counts))?;
        writeln!(f, "marked:     {}", self.supervisor.marked().len())?;
        writeln!(f, "nonblocking: {}  empty: {}  iterations: {}", self.nonblocking, self.empty, self.iterations)?;
        match &self.closed_loop_blocking {
            Some(d) => writeln!(f, "closed loop BLOCKING: {d}"),
            None => writeln!(f, "closed loop nonblocking"),
        }
    }
}

fn require_same_alphabet(a: &Automaton, b: &Automaton) -> Result<()> {
    if a.alphabet().same_names(b.alphabet()) {
        Ok(())
    } else {
        Err(Error::AlphabetMismatch(format!(
            "`{}` and `{}` must share one alphabet; complete the specification first",
            a.name(),
            b.name()
        )))
    }
}

fn events_by_name(a: &Automaton) -> Vec<EventId> {
    let mut ids: Vec<EventId> = (0..a.alphabet().len()).collect();
    ids.sort_by(|&x, &y| a.alphabet().name(x).cmp(a.alphabet().name(y)));
    ids
}

fn rebuild_trace(a: &Automaton, parent: &HashMap<StateId, (StateId, EventId)>, mut q: StateId) -> Trace {
    let mut events = Vec::new();
    while let Some(&(p, ev)) = parent.get(&q) {
        events.push(a.alphabet().name(ev).to_string());
        q = p;
    }
    events.reverse();
    Trace(events)
}

/// Checks `closure(K) Σu ∩ L(G) ⊆ closure(K)` with `K` the closed behavior
/// of `k`. Returns the shortest violation (ties broken by event name).
pub fn check_controllable(k: &Automaton, g: &Automaton) -> Result<Option<ControllabilityViolation>> {
    require_same_alphabet(k, g)?;
    if k.is_empty() || g.is_empty() {
        return Ok(None);
    }
    let to_g = k.alphabet().translation(g.alphabet());
    let order = events_by_name(k);
    let unc: Vec<EventId> = order.iter().copied().filter(|&e| !k.alphabet().event(e).is_controllable()).collect();

    let start = (k.initial(), g.initial());
    let mut parent: HashMap<(StateId, StateId), ((StateId, StateId), EventId)> = HashMap::new();
    let mut seen = std::collections::HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((qk, qg)) = queue.pop_front() {
        for &u in &unc {
            let ug = to_g[u].expect("same alphabet");
            if g.step(qg, ug).is_some() && k.step(qk, u).is_none() {
                let mut events = Vec::new();
                let mut cur = (qk, qg);
                while let Some(&(prev, ev)) = parent.get(&cur) {
                    events.push(k.alphabet().name(ev).to_string());
                    cur = prev;
                }
                events.reverse();
                return Ok(Some(ControllabilityViolation {
                    prefix: Trace(events),
                    event: k.alphabet().name(u).to_string(),
                }));
            }
        }
        for &ev in &order {
            let (Some(nk), Some(ng)) = (k.step(qk, ev), g.step(qg, to_g[ev].unwrap())) else {
                continue;
            };
            if seen.insert((nk, ng)) {
                parent.insert((nk, ng), ((qk, qg), ev));
                queue.push_back((nk, ng));
            }
        }
    }
    Ok(None)
}

pub fn is_controllable(k: &Automaton, g: &Automaton) -> Result<bool> {
    Ok(check_controllable(k, g)?.is_none())
}

/// Shortest witness to a reachable state that cannot reach a marker state,
/// or `None` if `a` is nonblocking.
pub fn diagnose_blocking(a: &Automaton) -> Option<BlockingDiagnosis> {
    if a.is_empty() {
        return None;
    }
    let co = a.coreachable();
    let order = events_by_name(a);
    let mut parent = HashMap::new();
    let mut seen = vec![false; a.state_count()];
    let mut queue = VecDeque::from([a.initial()]);
    seen[a.initial()] = true;
    while let Some(q) = queue.pop_front() {
        if !co.contains(&q) {
            return Some(BlockingDiagnosis {
                witness: rebuild_trace(a, &parent, q),
                stuck_state: q,
                defined_events_at_stuck: a.successors(q).map(|(ev, _)| a.alphabet().name(ev).to_string()).collect(),
            });
        }
        for &ev in &order {
            if let Some(d) = a.step(q, ev) {
                if !seen[d] {
                    seen[d] = true;
                    parent.insert(d, (q, ev));
                    queue.push_back(d);
                }
            }
        }
    }
    None
}

/// Monolithic synthesis: the trim, controllable, maximal subautomaton of
/// `sync(g, e)`. `e` must already be over `g`'s alphabet.
pub fn supcon(g: &Automaton, e: &Automaton) -> Result<SynthesisReport> {
    require_same_alphabet(g, e)?;
    let (product, pairs) = sync_with_pairs(g, e)?;
    let closed_loop_blocking = diagnose_blocking(&product);
    let to_g = product.alphabet().translation(g.alphabet());
    let unc: Vec<EventId> = product.alphabet().uncontrollable().collect();

    let n = product.state_count();
    let mut alive = vec![true; n];
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mut changed = false;

        // Uncontrollable events the plant allows but the closed loop cannot follow.
        for s in 0..n {
            if !alive[s] {
                continue;
            }
            let qg = pairs[s].0;
            let bad = unc.iter().any(|&u| {
                g.step(qg, to_g[u].unwrap()).is_some()
                    && !product.step(s, u).is_some_and(|t| alive[t])
            });
            if bad {
                alive[s] = false;
                changed = true;
            }
        }

        // Blocking and unreachable states, recomputed from scratch.
        let keep = trim_mask(&product, &alive);
        for s in 0..n {
            if alive[s] && !keep[s] {
                alive[s] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let (supervisor, old) = product.restrict(&alive);
    let supervisor = supervisor.with_name(format!("supcon({},{})", g.name(), e.name()));
    let plant_states = old.iter().map(|&s| pairs[s].0).collect();
    Ok(SynthesisReport {
        nonblocking: supervisor.is_nonblocking(),
        empty: supervisor.is_empty(),
        plant_counts: g.counts(),
        spec_counts: e.counts(),
        product_counts: product.counts(),
        supervisor_counts: supervisor.counts(),
        supervisor,
        plant_states,
        iterations,
        closed_loop_blocking,
    })
}

/// States of `a` within `alive` that are reachable and coreachable through
/// `alive` states only.
fn trim_mask(a: &Automaton, alive: &[bool]) -> Vec<bool> {
    let n = a.state_count();
    let mut reach = vec![false; n];
    if n == 0 || !alive[a.initial()] {
        return reach;
    }
    let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for (s, _, d) in a.transitions() {
        if alive[s] && alive[d] {
            preds[d].push(s);
        }
    }
    let mut co = vec![false; n];
    let mut queue: VecDeque<StateId> = a.marked().iter().copied().filter(|&m| alive[m]).collect();
    for &m in &queue {
        co[m] = true;
    }
    while let Some(q) = queue.pop_front() {
        for &p in &preds[q] {
            if !co[p] {
                co[p] = true;
                queue.push_back(p);
            }
        }
    }
    if !co[a.initial()] {
        return reach;
    }
    reach[a.initial()] = true;
    queue.push_back(a.initial());
    while let Some(q) = queue.pop_front() {
        for (_, d) in a.successors(q) {
            if co[d] && !reach[d] {
                reach[d] = true;
                queue.push_back(d);
            }
        }
    }
    reach
}

/// Brute-force supremal controllable sublanguage: every state subset of the
/// product that contains the initial state is trimmed and tested; the
/// largest passing candidate is returned after checking it contains all the
/// others.
pub fn oracle_supremal(g: &Automaton, e: &Automaton) -> Result<Automaton> {
    require_same_alphabet(g, e)?;
    let (product, pairs) = sync_with_pairs(g, e)?;
    let n = product.state_count();
    if n > ORACLE_STATE_LIMIT {
        return Err(Error::OracleTooLarge { states: n, limit: ORACLE_STATE_LIMIT });
    }
    let name = format!("oracle({},{})", g.name(), e.name());
    if n == 0 {
        return Ok(product.with_name(name));
    }
    let to_g = product.alphabet().translation(g.alphabet());

    let succ: Vec<u32> = (0..n)
        .map(|s| product.successors(s).fold(0u32, |m, (_, d)| m | (1 << d)))
        .collect();
    let marked: u32 = product.marked().iter().fold(0, |m, &s| m | (1 << s));
    // For each state, the product targets its plant-enabled uncontrollable
    // events must reach, or `None` if some such event is missing entirely.
    let required: Vec<Option<u32>> = (0..n)
        .map(|s| {
            let mut need = 0u32;
            for u in product.alphabet().uncontrollable() {
                if g.step(pairs[s].0, to_g[u].unwrap()).is_some() {
                    match product.step(s, u) {
                        Some(t) => need |= 1 << t,
                        None => return None,
                    }
                }
            }
            Some(need)
        })
        .collect();

    let init = product.initial();
    let others: Vec<usize> = (0..n).filter(|&s| s != init).collect();
    let mut passing: Vec<u32> = vec![0];
    for bits in 0u32..(1 << others.len()) {
        let mut subset = 1u32 << init;
        for (i, &s) in others.iter().enumerate() {
            if bits & (1 << i) != 0 {
                subset |= 1 << s;
            }
        }
        let trimmed = trim_bits(n, subset, init, &succ, marked, &product);
        if trimmed == 0 {
            continue;
        }
        let ok = (0..n)
            .filter(|&s| trimmed & (1 << s) != 0)
            .all(|s| required[s].is_some_and(|need| need & !trimmed == 0));
        if ok {
            passing.push(trimmed);
        }
    }
    let best = *passing.iter().max_by_key(|m| m.count_ones()).unwrap();
    assert!(
        passing.iter().all(|&m| m & !best == 0),
        "no passing candidate contains all others"
    );
    let keep: Vec<bool> = (0..n).map(|s| best & (1 << s) != 0).collect();
    Ok(product.restrict(&keep).0.with_name(name))
}

fn trim_bits(n: usize, subset: u32, init: usize, succ: &[u32], marked: u32, a: &Automaton) -> u32 {
    // coreachable within subset
    let mut co = marked & subset;
    loop {
        let mut next = co;
        for (s, &out) in succ.iter().enumerate().take(n) {
            if subset & (1 << s) != 0 && out & co != 0 {
                next |= 1 << s;
            }
        }
        if next == co {
            break;
        }
        co = next;
    }
    if co & (1 << init) == 0 {
        return 0;
    }
    let mut reach = 1u32 << init;
    let mut frontier = vec![init];
    while let Some(q) = frontier.pop() {
        for (_, d) in a.successors(q) {
            if co & (1 << d) != 0 && reach & (1 << d) == 0 {
                reach |= 1 << d;
                frontier.push(d);
            }
        }
    }
    reach
}
