//! Synchronous product and the alphabet-completion helpers built on it.

use std::collections::HashMap;

use crate::automaton::{Alphabet, Automaton, EventId, StateId};
use crate::error::{Error, Result};

/// Synchronous product: shared events synchronize, private events interleave.
/// Only pairs reachable from the initial pair are materialized.
pub fn sync(a: &Automaton, b: &Automaton) -> Result<Automaton> {
    Ok(sync_with_pairs(a, b)?.0)
}

/// [`sync`], also returning the component pair behind every product state.
pub fn sync_with_pairs(a: &Automaton, b: &Automaton) -> Result<(Automaton, Vec<(StateId, StateId)>)> {
    let alphabet = a.alphabet().union(b.alphabet())?;
    let name = format!("sync({},{})", a.name(), b.name());
    if a.is_empty() || b.is_empty() {
        return Ok((Automaton::empty(name, alphabet), Vec::new()));
    }
    let in_a: Vec<Option<EventId>> = alphabet.translation(a.alphabet());
    let in_b: Vec<Option<EventId>> = alphabet.translation(b.alphabet());

    let mut ids: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut pairs = vec![(a.initial(), b.initial())];
    ids.insert(pairs[0], 0);
    let mut delta = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let (p, q) = pairs[i];
        for ev in 0..alphabet.len() {
            let next_p = match in_a[ev] {
                Some(ea) => match a.step(p, ea) {
                    Some(t) => t,
                    None => continue,
                },
                None => p,
            };
            let next_q = match in_b[ev] {
                Some(eb) => match b.step(q, eb) {
                    Some(t) => t,
                    None => continue,
                },
                None => q,
            };
            let target = *ids.entry((next_p, next_q)).or_insert_with(|| {
                pairs.push((next_p, next_q));
                pairs.len() - 1
            });
            delta.push((i, ev, target));
        }
        i += 1;
    }
    let marked: Vec<StateId> = pairs
        .iter()
        .enumerate()
        .filter(|(_, &(p, q))| a.is_marked(p) && b.is_marked(q))
        .map(|(i, _)| i)
        .collect();
    let out = Automaton::from_parts(name, alphabet, pairs.len(), 0, marked, delta)?;
    Ok((out, pairs))
}

/// Left fold of [`sync`] over a nonempty list.
pub fn sync_all(automata: &[Automaton]) -> Result<Automaton> {
    let (first, rest) = automata.split_first().ok_or(Error::EmptyList)?;
    let mut acc = first.clone();
    for a in rest {
        acc = sync(&acc, a)?;
    }
    Ok(acc)
}

/// One marked state with a selfloop on every event of `a`'s alphabet.
pub fn allevents(a: &Automaton) -> Automaton {
    selfloop_automaton(format!("allevents({})", a.name()), a.alphabet().clone())
}

pub fn selfloop_automaton(name: impl Into<String>, alphabet: Alphabet) -> Automaton {
    let loops: Vec<_> = (0..alphabet.len()).map(|ev| (0, ev, 0)).collect();
    Automaton::from_parts(name, alphabet, 1, 0, [0], loops).expect("selfloop automaton is well formed")
}

/// Re-expresses `e` over `target`, adding every missing event as a selfloop
/// at every state. Equivalent to synchronizing `e` with the selfloop
/// automaton over `target`, but keeps `e`'s states and numbering.
pub fn selfloop_complete(e: &Automaton, target: &Alphabet) -> Result<Automaton> {
    for ev in e.alphabet().iter() {
        match target.get(ev.name()) {
            None => {
                return Err(Error::AlphabetMismatch(format!(
                    "event `{}` of `{}` is not in the target alphabet",
                    ev.name(),
                    e.name()
                )))
            }
            Some(t) if t.controllability() != ev.controllability() => {
                return Err(Error::ControllabilityConflict(ev.name().to_string()))
            }
            Some(_) => {}
        }
    }
    if e.is_empty() {
        return Ok(Automaton::empty(e.name(), target.clone()));
    }
    let from_e = target.translation(e.alphabet());
    let mut delta = Vec::new();
    for q in 0..e.state_count() {
        for (ev, src_ev) in from_e.iter().enumerate() {
            match src_ev {
                Some(se) => {
                    if let Some(d) = e.step(q, *se) {
                        delta.push((q, ev, d));
                    }
                }
                None => delta.push((q, ev, q)),
            }
        }
    }
    Automaton::from_parts(e.name(), target.clone(), e.state_count(), e.initial(), e.marked().iter().copied(), delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{language_equivalent, AutomatonBuilder, EventDef, Trace};
    use std::collections::BTreeSet;

    fn single(ev: &str) -> Automaton {
        let mut b = AutomatonBuilder::new(ev, Alphabet::new([EventDef::controllable(ev)]).unwrap());
        b.states(2).mark(0).mark(1).transition(0, ev, 1).unwrap();
        b.build().unwrap()
    }

    #[test]
    fn allevents_shape() {
        let x = single("x");
        let all = allevents(&x);
        assert_eq!(all.counts(), (1, 1, 1));
        assert!(language_equivalent(&sync(&x, &all).unwrap(), &x).unwrap());
    }

    #[test]
    fn disjoint_shuffle_matches_interleavings() {
        let p = sync(&single("a"), &single("b")).unwrap();
        assert_eq!(p.state_count(), 4);
        // Interleavings of {ε,a} and {ε,b}, up to length 2.
        let expected: BTreeSet<Trace> = [vec![], vec!["a"], vec!["b"], vec!["a", "b"], vec!["b", "a"]]
            .into_iter()
            .map(Trace::from_iter)
            .collect();
        assert_eq!(p.enumerate_marked_strings(2), expected);
    }

    #[test]
    fn conflicting_tags_rejected() {
        let a = Automaton::from_parts("a", Alphabet::new([EventDef::controllable("e")]).unwrap(), 1, 0, [0], []).unwrap();
        let b = Automaton::from_parts("b", Alphabet::new([EventDef::uncontrollable("e")]).unwrap(), 1, 0, [0], []).unwrap();
        assert!(matches!(sync(&a, &b), Err(Error::ControllabilityConflict(_))));
    }

    #[test]
    fn completion_over_larger_alphabet() {
        let one = Automaton::from_parts("x", Alphabet::new([EventDef::controllable("x")]).unwrap(), 1, 0, [0], [(0, 0, 0)]).unwrap();
        let xy = Alphabet::new([EventDef::controllable("x"), EventDef::controllable("y")]).unwrap();
        let done = selfloop_complete(&one, &xy).unwrap();
        assert_eq!(done.counts(), (1, 2, 2));
        assert!(language_equivalent(&done, &selfloop_automaton("s", xy)).unwrap());
        let narrow = Alphabet::new([EventDef::controllable("y")]).unwrap();
        assert!(selfloop_complete(&one, &narrow).is_err());
    }

    #[test]
    fn sync_all_needs_input() {
        assert!(matches!(sync_all(&[]), Err(Error::EmptyList)));
        let a = single("a");
        assert!(language_equivalent(&sync_all(std::slice::from_ref(&a)).unwrap(), &a).unwrap());
    }
}
