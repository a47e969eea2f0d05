//! One test per acceptance criterion; `--nocapture` prints the measured
//! figures behind each verdict.

mod common;

use std::time::Instant;

use sctkit::multicopter::*;
use sctkit::runtime::*;
use sctkit::*;

use common::{failsafe, frame, random_instance, rng, session_in, sr};

const ORACLE_INSTANCES: usize = 500;
const ORACLE_BUDGET_S: f64 = 60.0;
const FIXTURES: usize = 50;
const SR_BUDGET_S: f64 = 5.0;
const STEP_BUDGET_MS: f64 = 1.0;
const SYNTH_BUDGET_S: f64 = 10.0;

fn report(name: &str, ok: bool, detail: String) {
    println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{name}: {detail}");
}

#[test]
fn oracle_equivalence() {
    let t = Instant::now();
    let mut r = rng(0x5c7);
    let (mut checked, mut skipped, mut mismatches) = (0, 0, 0);
    while checked < ORACLE_INSTANCES {
        let (g, e) = random_instance(&mut r);
        let oracle = match oracle_supremal(&g, &e) {
            Ok(o) => o,
            Err(Error::OracleTooLarge { .. }) => {
                skipped += 1;
                continue;
            }
            Err(err) => panic!("{err}"),
        };
        let ours = supcon(&g, &e).unwrap().supervisor;
        if !language_equivalent(&ours, &oracle).unwrap() {
            mismatches += 1;
        }
        checked += 1;
    }
    let secs = t.elapsed().as_secs_f64();
    report(
        "oracle equivalence",
        mismatches == 0 && secs < ORACLE_BUDGET_S,
        format!("{checked} instances, {mismatches} mismatches, {skipped} skipped as too large, {secs:.2}s"),
    )
}

#[test]
fn pipeline_identities() {
    let mut r = rng(50);
    let (mut failures, mut uncontrollable_trims) = (Vec::new(), 0);
    for i in 0..FIXTURES {
        let (g, _) = random_instance(&mut r);
        let all = allevents(&g);
        let sup = supcon(&g, &all).unwrap().supervisor;
        // The identity presumes trim(g) is itself controllable; when trimming
        // cuts an uncontrollable event the supremal is smaller, so fall back
        // to the brute-force oracle.
        let trimmed = g.trim();
        let expected = if is_controllable(&trimmed, &g).unwrap() {
            trimmed
        } else {
            uncontrollable_trims += 1;
            oracle_supremal(&g, &all).unwrap()
        };
        if !language_equivalent(&sup, &expected).unwrap() {
            failures.push(format!("#{i} supcon/trim"));
        }
        if !language_equivalent(&sync(&g, &all).unwrap(), &g).unwrap() {
            failures.push(format!("#{i} sync/allevents"));
        }
        let extra = [EventDef::controllable("x0"), EventDef::uncontrollable("x1")];
        let wider = Alphabet::new(g.alphabet().iter().cloned().chain(extra)).unwrap();
        if selfloop_complete(&g, &wider).unwrap().state_count() != g.state_count() {
            failures.push(format!("#{i} selfloop_complete"));
        }
    }
    report("pipeline identities", failures.is_empty(), format!("{FIXTURES} fixtures ({uncontrollable_trims} with uncontrollable trim, checked against oracle), failures {failures:?}"))
}

#[test]
fn case_study() {
    let f = failsafe();
    let sup = &f.report.supervisor;
    let plant = build_plant();
    let modes = accepting_modes(sup).unwrap();
    let bijective = modes.len() == 8 && modes.values().collect::<std::collections::BTreeSet<_>>().len() == 8;
    let ok = plant.counts() == (27, 37, 63)
        && build_spec(1).unwrap().counts() == (8, 24, 68)
        && build_spec(7).unwrap().counts() == (6, 31, 91)
        && f.report.nonblocking
        && !f.report.is_blocking()
        && is_controllable(sup, &plant).unwrap()
        && sup.validate().is_empty()
        && bijective;
    let e = build_full_specification().unwrap().counts();
    report(
        "case-study synthesis",
        ok,
        format!(
            "plant {:?}, E {}/{} (reference 133/2219), S {:?} (reference 784/37/1554)",
            plant.counts(),
            e.0,
            e.2,
            f.report.supervisor_counts
        ),
    )
}

#[test]
fn sr_suite() {
    let f = failsafe();
    let t = Instant::now();
    let failed: Vec<_> = sr::CASES.iter().filter(|c| sr::run(&f.matrix, c) != Ok(c.expected)).map(|c| c.name).collect();
    let secs = t.elapsed().as_secs_f64();
    report(
        "SR conformance",
        failed.is_empty() && sr::CASES.len() >= 14 && secs < SR_BUDGET_S,
        format!("{} cases, failed {failed:?}, {secs:.3}s", sr::CASES.len()),
    )
}

#[test]
fn negative_examples() {
    let plant = build_plant();
    let mut notes = Vec::new();
    let mut ok = true;
    for k in 1..=3 {
        let specs = build_example(k).unwrap();
        let r = synthesize_with(&specs).unwrap();
        let closed = sync(&plant, &pipeline::compose_specs(&plant, &specs).unwrap()).unwrap();
        let replays = r.closed_loop_blocking.as_ref().is_some_and(|d| {
            closed.replay_trace(&d.witness) == Some(d.stuck_state) && !closed.coreachable().contains(&d.stuck_state)
        });
        ok &= r.is_blocking() && replays;
        notes.push(format!("example {k} witness length {}", r.closed_loop_blocking.map_or(0, |d| d.witness.len())));
    }
    ok &= !failsafe().report.is_blocking();
    report("negative examples", ok, format!("{}; nominal model nonblocking", notes.join(", ")))
}

#[test]
fn worked_example_and_fuzz() {
    let f = failsafe();
    let worked = ["ATE16", "ATE18", "ATE20"].iter().fold(Health::default(), |h, e| h.with(e));
    let mut s = session_in(&f.matrix, FlightMode::Loiter);
    let rec = decision_step(&mut s, &Frame::new(Stick::Normal, Switch::Normal, worked), &f.matrix).unwrap();
    let mut ok = rec.consumed.len() == 13 && f.matrix.mode_of(s.current).is_some();
    let frames = Frame::all_without_power();
    let mut errors = 0;
    for mode in FlightMode::ALL {
        let start = session_in(&f.matrix, mode);
        for fr in &frames {
            let mut s = start.clone();
            match decision_step(&mut s, fr, &f.matrix) {
                Ok(_) if f.matrix.mode_of(s.current).is_some() => {}
                _ => errors += 1,
            }
        }
    }
    ok &= errors == 0;
    report(
        "worked frame and exhaustive fuzz",
        ok,
        format!("12 frame events + {} consumed, {} frames x 8 modes, {errors} errors", rec.mce.unwrap_or_default(), frames.len()),
    )
}

#[test]
fn round_trip() {
    let f = failsafe();
    let aut = write_aut(&f.report.supervisor);
    let aut_ok = write_aut(&parse_aut(&aut).unwrap()) == aut;
    let sup = write_sup(&f.matrix);
    let sup_ok = write_sup(&parse_sup(&sup).unwrap()) == sup;
    let rows = f.matrix.row_count() == f.report.supervisor.transition_count();
    report(
        "round-trip fidelity",
        aut_ok && sup_ok && rows,
        format!("aut {aut_ok}, sup {sup_ok}, {} rows", f.matrix.row_count()),
    )
}

#[test]
fn performance() {
    let f = failsafe();
    let fr = frame(Stick::Normal, Switch::Normal, &["ATE12"]);
    let start = session_in(&f.matrix, FlightMode::Loiter);
    let n = 10_000;
    let t = Instant::now();
    for _ in 0..n {
        let mut s = start.clone();
        std::hint::black_box(decision_step(&mut s, std::hint::black_box(&fr), &f.matrix).unwrap());
    }
    let step_ms = t.elapsed().as_secs_f64() * 1e3 / n as f64;
    report(
        "performance",
        step_ms < STEP_BUDGET_MS && f.seconds < SYNTH_BUDGET_S,
        format!("decision_step {step_ms:.4} ms, synthesis {:.2}s", f.seconds),
    )
}
