use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde_json::json;

use sctkit::multicopter::pipeline::compose_specs;
use sctkit::multicopter::specs::build_all_specs;
use sctkit::multicopter::{build_example, build_plant, spec_manifest};
use sctkit::runtime::{decision_step, export_matrix, parse_sup, write_sup, EventFrame, RuntimeError, SessionState, TransitionMatrix};
use sctkit::{
    check_controllable, diagnose_blocking, parse_aut, selfloop_complete, supcon, sync, write_aut, Automaton, Error, SynthesisReport,
};

use crate::status;
use crate::{CheckArgs, ExportArgs, Format, RunArgs, SynthArgs};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Parses an `.aut` file, keeping `file:line` in parse errors.
pub fn read_aut(path: &Path) -> Result<Automaton> {
    parse_aut(&read(path)?).map_err(|e| located(path, e))
}

pub fn read_sup(path: &Path) -> Result<TransitionMatrix> {
    parse_sup(&read(path)?).map_err(|e| located(path, e))
}

fn located(path: &Path, e: Error) -> anyhow::Error {
    match e {
        Error::Parse(p) => anyhow!("{}:{}: {}", path.display(), p.line, p.message),
        other => anyhow!("{}: {other}", path.display()),
    }
}

/// Spec files in argument order; a directory contributes its `.aut` files
/// sorted by name.
fn spec_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(p)
                .with_context(|| format!("cannot list {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|e| e.extension().is_some_and(|x| x == "aut"))
                .collect();
            entries.sort();
            if entries.is_empty() {
                bail!("{}: no .aut files", p.display());
            }
            out.extend(entries);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn read_specs(paths: &[PathBuf]) -> Result<Vec<Automaton>> {
    spec_files(paths)?.iter().map(|p| read_aut(p)).collect()
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn with_suffix(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

pub fn synth(a: &SynthArgs) -> Result<u8> {
    let (plant, specs) = match (&a.plant, a.example) {
        (Some(plant), _) => (read_aut(plant)?, read_specs(&a.spec)?),
        (None, Some(k)) => (build_plant(), build_example(k)?),
        (None, None) if a.spec.is_empty() => (build_plant(), build_all_specs()),
        (None, None) => (build_plant(), read_specs(&a.spec)?),
    };
    let e = compose_specs(&plant, &specs)?;
    if let Some(path) = &a.closed_loop {
        write(path, &write_aut(&sync(&plant, &e)?.with_name("CLOSED-LOOP")))?;
    }
    let mut report = supcon(&plant, &e)?;
    report.supervisor = report.supervisor.with_name("SUPER");
    print!("{report}");
    if report.is_blocking() {
        print_blocking(&report);
        return Ok(status::BLOCKING);
    }
    let aut = with_suffix(&a.out, "aut");
    write(&aut, &write_aut(&report.supervisor))?;
    println!("wrote {}", aut.display());
    match export_matrix(&report) {
        Ok(m) => {
            let sup = with_suffix(&a.out, "sup");
            write(&sup, &write_sup(&m))?;
            println!("accepting modes: {}", m.accepting().len());
            println!("wrote {} ({} rows)", sup.display(), m.row_count());
        }
        // Plants outside the flight-mode catalog have no matrix form.
        Err(e) => log::warn!("no transition matrix written: {e}"),
    }
    Ok(status::OK)
}

fn print_blocking(r: &SynthesisReport) {
    if r.empty {
        println!("result: EMPTY supervisor, the specifications are unsatisfiable");
    }
    if let Some(d) = &r.closed_loop_blocking {
        println!("result: BLOCKING");
        println!("witness: {}", if d.witness.is_empty() { "(empty string)".into() } else { d.witness.to_string() });
        println!("stuck state: {}", d.stuck_state);
        println!("defined events there: {}", d.defined_events_at_stuck.iter().cloned().collect::<Vec<_>>().join(" "));
    }
}

pub fn check(a: &CheckArgs) -> Result<u8> {
    let all = !a.nonblocking && !a.deterministic && a.controllable_against.is_none();
    let text = read(&a.automaton)?;
    let k = match parse_aut(&text) {
        Ok(k) => k,
        // Duplicate transitions are the one parse failure that answers a check.
        Err(Error::Parse(p)) if (a.deterministic || all) && p.message.starts_with("duplicate transition") => {
            println!("deterministic: FAIL ({}:{}: {})", a.automaton.display(), p.line, p.message);
            return Ok(status::BLOCKING);
        }
        Err(e) => return Err(located(&a.automaton, e)),
    };
    let mut ok = true;
    if a.deterministic || all {
        let violations = k.validate();
        ok &= violations.is_empty();
        if violations.is_empty() {
            println!("deterministic: pass");
        } else {
            println!("deterministic: FAIL");
            for v in violations {
                println!("  {v}");
            }
        }
    }
    if a.nonblocking || all {
        match diagnose_blocking(&k) {
            None => println!("nonblocking: pass"),
            Some(d) => {
                ok = false;
                println!("nonblocking: FAIL");
                println!("  witness: {}", d.witness);
                println!("  stuck state: {}", d.stuck_state);
            }
        }
    }
    if let Some(plant) = &a.controllable_against {
        let plant = read_aut(plant)?;
        let k = selfloop_complete(&k, plant.alphabet())?;
        match check_controllable(&k, &plant)? {
            None => println!("controllable: pass"),
            Some(v) => {
                ok = false;
                println!("controllable: FAIL");
                println!("  after: {}", v.prefix);
                println!("  uncontrollable event disabled: {}", v.event);
            }
        }
    }
    Ok(if ok { status::OK } else { status::BLOCKING })
}

pub fn run(a: &RunArgs) -> Result<u8> {
    let m = read_sup(&a.sup)?;
    let frames: Vec<EventFrame> =
        serde_json::from_str(&read(&a.scenario)?).with_context(|| format!("{}: not a frame list", a.scenario.display()))?;
    let mut s = SessionState::new(&m);
    let initial = s.mode;
    let mut error = None;
    for f in &frames {
        let step = f
            .validate()
            .map_err(|message| RuntimeError::InvalidFrame { period: s.period, message })
            .and_then(|fr| decision_step(&mut s, &fr, &m));
        if let Err(e) = step {
            error = Some(e);
            break;
        }
    }
    match a.format {
        Format::Json => {
            let doc = json!({ "initial": initial, "timeline": s.log, "final": s.mode, "error": error });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        Format::Text => {
            println!("{:<7} {:<14} {:<5} consumed", "period", "mode", "mce");
            println!("{:<7} {:<14} {:<5} -", "start", initial.as_str(), "-");
            for r in &s.log {
                println!("{:<7} {:<14} {:<5} {}", r.period, r.mode.as_str(), r.mce.as_deref().unwrap_or("-"), r.consumed);
            }
        }
    }
    match error {
        Some(e) => {
            eprintln!("error: {e}");
            Ok(status::RUNTIME)
        }
        None => Ok(status::OK),
    }
}

pub fn export(a: &ExportArgs) -> Result<u8> {
    let out = &a.out;
    write(&out.join("plant.aut"), &write_aut(&build_plant()))?;
    let specs = build_all_specs();
    let mut entries = Vec::new();
    for (info, spec) in spec_manifest().into_iter().zip(&specs) {
        let file = format!("specs/{}.aut", spec.name());
        write(&out.join(&file), &write_aut(spec))?;
        entries.push(json!({
            "index": info.index,
            "name": info.name,
            "file": file,
            "requirements": info.requirements,
            "description": info.description,
        }));
    }
    let mut examples = Vec::new();
    for k in 1..=sctkit::multicopter::specs::EXAMPLE_COUNT {
        let dir = format!("examples/example-{k}");
        for spec in build_example(k)? {
            write(&out.join(&dir).join(format!("{}.aut", spec.name())), &write_aut(&spec))?;
        }
        examples.push(json!({ "example": k, "dir": dir }));
    }
    let manifest = json!({ "plant": "plant.aut", "specs": entries, "examples": examples });
    write(&out.join("manifest.json"), &(serde_json::to_string_pretty(&manifest)? + "\n"))?;
    println!("wrote {} specifications and {} examples to {}", specs.len(), examples.len(), out.display());
    Ok(status::OK)
}
