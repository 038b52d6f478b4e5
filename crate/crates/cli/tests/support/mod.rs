#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;

use kleene_core::arslanov::{DeltaEvent, DeltaSource, Scenario};
use kleene_core::kernel::build::{apply, comp, konst, zero};
use kleene_core::kernel::encode;
use kleene_core::{Code, Term};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

/// A well-formed term of the given arity, at most `depth` levels deep.
pub fn random_term(rng: &mut impl Rng, arity: usize, depth: u32) -> Term {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        return random_leaf(rng, arity);
    }
    match rng.gen_range(0..4) {
        0 if arity >= 1 => {
            let base = random_term(rng, arity - 1, depth - 1);
            let step = random_term(rng, arity + 1, depth - 1);
            Term::prim_rec(base, step).unwrap()
        }
        1 if arity < 4 => Term::mu(random_term(rng, arity + 1, depth - 1)).unwrap(),
        _ => {
            let m = rng.gen_range(1..=3);
            let outer = random_term(rng, m, depth - 1);
            let inners = (0..m).map(|_| random_term(rng, arity, depth - 1)).collect();
            Term::comp(outer, inners).unwrap()
        }
    }
}

fn random_leaf(rng: &mut impl Rng, arity: usize) -> Term {
    let mut options: Vec<Term> = vec![Term::zero(arity).unwrap()];
    if arity > 0 {
        let i = rng.gen_range(0..arity);
        options.push(Term::proj(arity, i).unwrap());
    }
    match arity {
        1 => options.extend([
            Term::succ(),
            Term::univ(),
            Term::query(),
            Term::bottom(),
            Term::constant(rng.gen_range(0..1000u64)),
            Term::left(),
            Term::right(),
            Term::clock(),
        ]),
        2 => options.extend([Term::pair(), Term::cons()]),
        _ => {}
    }
    options.choose(rng).unwrap().clone()
}

/// A scenario that passes validation.
pub fn random_scenario(rng: &mut impl Rng) -> Scenario {
    let horizon = rng.gen_range(1..26u64);
    let distinct = |rng: &mut dyn rand::RngCore, pool: u64, count: usize| -> Vec<(u64, u64)> {
        let mut elems: Vec<u64> = (0..pool).collect();
        elems.shuffle(rng);
        elems.truncate(count);
        elems.into_iter().map(|e| (e, rng.gen_range(0..horizon))).collect()
    };
    let a_count = rng.gen_range(0..8);
    let a_events = distinct(rng, 12, a_count);
    let h_count = rng.gen_range(0..4);
    let h_events = distinct(rng, 6, h_count);
    let targets = [100u64, 101, 102, 42, 43];
    let mut psi_script = BTreeMap::new();
    for n in 0..horizon.min(8) {
        if rng.gen_bool(0.3) {
            psi_script.insert(n, (rng.gen_range(0..horizon), Code::from(*targets.choose(rng).unwrap())));
        }
    }
    let delta = if rng.gen_bool(0.15) {
        let asks = encode(&comp(zero(1), vec![apply(Term::query(), konst(1, rng.gen_range(0..8u64)))]));
        let blind = encode(&zero(1));
        DeltaSource::OracleCode(if rng.gen_bool(0.5) { asks } else { blind })
    } else {
        let mut m = BTreeMap::new();
        for slot in 0..horizon.min(6) {
            let mut starts: BTreeSet<u64> = BTreeSet::new();
            for _ in 0..rng.gen_range(0..4) {
                starts.insert(rng.gen_range(0..horizon));
            }
            let evs: Vec<DeltaEvent> = starts
                .into_iter()
                .map(|start| DeltaEvent {
                    start,
                    value: Code::from(*targets[3..].choose(rng).unwrap()),
                    use_bound: rng.gen_range(0..9),
                })
                .collect();
            if !evs.is_empty() {
                m.insert(slot, evs);
            }
        }
        DeltaSource::Scripted(m)
    };
    let mut w_scripts = BTreeMap::new();
    for c in targets {
        let evs: Vec<(u64, u64)> = (0..rng.gen_range(0..4)).map(|_| (rng.gen_range(0..20), rng.gen_range(0..horizon))).collect();
        if !evs.is_empty() {
            w_scripts.insert(Code::from(c), evs);
        }
    }
    Scenario {
        horizon,
        a_events,
        h_events,
        psi_script,
        delta,
        w_scripts,
    }
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Run every `tests/golden/*.cmd` and compare stdout with the matching
/// `.out`. A `.cmd` file holds `exit N` and then one argument per line.
/// With `KLEENE_BLESS=1` the `.out` files are rewritten instead.
pub fn run_golden() -> (usize, Vec<String>) {
    let bless = std::env::var_os("KLEENE_BLESS").is_some();
    let mut cmds: Vec<PathBuf> = std::fs::read_dir(golden_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "cmd"))
        .collect();
    cmds.sort();
    let mut failures = Vec::new();
    for cmd in &cmds {
        let name = cmd.file_stem().unwrap().to_string_lossy().into_owned();
        let spec = std::fs::read_to_string(cmd).unwrap();
        let mut lines = spec.lines();
        let want_exit: i32 = lines
            .next()
            .and_then(|l| l.strip_prefix("exit "))
            .and_then(|c| c.trim().parse().ok())
            .expect("first line `exit N`");
        let args: Vec<&str> = lines.collect();
        let out = Command::new(env!("CARGO_BIN_EXE_kleene"))
            .args(&args)
            .current_dir(workspace_root())
            .output()
            .unwrap();
        let got = String::from_utf8(out.stdout).unwrap();
        let out_path = cmd.with_extension("out");
        if bless {
            std::fs::write(&out_path, &got).unwrap();
        }
        let want = std::fs::read_to_string(&out_path).unwrap_or_default();
        if got != want {
            failures.push(format!("{name}: stdout differs"));
        }
        if out.status.code() != Some(want_exit) {
            failures.push(format!("{name}: exit {:?}, want {want_exit}", out.status.code()));
        }
    }
    (cmds.len(), failures)
}
