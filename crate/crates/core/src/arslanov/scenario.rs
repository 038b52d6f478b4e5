//! Scenario scripts.
//!
//! ```text
//! horizon 20
//! A 3 @6                     # 3 enters A at stage 6
//! H 4 @7                     # 4 enters the target set at stage 7
//! psi 2 @1 -> 100            # ψ(2) converges at stage 1 with value 100
//! delta slot 1 @3 -> 42 use 5
//! deltacode 12345            # instead of scripted δ lines
//! W 100 7 @2                 # 7 enters W_100 at stage 2
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::kernel::code::Code;

/// One computation of `δ` on a slot: it starts at `start`, yields `value`
/// and stays valid while `A` is unchanged below `use_bound`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DeltaEvent {
    pub start: u64,
    pub value: Code,
    pub use_bound: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeltaSource {
    Scripted(BTreeMap<u64, Vec<DeltaEvent>>),
    /// Evaluated against `A_s` with fuel `s`.
    OracleCode(Code),
}

impl Default for DeltaSource {
    fn default() -> DeltaSource {
        DeltaSource::Scripted(BTreeMap::new())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Scenario {
    pub horizon: u64,
    /// `(element, stage)`.
    pub a_events: Vec<(u64, u64)>,
    pub h_events: Vec<(u64, u64)>,
    /// `n ↦ (stage, value)`.
    pub psi_script: BTreeMap<u64, (u64, Code)>,
    pub delta: DeltaSource,
    pub w_scripts: BTreeMap<Code, Vec<(u64, u64)>>,
}

impl Scenario {
    /// `A_s`: elements enumerated at stages `≤ s`.
    pub fn a_at(&self, s: u64) -> BTreeSet<u64> {
        self.a_events.iter().filter(|e| e.1 <= s).map(|e| e.0).collect()
    }

    pub fn in_h_at(&self, x: u64, s: u64) -> bool {
        self.h_events.iter().any(|&(e, st)| e == x && st <= s)
    }

    /// The stage at which `x` enters the target set, if it does.
    pub fn h_stage(&self, x: u64) -> Option<u64> {
        self.h_events.iter().filter(|e| e.0 == x).map(|e| e.1).min()
    }

    /// `ψ_s(n)`.
    pub fn psi_at(&self, n: u64, s: u64) -> Option<&Code> {
        self.psi_script
            .get(&n)
            .filter(|(st, _)| *st <= s)
            .map(|(_, c)| c)
    }

    /// `W_{c,s}` from the scripts; unscripted codes enumerate nothing.
    pub fn w_at(&self, c: &Code, s: u64) -> BTreeSet<u64> {
        self.w_scripts
            .get(c)
            .map(|evs| evs.iter().filter(|e| e.1 <= s).map(|e| e.0).collect())
            .unwrap_or_default()
    }

    /// First stage after `start` at which `A` gains an element below `use_bound`.
    pub fn a_change_below(&self, use_bound: u64, start: u64) -> Option<u64> {
        self.a_events
            .iter()
            .filter(|&&(e, st)| e < use_bound && st > start)
            .map(|e| e.1)
            .min()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ScenarioParseError {
    pub line: usize,
    pub message: String,
}

fn stage_of(tok: Option<&str>) -> Result<u64, String> {
    let tok = tok.ok_or("missing `@stage`")?;
    let s = tok.strip_prefix('@').ok_or_else(|| format!("expected `@stage`, found `{tok}`"))?;
    s.parse().map_err(|_| format!("bad stage `{s}`"))
}

fn number<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T, String> {
    let tok = tok.ok_or_else(|| format!("missing {what}"))?;
    tok.parse().map_err(|_| format!("bad {what} `{tok}`"))
}

fn keyword(tok: Option<&str>, want: &str) -> Result<(), String> {
    match tok {
        Some(t) if t == want => Ok(()),
        Some(t) => Err(format!("expected `{want}`, found `{t}`")),
        None => Err(format!("expected `{want}`")),
    }
}

/// Parse a scenario file. Structural problems (unknown directives, bad
/// numbers) are errors here; semantic ones are left to [`validate_scenario`].
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioParseError> {
    let mut sc = Scenario::default();
    let mut horizon = None;
    let mut scripted: BTreeMap<u64, Vec<DeltaEvent>> = BTreeMap::new();
    let mut oracle: Option<Code> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut toks = body.split_whitespace();
        let head = toks.next().unwrap_or_default();
        let res: Result<(), String> = (|| {
            match head {
                "horizon" => {
                    if horizon.is_some() {
                        return Err("horizon given twice".into());
                    }
                    horizon = Some(number(toks.next(), "horizon")?);
                }
                "A" | "H" => {
                    let e = number(toks.next(), "element")?;
                    let st = stage_of(toks.next())?;
                    if head == "A" { &mut sc.a_events } else { &mut sc.h_events }.push((e, st));
                }
                "psi" => {
                    let n: u64 = number(toks.next(), "index")?;
                    let st = stage_of(toks.next())?;
                    keyword(toks.next(), "->")?;
                    let c: Code = number(toks.next(), "code")?;
                    if sc.psi_script.insert(n, (st, c)).is_some() {
                        return Err(format!("psi {n} given twice"));
                    }
                }
                "delta" => {
                    keyword(toks.next(), "slot")?;
                    let n: u64 = number(toks.next(), "slot")?;
                    let start = stage_of(toks.next())?;
                    keyword(toks.next(), "->")?;
                    let value: Code = number(toks.next(), "value")?;
                    keyword(toks.next(), "use")?;
                    let use_bound = number(toks.next(), "use")?;
                    scripted.entry(n).or_default().push(DeltaEvent {
                        start,
                        value,
                        use_bound,
                    });
                }
                "deltacode" => {
                    if oracle.is_some() {
                        return Err("deltacode given twice".into());
                    }
                    oracle = Some(number(toks.next(), "code")?);
                }
                "W" => {
                    let c: Code = number(toks.next(), "code")?;
                    let e = number(toks.next(), "element")?;
                    let st = stage_of(toks.next())?;
                    sc.w_scripts.entry(c).or_default().push((e, st));
                }
                other => return Err(format!("unknown directive `{other}`")),
            }
            match toks.next() {
                Some(t) => Err(format!("unexpected `{t}`")),
                None => Ok(()),
            }
        })();
        res.map_err(|message| ScenarioParseError { line, message })?;
    }
    sc.horizon = horizon.ok_or(ScenarioParseError {
        line: 0,
        message: "missing `horizon`".into(),
    })?;
    sc.delta = match oracle {
        Some(_) if !scripted.is_empty() => {
            return Err(ScenarioParseError {
                line: 0,
                message: "both `deltacode` and scripted `delta` lines".into(),
            })
        }
        Some(c) => DeltaSource::OracleCode(c),
        None => DeltaSource::Scripted(scripted),
    };
    Ok(sc)
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "horizon {}", self.horizon)?;
        for (e, s) in &self.a_events {
            writeln!(f, "A {e} @{s}")?;
        }
        for (e, s) in &self.h_events {
            writeln!(f, "H {e} @{s}")?;
        }
        for (n, (s, c)) in &self.psi_script {
            writeln!(f, "psi {n} @{s} -> {c}")?;
        }
        match &self.delta {
            DeltaSource::Scripted(m) => {
                for (n, evs) in m {
                    for ev in evs {
                        writeln!(f, "delta slot {n} @{} -> {} use {}", ev.start, ev.value, ev.use_bound)?;
                    }
                }
            }
            DeltaSource::OracleCode(c) => writeln!(f, "deltacode {c}")?,
        }
        for (c, evs) in &self.w_scripts {
            for (e, s) in evs {
                writeln!(f, "W {c} {e} @{s}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub location: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

/// All invariant violations; empty for a well-formed scenario.
pub fn validate_scenario(sc: &Scenario) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut flag = |location: String, message: String| out.push(Violation { location, message });
    let late = |s: u64| s >= sc.horizon;
    for (name, evs) in [("A", &sc.a_events), ("H", &sc.h_events)] {
        let mut seen = BTreeSet::new();
        for (i, &(e, s)) in evs.iter().enumerate() {
            let loc = format!("{name}[{i}] ({name} {e} @{s})");
            if late(s) {
                flag(loc.clone(), format!("stage {s} is not below the horizon {}", sc.horizon));
            }
            if !seen.insert(e) {
                flag(loc, format!("element {e} enumerated twice"));
            }
        }
    }
    for (n, (s, c)) in &sc.psi_script {
        if late(*s) {
            flag(
                format!("psi {n} @{s} -> {c}"),
                format!("stage {s} is not below the horizon {}", sc.horizon),
            );
        }
    }
    if let DeltaSource::Scripted(m) = &sc.delta {
        for (n, evs) in m {
            for (i, ev) in evs.iter().enumerate() {
                let loc = format!("delta slot {n} event {i} (@{})", ev.start);
                if late(ev.start) {
                    flag(loc.clone(), format!("stage {} is not below the horizon {}", ev.start, sc.horizon));
                }
                if i > 0 && evs[i - 1].start >= ev.start {
                    flag(loc, "start stages must strictly increase".into());
                }
            }
        }
    }
    for (c, evs) in &sc.w_scripts {
        for (i, &(e, s)) in evs.iter().enumerate() {
            if late(s) {
                flag(
                    format!("W {c} event {i} (W {c} {e} @{s})"),
                    format!("stage {s} is not below the horizon {}", sc.horizon),
                );
            }
        }
    }
    out
}
