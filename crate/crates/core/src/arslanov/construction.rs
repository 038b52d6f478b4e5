//! The stage construction and the decision procedure built on it.
//!
//! Each index `n` owns a slot on which `δ(f(n))` is scripted. At stage `s`,
//! while totalizing, the construction looks for the least position of the
//! order `L` (skipping discarded copies) whose `n ≤ s` has `ψ_s(n)↑` and a
//! live `δ` computation; if there is one, every table is frozen on it.
//! Otherwise `f` totalizes `ψ`: `W_{f(n),s} = W_{ψ(n),s}` wherever
//! `ψ_s(n)↓`.
//!
//! While frozen, each stage first checks whether the computation has
//! changed (`A` gained an element below its use, or the slot's next scripted
//! computation started). If so the copy is discarded and the same stage
//! totalizes. Otherwise, once `x` is in the target set, `f(n)` starts to
//! follow the frozen value, for good.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::scenario::{DeltaEvent, DeltaSource, Scenario};
use crate::kernel::code::Code;
use crate::kernel::eval::{EvalOutcome, Machine, OracleContext};
use crate::kernel::nat::Nat;

/// Position `i` of the order `0, 0,1, 0,1,2, …`: block `k` lists `0..=k`.
pub fn l_order(i: u64) -> u64 {
    let (k, start) = block_of(i);
    debug_assert!(i - start <= k);
    i - start
}

/// Block index containing position `i` and the block's first position.
fn block_of(i: u64) -> (u64, u64) {
    // largest k with k(k+1)/2 <= i
    let mut k = (((8 * u128::from(i) + 1).isqrt() - 1) / 2) as u64;
    while k * (k + 1) / 2 > i {
        k -= 1;
    }
    (k, k * (k + 1) / 2)
}

/// Position of `n` in block `k ≥ n`.
pub fn l_position(n: u64, k: u64) -> u64 {
    k * (k + 1) / 2 + n
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snapshot {
    pub value: Code,
    pub use_bound: u64,
    pub start: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    Totalizing,
    Frozen { n: u64, l: u64, snapshot: Snapshot },
    Following { n: u64, target: Code },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnfreezeReason {
    NonPermanent,
    TargetEntered,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    In { stage: u64 },
    Out { n: u64, stage: u64, use_bound: u64 },
    Exhausted { horizon: u64 },
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::In { stage } => write!(f, "IN @{stage}"),
            Verdict::Out { n, stage, use_bound } => write!(f, "OUT n={n} stage={stage} use={use_bound}"),
            Verdict::Exhausted { horizon } => write!(f, "EXHAUSTED @{horizon}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event {
    /// Tables of `0..=upto` brought in line with `ψ_s`.
    Totalize { upto: u64 },
    Freeze { n: u64, l: u64, snapshot: Snapshot },
    Unfreeze(UnfreezeReason),
    Discard { l: u64 },
    Follow { n: u64, target: Code },
    Decision(Verdict),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub stage: u64,
    pub event: Event,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s={} ", self.stage)?;
        match &self.event {
            Event::Totalize { upto } => write!(f, "TOTALIZE n=0..{upto}"),
            Event::Freeze { n, l, snapshot } => write!(
                f,
                "FREEZE n={n} l={l} value={} use={} start={}",
                snapshot.value, snapshot.use_bound, snapshot.start
            ),
            Event::Unfreeze(UnfreezeReason::NonPermanent) => write!(f, "UNFREEZE nonpermanent"),
            Event::Unfreeze(UnfreezeReason::TargetEntered) => write!(f, "UNFREEZE target-entered"),
            Event::Discard { l } => write!(f, "DISCARD l={l}"),
            Event::Follow { n, target } => write!(f, "FOLLOW n={n} target={target}"),
            Event::Decision(Verdict::In { .. }) => write!(f, "DECISION IN"),
            Event::Decision(Verdict::Out { n, stage, use_bound }) => {
                write!(f, "DECISION OUT n={n} stage={stage} use={use_bound}")
            }
            Event::Decision(Verdict::Exhausted { .. }) => write!(f, "DECISION EXHAUSTED"),
        }
    }
}

/// Render a trace, one event per line.
pub fn render_trace(trace: &[TraceEvent]) -> String {
    trace.iter().map(|e| format!("{e}\n")).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionState {
    /// Next stage to run.
    pub stage: u64,
    pub mode: Mode,
    pub w_tables: BTreeMap<u64, BTreeSet<u64>>,
    pub discarded: BTreeSet<u64>,
    pub trace: Vec<TraceEvent>,
}

impl ConstructionState {
    pub fn new() -> ConstructionState {
        ConstructionState {
            stage: 0,
            mode: Mode::Totalizing,
            w_tables: BTreeMap::new(),
            discarded: BTreeSet::new(),
            trace: Vec::new(),
        }
    }

    fn emit(&mut self, event: Event) {
        let stage = self.stage;
        self.trace.push(TraceEvent { stage, event });
    }
}

impl Default for ConstructionState {
    fn default() -> ConstructionState {
        ConstructionState::new()
    }
}

/// A scenario with its `δ` timeline resolved.
#[derive(Clone, Debug)]
pub struct Prepared<'a> {
    pub scenario: &'a Scenario,
    pub timeline: BTreeMap<u64, Vec<DeltaEvent>>,
}

impl<'a> Prepared<'a> {
    pub fn new(scenario: &'a Scenario) -> Prepared<'a> {
        let timeline = match &scenario.delta {
            DeltaSource::Scripted(m) => m.clone(),
            DeltaSource::OracleCode(c) => delta_from_oracle(c, scenario),
        };
        Prepared { scenario, timeline }
    }

    /// Stage at which the computation ends, if it ends before the horizon.
    pub fn end_of(&self, slot: u64, ev: &DeltaEvent) -> Option<u64> {
        let next = self
            .timeline
            .get(&slot)
            .and_then(|evs| evs.iter().map(|e| e.start).find(|&st| st > ev.start));
        let change = self.scenario.a_change_below(ev.use_bound, ev.start);
        match (next, change) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
        .filter(|&e| e < self.scenario.horizon)
    }

    /// The computation on `slot` live at stage `s`.
    pub fn live(&self, slot: u64, s: u64) -> Option<&DeltaEvent> {
        self.timeline
            .get(&slot)?
            .iter()
            .rfind(|ev| ev.start <= s)
            .filter(|ev| self.end_of(slot, ev).is_none_or(|end| end > s))
    }

    fn snapshot_live(&self, n: u64, snap: &Snapshot, s: u64) -> bool {
        self.live(n, s)
            .is_some_and(|ev| ev.start == snap.start)
    }

    /// Unchanged through the horizon.
    pub fn permanent(&self, n: u64, snap: &Snapshot) -> bool {
        let ev = DeltaEvent {
            start: snap.start,
            value: snap.value.clone(),
            use_bound: snap.use_bound,
        };
        self.end_of(n, &ev).is_none()
    }
}

/// `f` totalizes `ψ` at the current stage.
pub fn totalize_at_stage(state: &mut ConstructionState, p: &Prepared<'_>) {
    let s = state.stage;
    for n in 0..=s {
        let table = match p.scenario.psi_at(n, s) {
            Some(c) => p.scenario.w_at(c, s),
            None => BTreeSet::new(),
        };
        state.w_tables.insert(n, table);
    }
    state.emit(Event::Totalize { upto: s });
}

/// Least undiscarded `L` position of an engageable `n ≤ s`.
fn search(state: &ConstructionState, p: &Prepared<'_>) -> Option<(u64, u64, Snapshot)> {
    let s = state.stage;
    (0..=s)
        .filter(|&n| p.scenario.psi_at(n, s).is_none())
        .filter_map(|n| {
            let ev = p.live(n, s)?;
            let l = (n..)
                .map(|k| l_position(n, k))
                .find(|l| !state.discarded.contains(l))
                .expect("discarded set is finite");
            let snapshot = Snapshot {
                value: ev.value.clone(),
                use_bound: ev.use_bound,
                start: ev.start,
            };
            Some((l, n, snapshot))
        })
        .min_by_key(|(l, _, _)| *l)
        .map(|(l, n, snap)| (n, l, snap))
}

/// Run one stage.
pub fn step(state: &mut ConstructionState, p: &Prepared<'_>, x: u64) {
    let s = state.stage;
    assert!(s < p.scenario.horizon, "stage {s} is past the horizon");
    match state.mode.clone() {
        Mode::Totalizing => match search(state, p) {
            Some((n, l, snapshot)) => {
                state.emit(Event::Freeze {
                    n,
                    l,
                    snapshot: snapshot.clone(),
                });
                state.mode = Mode::Frozen { n, l, snapshot };
            }
            None => totalize_at_stage(state, p),
        },
        Mode::Frozen { n, l, snapshot } => {
            if !p.snapshot_live(n, &snapshot, s) {
                state.emit(Event::Unfreeze(UnfreezeReason::NonPermanent));
                state.emit(Event::Discard { l });
                state.discarded.insert(l);
                state.mode = Mode::Totalizing;
                totalize_at_stage(state, p);
            } else if p.scenario.in_h_at(x, s) {
                state.emit(Event::Unfreeze(UnfreezeReason::TargetEntered));
                let target = snapshot.value;
                state.emit(Event::Follow {
                    n,
                    target: target.clone(),
                });
                state.w_tables.insert(n, p.scenario.w_at(&target, s));
                state.mode = Mode::Following { n, target };
            }
        }
        Mode::Following { n, target } => {
            state.w_tables.insert(n, p.scenario.w_at(&target, s));
        }
    }
    state.stage += 1;
}

/// The construction for `x`, from stage 0 up to the horizon.
pub fn run_construction(scenario: &Scenario, x: u64) -> ConstructionState {
    let p = Prepared::new(scenario);
    let mut state = ConstructionState::new();
    while state.stage < scenario.horizon {
        step(&mut state, &p, x);
    }
    state
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub verdict: Verdict,
    pub trace: Vec<TraceEvent>,
}

/// Decide `x ∈ H` from `A`: replay the construction and stop at the first
/// stage where `x` is in `H` (IN), or where it freezes on a computation
/// that `A` (as of the horizon) never changes below its use (OUT).
pub fn decide(scenario: &Scenario, x: u64) -> Decision {
    let p = Prepared::new(scenario);
    let mut state = ConstructionState::new();
    let verdict = loop {
        let s = state.stage;
        if s >= scenario.horizon {
            break Verdict::Exhausted {
                horizon: scenario.horizon,
            };
        }
        if scenario.in_h_at(x, s) {
            break Verdict::In { stage: s };
        }
        let before = state.trace.len();
        step(&mut state, &p, x);
        let frozen_now = state.trace[before..].iter().find_map(|e| match &e.event {
            Event::Freeze { n, snapshot, .. } => Some((*n, snapshot.clone())),
            _ => None,
        });
        if let Some((n, snap)) = frozen_now {
            if p.permanent(n, &snap) {
                break Verdict::Out {
                    n,
                    stage: s,
                    use_bound: snap.use_bound,
                };
            }
        }
    };
    let stage = match &verdict {
        Verdict::In { stage } | Verdict::Out { stage, .. } => *stage,
        Verdict::Exhausted { horizon } => *horizon,
    };
    state.trace.push(TraceEvent {
        stage,
        event: Event::Decision(verdict.clone()),
    });
    Decision {
        verdict,
        trace: state.trace,
    }
}

/// Scripted timeline of `δ_s(n) = {code}^{A_s}_s(n)` for slots and stages
/// below the horizon. A new event starts whenever the outcome changes or
/// `A` changed below the previous computation's use; `use = max query + 1`.
pub fn delta_from_oracle(code: &Code, scenario: &Scenario) -> BTreeMap<u64, Vec<DeltaEvent>> {
    let horizon = scenario.horizon;
    let approximations: Vec<OracleContext> = (0..horizon)
        .map(|s| scenario.a_at(s).into_iter().collect())
        .collect();
    let mut out = BTreeMap::new();
    for slot in 0..horizon {
        let mut events: Vec<DeltaEvent> = Vec::new();
        for s in slot..horizon {
            let mut m = Machine::new(Some(&approximations[s as usize]));
            let run = m.phi(code, &Nat::small(slot), s);
            let EvalOutcome::Converged { value, .. } = run.outcome else {
                continue;
            };
            let use_bound = run
                .max_query
                .map_or(0, |q| q.to_u64().map_or(u64::MAX, |q| q.saturating_add(1)));
            let same = events.last().is_some_and(|prev| {
                prev.value.0 == value
                    && prev.use_bound == use_bound
                    && scenario
                        .a_change_below(prev.use_bound, prev.start)
                        .is_none_or(|t| t > s)
            });
            if !same {
                events.push(DeltaEvent {
                    start: s,
                    value: Code(value),
                    use_bound,
                });
            }
        }
        if !events.is_empty() {
            out.insert(slot, events);
        }
    }
    out
}
