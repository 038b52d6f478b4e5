//! Invariant checks over a replayed construction.

use std::collections::BTreeSet;
use std::fmt;

use super::construction::{
    l_order, step, ConstructionState, Event, Mode, Prepared, Snapshot, UnfreezeReason,
};
use super::scenario::Scenario;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditFailure {
    pub invariant: &'static str,
    pub stage: u64,
    pub detail: String,
}

impl fmt::Display for AuditFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at s={}: {}", self.invariant, self.stage, self.detail)
    }
}

/// Replay the construction for `x` stage by stage and check it.
///
/// Returns every violated invariant; an empty list means the run is clean.
pub fn audit(scenario: &Scenario, x: u64) -> Vec<AuditFailure> {
    let p = Prepared::new(scenario);
    let mut fails = Vec::new();
    let mut state = ConstructionState::new();
    let mut discarded_seen: BTreeSet<u64> = BTreeSet::new();
    let mut followed = false;
    // a totalize step seen since the last freeze
    let mut totalized_since_freeze = true;
    let mut fail = |invariant: &'static str, stage: u64, detail: String| {
        fails.push(AuditFailure {
            invariant,
            stage,
            detail,
        });
    };

    while state.stage < scenario.horizon {
        let s = state.stage;
        let before = state.clone();
        step(&mut state, &p, x);
        let events: Vec<&Event> = state.trace[before.trace.len()..].iter().map(|e| &e.event).collect();

        if state.trace[before.trace.len()..].iter().any(|e| e.stage != s) {
            fail("stage-order", s, "event stamped with another stage".into());
        }
        if followed && !events.is_empty() {
            fail("follow-terminal", s, format!("{} events after FOLLOW", events.len()));
        }

        for ev in &events {
            match ev {
                Event::Freeze { n, l, snapshot } => {
                    if !totalized_since_freeze {
                        fail("pressure", s, "two freezes with no totalize step between".into());
                    }
                    totalized_since_freeze = false;
                    check_freeze(&before, &p, s, *n, *l, snapshot, &mut fail);
                    if discarded_seen.contains(l) {
                        fail("discard-permanence", s, format!("l={l} reused"));
                    }
                }
                Event::Discard { l } => {
                    discarded_seen.insert(*l);
                }
                Event::Unfreeze(reason) => {
                    let Mode::Frozen { n, snapshot, .. } = &before.mode else {
                        fail("unfreeze-soundness", s, "unfreeze while not frozen".into());
                        continue;
                    };
                    let live = p.live(*n, s).is_some_and(|e| e.start == snapshot.start);
                    match reason {
                        UnfreezeReason::NonPermanent if live => {
                            fail("unfreeze-soundness", s, format!("n={n} computation still live"))
                        }
                        UnfreezeReason::TargetEntered if !scenario.in_h_at(x, s) => {
                            fail("unfreeze-soundness", s, format!("x={x} not yet in the target"))
                        }
                        _ => {}
                    }
                }
                Event::Follow { .. } => followed = true,
                Event::Totalize { .. } => totalized_since_freeze = true,
                Event::Decision(_) => {}
            }
        }
        if state.discarded != discarded_seen {
            fail("discard-permanence", s, "discarded set shrank or diverged from trace".into());
        }

        if matches!((&before.mode, &state.mode), (Mode::Frozen { .. } | Mode::Totalizing, Mode::Frozen { .. }))
            && state.w_tables != before.w_tables
        {
            fail("freeze-immutability", s, "tables changed while frozen".into());
        }

        if let Some(Event::Totalize { upto }) = events.last() {
            if *upto != s {
                fail("pressure", s, format!("totalized up to {upto}"));
            }
            for n in 0..=s {
                let want = scenario
                    .psi_at(n, s)
                    .map(|c| scenario.w_at(c, s))
                    .unwrap_or_default();
                if state.w_tables.get(&n) != Some(&want) {
                    fail("pressure", s, format!("table {n} differs from W of psi({n})"));
                }
            }
            let after_discard = events.iter().any(|e| matches!(e, Event::Discard { .. }));
            if !after_discard {
                if let Some(n) = engageable(&before, &p, s) {
                    fail("pressure", s, format!("n={n} was engageable but not frozen"));
                }
            }
        }
    }

    let mut again = ConstructionState::new();
    while again.stage < scenario.horizon {
        step(&mut again, &p, x);
    }
    if again != state {
        fail("determinism", scenario.horizon, "replay differs".into());
    }
    fails
}

fn engageable(state: &ConstructionState, p: &Prepared<'_>, s: u64) -> Option<u64> {
    (0..=s).find(|&n| p.scenario.psi_at(n, s).is_none() && p.live(n, s).is_some())
        .filter(|_| matches!(state.mode, Mode::Totalizing))
}

fn check_freeze(
    before: &ConstructionState,
    p: &Prepared<'_>,
    s: u64,
    n: u64,
    l: u64,
    snapshot: &Snapshot,
    fail: &mut impl FnMut(&'static str, u64, String),
) {
    if l_order(l) != n {
        fail("l-fairness", s, format!("position {l} names {} not {n}", l_order(l)));
    }
    if (0..l).any(|i| l_order(i) == n && !before.discarded.contains(&i)) {
        fail("l-fairness", s, format!("earlier position for n={n} skipped"));
    }
    for m in 0..=s {
        if p.scenario.psi_at(m, s).is_some() || p.live(m, s).is_none() {
            continue;
        }
        let lm = (m..)
            .map(|k| super::construction::l_position(m, k))
            .find(|i| !before.discarded.contains(i))
            .expect("finite discards");
        if lm < l {
            fail("l-fairness", s, format!("n={m} had the earlier position {lm}"));
        }
    }
    if p.scenario.psi_at(n, s).is_some() {
        fail("pressure", s, format!("froze n={n} with psi({n}) defined"));
    }
    match p.live(n, s) {
        Some(ev) if ev.start == snapshot.start && ev.value == snapshot.value && ev.use_bound == snapshot.use_bound => {}
        _ => fail("freeze-immutability", s, format!("snapshot for n={n} is not the live computation")),
    }
}
