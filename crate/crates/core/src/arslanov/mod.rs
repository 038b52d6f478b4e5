//! A finite-stage simulator for the construction that decides a set `H`
//! from a set `A` whose fixed-point-free candidate `δ` is computed from `A`.
//!
//! Enumerations, `ψ`, `δ` and the `W` sets are all scripted in a
//! [`Scenario`]; the construction only ever reads them at a stage.

pub mod audit;
pub mod construction;
pub mod scenario;

pub use audit::{audit, AuditFailure};
pub use construction::{
    decide, delta_from_oracle, l_order, l_position, render_trace, run_construction, step, totalize_at_stage,
    ConstructionState, Decision, Event, Mode, Prepared, Snapshot, TraceEvent, UnfreezeReason, Verdict,
};
pub use scenario::{parse_scenario, validate_scenario, DeltaEvent, DeltaSource, Scenario, ScenarioParseError, Violation};
