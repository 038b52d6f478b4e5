//! Object language, numbering and evaluator.

pub mod build;
pub mod code;
pub mod eval;
pub mod nat;
pub mod stdlib;
pub mod syntax;
pub mod term;

pub use code::{decode, decode_any, encode, smn, universal_code, Code};
pub use eval::{eval, eval_count, eval_run, phi, phi_oracle, w_enum, w_enum_at, EvalError, EvalOutcome, Machine, OracleContext, Run, MAX_VALUE_BITS};
pub use nat::{Nat, ParseNatError};
pub use stdlib::{smn_term, stdlib, stdlib_term, StdlibError};
pub use syntax::{parse, pretty, ParseError};
pub use term::{Node, Term, TermError, MAX_ARITY};

/// Cantor pairing `⟨x,y⟩`.
pub fn pair(x: &Nat, y: &Nat) -> Nat {
    Nat::pair(x, y)
}

/// Inverse of [`pair`].
pub fn unpair(n: &Nat) -> (Nat, Nat) {
    n.unpair()
}
