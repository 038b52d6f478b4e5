pub mod adn;
pub mod arslanov;
pub mod fixedpoint;
pub mod kernel;

pub use kernel::{Code, EvalOutcome, Nat, OracleContext, Term};
