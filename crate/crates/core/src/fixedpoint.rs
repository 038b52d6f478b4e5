//! Recursion theorems as code transformations.
//!
//! Transformers are codes, not closures: the fixed point has to carry the
//! transformer inside its own program text.

use std::fmt;

use crate::kernel::build::*;
use crate::kernel::code::{encode, smn, Code};
use crate::kernel::eval::{phi, EvalOutcome, Machine};
use crate::kernel::nat::Nat;
use crate::kernel::stdlib::{add2, pred1};
use crate::kernel::term::Term;

/// Default fuel for checking fixed-point laws.
pub const LAW_FUEL: u64 = 100_000;

/// Code of a total unary function on codes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformerCode(pub Code);

/// Code `h` read as the binary `h(n, x) = φ_h(⟨n, x⟩)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryTransformerCode(pub Code);

/// `e` with `φ_e ≃ φ_{φ_f(e)}`.
///
/// `D(⟨x, y⟩) ≃ φ_{φ_f(smn(x, x))}(y)` and `e = smn(d, d)`; nothing is
/// evaluated here.
pub fn kleene_fixed_point(f: &TransformerCode) -> Code {
    let z = id;
    let self_applied = smn_of(left_of(z()), left_of(z()));
    let target = univ_of(konst(1, f.0 .0.clone()), self_applied);
    let d = encode(&univ_of(target, right_of(z())));
    smn(&d, d.nat())
}

/// A family `n ↦ f(n)` with `φ_{f(n)} ≃ φ_{h(n, f(n))}`.
#[derive(Clone, Debug)]
pub struct ParamFixedPoint {
    d: Code,
    object: Code,
}

impl ParamFixedPoint {
    /// `f(n) = smn(d, ⟨d, n⟩)`.
    pub fn at(&self, n: &Nat) -> Code {
        smn(&self.d, &Nat::pair(self.d.nat(), n))
    }

    /// A code `F` with `φ_F(n) = f(n)`.
    pub fn object_code(&self) -> &Code {
        &self.object
    }
}

/// `D(⟨⟨x, n⟩, y⟩) ≃ φ_{h(n, smn(x, ⟨x, n⟩))}(y)`; `f(n) = smn(d, ⟨d, n⟩)`.
///
/// The object-level code of `f` is built from the code of `h` alone.
pub fn fixed_point_with_params(h: &BinaryTransformerCode) -> ParamFixedPoint {
    let z = id;
    let w = || left_of(z());
    let me = smn_of(left_of(w()), w());
    let target = univ_of(konst(1, h.0 .0.clone()), pair_of(right_of(w()), me));
    let d = encode(&univ_of(target, right_of(z())));
    let object = encode(&smn_of(konst(1, d.0.clone()), pair_of(konst(1, d.0.clone()), z())));
    ParamFixedPoint { d, object }
}

/// `f(x) = code of (const x)`.
pub fn quine_transformer() -> TransformerCode {
    TransformerCode(encode(&quote_const(id())))
}

/// `e` with `φ_e(y) = e` for every `y`.
pub fn quine() -> Code {
    kleene_fixed_point(&quine_transformer())
}

/// `φ_f(e)` within `fuel`, as a code.
pub fn apply_transformer(f: &TransformerCode, e: &Code, fuel: u64) -> Option<Code> {
    phi(&f.0, e.nat().clone(), fuel).value().cloned().map(Code)
}

/// `h(n, x)` within `fuel`.
pub fn apply_binary(h: &BinaryTransformerCode, n: &Nat, x: &Code, fuel: u64) -> Option<Code> {
    phi(&h.0, Nat::pair(n, x.nat()), fuel).value().cloned().map(Code)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Agree(Nat),
    Disagree(Nat, Nat),
    /// No evidence either way.
    BothExhausted,
    /// One side converged and the other ran out of fuel.
    Suspicious { converged_left: bool, value: Nat },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub input: Nat,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionalReport {
    pub fuel: u64,
    pub rows: Vec<Comparison>,
}

impl ExtensionalReport {
    fn count(&self, pred: impl Fn(&Verdict) -> bool) -> usize {
        self.rows.iter().filter(|r| pred(&r.verdict)).count()
    }

    pub fn agreements(&self) -> usize {
        self.count(|v| matches!(v, Verdict::Agree(_)))
    }

    pub fn disagreements(&self) -> usize {
        self.count(|v| matches!(v, Verdict::Disagree(..)))
    }

    pub fn both_exhausted(&self) -> usize {
        self.count(|v| matches!(v, Verdict::BothExhausted))
    }

    pub fn suspicious(&self) -> usize {
        self.count(|v| matches!(v, Verdict::Suspicious { .. }))
    }
}

impl fmt::Display for ExtensionalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            match &r.verdict {
                Verdict::Agree(v) => writeln!(f, "input {}: agree {}", r.input, v)?,
                Verdict::Disagree(a, b) => writeln!(f, "input {}: DISAGREE {} vs {}", r.input, a, b)?,
                Verdict::BothExhausted => writeln!(f, "input {}: both exhausted (no evidence)", r.input)?,
                Verdict::Suspicious { converged_left, value } => {
                    let side = if *converged_left { "left" } else { "right" };
                    writeln!(f, "input {}: suspicious, only {side} converged ({value})", r.input)?
                }
            }
        }
        write!(
            f,
            "agree {} disagree {} both-exhausted {} suspicious {}",
            self.agreements(),
            self.disagreements(),
            self.both_exhausted(),
            self.suspicious()
        )
    }
}

/// Compare `φ_{e1}` and `φ_{e2}` on `inputs` at `fuel`.
pub fn verify_extensional(e1: &Code, e2: &Code, inputs: &[Nat], fuel: u64) -> ExtensionalReport {
    let mut m = Machine::new(None);
    let rows = inputs
        .iter()
        .map(|n| {
            let a = m.phi(e1, n, fuel).outcome;
            let b = m.phi(e2, n, fuel).outcome;
            let verdict = match (a, b) {
                (EvalOutcome::Converged { value: x, .. }, EvalOutcome::Converged { value: y, .. }) => {
                    if x == y {
                        Verdict::Agree(x)
                    } else {
                        Verdict::Disagree(x, y)
                    }
                }
                (EvalOutcome::Converged { value, .. }, _) => Verdict::Suspicious {
                    converged_left: true,
                    value,
                },
                (_, EvalOutcome::Converged { value, .. }) => Verdict::Suspicious {
                    converged_left: false,
                    value,
                },
                _ => Verdict::BothExhausted,
            };
            Comparison {
                input: n.clone(),
                verdict,
            }
        })
        .collect();
    ExtensionalReport { fuel, rows }
}

fn code_of(t: &Term) -> Nat {
    encode(t).0
}

/// Shipped unary transformers, each total on codes.
pub fn transformer_corpus() -> Vec<(&'static str, TransformerCode)> {
    let succ = code_of(&Term::succ());
    let add = code_of(&comp(add2(), vec![Term::left(), Term::right()]));
    let entries: Vec<(&'static str, Term)> = vec![
        ("identity", id()),
        ("const7", konst(1, code_of(&Term::constant(7u64)))),
        ("wrap_succ", quote_comp(konst(1, succ.clone()), vec![id()])),
        ("quine_maker", quote_const(id())),
        ("precompose_succ", quote_comp(id(), vec![konst(1, succ.clone())])),
        ("wrap_pred", quote_comp(konst(1, code_of(&pred1())), vec![id()])),
        ("to_succ", konst(1, succ)),
        ("to_bottom", konst(1, code_of(&Term::bottom()))),
        ("self_specialise", smn_of(id(), id())),
        ("const_of_left", quote_const(left_of(id()))),
        ("add_self", smn_of(konst(1, add), id())),
        ("reinterpret", smn_of(konst(1, code_of(&Term::univ())), id())),
    ];
    entries
        .into_iter()
        .map(|(name, t)| (name, TransformerCode(encode(&t))))
        .collect()
}

/// Shipped binary transformers `h(n, x)`.
pub fn binary_corpus() -> Vec<(&'static str, BinaryTransformerCode)> {
    let n = || left_of(id());
    let x = || right_of(id());
    let succ = code_of(&Term::succ());
    let add = code_of(&comp(add2(), vec![Term::left(), Term::right()]));
    let entries: Vec<(&'static str, Term)> = vec![
        ("const_n", quote_const(n())),
        ("identity_x", x()),
        ("param_quine", quote_const(x())),
        ("add_n", smn_of(konst(1, add), n())),
        ("wrap_succ_x", quote_comp(konst(1, succ), vec![x()])),
        ("const_pair", quote_const(id())),
    ];
    entries
        .into_iter()
        .map(|(name, t)| (name, BinaryTransformerCode(encode(&t))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::code::decode;
    use crate::kernel::eval::eval_count;
    use crate::kernel::syntax::{parse, pretty};

    fn inputs() -> Vec<Nat> {
        (0..10u64).map(Nat::small).collect()
    }

    #[test]
    fn const7_fixed_point_is_seven() {
        let (_, f) = transformer_corpus().into_iter().find(|(n, _)| *n == "const7").unwrap();
        let e = kleene_fixed_point(&f);
        assert_eq!(phi(&e, 0u64, LAW_FUEL).value(), Some(&Nat::small(7)));
    }

    #[test]
    fn wrap_succ_fixed_point_diverges() {
        let (_, f) = transformer_corpus().into_iter().find(|(n, _)| *n == "wrap_succ").unwrap();
        let e = kleene_fixed_point(&f);
        for y in 0..=5u64 {
            assert!(!phi(&e, y, LAW_FUEL).is_converged());
        }
    }

    #[test]
    fn building_does_not_evaluate() {
        let before = eval_count();
        for (_, f) in transformer_corpus() {
            let _ = kleene_fixed_point(&f);
        }
        for (_, h) in binary_corpus() {
            let _ = fixed_point_with_params(&h);
        }
        assert_eq!(eval_count(), before);
    }

    #[test]
    fn quine_prints_itself() {
        let e = quine();
        assert_eq!(phi(&e, 0u64, 1_000_000).value(), Some(e.nat()));
        assert_eq!(phi(&e, 5u64, 1_000_000).value(), Some(e.nat()));
        let text = pretty(&decode(&e));
        assert_eq!(parse(&text).unwrap(), decode(&e));
    }

    #[test]
    fn report_categories() {
        let succ = encode(&Term::succ());
        let bottom = encode(&Term::bottom());
        let r = verify_extensional(&succ, &succ, &inputs(), 10_000);
        assert_eq!(r.agreements(), 10);
        let r = verify_extensional(&succ, &bottom, &inputs(), 10_000);
        assert_eq!((r.suspicious(), r.disagreements()), (10, 0));
        let r = verify_extensional(&bottom, &bottom, &inputs(), 1_000);
        assert_eq!(r.both_exhausted(), 10);
    }

    #[test]
    fn const_n_family() {
        let (_, h) = binary_corpus().into_iter().find(|(n, _)| *n == "const_n").unwrap();
        let fp = fixed_point_with_params(&h);
        for n in 0..10u64 {
            assert_eq!(phi(&fp.at(&n.into()), 0u64, LAW_FUEL).value(), Some(&Nat::small(n)));
        }
    }
}
