//! Small combinators for writing object programs in Rust.
//!
//! Everything here builds well-formed terms from well-formed parts and
//! panics on an arity mistake, which is a bug in the caller.

use super::code::{TAG_COMP, TAG_CONST};
use super::nat::Nat;
use super::term::Term;

fn ok(t: Result<Term, super::term::TermError>) -> Term {
    t.expect("combinator arity")
}

pub fn p(arity: usize, index: usize) -> Term {
    ok(Term::proj(arity, index))
}

pub fn id() -> Term {
    p(1, 0)
}

pub fn zero(arity: usize) -> Term {
    ok(Term::zero(arity))
}

pub fn comp(outer: Term, inners: Vec<Term>) -> Term {
    ok(Term::comp(outer, inners))
}

pub fn prim_rec(base: Term, step: Term) -> Term {
    ok(Term::prim_rec(base, step))
}

pub fn mu(body: Term) -> Term {
    ok(Term::mu(body))
}

/// The constant `value` at the given arity.
pub fn konst(arity: usize, value: impl Into<Nat>) -> Term {
    let inner = if arity == 0 { zero(0) } else { p(arity, 0) };
    comp(Term::constant(value), vec![inner])
}

pub fn apply(f: Term, arg: Term) -> Term {
    comp(f, vec![arg])
}

pub fn succ_of(a: Term) -> Term {
    apply(Term::succ(), a)
}

pub fn pair_of(a: Term, b: Term) -> Term {
    comp(Term::pair(), vec![a, b])
}

pub fn cons_of(a: Term, b: Term) -> Term {
    comp(Term::cons(), vec![a, b])
}

pub fn left_of(a: Term) -> Term {
    apply(Term::left(), a)
}

pub fn right_of(a: Term) -> Term {
    apply(Term::right(), a)
}

/// `φ_code(arg)`.
pub fn univ_of(code: Term, arg: Term) -> Term {
    apply(Term::univ(), pair_of(code, arg))
}

/// The clock report for `φ_code(arg)` within `budget` steps.
pub fn clock_of(code: Term, arg: Term, budget: Term) -> Term {
    apply(Term::clock(), pair_of(code, pair_of(arg, budget)))
}

/// `body(x⃗, bound(x⃗))`: evaluates `bound` once and passes it on as an
/// extra last argument.
pub fn let_in(bound: Term, body: Term) -> Term {
    let k = bound.arity();
    assert_eq!(body.arity(), k + 1, "let_in body arity");
    let mut inners: Vec<Term> = (0..k).map(|i| p(k, i)).collect();
    inners.push(bound);
    comp(body, inners)
}

/// `a` when `c` is 0, otherwise `b`. Both branches are evaluated, and the
/// cost grows with `c`, so `c` should be a flag.
pub fn if_zero(c: Term, a: Term, b: Term) -> Term {
    let select = prim_rec(p(2, 0), p(4, 1));
    comp(select, vec![a, b, c])
}

/// `1` when `a` is positive, else `0`, in constant time: a one-step program
/// converges within `a` steps exactly when `a ≥ 1`.
pub fn positive(a: Term) -> Term {
    let k = a.arity();
    let one_step = super::code::const_code(&Nat::zero());
    left_of(clock_of(konst(k, one_step), zero(k), a))
}

/// `2^y`, by doubling: `cons(0, x) = 2x`.
pub fn exp2() -> Term {
    prim_rec(
        succ_of(zero(0)),
        cons_of(zero(2), p(2, 1)),
    )
}

/// Code of `(const v)` for the value of `v`.
pub fn quote_const(v: Term) -> Term {
    let k = v.arity();
    cons_of(konst(k, TAG_CONST), v)
}

/// Code of `(comp outer (inners…))` for the values of the given code terms.
pub fn quote_comp(outer: Term, inners: Vec<Term>) -> Term {
    let k = outer.arity();
    let list = inners
        .iter()
        .rev()
        .fold(konst(k, 0u64), |acc, c| cons_of(c.clone(), acc));
    let seq = cons_of(konst(k, inners.len()), list);
    cons_of(konst(k, TAG_COMP), cons_of(outer, seq))
}

/// Code of `y ↦ φ_p(⟨x, y⟩)`, computed from the values of `p` and `x`.
pub fn smn_of(p_code: Term, x: Term) -> Term {
    let k = x.arity();
    let pair_code = konst(k, super::code::encode(&Term::pair()).0);
    let id_code = konst(k, super::code::encode(&id()).0);
    let with_x = quote_comp(pair_code, vec![quote_const(x), id_code]);
    quote_comp(p_code, vec![with_x])
}
