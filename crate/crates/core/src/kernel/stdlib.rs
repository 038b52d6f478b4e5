//! Object-level library.
//!
//! Every entry is a unary program; binary functions take `⟨x, y⟩`.
//!
//! | name               | function                                          |
//! |--------------------|---------------------------------------------------|
//! | `const(k)`         | `n ↦ k`                                           |
//! | `identity`         | `n ↦ n`                                           |
//! | `succ`, `pred`     | `n ↦ n+1`, `n ↦ n-1` (truncated)                  |
//! | `add`, `mul`       | `⟨x,y⟩ ↦ x+y`, `x·y`                              |
//! | `monus`            | `⟨x,y⟩ ↦ max(x-y, 0)`                             |
//! | `sg`, `sgbar`      | `0 ↦ 0 / 1`, `n+1 ↦ 1 / 0`                        |
//! | `parity`           | `n ↦ n mod 2`                                     |
//! | `tri`              | `n ↦ n(n+1)/2`                                    |
//! | `exp2`             | `n ↦ 2^n`                                         |
//! | `pair`             | `⟨x,y⟩ ↦ ⟨x,y⟩` (rebuilt from its components)     |
//! | `unpair_left`      | `⟨x,y⟩ ↦ x`                                       |
//! | `unpair_right`     | `⟨x,y⟩ ↦ y`                                       |
//! | `pair_rec`, `unpair_left_rec`, `unpair_right_rec` | the same three, from the schemata alone |
//! | `smn`              | `⟨p,x⟩ ↦ smn(p, x)`                               |
//! | `universal`        | `⟨e,n⟩ ↦ φ_e(n)`                                  |
//! | `const_builder`    | `n ↦ code of (const n)`                           |
//! | `race_builder`     | `⟨⟨c₁,a₁⟩,⟨c₂,a₂⟩⟩ ↦ race(c₁, a₁, c₂, a₂)`          |
//! | `race_value`       | `⟨⟨c₁,a₁⟩,⟨c₂,a₂⟩⟩ ↦` value of the race winner     |
//!
//! `add`, `mul`, `monus`, `pred`, `sg`, `sgbar`, `parity` and `tri` are
//! built from zero, successor, projection, composition and primitive
//! recursion only; the unpacking of `⟨x,y⟩` uses `left`/`right`.

use std::sync::OnceLock;

use super::build::*;
use super::code::{comp_code, const_code, encode, Code};
use super::nat::Nat;
use super::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StdlibError {
    #[error("unknown library entry `{0}`")]
    Unknown(String),
}

pub const NAMES: &[&str] = &[
    "const(k)",
    "identity",
    "succ",
    "pred",
    "add",
    "mul",
    "monus",
    "sg",
    "sgbar",
    "parity",
    "tri",
    "exp2",
    "pair",
    "unpair_left",
    "unpair_right",
    "pair_rec",
    "unpair_left_rec",
    "unpair_right_rec",
    "smn",
    "universal",
    "const_builder",
    "race_builder",
    "race_value",
];

/// Binary addition on separate arguments.
pub fn add2() -> Term {
    prim_rec(p(1, 0), succ_of(p(3, 2)))
}

pub fn mul2() -> Term {
    prim_rec(zero(1), comp(add2(), vec![p(3, 2), p(3, 0)]))
}

pub fn pred1() -> Term {
    prim_rec(zero(0), p(2, 0))
}

pub fn monus2() -> Term {
    prim_rec(p(1, 0), apply(pred1(), p(3, 2)))
}

pub fn sg1() -> Term {
    prim_rec(zero(0), succ_of(zero(2)))
}

pub fn sgbar1() -> Term {
    prim_rec(succ_of(zero(0)), zero(2))
}

pub fn parity1() -> Term {
    prim_rec(zero(0), apply(sgbar1(), p(2, 1)))
}

pub fn tri1() -> Term {
    prim_rec(zero(0), comp(add2(), vec![p(2, 1), succ_of(p(2, 0))]))
}

fn on_pair(f2: Term) -> Term {
    comp(f2, vec![Term::left(), Term::right()])
}

/// `n ↦ max { w : tri(w) ≤ n }`, by unbounded search.
fn cantor_diag() -> Term {
    // zero exactly when tri(w+1) > n
    let body = apply(
        sgbar1(),
        comp(monus2(), vec![apply(tri1(), succ_of(p(2, 1))), p(2, 0)]),
    );
    mu(body)
}

fn unpair_rec(right: bool) -> Term {
    // (z, w) ↦ y = z - tri(w);  x = w - y
    let y = comp(monus2(), vec![p(2, 0), apply(tri1(), p(2, 1))]);
    let out = if right {
        p(3, 2)
    } else {
        comp(monus2(), vec![p(3, 1), p(3, 2)])
    };
    let_in(cantor_diag(), let_in(y, out))
}

fn pair_rec() -> Term {
    let x = unpair_rec(false);
    let y = comp(unpair_rec(true), vec![p(2, 0)]);
    // (z, x, y) ↦ tri(x + y) + y
    let sum = comp(add2(), vec![p(3, 1), p(3, 2)]);
    let body = comp(add2(), vec![apply(tri1(), sum), p(3, 2)]);
    let_in(x, let_in(y, body))
}

fn flag(c: Term, a: Term, budget: Term) -> Term {
    left_of(clock_of(c, a, budget))
}

/// 4-ary `(c₁, a₁, c₂, a₂) ↦ φ_{cᵢ}(aᵢ)` for whichever converges in fewer
/// steps, `c₂` on a tie; diverges when neither does.
///
/// Budgets double until one side converges; the exact step counts reported
/// by `clock` then decide the winner.
pub fn race_value_body() -> Term {
    static T: OnceLock<Term> = OnceLock::new();
    T.get_or_init(|| {
        let none_yet = apply(
            sgbar1(),
            comp(
                add2(),
                vec![
                    flag(p(6, 0), p(6, 1), p(6, 5)),
                    flag(p(6, 2), p(6, 3), p(6, 5)),
                ],
            ),
        );
        let stage = mu(let_in(apply(exp2(), p(5, 4)), none_yet));
        // (c1, a1, c2, a2, B)
        let r1 = clock_of(p(5, 0), p(5, 1), p(5, 4));
        // (…, B, r1)
        let second_budget = if_zero(left_of(p(6, 5)), p(6, 4), left_of(right_of(p(6, 5))));
        let r2 = clock_of(p(6, 2), p(6, 3), second_budget);
        // (…, B, r1, r2)
        let pick = if_zero(
            left_of(p(7, 6)),
            right_of(right_of(p(7, 5))),
            right_of(right_of(p(7, 6))),
        );
        let_in(apply(exp2(), stage), let_in(r1, let_in(r2, pick)))
    })
    .clone()
}

/// 5-ary `(c₁, a₁, c₂, a₂, y) ↦ φ_w(y)` where `w` is the race value.
pub fn race_continuation() -> Term {
    let value = comp(
        race_value_body(),
        vec![p(5, 0), p(5, 1), p(5, 2), p(5, 3)],
    );
    univ_of(value, p(5, 4))
}

pub fn race_continuation_code() -> &'static Nat {
    static C: OnceLock<Nat> = OnceLock::new();
    C.get_or_init(|| encode(&race_continuation()).0)
}

/// Code of `y ↦ φ_w(y)`, `w` the winner of racing `φ_{c₁}(a₁)` against
/// `φ_{c₂}(a₂)`.
pub fn race_code(c1: &Nat, a1: &Nat, c2: &Nat, a2: &Nat) -> Code {
    Code(comp_code(
        race_continuation_code(),
        &[
            const_code(c1),
            const_code(a1),
            const_code(c2),
            const_code(a2),
            encode(&id()).0,
        ],
    ))
}

/// Object-level [`race_code`]: the four arguments are terms of one arity.
pub fn race_code_of(c1: Term, a1: Term, c2: Term, a2: Term) -> Term {
    let k = c1.arity();
    quote_comp(
        konst(k, race_continuation_code().clone()),
        vec![
            quote_const(c1),
            quote_const(a1),
            quote_const(c2),
            quote_const(a2),
            konst(k, encode(&id()).0),
        ],
    )
}

/// Object-level s-m-n: `⟨p, x⟩ ↦ smn(p, x)`.
pub fn smn_term() -> Code {
    encode(&smn_of(left_of(id()), right_of(id())))
}

/// `n ↦ code of (const n)`.
pub fn const_builder() -> Term {
    quote_const(id())
}

fn quad(f: Term) -> Term {
    let z = id;
    comp(
        f,
        vec![
            left_of(left_of(z())),
            right_of(left_of(z())),
            left_of(right_of(z())),
            right_of(right_of(z())),
        ],
    )
}

/// Term for a library entry.
pub fn stdlib_term(name: &str) -> Result<Term, StdlibError> {
    let t = match name {
        "identity" => id(),
        "succ" => Term::succ(),
        "pred" => pred1(),
        "add" => on_pair(add2()),
        "mul" => on_pair(mul2()),
        "monus" => on_pair(monus2()),
        "sg" => sg1(),
        "sgbar" => sgbar1(),
        "parity" => parity1(),
        "tri" => tri1(),
        "exp2" => exp2(),
        "pair" => on_pair(Term::pair()),
        "unpair_left" => Term::left(),
        "unpair_right" => Term::right(),
        "pair_rec" => pair_rec(),
        "unpair_left_rec" => unpair_rec(false),
        "unpair_right_rec" => unpair_rec(true),
        "smn" => smn_of(left_of(id()), right_of(id())),
        "universal" => Term::univ(),
        "const_builder" => const_builder(),
        "race_builder" => {
            let args = |i| p(4, i);
            quad(race_code_of(args(0), args(1), args(2), args(3)))
        }
        "race_value" => quad(race_value_body()),
        other => {
            let k = other
                .strip_prefix("const(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|k| k.trim().parse::<Nat>().ok())
                .ok_or_else(|| StdlibError::Unknown(other.to_string()))?;
            Term::constant(k)
        }
    };
    Ok(t)
}

/// Code of a library entry.
pub fn stdlib(name: &str) -> Result<Code, StdlibError> {
    stdlib_term(name).map(|t| encode(&t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::code::smn;
    use crate::kernel::eval::phi;

    fn val(name: &str, n: Nat) -> Nat {
        let out = phi(&stdlib(name).unwrap(), n, 10_000_000);
        out.value().unwrap_or_else(|| panic!("{name} exhausted")).clone()
    }

    fn pr(x: u64, y: u64) -> Nat {
        Nat::pair(&x.into(), &y.into())
    }

    #[test]
    fn documented_examples() {
        for n in [0u64, 1, 99] {
            assert_eq!(val("const(7)", n.into()), Nat::small(7));
        }
        assert_eq!(val("pair", pr(1, 2)), Nat::small(8));
        assert_eq!(val("monus", pr(3, 5)), Nat::small(0));
        assert!(stdlib("frobnicate").is_err());
    }

    #[test]
    fn arithmetic_grid() {
        for x in 0..8u64 {
            for y in 0..8u64 {
                assert_eq!(val("add", pr(x, y)), Nat::small(x + y));
                assert_eq!(val("mul", pr(x, y)), Nat::small(x * y));
                assert_eq!(val("monus", pr(x, y)), Nat::small(x.saturating_sub(y)));
            }
        }
        for n in 0..20u64 {
            assert_eq!(val("pred", n.into()), Nat::small(n.saturating_sub(1)));
            assert_eq!(val("sg", n.into()), Nat::small(u64::from(n > 0)));
            assert_eq!(val("sgbar", n.into()), Nat::small(u64::from(n == 0)));
            assert_eq!(val("parity", n.into()), Nat::small(n % 2));
            assert_eq!(val("tri", n.into()), Nat::small(n * (n + 1) / 2));
            assert_eq!(val("exp2", n.into()), Nat::small(1 << n));
            assert_eq!(val("identity", n.into()), Nat::small(n));
        }
    }

    #[test]
    fn pairing_routes_agree() {
        for z in 0..60u64 {
            let (x, y) = Nat::small(z).unpair();
            assert_eq!(val("unpair_left", z.into()), x);
            assert_eq!(val("unpair_right", z.into()), y);
            assert_eq!(val("unpair_left_rec", z.into()), x);
            assert_eq!(val("unpair_right_rec", z.into()), y);
            assert_eq!(val("pair_rec", z.into()), Nat::small(z));
            assert_eq!(val("pair", z.into()), Nat::small(z));
        }
    }

    #[test]
    fn smn_entry_matches_meta_smn() {
        let succ = encode(&Term::succ());
        for (p, x) in [(succ.0.clone(), 0u64), (Nat::zero(), 0), (Nat::small(12345), 9)] {
            let got = val("smn", Nat::pair(&p, &x.into()));
            assert_eq!(Code(got), smn(&Code(p), &x.into()));
        }
    }

    #[test]
    fn const_builder_builds_constants() {
        let c = Code(val("const_builder", 42u64.into()));
        assert_eq!(phi(&c, 0u64, 10).value(), Some(&Nat::small(42)));
    }

    #[test]
    fn race_prefers_the_faster_side_and_the_second_on_ties() {
        let k = |v: u64| encode(&Term::constant(v)).0;
        let slow = encode(&comp(Term::constant(5u64), vec![apply(exp2(), konst(1, 6u64))])).0;
        let bottom = encode(&Term::bottom()).0;
        let z = Nat::zero();
        let rv = |c1: &Nat, c2: &Nat| val("race_value", Nat::pair(&Nat::pair(c1, &z), &Nat::pair(c2, &z)));
        assert_eq!(rv(&k(1), &k(2)), Nat::small(2)); // tie
        assert_eq!(rv(&k(1), &slow), Nat::small(1));
        assert_eq!(rv(&slow, &k(2)), Nat::small(2));
        assert_eq!(rv(&bottom, &slow), Nat::small(5));
        assert_eq!(rv(&slow, &bottom), Nat::small(5));
        let both = Nat::pair(&Nat::pair(&bottom, &z), &Nat::pair(&bottom, &z));
        assert!(!phi(&stdlib("race_value").unwrap(), both, 100_000).is_converged());
    }
}
