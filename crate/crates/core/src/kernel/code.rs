//! The numbering: every natural names a program.
//!
//! A code is `cons(tag, payload)` (see [`Nat::cons`]). Tag table:
//!
//! | tag | term            | payload                                  |
//! |-----|-----------------|------------------------------------------|
//! | 0   | `zero k`        | `k`                                      |
//! | 1   | `succ`          | `0`                                      |
//! | 2   | `(proj k i)`    | `cons(k, i)`                             |
//! | 3   | `(comp g (h…))` | `cons(code g, cons(len, list))`          |
//! | 4   | `(primrec b s)` | `cons(code b, code s)`                   |
//! | 5   | `(mu b)`        | `code b`                                 |
//! | 6   | `univ`          | `0`                                      |
//! | 7   | `query`         | `0`                                      |
//! | 8   | `bottom`        | `0`                                      |
//! | 9   | `(const k)`     | `k`                                      |
//! | 10  | `pair`          | `0`                                      |
//! | 11  | `left`          | `0`                                      |
//! | 12  | `right`         | `0`                                      |
//! | 13  | `cons`          | `0`                                      |
//! | 14  | `clock`         | `0`                                      |
//!
//! `list` is right-nested: `cons(c₁, cons(c₂, … cons(cₙ, 0)))`, and the
//! empty list is `0`. Numbers that fail to parse, carry an unknown tag, a
//! nonzero payload on an atom, or describe an ill-formed term decode to
//! `bottom`, as does any well-formed term whose arity is not 1.
//!
//! A few fixed values: `succ` is 13, `bottom` is 1095, `univ` is 219.

use std::fmt;
use std::str::FromStr;

use super::nat::{Nat, ParseNatError};
use super::term::{Node, Term, MAX_ARITY};

pub const TAG_ZERO: u64 = 0;
pub const TAG_SUCC: u64 = 1;
pub const TAG_PROJ: u64 = 2;
pub const TAG_COMP: u64 = 3;
pub const TAG_PRIMREC: u64 = 4;
pub const TAG_MU: u64 = 5;
pub const TAG_UNIV: u64 = 6;
pub const TAG_QUERY: u64 = 7;
pub const TAG_BOTTOM: u64 = 8;
pub const TAG_CONST: u64 = 9;
pub const TAG_PAIR: u64 = 10;
pub const TAG_LEFT: u64 = 11;
pub const TAG_RIGHT: u64 = 12;
pub const TAG_CONS: u64 = 13;
pub const TAG_CLOCK: u64 = 14;

/// A program index: `φ_e` is the unary function named by `e`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Code(pub Nat);

impl Code {
    pub fn nat(&self) -> &Nat {
        &self.0
    }

    pub fn of(t: &Term) -> Code {
        encode(t)
    }
}

impl From<Nat> for Code {
    fn from(n: Nat) -> Code {
        Code(n)
    }
}

impl From<u64> for Code {
    fn from(n: u64) -> Code {
        Code(Nat::small(n))
    }
}

impl From<Code> for Nat {
    fn from(c: Code) -> Nat {
        c.0
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Code({:?})", self.0)
    }
}

impl FromStr for Code {
    type Err = ParseNatError;

    fn from_str(s: &str) -> Result<Code, ParseNatError> {
        s.parse().map(Code)
    }
}

fn tagged(tag: u64, payload: Nat) -> Nat {
    Nat::cons(&Nat::small(tag), &payload)
}

fn atom(tag: u64) -> Nat {
    tagged(tag, Nat::zero())
}

pub(crate) fn encode_nat(t: &Term) -> Nat {
    match t.node() {
        Node::Zero(k) => tagged(TAG_ZERO, Nat::from(*k)),
        Node::Succ => atom(TAG_SUCC),
        Node::Proj { arity, index } => tagged(
            TAG_PROJ,
            Nat::cons(&Nat::from(*arity), &Nat::from(*index)),
        ),
        Node::Comp { outer, inners } => {
            let codes: Vec<Nat> = inners.iter().map(encode_nat).collect();
            comp_code(&encode_nat(outer), &codes)
        }
        Node::PrimRec { base, step } => tagged(
            TAG_PRIMREC,
            Nat::cons(&encode_nat(base), &encode_nat(step)),
        ),
        Node::Mu(body) => tagged(TAG_MU, encode_nat(body)),
        Node::Univ => atom(TAG_UNIV),
        Node::Query => atom(TAG_QUERY),
        Node::Bottom => atom(TAG_BOTTOM),
        Node::Const(k) => const_code(k),
        Node::Pair => atom(TAG_PAIR),
        Node::Left => atom(TAG_LEFT),
        Node::Right => atom(TAG_RIGHT),
        Node::Cons => atom(TAG_CONS),
        Node::Clock => atom(TAG_CLOCK),
    }
}

/// Code of a term, of any arity.
pub fn encode(t: &Term) -> Code {
    Code(encode_nat(t))
}

/// Length-prefixed right-nested list of codes.
pub fn seq_code(items: &[Nat]) -> Nat {
    let list = items
        .iter()
        .rev()
        .fold(Nat::zero(), |acc, c| Nat::cons(c, &acc));
    Nat::cons(&Nat::from(items.len()), &list)
}

/// `encode(Comp(decode outer, [decode inner…]))` computed on codes alone.
pub fn comp_code(outer: &Nat, inners: &[Nat]) -> Nat {
    tagged(TAG_COMP, Nat::cons(outer, &seq_code(inners)))
}

/// `encode(Const(value))`.
pub fn const_code(value: &Nat) -> Nat {
    tagged(TAG_CONST, value.clone())
}

/// Decode without the unary filter. `None` when the number does not name a
/// well-formed term.
pub fn decode_any(c: &Nat) -> Option<Term> {
    stacker::maybe_grow(64 * 1024, 1024 * 1024, || decode_inner(c))
}

fn decode_inner(c: &Nat) -> Option<Term> {
    let (tag, payload) = c.uncons()?;
    let atom_ok = |t: Term| payload.is_zero().then_some(t);
    match tag.to_u64()? {
        TAG_ZERO => Term::zero(payload.to_usize()?).ok(),
        TAG_SUCC => atom_ok(Term::succ()),
        TAG_PROJ => {
            let (k, i) = payload.uncons()?;
            Term::proj(k.to_usize()?, i.to_usize()?).ok()
        }
        TAG_COMP => {
            let (outer, seq) = payload.uncons()?;
            let outer = decode_any(&outer)?;
            let (len, mut list) = seq.uncons()?;
            let len = len.to_usize().filter(|&l| l <= MAX_ARITY)?;
            let mut inners = Vec::with_capacity(len);
            for _ in 0..len {
                let (head, tail) = list.uncons()?;
                inners.push(decode_any(&head)?);
                list = tail;
            }
            if !list.is_zero() {
                return None;
            }
            Term::comp(outer, inners).ok()
        }
        TAG_PRIMREC => {
            let (b, s) = payload.uncons()?;
            Term::prim_rec(decode_any(&b)?, decode_any(&s)?).ok()
        }
        TAG_MU => Term::mu(decode_any(&payload)?).ok(),
        TAG_UNIV => atom_ok(Term::univ()),
        TAG_QUERY => atom_ok(Term::query()),
        TAG_BOTTOM => atom_ok(Term::bottom()),
        TAG_CONST => Some(Term::constant(payload)),
        TAG_PAIR => atom_ok(Term::pair()),
        TAG_LEFT => atom_ok(Term::left()),
        TAG_RIGHT => atom_ok(Term::right()),
        TAG_CONS => atom_ok(Term::cons()),
        TAG_CLOCK => atom_ok(Term::clock()),
        _ => None,
    }
}

/// The unary program named by `c`. Total: anything that is not a
/// well-formed unary term is `bottom`.
pub fn decode(c: &Code) -> Term {
    decode_any(&c.0)
        .filter(|t| t.arity() == 1)
        .unwrap_or_else(Term::bottom)
}

/// s-m-n: a code for `y ↦ φ_p(⟨x, y⟩)`.
///
/// Pure code arithmetic, `p` is never decoded: if `p` is not a unary
/// program the composite does not decode to a well-formed unary term either
/// (or contains `bottom`), so both sides diverge.
pub fn smn(p: &Code, x: &Nat) -> Code {
    let pair_with_x = comp_code(
        &encode_nat(&Term::pair()),
        &[const_code(x), encode_nat(&super::build::id())],
    );
    Code(comp_code(&p.0, &[pair_with_x]))
}

/// A code `u` with `φ_u(⟨e, n⟩) ≃ φ_e(n)`.
pub fn universal_code() -> Code {
    encode(&Term::univ())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::syntax::parse;

    /// Bit-string reference for `cons`, written independently of `Nat::cons`.
    fn cons_oracle(a: u64, b: u64) -> u64 {
        let bits = |v: u64, width: usize| -> Vec<bool> { (0..width).map(|i| v >> i & 1 == 1).collect() };
        let len = |v: u64| 64 - v.leading_zeros() as usize;
        let m = len(a);
        let k = len(m as u64);
        let mut s: Vec<bool> = vec![true; k];
        s.push(false);
        s.extend(bits(m as u64, k));
        s.extend(bits(a, m));
        s.extend(bits(b, len(b)));
        s.iter().enumerate().map(|(i, &on)| (on as u64) << i).sum()
    }

    #[test]
    fn fixed_codes_match_the_bit_layout() {
        assert_eq!(cons_oracle(TAG_SUCC, 0), 13);
        assert_eq!(cons_oracle(TAG_BOTTOM, 0), 1095);
        assert_eq!(cons_oracle(TAG_UNIV, 0), 219);
        assert_eq!(encode(&Term::succ()), Code::from(13));
        assert_eq!(encode(&Term::bottom()), Code::from(1095));
        assert_eq!(universal_code(), Code::from(219));
        for tag in 0..40u64 {
            for payload in 0..40u64 {
                assert_eq!(
                    Nat::cons(&tag.into(), &payload.into()),
                    Nat::small(cons_oracle(tag, payload))
                );
            }
        }
    }

    #[test]
    fn roundtrip_examples() {
        assert_eq!(decode(&encode(&Term::succ())), Term::succ());
        assert_eq!(decode(&encode(&Term::bottom())), Term::bottom());
        let cs = parse("(comp succ (succ))").unwrap();
        assert_eq!(decode(&encode(&cs)), cs);
    }

    #[test]
    fn tags_beyond_the_table_are_bottom() {
        for tag in [15u64, 16, 99, 1 << 40] {
            let c = Code(Nat::cons(&tag.into(), &Nat::zero()));
            assert_eq!(decode(&c), Term::bottom());
        }
    }

    #[test]
    fn non_unary_and_malformed_payloads_are_bottom() {
        assert_eq!(decode(&encode(&Term::pair())), Term::bottom());
        assert_eq!(decode(&Code::from(0)), Term::bottom()); // zero 0
        // succ with a nonzero payload
        assert_eq!(decode(&Code(Nat::cons(&TAG_SUCC.into(), &5u64.into()))), Term::bottom());
        // comp whose list is shorter than its length prefix
        let bad = Nat::cons(
            &TAG_COMP.into(),
            &Nat::cons(&encode_nat(&Term::succ()), &Nat::cons(&2u64.into(), &Nat::zero())),
        );
        assert_eq!(decode(&Code(bad)), Term::bottom());
        // every small natural decodes to something
        for n in 0..5000u64 {
            let _ = decode(&Code::from(n));
        }
    }

    #[test]
    fn smn_is_injective_in_x() {
        let p = encode(&parse("(comp succ (left))").unwrap());
        let codes: std::collections::HashSet<Nat> =
            (0..50u64).map(|x| smn(&p, &x.into()).0).collect();
        assert_eq!(codes.len(), 50);
    }
}
