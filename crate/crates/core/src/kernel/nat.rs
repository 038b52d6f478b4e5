//! Arbitrary-precision naturals with structure-preserving pairing.
//!
//! Codes of self-referential programs run to thousands of bits, and the
//! evaluator pairs and unpairs them constantly. A [`Nat`] built by
//! [`Nat::pair`] or [`Nat::cons`] remembers its two components, so the
//! matching projection is O(1); the numeric value is only materialised
//! (and then cached) when something actually needs the digits.
//!
//! Two pairings live here:
//!
//! * [`Nat::pair`] is the Cantor pairing `⟨x,y⟩ = (x+y)(x+y+1)/2 + y`, a
//!   bijection `ω×ω → ω`. It is the pairing of arguments (`φ_u(⟨e,n⟩)`,
//!   s-m-n, `Left`/`Right`).
//! * [`Nat::cons`] is the self-delimiting pairing used inside program
//!   codes. Its size is additive, `|cons(a,b)| ≈ |a| + |b| + O(log |a|)`,
//!   so deep terms do not square their codes at every level. It is
//!   injective; [`Nat::uncons`] returns `None` off its image.
//!
//! Bit layout of `cons(a, b)`, least significant bit first: `k` ones and a
//! zero, where `k` is the bit length of `m`; then `m` in `k` bits, where
//! `m` is the bit length of `a`; then `a` in `m` bits; then `b`.

use std::borrow::Cow;
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// A natural number.
#[derive(Clone)]
pub struct Nat(Arc<Repr>);

enum Repr {
    Small(u64),
    /// Always strictly larger than `u64::MAX`.
    Big(BigUint),
    Cantor {
        left: Nat,
        right: Nat,
        bits: u64,
        value: OnceLock<BigUint>,
    },
    Cons {
        head: Nat,
        tail: Nat,
        bits: u64,
        value: OnceLock<BigUint>,
    },
}

impl Nat {
    pub fn zero() -> Nat {
        Nat::small(0)
    }

    pub fn small(v: u64) -> Nat {
        Nat(Arc::new(Repr::Small(v)))
    }

    pub fn from_big(v: BigUint) -> Nat {
        match v.to_u64() {
            Some(s) => Nat::small(s),
            None => Nat(Arc::new(Repr::Big(v))),
        }
    }

    /// The value if it fits in a `u64`. O(1): every non-`Small`
    /// representation is larger than `u64::MAX`.
    pub fn to_u64(&self) -> Option<u64> {
        self.small_value()
    }

    pub fn to_usize(&self) -> Option<usize> {
        self.to_u64().and_then(|v| usize::try_from(v).ok())
    }

    pub fn is_zero(&self) -> bool {
        match &*self.0 {
            Repr::Small(v) => *v == 0,
            Repr::Big(_) => false,
            // Both pairings send (0,0), and only (0,0), to 0.
            Repr::Cantor { left, right, .. } => left.is_zero() && right.is_zero(),
            Repr::Cons { head, tail, .. } => head.is_zero() && tail.is_zero(),
        }
    }

    /// The value as a `BigUint`, materialising pairing nodes on demand.
    pub fn big(&self) -> Cow<'_, BigUint> {
        match &*self.0 {
            Repr::Small(v) => Cow::Owned(BigUint::from(*v)),
            Repr::Big(b) => Cow::Borrowed(b),
            Repr::Cantor { left, right, value, .. } => {
                Cow::Borrowed(value.get_or_init(|| cantor_big(&left.big(), &right.big())))
            }
            Repr::Cons { head, tail, value, .. } => {
                Cow::Borrowed(value.get_or_init(|| cons_big(&head.big(), &tail.big())))
            }
        }
    }

    pub fn bit_len(&self) -> u64 {
        match &*self.0 {
            Repr::Small(v) => u64::from(64 - v.leading_zeros()),
            _ => self.big().bits(),
        }
    }

    /// An upper bound on [`Nat::bit_len`], in O(1) without materialising.
    pub fn bit_bound(&self) -> u64 {
        match &*self.0 {
            Repr::Small(v) => u64::from(64 - v.leading_zeros()),
            Repr::Big(b) => b.bits(),
            Repr::Cantor { bits, .. } | Repr::Cons { bits, .. } => *bits,
        }
    }

    pub fn succ(&self) -> Nat {
        match &*self.0 {
            Repr::Small(v) if *v < u64::MAX => Nat::small(v + 1),
            _ => Nat::from_big(self.big().into_owned() + 1u32),
        }
    }

    /// Identity of the shared allocation; stable while any clone is alive.
    pub(crate) fn ptr_key(&self) -> usize {
        Arc::as_ptr(&self.0) as *const () as usize
    }

    /// Cantor pairing `⟨x,y⟩ = (x+y)(x+y+1)/2 + y`.
    pub fn pair(x: &Nat, y: &Nat) -> Nat {
        if let (Some(a), Some(b)) = (x.small_value(), y.small_value()) {
            let s = u128::from(a) + u128::from(b);
            if let Some(v) = s
                .checked_mul(s + 1)
                .map(|t| t / 2 + u128::from(b))
                .and_then(|v| u64::try_from(v).ok())
            {
                return Nat::small(v);
            }
        }
        // x + y < 2^(m+1), so the pair is below 2^(2m+2)
        let m = x.bit_bound().max(y.bit_bound());
        Nat(Arc::new(Repr::Cantor {
            left: x.clone(),
            right: y.clone(),
            bits: m.saturating_mul(2).saturating_add(2),
            value: OnceLock::new(),
        }))
    }

    /// Inverse of [`Nat::pair`]; total.
    pub fn unpair(&self) -> (Nat, Nat) {
        match &*self.0 {
            Repr::Cantor { left, right, .. } => (left.clone(), right.clone()),
            Repr::Small(n) => {
                let (x, y) = unpair_u64(*n);
                (Nat::small(x), Nat::small(y))
            }
            _ => {
                let (x, y) = unpair_big(&self.big());
                (Nat::from_big(x), Nat::from_big(y))
            }
        }
    }

    /// Self-delimiting code pairing (see module docs).
    pub fn cons(head: &Nat, tail: &Nat) -> Nat {
        if let (Some(a), Some(b)) = (head.small_value(), tail.small_value()) {
            let (sigma, width) = sigma_u64(a);
            let tail_bits = 64 - b.leading_zeros();
            if width + tail_bits <= 64 {
                let shifted = if width >= 64 { 0 } else { b << width };
                return Nat::small(sigma | shifted);
            }
        }
        let m = head.bit_bound();
        let k = u64::from(64 - m.leading_zeros());
        Nat(Arc::new(Repr::Cons {
            head: head.clone(),
            tail: tail.clone(),
            bits: (2 * k + 1).saturating_add(m).saturating_add(tail.bit_bound()),
            value: OnceLock::new(),
        }))
    }

    /// Inverse of [`Nat::cons`]; `None` for numbers outside its image.
    pub fn uncons(&self) -> Option<(Nat, Nat)> {
        match &*self.0 {
            Repr::Cons { head, tail, .. } => Some((head.clone(), tail.clone())),
            Repr::Small(n) => uncons_u64(*n).map(|(a, b)| (Nat::small(a), Nat::small(b))),
            _ => uncons_big(&self.big()).map(|(a, b)| (Nat::from_big(a), Nat::from_big(b))),
        }
    }

    fn small_value(&self) -> Option<u64> {
        match &*self.0 {
            Repr::Small(v) => Some(*v),
            _ => None,
        }
    }
}

fn cantor_big(x: &BigUint, y: &BigUint) -> BigUint {
    let s = x + y;
    let t = &s * (&s + 1u32);
    (t >> 1usize) + y
}

fn unpair_u64(n: u64) -> (u64, u64) {
    let w = ((8 * u128::from(n) + 1).isqrt() - 1) / 2;
    let t = w * (w + 1) / 2;
    let y = u128::from(n) - t;
    let x = w - y;
    (x as u64, y as u64)
}

fn unpair_big(n: &BigUint) -> (BigUint, BigUint) {
    let w = ((n * 8u32 + 1u32).sqrt() - 1u32) >> 1usize;
    let t = (&w * (&w + 1u32)) >> 1usize;
    let y = n - t;
    let x = w - &y;
    (x, y)
}

/// The self-delimiting prefix of `a` and its width in bits.
fn sigma_u64(a: u64) -> (u64, u32) {
    let m = 64 - a.leading_zeros();
    let k = 32 - m.leading_zeros();
    let width = 2 * k + 1 + m;
    let ones = (1u64 << k) - 1;
    let mut sigma = ones | (u64::from(m) << (k + 1));
    if m > 0 {
        // width <= 64 here only when a fits after the prefix
        if 2 * k + 1 < 64 {
            sigma |= a.checked_shl(2 * k + 1).unwrap_or(0);
        }
    }
    (sigma, width)
}

fn cons_big(a: &BigUint, b: &BigUint) -> BigUint {
    let m = a.bits();
    let k = 64 - m.leading_zeros() as u64;
    let mut out = (BigUint::one() << k) - 1u32;
    out |= BigUint::from(m) << (k + 1);
    out |= a << (2 * k + 1);
    out |= b << (2 * k + 1 + m);
    out
}

fn uncons_u64(n: u64) -> Option<(u64, u64)> {
    let k = n.trailing_ones();
    if k > 7 {
        return None;
    }
    let shr = |v: u64, s: u32| v.checked_shr(s).unwrap_or(0);
    let mask = |bits: u32| if bits >= 64 { u64::MAX } else { (1u64 << bits) - 1 };
    let mut pos = k + 1;
    let m = shr(n, pos) & mask(k);
    if k > 0 && (m >> (k - 1)) & 1 == 0 {
        return None;
    }
    pos += k;
    let m = m as u32;
    if m > 64 {
        return None;
    }
    let a = shr(n, pos) & mask(m);
    if m > 0 && (a >> (m - 1)) & 1 == 0 {
        return None;
    }
    pos += m;
    Some((a, shr(n, pos)))
}

fn uncons_big(n: &BigUint) -> Option<(BigUint, BigUint)> {
    let mut k = 0u64;
    while n.bit(k) {
        k += 1;
        if k > 63 {
            return None;
        }
    }
    let mut pos = k + 1;
    let mut m = 0u64;
    for i in 0..k {
        if n.bit(pos + i) {
            m |= 1 << i;
        }
    }
    if k > 0 && (m >> (k - 1)) & 1 == 0 {
        return None;
    }
    pos += k;
    let shifted = n >> pos;
    let a = if m == 0 {
        BigUint::zero()
    } else {
        &shifted & ((BigUint::one() << m) - 1u32)
    };
    if m > 0 && !a.bit(m - 1) {
        return None;
    }
    Some((a, shifted >> m))
}

impl From<u64> for Nat {
    fn from(v: u64) -> Nat {
        Nat::small(v)
    }
}

impl From<u32> for Nat {
    fn from(v: u32) -> Nat {
        Nat::small(u64::from(v))
    }
}

impl From<usize> for Nat {
    fn from(v: usize) -> Nat {
        Nat::small(v as u64)
    }
}

impl From<BigUint> for Nat {
    fn from(v: BigUint) -> Nat {
        Nat::from_big(v)
    }
}

impl PartialEq for Nat {
    fn eq(&self, other: &Nat) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (&*self.0, &*other.0) {
            (Repr::Small(a), Repr::Small(b)) => a == b,
            (Repr::Cantor { left: a, right: b, .. }, Repr::Cantor { left: c, right: d, .. }) => {
                a == c && b == d
            }
            (Repr::Cons { head: a, tail: b, .. }, Repr::Cons { head: c, tail: d, .. }) => {
                a == c && b == d
            }
            _ => *self.big() == *other.big(),
        }
    }
}

impl Eq for Nat {}

impl Ord for Nat {
    fn cmp(&self, other: &Nat) -> Ordering {
        match (&*self.0, &*other.0) {
            (Repr::Small(a), Repr::Small(b)) => a.cmp(b),
            _ => self.big().cmp(&other.big()),
        }
    }
}

impl PartialOrd for Nat {
    fn partial_cmp(&self, other: &Nat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Hash for Nat {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self.to_u64() {
            Some(v) => v.hash(state),
            None => self.big().to_u64_digits().hash(state),
        }
    }
}

impl fmt::Display for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Repr::Small(v) => write!(f, "{v}"),
            _ => write!(f, "{}", self.big()),
        }
    }
}

impl fmt::Debug for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_u64() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "<{} bits>", self.bit_len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a decimal natural: {0:?}")]
pub struct ParseNatError(String);

impl FromStr for Nat {
    type Err = ParseNatError;

    fn from_str(s: &str) -> Result<Nat, ParseNatError> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseNatError(s.to_string()));
        }
        match s.parse::<u64>() {
            Ok(v) => Ok(Nat::small(v)),
            Err(_) => BigUint::from_str(s)
                .map(Nat::from_big)
                .map_err(|_| ParseNatError(s.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cantor_oracle(x: u64, y: u64) -> u128 {
        let s = u128::from(x) + u128::from(y);
        s * (s + 1) / 2 + u128::from(y)
    }

    #[test]
    fn cantor_examples() {
        assert_eq!(Nat::pair(&0u64.into(), &0u64.into()), Nat::small(0));
        assert_eq!(Nat::pair(&1u64.into(), &0u64.into()), Nat::small(1));
        assert_eq!(Nat::pair(&1u64.into(), &2u64.into()), Nat::small(8));
        assert_eq!(Nat::small(8).unpair(), (Nat::small(1), Nat::small(2)));
        assert_eq!(Nat::small(1).unpair(), (Nat::small(1), Nat::small(0)));
        assert_eq!(Nat::small(0).unpair(), (Nat::small(0), Nat::small(0)));
    }

    #[test]
    fn cantor_is_a_bijection_on_the_grid() {
        for x in 0..200u64 {
            for y in 0..200u64 {
                let p = Nat::pair(&x.into(), &y.into());
                assert_eq!(p.to_u64().map(u128::from), Some(cantor_oracle(x, y)));
                assert_eq!(p.unpair(), (Nat::small(x), Nat::small(y)));
            }
        }
        for n in 0..=40_000u64 {
            let (x, y) = Nat::small(n).unpair();
            assert_eq!(Nat::pair(&x, &y), Nat::small(n));
        }
    }

    #[test]
    fn cons_small_values_by_hand() {
        // cons(1, 0): k=1 -> "10", m=1 -> "1", a -> "1"  => 0b1101
        assert_eq!(Nat::cons(&1u64.into(), &0u64.into()), Nat::small(13));
        assert_eq!(Nat::cons(&0u64.into(), &0u64.into()), Nat::small(0));
        assert_eq!(Nat::cons(&0u64.into(), &5u64.into()), Nat::small(10));
        assert_eq!(Nat::small(13).uncons(), Some((Nat::small(1), Nat::small(0))));
        // 0b0101: k=1, m bit = 0 -> leading zero, off the image
        assert_eq!(Nat::small(5).uncons(), None);
    }

    #[test]
    fn big_cantor_node_matches_materialised_arithmetic() {
        let x = Nat::from_big(BigUint::one() << 300usize);
        let y = Nat::small(12345);
        let p = Nat::pair(&x, &y);
        let flat = Nat::from_big(p.big().into_owned());
        assert_eq!(p, flat);
        assert_eq!(flat.unpair(), (x.clone(), y.clone()));
        assert_eq!(p.unpair(), (x, y));
    }

    #[test]
    fn zero_detection_on_nodes() {
        let big = Nat::from_big(BigUint::one() << 100usize);
        assert!(!Nat::pair(&big, &Nat::zero()).is_zero());
        assert!(!Nat::cons(&Nat::zero(), &big).is_zero());
        assert!(Nat::cons(&Nat::zero(), &Nat::zero()).is_zero());
    }

    fn arb_nat() -> impl Strategy<Value = Nat> {
        prop_oneof![
            (0u64..1000).prop_map(Nat::small),
            any::<u64>().prop_map(Nat::small),
            proptest::collection::vec(any::<u32>(), 1..12)
                .prop_map(|d| Nat::from_big(BigUint::new(d))),
        ]
    }

    proptest! {
        #[test]
        fn cons_roundtrips_structurally_and_numerically(a in arb_nat(), b in arb_nat()) {
            let c = Nat::cons(&a, &b);
            prop_assert_eq!(c.uncons(), Some((a.clone(), b.clone())));
            let flat = Nat::from_big(c.big().into_owned());
            prop_assert_eq!(flat.uncons(), Some((a.clone(), b.clone())));
            let k = 64 - a.bit_len().leading_zeros() as u64;
            prop_assert!(flat.bit_len() <= a.bit_len() + b.bit_len() + 2 * k + 1);
            prop_assert!(c.bit_len() <= c.bit_bound());
            let nested = Nat::cons(&c, &Nat::pair(&c, &b));
            prop_assert!(nested.bit_len() <= nested.bit_bound());
        }

        #[test]
        fn pair_roundtrips_structurally_and_numerically(a in arb_nat(), b in arb_nat()) {
            let p = Nat::pair(&a, &b);
            prop_assert_eq!(p.unpair(), (a.clone(), b.clone()));
            let flat = Nat::from_big(p.big().into_owned());
            prop_assert_eq!(&flat, &p);
            prop_assert_eq!(flat.unpair(), (a.clone(), b.clone()));
            prop_assert!(p.bit_len() <= p.bit_bound());
            let nested = Nat::pair(&p, &Nat::pair(&b, &p));
            prop_assert!(nested.bit_len() <= nested.bit_bound());
        }

        #[test]
        fn uncons_inverts_on_its_image(n in any::<u64>()) {
            if let Some((a, b)) = Nat::small(n).uncons() {
                prop_assert_eq!(Nat::cons(&a, &b), Nat::small(n));
            }
            let big = Nat::from_big(BigUint::from(n));
            prop_assert_eq!(uncons_big(&big.big()).map(|(a, b)| (Nat::from_big(a), Nat::from_big(b))),
                Nat::small(n).uncons());
        }

        #[test]
        fn order_and_hash_agree_with_value(a in arb_nat(), b in arb_nat()) {
            use std::collections::hash_map::DefaultHasher;
            let p = Nat::pair(&a, &b);
            let flat = Nat::from_big(p.big().into_owned());
            let h = |n: &Nat| { let mut s = DefaultHasher::new(); n.hash(&mut s); s.finish() };
            prop_assert_eq!(h(&p), h(&flat));
            prop_assert_eq!(a.cmp(&b), a.big().cmp(&b.big()));
        }
    }
}
