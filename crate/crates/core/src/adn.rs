//! Fixed-point-free functions and totalizers that avoid them.
//!
//! "Before" in every race means "in fewer evaluation steps", measured with
//! the evaluator's own fuel; ties go to the second contestant.

use std::collections::BTreeSet;
use std::fmt;

use crate::fixedpoint::{fixed_point_with_params, BinaryTransformerCode, ParamFixedPoint};
use crate::kernel::build::*;
use crate::kernel::code::{encode, smn, universal_code, Code};
use crate::kernel::eval::{phi, w_enum, w_enum_at, EvalOutcome, Machine};
use crate::kernel::nat::Nat;
use crate::kernel::stdlib::{const_builder, parity1, race_code, race_code_of, race_value_body, sgbar1};
use crate::kernel::term::Term;

/// Where a partial FPF candidate came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// `a ↦ d` once `W_a` is seen to be nonempty.
    EmptyAvoider { d_empty: Code },
    /// `a ↦` a code of `ω∖{0}` once `0 ∈ W_a` is seen.
    ZeroAvoider,
    /// Race of another candidate against an empty-avoider.
    HatDelta { inner: Box<Provenance>, d_empty: Code },
    /// Nowhere defined.
    Nowhere,
    /// No guarantee.
    UserSupplied,
}

/// A code of a partial function on codes meant to be fixed point free:
/// `δ(a)↓ ⟹ W_{δ(a)} ≠ W_a`. Only generator-built values carry that
/// guarantee.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFpfCode {
    pub code: Code,
    pub provenance: Provenance,
}

impl PartialFpfCode {
    pub fn user(code: Code) -> PartialFpfCode {
        PartialFpfCode {
            code,
            provenance: Provenance::UserSupplied,
        }
    }

    /// The empty function, vacuously FPF.
    pub fn nowhere() -> PartialFpfCode {
        PartialFpfCode {
            code: encode(&Term::bottom()),
            provenance: Provenance::Nowhere,
        }
    }
}

/// Code `r` with `φ_r(y) ≃ φ_w(y)`, where `w` is the value of whichever of
/// `φ_{c1}(a1)`, `φ_{c2}(a2)` converges in fewer steps (`c2` on a tie).
pub fn race(c1: &Code, a1: &Nat, c2: &Code, a2: &Nat) -> Code {
    race_code(c1.nat(), a1, c2.nat(), a2)
}

fn empty_avoider_term(d_empty: &Code) -> Term {
    // t = ⟨n, k⟩ is a hit when φ_a(n) converges within 2^k steps
    let miss = apply(
        sgbar1(),
        left_of(clock_of(
            p(2, 0),
            left_of(p(2, 1)),
            apply(exp2(), right_of(p(2, 1))),
        )),
    );
    comp(Term::constant(d_empty.nat().clone()), vec![mu(miss)])
}

/// `δ(a) = d_empty` iff some `n ∈ W_a` is found by a dovetailed search,
/// undefined otherwise. FPF whenever `W_{d_empty} = ∅`.
pub fn empty_avoider(d_empty: &Code) -> PartialFpfCode {
    PartialFpfCode {
        code: encode(&empty_avoider_term(d_empty)),
        provenance: Provenance::EmptyAvoider {
            d_empty: d_empty.clone(),
        },
    }
}

/// A code whose domain is `ω ∖ {0}`.
pub fn all_but_zero_code() -> Code {
    let bottom = encode(&Term::bottom()).0;
    let zero = encode(&zero(1)).0;
    encode(&univ_of(if_zero(positive(id()), konst(1, bottom), konst(1, zero)), id()))
}

/// `δ(a)` = [`all_but_zero_code`] once `φ_a(0)` converges. FPF: `0` is in
/// `W_a` but not in `W_{δ(a)}`.
pub fn zero_avoider() -> PartialFpfCode {
    let t = comp(
        Term::constant(all_but_zero_code().0),
        vec![univ_of(id(), zero(1))],
    );
    PartialFpfCode {
        code: encode(&t),
        provenance: Provenance::ZeroAvoider,
    }
}

/// `δ̂(a)`: `δ(a)` if it converges strictly first, `d` if nonemptiness of
/// `W_a` is witnessed first or at the same step, undefined otherwise.
/// `{a : W_a ≠ ∅} ⊆ dom δ̂` and both branches are FPF.
pub fn hat_delta(delta: &PartialFpfCode, d: &Code) -> PartialFpfCode {
    let avoider = empty_avoider(d);
    let t = comp(
        race_value_body(),
        vec![
            konst(1, delta.code.0.clone()),
            id(),
            konst(1, avoider.code.0.clone()),
            id(),
        ],
    );
    PartialFpfCode {
        code: encode(&t),
        provenance: Provenance::HatDelta {
            inner: Box::new(delta.provenance.clone()),
            d_empty: d.clone(),
        },
    }
}

/// A total `f` (as a [`ParamFixedPoint`]) with `φ_{f(n)} ≃ φ_{ψ(n)}` when
/// `ψ(n)↓` and `δ(f(n))↑` when `ψ(n)↑`.
#[derive(Clone, Debug)]
pub struct Totalizer {
    pub psi: Code,
    pub delta: PartialFpfCode,
    pub h: BinaryTransformerCode,
    family: ParamFixedPoint,
}

impl Totalizer {
    pub fn at(&self, n: &Nat) -> Code {
        self.family.at(n)
    }

    /// `f(⟨e, n⟩)`, for totalizers of the universal function.
    pub fn section(&self, e: &Code, n: &Nat) -> Code {
        self.at(&Nat::pair(e.nat(), n))
    }

    pub fn object_code(&self) -> &Code {
        self.family.object_code()
    }
}

/// `f(n)` is a fixed point of `x ↦ race(δ on x, ψ on n)`: whichever of
/// `δ(f(n))`, `ψ(n)` converges first, `f(n)` behaves as its value. The
/// `δ` side winning would make `f(n)` a fixed point of `δ`, so for FPF `δ`
/// it never does.
pub fn adn_totalizer(psi: &Code, delta: &PartialFpfCode) -> Totalizer {
    let n = left_of(id());
    let x = right_of(id());
    let h_term = race_code_of(konst(1, delta.code.0.clone()), x, konst(1, psi.0.clone()), n);
    let h = BinaryTransformerCode(encode(&h_term));
    let family = fixed_point_with_params(&h);
    Totalizer {
        psi: psi.clone(),
        delta: delta.clone(),
        h,
        family,
    }
}

/// [`adn_totalizer`] for `ψ(⟨e, n⟩) = φ_e(n)`.
pub fn adn_uniform(delta: &PartialFpfCode) -> Totalizer {
    adn_totalizer(&universal_code(), delta)
}

/// `ψ(n)` = code of `(const n)` for even `n`, undefined for odd `n`.
pub fn parity_psi() -> Code {
    let builder = encode(&const_builder()).0;
    let bottom = encode(&Term::bottom()).0;
    let which = if_zero(apply(parity1(), id()), konst(1, builder), konst(1, bottom));
    encode(&univ_of(which, id()))
}

/// `n ↦ code of (const n)`.
pub fn const_builder_code() -> Code {
    encode(&const_builder())
}

/// Fuel added to the stage when enumerating `W_{f(n)}` next to `W_{ψ(n)}`:
/// every `φ_{f(n)}(y)` first runs the fixed-point plumbing and the race.
pub const TOTALIZER_FUEL_SLACK: u64 = 20_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotalizationRecord {
    pub n: Nat,
    pub f_n: Code,
    /// `ψ(n)` if it converged within the budget.
    pub psi_value: Option<Code>,
    pub w_f: BTreeSet<u64>,
    pub w_psi: Option<BTreeSet<u64>>,
    /// Whether `δ(f(n))` converged within `delta_fuel`.
    pub delta_converged: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotalizationReport {
    pub stage: u64,
    pub psi_fuel: u64,
    pub delta_fuel: u64,
    pub records: Vec<TotalizationRecord>,
}

impl TotalizationReport {
    /// `W_{f(n)} = W_{ψ(n)}` wherever `ψ(n)` converged, and `W_{f(n)} = ∅`
    /// with `δ(f(n))` unconverged elsewhere.
    pub fn consistent(&self) -> bool {
        self.records.iter().all(|r| match &r.w_psi {
            Some(w) => &r.w_f == w,
            None => r.w_f.is_empty() && !r.delta_converged,
        })
    }
}

impl fmt::Display for TotalizationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "# stage {} psi-fuel {} delta-fuel {} slack {}",
            self.stage, self.psi_fuel, self.delta_fuel, TOTALIZER_FUEL_SLACK
        )?;
        for r in &self.records {
            let psi = match &r.psi_value {
                Some(v) => format!("psi={v}"),
                None => "psi=none-within-budget".to_string(),
            };
            let w_psi = match &r.w_psi {
                Some(w) => format!("|W_psi|={}", w.len()),
                None => "|W_psi|=-".to_string(),
            };
            let delta = if r.delta_converged {
                "delta(f(n))=converged"
            } else {
                "delta(f(n))=none-within-budget"
            };
            writeln!(f, "n={} {psi} |W_f|={} {w_psi} {delta}", r.n, r.w_f.len())?;
        }
        write!(f, "consistent: {}", if self.consistent() { "yes" } else { "NO" })
    }
}

/// Evaluate a totalizer on `ns`. `W_{f(n)}` is enumerated below `stage`
/// with `stage + TOTALIZER_FUEL_SLACK` fuel; `W_{ψ(n)}` with `stage`.
pub fn totalization_report(
    t: &Totalizer,
    ns: &[Nat],
    stage: u64,
    psi_fuel: u64,
    delta_fuel: u64,
) -> TotalizationReport {
    let records = ns
        .iter()
        .map(|n| {
            let f_n = t.at(n);
            let psi_value = phi(&t.psi, n.clone(), psi_fuel).value().cloned().map(Code);
            let w_f = w_enum_at(&f_n, stage, stage + TOTALIZER_FUEL_SLACK);
            let w_psi = psi_value.as_ref().map(|v| w_enum(v, stage));
            let delta_converged = phi(&t.delta.code, f_n.0.clone(), delta_fuel).is_converged();
            TotalizationRecord {
                n: n.clone(),
                f_n,
                psi_value,
                w_f,
                w_psi,
                delta_converged,
            }
        })
        .collect();
    TotalizationReport {
        stage,
        psi_fuel,
        delta_fuel,
        records,
    }
}

/// `g(e) = φ_f(c(e))` where `φ_{c(e)} ≃ φ_{φ_e(e)}`. If `f` is φ-FPF then
/// `g` is DNC.
#[derive(Clone, Debug)]
pub struct Dnc {
    pub f: Code,
    c_code: Code,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DncValue {
    Value(Nat),
    Undetermined,
}

impl Dnc {
    pub fn c(&self, e: &Code) -> Code {
        smn(&self.c_code, e.nat())
    }

    pub fn g(&self, e: &Code, fuel: u64) -> DncValue {
        match phi(&self.f, self.c(e).0, fuel) {
            EvalOutcome::Converged { value, .. } => DncValue::Value(value),
            EvalOutcome::Exhausted { .. } => DncValue::Undetermined,
        }
    }
}

pub fn dnc_from_phifpf(f: &Code) -> Dnc {
    let z = id;
    let diag = univ_of(left_of(z()), left_of(z()));
    let c = univ_of(diag, right_of(z()));
    Dnc {
        f: f.clone(),
        c_code: encode(&c),
    }
}

/// `a ↦ code of succ ∘ φ_a`: φ-FPF on every `a` with nonempty domain.
pub fn succ_wrapper() -> Code {
    let succ = encode(&Term::succ()).0;
    encode(&quote_comp(konst(1, succ), vec![id()]))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Finding {
    /// `W_a` and `W_{δ(a)}` differ at the stage (consistent with FPF).
    Discrepancy { a_only: Option<u64>, delta_only: Option<u64> },
    /// Equal at the stage: suspicious, not a disproof.
    SetsEqual,
    /// `δ(a)` did not converge within the stage.
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpfProbeReport {
    pub stage: u64,
    pub rows: Vec<(u64, Finding)>,
}

impl FpfProbeReport {
    fn count(&self, pred: impl Fn(&Finding) -> bool) -> usize {
        self.rows.iter().filter(|(_, f)| pred(f)).count()
    }

    pub fn discrepancies(&self) -> usize {
        self.count(|f| matches!(f, Finding::Discrepancy { .. }))
    }

    pub fn sets_equal(&self) -> usize {
        self.count(|f| matches!(f, Finding::SetsEqual))
    }

    pub fn undetermined(&self) -> usize {
        self.count(|f| matches!(f, Finding::Undetermined))
    }
}

impl fmt::Display for FpfProbeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# stage {}", self.stage)?;
        for (a, finding) in &self.rows {
            match finding {
                Finding::Discrepancy { a_only, delta_only } => {
                    let show = |v: &Option<u64>| v.map_or("-".to_string(), |v| v.to_string());
                    writeln!(
                        f,
                        "a={a} discrepancy (in W_a only: {}, in W_delta(a) only: {})",
                        show(a_only),
                        show(delta_only)
                    )?
                }
                Finding::SetsEqual => writeln!(f, "a={a} sets equal at stage")?,
                Finding::Undetermined => writeln!(f, "a={a} delta undetermined")?,
            }
        }
        write!(
            f,
            "discrepancies {} sets-equal {} undetermined {}",
            self.discrepancies(),
            self.sets_equal(),
            self.undetermined()
        )
    }
}

/// Compare `W_{a,stage}` with `W_{δ(a),stage}` for `a ≤ code_bound`,
/// running `δ(a)` with `stage` fuel.
pub fn fpf_probe(delta: &Code, code_bound: u64, stage: u64) -> FpfProbeReport {
    fpf_probe_with(delta, code_bound, stage, stage)
}

/// [`fpf_probe`] with a separate fuel for `δ(a)`.
pub fn fpf_probe_with(delta: &Code, code_bound: u64, stage: u64, delta_fuel: u64) -> FpfProbeReport {
    let mut m = Machine::new(None);
    let rows = (0..=code_bound)
        .map(|a| {
            let finding = match m.phi(delta, &Nat::small(a), delta_fuel).outcome {
                EvalOutcome::Exhausted { .. } => Finding::Undetermined,
                EvalOutcome::Converged { value, .. } => {
                    let wa = w_enum(&Code::from(a), stage);
                    let wd = w_enum(&Code(value), stage);
                    if wa == wd {
                        Finding::SetsEqual
                    } else {
                        Finding::Discrepancy {
                            a_only: wa.difference(&wd).next().copied(),
                            delta_only: wd.difference(&wa).next().copied(),
                        }
                    }
                }
            };
            (a, finding)
        })
        .collect();
    FpfProbeReport { stage, rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bottom() -> Code {
        encode(&Term::bottom())
    }

    fn konst_code(v: u64) -> Code {
        encode(&Term::constant(v))
    }

    #[test]
    fn race_examples() {
        let succ = encode(&Term::succ());
        let r = race(&bottom(), &Nat::zero(), &konst_code(succ.0.to_u64().unwrap()), &Nat::zero());
        assert_eq!(phi(&r, 4u64, 100_000).value(), Some(&Nat::small(5)));
        let r = race(&bottom(), &Nat::zero(), &bottom(), &Nat::zero());
        assert!(!phi(&r, 0u64, 100_000).is_converged());
        // tie: both constants take one step; the second branch is followed
        let k1 = konst_code(konst_code(1).0.to_u64().unwrap());
        let k2 = konst_code(konst_code(2).0.to_u64().unwrap());
        let r = race(&k1, &Nat::zero(), &k2, &Nat::zero());
        assert_eq!(phi(&r, 9u64, 100_000).value(), Some(&Nat::small(2)));
        assert_eq!(r, race(&k1, &Nat::zero(), &k2, &Nat::zero()));
    }

    #[test]
    fn empty_avoider_examples() {
        let d = empty_avoider(&bottom());
        assert_eq!(phi(&d.code, encode(&Term::succ()).0, 100_000).value(), Some(bottom().nat()));
        assert!(!phi(&d.code, bottom().0, 1_000_000).is_converged());
        assert!(w_enum(&bottom(), 1000).is_empty());
        assert!(!w_enum(&encode(&Term::succ()), 1000).is_empty());
    }

    #[test]
    fn zero_avoider_is_fpf_where_defined() {
        let all_but_zero = all_but_zero_code();
        assert_eq!(w_enum_at(&all_but_zero, 20, 100), (1..20).collect());
        let d = zero_avoider();
        let succ = encode(&Term::succ());
        assert_eq!(phi(&d.code, succ.0, 1000).value(), Some(all_but_zero.nat()));
        assert!(!phi(&d.code, all_but_zero.0.clone(), 100_000).is_converged());
    }

    #[test]
    fn hat_delta_extends_the_domain() {
        let dh = hat_delta(&zero_avoider(), &bottom());
        // 0 ∉ W but W ≠ ∅: only the avoider branch can answer
        let v = phi(&dh.code, all_but_zero_code().0, 1_000_000);
        assert_eq!(v.value(), Some(bottom().nat()));
        assert!(phi(&dh.code, encode(&Term::succ()).0, 1_000_000).is_converged());
        assert!(!phi(&dh.code, bottom().0, 1_000_000).is_converged());
    }

    #[test]
    fn fpf_probe_on_identity_and_bottom() {
        let ident = encode(&id());
        let r = fpf_probe(&ident, 20, 50);
        assert_eq!(r.sets_equal(), 21);
        let r = fpf_probe(&bottom(), 20, 50);
        assert_eq!(r.undetermined(), 21);
    }

    #[test]
    fn dnc_construction_law() {
        let dnc = dnc_from_phifpf(&succ_wrapper());
        let cb = const_builder_code();
        // φ_cb(cb) = code of (const cb)
        let c = dnc.c(&cb);
        assert_eq!(phi(&c, 3u64, 10_000).value(), Some(cb.nat()));
        let DncValue::Value(g) = dnc.g(&cb, 10_000) else { panic!() };
        assert_ne!(&g, encode(&Term::constant(cb.0.clone())).nat());
    }

    #[test]
    fn parity_psi_sample() {
        let psi = parity_psi();
        for n in 0..10u64 {
            let out = phi(&psi, n, 100_000);
            if n % 2 == 0 {
                assert_eq!(out.value(), Some(konst_code(n).nat()));
            } else {
                assert!(!out.is_converged());
            }
        }
    }
}
