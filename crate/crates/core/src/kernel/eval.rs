//! Fuel-bounded evaluation.
//!
//! Cost table (one shared budget, nested `univ`/`clock` runs draw from it):
//!
//! | rule                                         | cost                          |
//! |----------------------------------------------|-------------------------------|
//! | `zero`, `succ`, `proj`, `const`, `pair`, `left`, `right`, `cons`, `query` | 1 |
//! | `comp`                                       | 1 + inner and outer runs      |
//! | `primrec` at `y`                             | 1 + base + `y` × (1 + step)   |
//! | `mu`                                         | per candidate: 1 + body       |
//! | `univ`                                       | 2 (apply + decode) + inner    |
//! | `clock` on `⟨e,⟨n,t⟩⟩`                        | 2 + min(inner steps, t)       |
//! | `bottom`, `query` without an oracle          | all remaining fuel            |
//!
//! `clock` answers `0` when `φ_e(n)` does not converge within `t` steps and
//! `⟨1,⟨steps,value⟩⟩` otherwise. When `t` exceeds the fuel left, the inner
//! run gets what is left and running out of it exhausts the outer run too,
//! which keeps outcomes monotone in fuel.
//!
//! `primrec` whose counter exceeds the remaining fuel exhausts at once; it
//! could not have finished anyway.
//!
//! Space is bounded too: a `succ`, `pair` or `cons` whose result could
//! exceed [`MAX_VALUE_BITS`] exhausts the run. Unit-cost pairing can
//! otherwise double a value's length at every step.

use std::cell::Cell;
use std::collections::{BTreeSet, HashMap};

use super::code::{decode_any, Code};
use super::nat::Nat;
use super::term::{Node, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EvalOutcome {
    Converged { value: Nat, steps: u64 },
    Exhausted { fuel: u64 },
}

impl EvalOutcome {
    pub fn value(&self) -> Option<&Nat> {
        match self {
            EvalOutcome::Converged { value, .. } => Some(value),
            EvalOutcome::Exhausted { .. } => None,
        }
    }

    pub fn steps(&self) -> Option<u64> {
        match self {
            EvalOutcome::Converged { steps, .. } => Some(*steps),
            EvalOutcome::Exhausted { .. } => None,
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(self, EvalOutcome::Converged { .. })
    }
}

/// A finite approximation `A_s` of an oracle set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OracleContext {
    members: BTreeSet<u64>,
}

impl OracleContext {
    pub fn new() -> OracleContext {
        OracleContext::default()
    }

    pub fn insert(&mut self, n: u64) -> bool {
        self.members.insert(n)
    }

    pub fn contains(&self, n: &Nat) -> bool {
        n.to_u64().is_some_and(|v| self.members.contains(&v))
    }

    pub fn members(&self) -> &BTreeSet<u64> {
        &self.members
    }
}

impl FromIterator<u64> for OracleContext {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> OracleContext {
        OracleContext {
            members: iter.into_iter().collect(),
        }
    }
}

/// Outcome of one run together with the largest oracle question asked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub outcome: EvalOutcome,
    pub max_query: Option<Nat>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("term has arity {expected} but {got} arguments were supplied")]
    Arity { expected: usize, got: usize },
}

thread_local! {
    static RUNS: Cell<u64> = const { Cell::new(0) };
}

/// Number of evaluations started on this thread so far.
pub fn eval_count() -> u64 {
    RUNS.with(Cell::get)
}

/// Largest value a run may build, in bits.
pub const MAX_VALUE_BITS: u64 = 1 << 20;

struct OutOfFuel;

type Step<T> = Result<T, OutOfFuel>;

/// Evaluator state. Reusable across runs; the decode cache survives, fuel
/// and the recorded use do not.
pub struct Machine<'o> {
    fuel: u64,
    oracle: Option<&'o OracleContext>,
    max_query: Option<Nat>,
    small_codes: HashMap<u64, Term>,
    // keyed by allocation; the Nat is kept so the key stays valid
    node_codes: HashMap<usize, (Nat, Term)>,
}

impl<'o> Machine<'o> {
    pub fn new(oracle: Option<&'o OracleContext>) -> Machine<'o> {
        Machine {
            fuel: 0,
            oracle,
            max_query: None,
            small_codes: HashMap::new(),
            node_codes: HashMap::new(),
        }
    }

    pub fn run(&mut self, t: &Term, args: &[Nat], fuel: u64) -> Result<Run, EvalError> {
        if args.len() != t.arity() {
            return Err(EvalError::Arity {
                expected: t.arity(),
                got: args.len(),
            });
        }
        RUNS.with(|c| c.set(c.get() + 1));
        self.fuel = fuel;
        self.max_query = None;
        let outcome = match self.eval(t, args) {
            Ok(value) => EvalOutcome::Converged {
                value,
                steps: fuel - self.fuel,
            },
            Err(OutOfFuel) => EvalOutcome::Exhausted { fuel },
        };
        Ok(Run {
            outcome,
            max_query: self.max_query.take(),
        })
    }

    /// `φ_e(n)`.
    pub fn phi(&mut self, e: &Code, n: &Nat, fuel: u64) -> Run {
        let t = self.decode(e.nat());
        self.run(&t, std::slice::from_ref(n), fuel)
            .expect("decoded programs are unary")
    }

    fn decode(&mut self, c: &Nat) -> Term {
        let fresh = || {
            decode_any(c)
                .filter(|t| t.arity() == 1)
                .unwrap_or_else(Term::bottom)
        };
        match c.to_u64() {
            Some(v) => self.small_codes.entry(v).or_insert_with(fresh).clone(),
            None => self
                .node_codes
                .entry(c.ptr_key())
                .or_insert_with(|| (c.clone(), fresh()))
                .1
                .clone(),
        }
    }

    fn charge(&mut self, n: u64) -> Step<()> {
        if self.fuel < n {
            self.fuel = 0;
            return Err(OutOfFuel);
        }
        self.fuel -= n;
        Ok(())
    }

    fn exhaust<T>(&mut self) -> Step<T> {
        self.fuel = 0;
        Err(OutOfFuel)
    }

    fn bounded(&mut self, v: Nat) -> Step<Nat> {
        if v.bit_bound() > MAX_VALUE_BITS {
            return self.exhaust();
        }
        Ok(v)
    }

    fn eval(&mut self, t: &Term, args: &[Nat]) -> Step<Nat> {
        stacker::maybe_grow(128 * 1024, 4 * 1024 * 1024, || self.eval_node(t, args))
    }

    fn eval_node(&mut self, t: &Term, args: &[Nat]) -> Step<Nat> {
        match t.node() {
            Node::Zero(_) => {
                self.charge(1)?;
                Ok(Nat::zero())
            }
            Node::Succ => {
                self.charge(1)?;
                if args[0].bit_bound() >= MAX_VALUE_BITS {
                    return self.exhaust();
                }
                Ok(args[0].succ())
            }
            Node::Proj { index, .. } => {
                self.charge(1)?;
                Ok(args[*index].clone())
            }
            Node::Const(k) => {
                self.charge(1)?;
                Ok(k.clone())
            }
            Node::Pair => {
                self.charge(1)?;
                self.bounded(Nat::pair(&args[0], &args[1]))
            }
            Node::Left => {
                self.charge(1)?;
                Ok(args[0].unpair().0)
            }
            Node::Right => {
                self.charge(1)?;
                Ok(args[0].unpair().1)
            }
            Node::Cons => {
                self.charge(1)?;
                self.bounded(Nat::cons(&args[0], &args[1]))
            }
            Node::Comp { outer, inners } => {
                self.charge(1)?;
                let mut vals = Vec::with_capacity(inners.len());
                for h in inners {
                    vals.push(self.eval(h, args)?);
                }
                self.eval(outer, &vals)
            }
            Node::PrimRec { base, step } => {
                self.charge(1)?;
                let (xs, y) = args.split_at(args.len() - 1);
                let y = match y[0].to_u64() {
                    Some(y) if y <= self.fuel => y,
                    _ => return self.exhaust(),
                };
                let mut acc = self.eval(base, xs)?;
                let mut frame: Vec<Nat> = xs.to_vec();
                frame.push(Nat::zero());
                frame.push(Nat::zero());
                let k = xs.len();
                for i in 0..y {
                    self.charge(1)?;
                    frame[k] = Nat::small(i);
                    frame[k + 1] = acc;
                    acc = self.eval(step, &frame)?;
                }
                Ok(acc)
            }
            Node::Mu(body) => {
                let mut frame: Vec<Nat> = args.to_vec();
                frame.push(Nat::zero());
                let k = args.len();
                let mut i = 0u64;
                loop {
                    self.charge(1)?;
                    frame[k] = Nat::small(i);
                    if self.eval(body, &frame)?.is_zero() {
                        return Ok(Nat::small(i));
                    }
                    i += 1;
                }
            }
            Node::Univ => {
                self.charge(2)?;
                let (e, n) = args[0].unpair();
                let inner = self.decode(&e);
                self.eval(&inner, &[n])
            }
            Node::Query => {
                let Some(oracle) = self.oracle else {
                    return self.exhaust();
                };
                self.charge(1)?;
                let n = &args[0];
                if self.max_query.as_ref().is_none_or(|m| n > m) {
                    self.max_query = Some(n.clone());
                }
                Ok(Nat::small(u64::from(oracle.contains(n))))
            }
            Node::Bottom => self.exhaust(),
            Node::Clock => {
                self.charge(2)?;
                let (e, rest) = args[0].unpair();
                let (n, t) = rest.unpair();
                let inner = self.decode(&e);
                let saved = self.fuel;
                let (budget, fits) = match t.to_u64() {
                    Some(t) if t <= saved => (t, true),
                    _ => (saved, false),
                };
                self.fuel = budget;
                match self.eval(&inner, &[n]) {
                    Ok(v) => {
                        let used = budget - self.fuel;
                        self.fuel = saved - used;
                        let report = Nat::pair(&Nat::small(used), &v);
                        Ok(Nat::pair(&Nat::small(1), &report))
                    }
                    Err(OutOfFuel) if fits => {
                        self.fuel = saved - budget;
                        Ok(Nat::zero())
                    }
                    Err(OutOfFuel) => self.exhaust(),
                }
            }
        }
    }
}

/// Evaluate `t` on `args`. Arity mismatches are rejected before any step.
pub fn eval(
    t: &Term,
    args: &[Nat],
    oracle: Option<&OracleContext>,
    fuel: u64,
) -> Result<EvalOutcome, EvalError> {
    Machine::new(oracle).run(t, args, fuel).map(|r| r.outcome)
}

/// Like [`eval`], also reporting the largest oracle query.
pub fn eval_run(
    t: &Term,
    args: &[Nat],
    oracle: Option<&OracleContext>,
    fuel: u64,
) -> Result<Run, EvalError> {
    Machine::new(oracle).run(t, args, fuel)
}

/// `φ_e(n)` with `fuel` steps and no oracle.
pub fn phi(e: &Code, n: impl Into<Nat>, fuel: u64) -> EvalOutcome {
    Machine::new(None).phi(e, &n.into(), fuel).outcome
}

/// `φ_e^A(n)` against the approximation `oracle`.
pub fn phi_oracle(e: &Code, n: impl Into<Nat>, oracle: &OracleContext, fuel: u64) -> Run {
    Machine::new(Some(oracle)).phi(e, &n.into(), fuel)
}

/// `W_{e,s} = { n < s : φ_e(n) converges within s steps }`.
pub fn w_enum(e: &Code, s: u64) -> BTreeSet<u64> {
    w_enum_at(e, s, s)
}

/// `{ n < bound : φ_e(n) converges within fuel steps }`.
pub fn w_enum_at(e: &Code, bound: u64, fuel: u64) -> BTreeSet<u64> {
    let mut m = Machine::new(None);
    let t = m.decode(e.nat());
    (0..bound)
        .filter(|&n| {
            m.run(&t, &[Nat::small(n)], fuel)
                .expect("decoded programs are unary")
                .outcome
                .is_converged()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::code::encode;
    use crate::kernel::syntax::parse;

    fn run(src: &str, args: &[u64], fuel: u64) -> EvalOutcome {
        let args: Vec<Nat> = args.iter().map(|&a| Nat::small(a)).collect();
        eval(&parse(src).unwrap(), &args, None, fuel).unwrap()
    }

    #[test]
    fn successor_and_composition() {
        assert_eq!(
            run("succ", &[4], 10),
            EvalOutcome::Converged { value: 5u64.into(), steps: 1 }
        );
        assert_eq!(run("(comp succ (succ))", &[3], 10).value(), Some(&Nat::small(5)));
        assert_eq!(run("(comp succ (succ))", &[3], 10).steps(), Some(3));
    }

    #[test]
    fn unbounded_search_without_a_zero_exhausts() {
        let out = run("(mu (comp succ ((proj 2 1))))", &[0], 1_000_000);
        assert_eq!(out, EvalOutcome::Exhausted { fuel: 1_000_000 });
    }

    #[test]
    fn bottom_and_oracle_free_query_exhaust() {
        assert!(!run("bottom", &[0], 100_000).is_converged());
        assert!(!run("query", &[3], 100).is_converged());
    }

    #[test]
    fn arity_is_checked_before_running() {
        let before = eval_count();
        let err = eval(&Term::pair(), &[Nat::zero()], None, 10).unwrap_err();
        assert_eq!(err, EvalError::Arity { expected: 2, got: 1 });
        assert_eq!(eval_count(), before);
    }

    #[test]
    fn primitive_recursion_adds() {
        let add = "(primrec (proj 1 0) (comp succ ((proj 3 2))))";
        let x = Nat::pair(&3u64.into(), &4u64.into());
        let t = parse(&format!("(comp {add} (left right))")).unwrap();
        assert_eq!(eval(&t, &[x], None, 100).unwrap().value(), Some(&Nat::small(7)));
    }

    #[test]
    fn phi_and_universal_agree() {
        let succ = encode(&Term::succ());
        assert_eq!(phi(&succ, 4u64, 100).value(), Some(&Nat::small(5)));
        let u = encode(&Term::univ());
        let arg = Nat::pair(succ.nat(), &4u64.into());
        assert_eq!(phi(&u, arg, 100).value(), Some(&Nat::small(5)));
        assert!(!phi(&encode(&Term::bottom()), 0u64, 100_000).is_converged());
    }

    #[test]
    fn clock_reports_exact_steps() {
        let cs = encode(&parse("(comp succ (succ))").unwrap());
        let q = |t: u64| Nat::pair(cs.nat(), &Nat::pair(&Nat::small(10), &Nat::small(t)));
        let clock = Term::clock();
        let hit = eval(&clock, &[q(3)], None, 100).unwrap();
        let expect = Nat::pair(&1u64.into(), &Nat::pair(&3u64.into(), &12u64.into()));
        assert_eq!(hit, EvalOutcome::Converged { value: expect, steps: 5 });
        let miss = eval(&clock, &[q(2)], None, 100).unwrap();
        assert_eq!(miss, EvalOutcome::Converged { value: Nat::zero(), steps: 4 });
        // t above the remaining fuel: running dry is exhaustion, not a miss
        assert!(!eval(&clock, &[q(50)], None, 4).unwrap().is_converged());
    }

    #[test]
    fn query_records_use() {
        let a: OracleContext = [2u64, 5].into_iter().collect();
        let t = parse("(comp query ((comp succ (query))))").unwrap();
        let r = eval_run(&t, &[Nat::small(2)], Some(&a), 100).unwrap();
        assert_eq!(r.outcome.value(), Some(&Nat::small(1)));
        assert_eq!(r.max_query, Some(Nat::small(2)));
    }

    #[test]
    fn w_enum_of_identity_grows_with_the_stage() {
        let id = encode(&parse("(proj 1 0)").unwrap());
        assert!(w_enum(&id, 0).is_empty());
        assert_eq!(w_enum(&id, 5), (0..5).collect());
        assert!(w_enum(&encode(&Term::bottom()), 1000).is_empty());
    }

    #[test]
    fn runaway_values_exhaust() {
        // the length quadruples at every round; decoding it would never end
        // and the second one doubles
        let t = parse("(comp univ ((primrec (comp zero 3 (zero 0 zero 0 zero 0)) (comp cons (pair pair)))))").unwrap();
        assert!(!eval(&t, &[Nat::small(60)], None, 100_000).unwrap().is_converged());
        let doubling = parse("(comp succ ((primrec (comp succ (zero 0)) (comp pair ((proj 2 1) (proj 2 1))))))").unwrap();
        assert!(!eval(&doubling, &[Nat::small(40)], None, 100_000).unwrap().is_converged());
        assert!(eval(&doubling, &[Nat::small(10)], None, 100_000).unwrap().is_converged());
    }
}
