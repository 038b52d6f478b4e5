use std::fmt;
use std::sync::Arc;

use super::nat::Nat;

/// Largest arity a term may have. Codes asking for more decode to `Bottom`.
pub const MAX_ARITY: usize = 1 << 16;

/// A well-formed program. Construction goes through checked constructors,
/// so every `Term` has a definite arity.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Term(Arc<Inner>);

#[derive(PartialEq, Eq, Hash)]
struct Inner {
    node: Node,
    arity: usize,
}

/// The shape of a term.
///
/// Argument conventions: `PrimRec(base, step)` takes `(x⃗, y)` and calls
/// `step(x⃗, i, previous)`; `Mu(body)` takes `x⃗` and searches the last
/// argument of `body(x⃗, t)` for a zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Zero(usize),
    Succ,
    Proj { arity: usize, index: usize },
    Comp { outer: Term, inners: Vec<Term> },
    PrimRec { base: Term, step: Term },
    Mu(Term),
    Univ,
    Query,
    Bottom,
    /// Unary constant function.
    Const(Nat),
    /// Cantor pairing, binary.
    Pair,
    /// First Cantor projection.
    Left,
    /// Second Cantor projection.
    Right,
    /// Code pairing, binary.
    Cons,
    /// Step-bounded universal function on `⟨e, ⟨n, t⟩⟩`.
    Clock,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("projection index {index} is not below arity {arity}")]
    ProjIndex { arity: usize, index: usize },
    #[error("arity {0} exceeds the limit {MAX_ARITY}")]
    TooWide(usize),
    #[error("composition needs at least one inner term")]
    EmptyComp,
    #[error("composition outer term has arity {outer} but {inners} inner terms were given")]
    CompOuter { outer: usize, inners: usize },
    #[error("composition inner terms disagree on arity ({first} vs {other})")]
    CompInner { first: usize, other: usize },
    #[error("primitive recursion step has arity {step}, expected {expected}")]
    PrimRecStep { step: usize, expected: usize },
    #[error("minimisation body must have arity at least 1")]
    MuNullary,
}

impl Term {
    fn make(node: Node, arity: usize) -> Term {
        Term(Arc::new(Inner { node, arity }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub fn arity(&self) -> usize {
        self.0.arity
    }

    pub fn zero(arity: usize) -> Result<Term, TermError> {
        if arity > MAX_ARITY {
            return Err(TermError::TooWide(arity));
        }
        Ok(Term::make(Node::Zero(arity), arity))
    }

    pub fn succ() -> Term {
        Term::make(Node::Succ, 1)
    }

    pub fn proj(arity: usize, index: usize) -> Result<Term, TermError> {
        if arity > MAX_ARITY {
            return Err(TermError::TooWide(arity));
        }
        if index >= arity {
            return Err(TermError::ProjIndex { arity, index });
        }
        Ok(Term::make(Node::Proj { arity, index }, arity))
    }

    pub fn comp(outer: Term, inners: Vec<Term>) -> Result<Term, TermError> {
        let first = inners.first().ok_or(TermError::EmptyComp)?.arity();
        if outer.arity() != inners.len() {
            return Err(TermError::CompOuter {
                outer: outer.arity(),
                inners: inners.len(),
            });
        }
        if let Some(bad) = inners.iter().find(|t| t.arity() != first) {
            return Err(TermError::CompInner {
                first,
                other: bad.arity(),
            });
        }
        Ok(Term::make(Node::Comp { outer, inners }, first))
    }

    pub fn prim_rec(base: Term, step: Term) -> Result<Term, TermError> {
        let k = base.arity();
        if k + 1 > MAX_ARITY {
            return Err(TermError::TooWide(k + 1));
        }
        if step.arity() != k + 2 {
            return Err(TermError::PrimRecStep {
                step: step.arity(),
                expected: k + 2,
            });
        }
        Ok(Term::make(Node::PrimRec { base, step }, k + 1))
    }

    pub fn mu(body: Term) -> Result<Term, TermError> {
        let k = body.arity().checked_sub(1).ok_or(TermError::MuNullary)?;
        Ok(Term::make(Node::Mu(body), k))
    }

    pub fn univ() -> Term {
        Term::make(Node::Univ, 1)
    }

    pub fn query() -> Term {
        Term::make(Node::Query, 1)
    }

    pub fn bottom() -> Term {
        Term::make(Node::Bottom, 1)
    }

    pub fn constant(value: impl Into<Nat>) -> Term {
        Term::make(Node::Const(value.into()), 1)
    }

    pub fn pair() -> Term {
        Term::make(Node::Pair, 2)
    }

    pub fn left() -> Term {
        Term::make(Node::Left, 1)
    }

    pub fn right() -> Term {
        Term::make(Node::Right, 1)
    }

    pub fn cons() -> Term {
        Term::make(Node::Cons, 2)
    }

    pub fn clock() -> Term {
        Term::make(Node::Clock, 1)
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Comp { outer, inners } => {
                1 + outer.size() + inners.iter().map(Term::size).sum::<usize>()
            }
            Node::PrimRec { base, step } => 1 + base.size() + step.size(),
            Node::Mu(body) => 1 + body.size(),
            _ => 1,
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::syntax::pretty(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::syntax::pretty(self))
    }
}
