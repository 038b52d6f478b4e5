//! Program text.
//!
//! ```text
//! term := "zero" k | "succ" | "(proj" k i ")" | "(comp" term "(" term* ")" ")"
//!       | "(primrec" term term ")" | "(mu" term ")" | "univ" | "query" | "bottom"
//!       | "(const" k ")" | "pair" | "left" | "right" | "cons" | "clock"
//! ```
//!
//! Naturals are decimal, whitespace is insignificant and `;` starts a comment
//! running to the end of the line.

use std::fmt::Write as _;

use super::nat::Nat;
use super::term::{Node, Term, TermError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{line}:{col}: arity error: {source}")]
    Arity {
        line: usize,
        col: usize,
        source: TermError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    Word(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Vec<Spanned> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (l, cl) = (line, col);
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            ';' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                    col += 1;
                }
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '(' | ')' => {
                chars.next();
                col += 1;
                let tok = if c == '(' { Tok::Open } else { Tok::Close };
                out.push(Spanned { tok, line: l, col: cl });
            }
            _ => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    word.push(c);
                    chars.next();
                    col += 1;
                }
                out.push(Spanned {
                    tok: Tok::Word(word),
                    line: l,
                    col: cl,
                });
            }
        }
    }
    out
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|t| (t.line, t.col))
            .unwrap_or(self.end)
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError::Syntax {
            line,
            col,
            message: message.into(),
        })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn expect_close(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Close) => {
                self.pos += 1;
                Ok(())
            }
            _ => self.syntax("expected `)`"),
        }
    }

    fn natural(&mut self) -> Result<Nat, ParseError> {
        match self.peek() {
            Some(Tok::Word(w)) => match w.parse::<Nat>() {
                Ok(n) => {
                    self.pos += 1;
                    Ok(n)
                }
                Err(_) => self.syntax(format!("expected a natural, found `{w}`")),
            },
            _ => self.syntax("expected a natural"),
        }
    }

    fn small(&mut self) -> Result<usize, ParseError> {
        let at = self.here();
        let n = self.natural()?;
        n.to_usize().ok_or(ParseError::Syntax {
            line: at.0,
            col: at.1,
            message: format!("{n} is too large here"),
        })
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let (line, col) = self.here();
        let arity = |r: Result<Term, TermError>| r.map_err(|source| ParseError::Arity { line, col, source });
        match self.next() {
            None => self.syntax("unexpected end of input"),
            Some(Tok::Close) => {
                self.pos -= 1;
                self.syntax("unexpected `)`")
            }
            Some(Tok::Word(w)) => match w.as_str() {
                "zero" => {
                    let k = self.small()?;
                    arity(Term::zero(k))
                }
                "succ" => Ok(Term::succ()),
                "univ" => Ok(Term::univ()),
                "query" => Ok(Term::query()),
                "bottom" => Ok(Term::bottom()),
                "pair" => Ok(Term::pair()),
                "left" => Ok(Term::left()),
                "right" => Ok(Term::right()),
                "cons" => Ok(Term::cons()),
                "clock" => Ok(Term::clock()),
                _ => {
                    self.pos -= 1;
                    self.syntax(format!("unknown atom `{w}`"))
                }
            },
            Some(Tok::Open) => {
                let head = match self.next() {
                    Some(Tok::Word(w)) => w,
                    _ => {
                        self.pos = self.pos.saturating_sub(1);
                        return self.syntax("expected a form name after `(`");
                    }
                };
                let t = match head.as_str() {
                    "proj" => {
                        let k = self.small()?;
                        let i = self.small()?;
                        arity(Term::proj(k, i))?
                    }
                    "const" => Term::constant(self.natural()?),
                    "mu" => {
                        let body = self.term()?;
                        arity(Term::mu(body))?
                    }
                    "primrec" => {
                        let base = self.term()?;
                        let step = self.term()?;
                        arity(Term::prim_rec(base, step))?
                    }
                    "comp" => {
                        let outer = self.term()?;
                        match self.next() {
                            Some(Tok::Open) => {}
                            _ => {
                                self.pos -= 1;
                                return self.syntax("expected `(` before the inner terms");
                            }
                        }
                        let mut inners = Vec::new();
                        while !matches!(self.peek(), Some(Tok::Close) | None) {
                            inners.push(self.term()?);
                        }
                        self.expect_close()?;
                        arity(Term::comp(outer, inners))?
                    }
                    other => {
                        self.pos -= 1;
                        return self.syntax(format!("unknown form `{other}`"));
                    }
                };
                self.expect_close()?;
                Ok(t)
            }
        }
    }
}

/// Parse a single program.
pub fn parse(text: &str) -> Result<Term, ParseError> {
    let lines: Vec<&str> = text.split('\n').collect();
    let end = (lines.len(), lines.last().map_or(0, |l| l.chars().count()) + 1);
    let mut p = Parser {
        toks: lex(text),
        pos: 0,
        end,
    };
    let t = p.term()?;
    if p.pos < p.toks.len() {
        return p.syntax("trailing input after the program");
    }
    Ok(t)
}

/// Canonical text of a term; `parse(&pretty(t)) == Ok(t)`.
pub fn pretty(t: &Term) -> String {
    let mut out = String::new();
    write_term(&mut out, t);
    out
}

fn write_term(out: &mut String, t: &Term) {
    match t.node() {
        Node::Zero(k) => {
            let _ = write!(out, "zero {k}");
        }
        Node::Succ => out.push_str("succ"),
        Node::Proj { arity, index } => {
            let _ = write!(out, "(proj {arity} {index})");
        }
        Node::Comp { outer, inners } => {
            out.push_str("(comp ");
            write_term(out, outer);
            out.push_str(" (");
            for (i, inner) in inners.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write_term(out, inner);
            }
            out.push_str("))");
        }
        Node::PrimRec { base, step } => {
            out.push_str("(primrec ");
            write_term(out, base);
            out.push(' ');
            write_term(out, step);
            out.push(')');
        }
        Node::Mu(body) => {
            out.push_str("(mu ");
            write_term(out, body);
            out.push(')');
        }
        Node::Univ => out.push_str("univ"),
        Node::Query => out.push_str("query"),
        Node::Bottom => out.push_str("bottom"),
        Node::Const(k) => {
            let _ = write!(out, "(const {k})");
        }
        Node::Pair => out.push_str("pair"),
        Node::Left => out.push_str("left"),
        Node::Right => out.push_str("right"),
        Node::Cons => out.push_str("cons"),
        Node::Clock => out.push_str("clock"),
    }
}
