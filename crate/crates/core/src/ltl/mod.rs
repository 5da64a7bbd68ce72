//! LTL syntax trees over service names, normalization, and the reference
//! semantics on ultimately periodic words.

mod lasso;
mod parse;

pub use lasso::eval_lasso;
pub use parse::{parse_ltl, ParseError};

use std::fmt;

/// LTL formula over atomic propositions (service names).
///
/// The surface grammar exposes `true`, `false`, atoms, `!`, `&`, `|`, `X`,
/// `F`, `G` and `U`; `R` only arises internally as the dual of `U` during
/// negation normalization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Finally(Box<Formula>),
    Globally(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn finally(f: Formula) -> Self {
        Formula::Finally(Box::new(f))
    }

    pub fn globally(f: Formula) -> Self {
        Formula::Globally(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Formula, b: Formula) -> Self {
        Formula::Release(Box::new(a), Box::new(b))
    }

    /// Collects atom names in first-occurrence order.
    pub fn atoms(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.walk(&mut |f| {
            if let Formula::Atom(a) = f {
                if !out.contains(&a.as_str()) {
                    out.push(a.as_str());
                }
            }
        });
        out
    }

    fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => {}
            Formula::Not(a) | Formula::Next(a) | Formula::Finally(a) | Formula::Globally(a) => {
                a.walk(f)
            }
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Until(a, b)
            | Formula::Release(a, b) => {
                a.walk(f);
                b.walk(f);
            }
        }
    }

    /// Negation normal form: negations pushed onto atoms, `F`/`G` rewritten
    /// through `U`/`R`. Idempotent.
    pub fn to_nnf(&self) -> Formula {
        self.nnf(false)
    }

    fn nnf(&self, negated: bool) -> Formula {
        match self {
            Formula::True => {
                if negated {
                    Formula::False
                } else {
                    Formula::True
                }
            }
            Formula::False => {
                if negated {
                    Formula::True
                } else {
                    Formula::False
                }
            }
            Formula::Atom(_) => {
                if negated {
                    Formula::not(self.clone())
                } else {
                    self.clone()
                }
            }
            Formula::Not(a) => a.nnf(!negated),
            Formula::And(a, b) => {
                let (a, b) = (a.nnf(negated), b.nnf(negated));
                if negated {
                    Formula::or(a, b)
                } else {
                    Formula::and(a, b)
                }
            }
            Formula::Or(a, b) => {
                let (a, b) = (a.nnf(negated), b.nnf(negated));
                if negated {
                    Formula::and(a, b)
                } else {
                    Formula::or(a, b)
                }
            }
            Formula::Next(a) => Formula::next(a.nnf(negated)),
            // F p = true U p, G p = false R p.
            Formula::Finally(a) => {
                let a = a.nnf(negated);
                if negated {
                    Formula::release(Formula::False, a)
                } else {
                    Formula::until(Formula::True, a)
                }
            }
            Formula::Globally(a) => {
                let a = a.nnf(negated);
                if negated {
                    Formula::until(Formula::True, a)
                } else {
                    Formula::release(Formula::False, a)
                }
            }
            Formula::Until(a, b) => {
                let (a, b) = (a.nnf(negated), b.nnf(negated));
                if negated {
                    Formula::release(a, b)
                } else {
                    Formula::until(a, b)
                }
            }
            Formula::Release(a, b) => {
                let (a, b) = (a.nnf(negated), b.nnf(negated));
                if negated {
                    Formula::until(a, b)
                } else {
                    Formula::release(a, b)
                }
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Or(..) => 1,
            Formula::And(..) => 2,
            Formula::Until(..) | Formula::Release(..) => 3,
            _ => 4,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, c: &Formula, min: u8) -> fmt::Result {
            if c.precedence() < min {
                write!(f, "({c})")
            } else {
                write!(f, "{c}")
            }
        }
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(a) => {
                write!(f, "!")?;
                child(f, a, 4)
            }
            Formula::Next(a) => {
                write!(f, "X ")?;
                child(f, a, 4)
            }
            Formula::Finally(a) => {
                write!(f, "F ")?;
                child(f, a, 4)
            }
            Formula::Globally(a) => {
                write!(f, "G ")?;
                child(f, a, 4)
            }
            Formula::And(a, b) => {
                child(f, a, 2)?;
                write!(f, " & ")?;
                child(f, b, 2)
            }
            Formula::Or(a, b) => {
                child(f, a, 1)?;
                write!(f, " | ")?;
                child(f, b, 1)
            }
            // U is right-associative: parenthesize a left child of equal
            // precedence, keep a right one bare.
            Formula::Until(a, b) => {
                child(f, a, 4)?;
                write!(f, " U ")?;
                child(f, b, 3)
            }
            Formula::Release(a, b) => {
                child(f, a, 4)?;
                write!(f, " R ")?;
                child(f, b, 3)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Formula {
        Formula::atom("a")
    }

    fn b() -> Formula {
        Formula::atom("b")
    }

    #[test]
    fn nnf_de_morgan() {
        let f = Formula::not(Formula::or(a(), b()));
        assert_eq!(f.to_nnf(), Formula::and(Formula::not(a()), Formula::not(b())));
    }

    #[test]
    fn nnf_next_self_dual() {
        let f = Formula::not(Formula::next(a()));
        assert_eq!(f.to_nnf(), Formula::next(Formula::not(a())));
    }

    #[test]
    fn nnf_until_release_duality() {
        let f = Formula::not(Formula::until(a(), b()));
        assert_eq!(
            f.to_nnf(),
            Formula::release(Formula::not(a()), Formula::not(b()))
        );
    }

    #[test]
    fn nnf_rewrites_finally_globally() {
        assert_eq!(
            Formula::finally(a()).to_nnf(),
            Formula::until(Formula::True, a())
        );
        assert_eq!(
            Formula::globally(a()).to_nnf(),
            Formula::release(Formula::False, a())
        );
    }

    #[test]
    fn nnf_idempotent() {
        let f = Formula::not(Formula::until(
            Formula::globally(a()),
            Formula::not(Formula::finally(b())),
        ));
        let once = f.to_nnf();
        assert_eq!(once.to_nnf(), once);
    }

    #[test]
    fn display_respects_precedence() {
        let f = Formula::and(Formula::until(a(), b()), Formula::or(a(), b()));
        assert_eq!(f.to_string(), "a U b & (a | b)");
    }
}
