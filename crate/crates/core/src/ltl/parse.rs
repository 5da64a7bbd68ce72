//! Concrete syntax for LTL formulas.
//!
//! Grammar (operator precedence `unary > U > & > |`, `U` right-associative):
//!
//! ```text
//! phi := "true" | "false" | ident
//!      | "!" phi | "X" phi | "F" phi | "G" phi
//!      | phi "U" phi | phi "&" phi | phi "|" phi
//!      | "(" phi ")"
//! ```

use super::Formula;
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at position {}: {}", self.pos, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Next,
    Finally,
    Globally,
    Until,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '!' => {
                out.push((i, Tok::Not));
                i += 1;
            }
            '&' => {
                out.push((i, Tok::And));
                i += 1;
            }
            '|' => {
                out.push((i, Tok::Or));
                i += 1;
            }
            '(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "X" => Tok::Next,
                    "F" => Tok::Finally,
                    "G" => Tok::Globally,
                    "U" => Tok::Until,
                    _ => Tok::Ident(word.to_string()),
                };
                out.push((start, tok));
            }
            other => {
                return Err(ParseError {
                    pos: i,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    alphabet: &'a BTreeSet<String>,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            pos: self.here(),
            message: message.into(),
        }
    }

    // or := and ("|" and)*
    fn parse_or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.parse_and()?;
        while self.peek() == Some(&Tok::Or) {
            self.bump();
            let rhs = self.parse_and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    // and := until ("&" until)*
    fn parse_and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.parse_until()?;
        while self.peek() == Some(&Tok::And) {
            self.bump();
            let rhs = self.parse_until()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    // until := unary ("U" until)?   (right-associative)
    fn parse_until(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.parse_unary()?;
        if self.peek() == Some(&Tok::Until) {
            self.bump();
            let rhs = self.parse_until()?;
            return Ok(Formula::until(lhs, rhs));
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Not) => {
                self.bump();
                Ok(Formula::not(self.parse_unary()?))
            }
            Some(Tok::Next) => {
                self.bump();
                Ok(Formula::next(self.parse_unary()?))
            }
            Some(Tok::Finally) => {
                self.bump();
                Ok(Formula::finally(self.parse_unary()?))
            }
            Some(Tok::Globally) => {
                self.bump();
                Ok(Formula::globally(self.parse_unary()?))
            }
            _ => self.parse_primary(),
        }
    }

    fn parse_primary(&mut self) -> Result<Formula, ParseError> {
        let at = self.here();
        match self.bump() {
            Some(Tok::True) => Ok(Formula::True),
            Some(Tok::False) => Ok(Formula::False),
            Some(Tok::Ident(name)) => {
                if !self.alphabet.contains(&name) {
                    return Err(ParseError {
                        pos: at,
                        message: format!("unknown identifier `{name}`"),
                    });
                }
                Ok(Formula::Atom(name))
            }
            Some(Tok::LParen) => {
                let inner = self.parse_or()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(ParseError {
                        pos: self.here(),
                        message: "expected `)`".into(),
                    }),
                }
            }
            Some(other) => Err(ParseError {
                pos: at,
                message: format!("unexpected token {other:?}"),
            }),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Parses `text` into a [`Formula`], checking every identifier against
/// `alphabet`.
pub fn parse_ltl(text: &str, alphabet: &BTreeSet<String>) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        alphabet,
        end: text.len(),
    };
    let f = p.parse_or()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> BTreeSet<String> {
        ["a", "b", "s2"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_nested_temporal_operators() {
        let f = parse_ltl("G F s2", &ab()).unwrap();
        assert_eq!(f, Formula::globally(Formula::finally(Formula::atom("s2"))));
    }

    #[test]
    fn parses_single_atom() {
        assert_eq!(parse_ltl("a", &ab()).unwrap(), Formula::atom("a"));
    }

    #[test]
    fn parses_conjunction_with_next() {
        let f = parse_ltl("a & X (a & b)", &ab()).unwrap();
        assert_eq!(
            f,
            Formula::and(
                Formula::atom("a"),
                Formula::next(Formula::and(Formula::atom("a"), Formula::atom("b")))
            )
        );
    }

    #[test]
    fn precedence_until_binds_tighter_than_and() {
        let f = parse_ltl("a U b & a", &ab()).unwrap();
        assert_eq!(
            f,
            Formula::and(Formula::until(Formula::atom("a"), Formula::atom("b")), Formula::atom("a"))
        );
    }

    #[test]
    fn until_is_right_associative() {
        let f = parse_ltl("a U b U a", &ab()).unwrap();
        assert_eq!(
            f,
            Formula::until(
                Formula::atom("a"),
                Formula::until(Formula::atom("b"), Formula::atom("a"))
            )
        );
    }

    #[test]
    fn unknown_identifier_reports_position() {
        let err = parse_ltl("a & zz", &ab()).unwrap_err();
        assert_eq!(err.pos, 4);
        assert!(err.message.contains("zz"));
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = parse_ltl("a & ", &ab()).unwrap_err();
        assert_eq!(err.pos, 4);
        let err = parse_ltl("(a | b", &ab()).unwrap_err();
        assert!(err.message.contains(")"));
    }

    #[test]
    fn display_parse_roundtrip() {
        for text in ["G F s2", "a & X (a & b)", "!(a U b) | F s2", "a U b U a"] {
            let f = parse_ltl(text, &ab()).unwrap();
            let again = parse_ltl(&f.to_string(), &ab()).unwrap();
            assert_eq!(f, again, "roundtrip of `{text}` via `{f}`");
        }
    }
}
