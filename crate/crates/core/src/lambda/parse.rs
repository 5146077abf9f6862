//! Parser for the logical-form surface syntax.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! term  := "lambda" VAR ":" type "." term
//!        | "exists" VAR ":" type "." term
//!        | "forall" VAR ":" type "." term
//!        | "and" "(" term { "," term } ")"        (2+ operands)
//!        | "or"  "(" term { "," term } ")"        (2+ operands)
//!        | "not" "(" term ")"
//!        | "implies" "(" term "," term ")"
//!        | "count" "(" term ")"
//!        | "argmax" "(" term "," term ")"
//!        | "argmin" "(" term "," term ")"
//!        | "iota" "(" term ")"
//!        | IDENT [ "(" term { "," term } ")" ]    (variable/constant, application)
//!        | "(" term ")" [ "(" term { "," term } ")" ]
//! type  := "e" [ ":" IDENT ] | "t" | "r" | "<" type "," type ">"
//! ```
//!
//! Application is curried internally: `f(a, b)` is `Apply(Apply(f, a), b)`.

use std::fmt;

use thiserror::Error;

use super::term::{Term, Var};
use super::types::{Ontology, SemType};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("at {pos}: unexpected character `{ch}`")]
    UnexpectedChar { pos: usize, ch: char },
    #[error("at {pos}: expected {expected}, found `{found}`")]
    Expected {
        pos: usize,
        expected: &'static str,
        found: String,
    },
    #[error("at {pos}: unexpected end of input (expected {expected})")]
    UnexpectedEnd { pos: usize, expected: &'static str },
    #[error("at {pos}: unknown constant `{name}`")]
    UnknownConstant { pos: usize, name: String },
    #[error("at {pos}: `{name}` takes {expected} argument(s), found {found}")]
    WrongArity {
        pos: usize,
        name: &'static str,
        expected: &'static str,
        found: usize,
    },
    #[error("at {pos}: trailing input after term")]
    TrailingInput { pos: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    Lt,
    Gt,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::Comma => write!(f, ","),
            Tok::Dot => write!(f, "."),
            Tok::Colon => write!(f, ":"),
            Tok::Lt => write!(f, "<"),
            Tok::Gt => write!(f, ">"),
        }
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut toks = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' => {
                chars.next();
                toks.push((pos, Tok::LParen));
            }
            ')' => {
                chars.next();
                toks.push((pos, Tok::RParen));
            }
            ',' => {
                chars.next();
                toks.push((pos, Tok::Comma));
            }
            '.' => {
                chars.next();
                toks.push((pos, Tok::Dot));
            }
            ':' => {
                chars.next();
                toks.push((pos, Tok::Colon));
            }
            '<' => {
                chars.next();
                toks.push((pos, Tok::Lt));
            }
            '>' => {
                chars.next();
                toks.push((pos, Tok::Gt));
            }
            c if is_ident_char(c) => {
                let mut ident = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if is_ident_char(c) {
                        ident.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push((pos, Tok::Ident(ident)));
            }
            _ => return Err(ParseError::UnexpectedChar { pos, ch: c }),
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
    ont: Option<&'a Ontology>,
    scope: Vec<(String, Var)>,
    next_id: u32,
}

impl<'a> Parser<'a> {
    fn new(text: &str, ont: Option<&'a Ontology>) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            idx: 0,
            end: text.len(),
            ont,
            scope: Vec::new(),
            next_id: 0,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn next(&mut self, expected: &'static str) -> Result<(usize, Tok), ParseError> {
        if self.idx < self.toks.len() {
            let t = self.toks[self.idx].clone();
            self.idx += 1;
            Ok(t)
        } else {
            Err(ParseError::UnexpectedEnd { pos: self.end, expected })
        }
    }

    fn expect(&mut self, want: Tok, expected: &'static str) -> Result<usize, ParseError> {
        let (pos, tok) = self.next(expected)?;
        if tok == want {
            Ok(pos)
        } else {
            Err(ParseError::Expected { pos, expected, found: tok.to_string() })
        }
    }

    fn fresh_var(&mut self, ty: SemType) -> Var {
        let v = Var::new(self.next_id, ty);
        self.next_id += 1;
        v
    }

    fn parse_type(&mut self) -> Result<SemType, ParseError> {
        let (pos, tok) = self.next("a type")?;
        match tok {
            Tok::Ident(s) if s == "e" => {
                if self.peek() == Some(&Tok::Colon) {
                    self.next("`:`")?;
                    let (tpos, ttok) = self.next("subtype tag")?;
                    match ttok {
                        Tok::Ident(tag) => Ok(SemType::entity_tagged(tag)),
                        other => Err(ParseError::Expected {
                            pos: tpos,
                            expected: "subtype tag",
                            found: other.to_string(),
                        }),
                    }
                } else {
                    Ok(SemType::entity())
                }
            }
            Tok::Ident(s) if s == "t" => Ok(SemType::Truth),
            Tok::Ident(s) if s == "r" => Ok(SemType::Real),
            Tok::Lt => {
                let arg = self.parse_type()?;
                self.expect(Tok::Comma, "`,` in function type")?;
                let result = self.parse_type()?;
                self.expect(Tok::Gt, "`>` closing function type")?;
                Ok(SemType::func(arg, result))
            }
            other => Err(ParseError::Expected {
                pos,
                expected: "a type (e, t, r or <..,..>)",
                found: other.to_string(),
            }),
        }
    }

    /// `VAR : type .` after a binder keyword; pushes the variable in scope.
    fn parse_binder(&mut self) -> Result<Var, ParseError> {
        let (pos, tok) = self.next("variable name")?;
        let name = match tok {
            Tok::Ident(s) => s,
            other => {
                return Err(ParseError::Expected {
                    pos,
                    expected: "variable name",
                    found: other.to_string(),
                })
            }
        };
        self.expect(Tok::Colon, "`:` before variable type")?;
        let ty = self.parse_type()?;
        self.expect(Tok::Dot, "`.` after binder")?;
        let v = self.fresh_var(ty);
        self.scope.push((name, v.clone()));
        Ok(v)
    }

    fn parse_args(&mut self, min: usize, name: &'static str) -> Result<Vec<Term>, ParseError> {
        let open = self.expect(Tok::LParen, "`(`")?;
        let mut args = vec![self.parse_term()?];
        while self.peek() == Some(&Tok::Comma) {
            self.next("`,`")?;
            args.push(self.parse_term()?);
        }
        self.expect(Tok::RParen, "`)`")?;
        if args.len() < min {
            return Err(ParseError::WrongArity {
                pos: open,
                name,
                expected: if min == 2 { "at least 2" } else { "1" },
                found: args.len(),
            });
        }
        Ok(args)
    }

    fn parse_fixed_args<const K: usize>(
        &mut self,
        name: &'static str,
        expected: &'static str,
    ) -> Result<[Term; K], ParseError> {
        let open = self.expect(Tok::LParen, "`(`")?;
        let mut args = vec![self.parse_term()?];
        while self.peek() == Some(&Tok::Comma) {
            self.next("`,`")?;
            args.push(self.parse_term()?);
        }
        self.expect(Tok::RParen, "`)`")?;
        let found = args.len();
        args.try_into().map_err(|_| ParseError::WrongArity {
            pos: open,
            name,
            expected,
            found,
        })
    }

    fn parse_term(&mut self) -> Result<Term, ParseError> {
        let (pos, tok) = self.next("a term")?;
        let head = match tok {
            Tok::LParen => {
                let inner = self.parse_term()?;
                self.expect(Tok::RParen, "`)`")?;
                inner
            }
            Tok::Ident(word) => match word.as_str() {
                "lambda" => {
                    let v = self.parse_binder()?;
                    let body = self.parse_term()?;
                    self.scope.pop();
                    return Ok(Term::lambda(v, body));
                }
                "exists" => {
                    let v = self.parse_binder()?;
                    let body = self.parse_term()?;
                    self.scope.pop();
                    return Ok(Term::Exists(v, Box::new(body)));
                }
                "forall" => {
                    let v = self.parse_binder()?;
                    let body = self.parse_term()?;
                    self.scope.pop();
                    return Ok(Term::Forall(v, Box::new(body)));
                }
                "and" => return Ok(Term::And(self.parse_args(2, "and")?)),
                "or" => return Ok(Term::Or(self.parse_args(2, "or")?)),
                "not" => {
                    let [a] = self.parse_fixed_args("not", "1")?;
                    return Ok(Term::Not(Box::new(a)));
                }
                "implies" => {
                    let [a, b] = self.parse_fixed_args("implies", "2")?;
                    return Ok(Term::Implies(Box::new(a), Box::new(b)));
                }
                "count" => {
                    let [a] = self.parse_fixed_args("count", "1")?;
                    return Ok(Term::Count(Box::new(a)));
                }
                "argmax" => {
                    let [a, b] = self.parse_fixed_args("argmax", "2")?;
                    return Ok(Term::Argmax(Box::new(a), Box::new(b)));
                }
                "argmin" => {
                    let [a, b] = self.parse_fixed_args("argmin", "2")?;
                    return Ok(Term::Argmin(Box::new(a), Box::new(b)));
                }
                "iota" => {
                    let [a] = self.parse_fixed_args("iota", "1")?;
                    return Ok(Term::Iota(Box::new(a)));
                }
                _ => self.resolve_ident(pos, &word)?,
            },
            other => {
                return Err(ParseError::Expected {
                    pos,
                    expected: "a term",
                    found: other.to_string(),
                })
            }
        };
        // Optional application argument lists: f(a)(b) is allowed.
        let mut term = head;
        while self.peek() == Some(&Tok::LParen) {
            let args = self.parse_args(1, "application")?;
            term = Term::apply_all(term, args);
        }
        Ok(term)
    }

    fn resolve_ident(&mut self, pos: usize, word: &str) -> Result<Term, ParseError> {
        // Innermost binding of this name wins; otherwise a declared constant.
        if let Some((_, v)) = self.scope.iter().rev().find(|(n, _)| n == word) {
            return Ok(Term::Var(v.clone()));
        }
        match self.ont.and_then(|o| o.lookup(word)) {
            Some(ty) => Ok(Term::constant(word, ty.clone())),
            None => Err(ParseError::UnknownConstant { pos, name: word.to_string() }),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.idx < self.toks.len() {
            Err(ParseError::TrailingInput { pos: self.pos() })
        } else {
            Ok(())
        }
    }
}

/// Parses a logical form. Every identifier must be either bound by an
/// enclosing binder or declared in `ont`; the result is therefore closed.
pub fn parse_term(text: &str, ont: &Ontology) -> Result<Term, ParseError> {
    let mut p = Parser::new(text, Some(ont))?;
    let t = p.parse_term()?;
    p.finish()?;
    Ok(t)
}

/// Parses a semantic type such as `e`, `e:city`, `<e,<e,t>>`.
pub fn parse_type(text: &str) -> Result<SemType, ParseError> {
    let mut p = Parser::new(text, None)?;
    let ty = p.parse_type()?;
    p.finish()?;
    Ok(ty)
}
