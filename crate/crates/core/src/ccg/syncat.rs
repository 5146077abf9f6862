//! Syntactic categories: the atoms S, NP, N and the slash types A/B, A\B.

use std::fmt;

use thiserror::Error;

/// Primitive categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    S,
    Np,
    N,
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::S => write!(f, "S"),
            Atom::Np => write!(f, "NP"),
            Atom::N => write!(f, "N"),
        }
    }
}

/// A syntactic category. `Forward(a, b)` prints as `A/B` (takes a B on
/// the right), `Backward(a, b)` as `A\B` (takes a B on the left).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SynCat {
    Atom(Atom),
    Forward(Box<SynCat>, Box<SynCat>),
    Backward(Box<SynCat>, Box<SynCat>),
}

impl SynCat {
    pub const S: SynCat = SynCat::Atom(Atom::S);
    pub const NP: SynCat = SynCat::Atom(Atom::Np);
    pub const N: SynCat = SynCat::Atom(Atom::N);

    pub fn forward(result: SynCat, arg: SynCat) -> Self {
        SynCat::Forward(Box::new(result), Box::new(arg))
    }

    pub fn backward(result: SynCat, arg: SynCat) -> Self {
        SynCat::Backward(Box::new(result), Box::new(arg))
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, SynCat::Atom(_))
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_atom() {
            write!(f, "{self}")
        } else {
            write!(f, "({self})")
        }
    }
}

impl fmt::Display for SynCat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynCat::Atom(a) => write!(f, "{a}"),
            SynCat::Forward(res, arg) => {
                res.fmt_operand(f)?;
                write!(f, "/")?;
                arg.fmt_operand(f)
            }
            SynCat::Backward(res, arg) => {
                res.fmt_operand(f)?;
                write!(f, "\\")?;
                arg.fmt_operand(f)
            }
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SynCatParseError {
    #[error("at {pos}: unexpected character `{ch}` in category")]
    UnexpectedChar { pos: usize, ch: char },
    #[error("at {pos}: expected a category")]
    ExpectedCategory { pos: usize },
    #[error("at {pos}: unknown atomic category `{name}`")]
    UnknownAtom { pos: usize, name: String },
    #[error("at {pos}: unbalanced parenthesis")]
    Unbalanced { pos: usize },
    #[error("at {pos}: trailing input after category")]
    Trailing { pos: usize },
}

struct CatParser<'a> {
    chars: Vec<(usize, char)>,
    idx: usize,
    text: &'a str,
}

impl<'a> CatParser<'a> {
    fn new(text: &'a str) -> Self {
        CatParser { chars: text.char_indices().collect(), idx: 0, text }
    }

    fn skip_ws(&mut self) {
        while self
            .chars
            .get(self.idx)
            .map(|(_, c)| c.is_whitespace())
            .unwrap_or(false)
        {
            self.idx += 1;
        }
    }

    fn pos(&self) -> usize {
        self.chars.get(self.idx).map(|(p, _)| *p).unwrap_or(self.text.len())
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.idx).map(|(_, c)| *c)
    }

    /// Slashes are left-associative: `S\NP/NP` is `(S\NP)/NP`.
    fn parse(&mut self) -> Result<SynCat, SynCatParseError> {
        let mut left = self.parse_operand()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('/') => {
                    self.idx += 1;
                    let right = self.parse_operand()?;
                    left = SynCat::forward(left, right);
                }
                Some('\\') => {
                    self.idx += 1;
                    let right = self.parse_operand()?;
                    left = SynCat::backward(left, right);
                }
                _ => return Ok(left),
            }
        }
    }

    fn parse_operand(&mut self) -> Result<SynCat, SynCatParseError> {
        self.skip_ws();
        let pos = self.pos();
        match self.peek() {
            Some('(') => {
                self.idx += 1;
                let inner = self.parse()?;
                self.skip_ws();
                if self.peek() == Some(')') {
                    self.idx += 1;
                    Ok(inner)
                } else {
                    Err(SynCatParseError::Unbalanced { pos: self.pos() })
                }
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let mut name = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphabetic() {
                        name.push(c);
                        self.idx += 1;
                    } else {
                        break;
                    }
                }
                match name.as_str() {
                    "S" => Ok(SynCat::S),
                    "NP" => Ok(SynCat::NP),
                    "N" => Ok(SynCat::N),
                    _ => Err(SynCatParseError::UnknownAtom { pos, name }),
                }
            }
            Some(ch) => Err(SynCatParseError::UnexpectedChar { pos, ch }),
            None => Err(SynCatParseError::ExpectedCategory { pos }),
        }
    }
}

impl std::str::FromStr for SynCat {
    type Err = SynCatParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = CatParser::new(s);
        let cat = p.parse()?;
        p.skip_ws();
        if p.idx < p.chars.len() {
            return Err(SynCatParseError::Trailing { pos: p.pos() });
        }
        Ok(cat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prints_with_paper_parenthesization() {
        let cat = SynCat::forward(SynCat::backward(SynCat::S, SynCat::NP), SynCat::NP);
        assert_eq!(cat.to_string(), "(S\\NP)/NP");
        let raised = SynCat::forward(
            SynCat::S,
            SynCat::backward(SynCat::S, SynCat::NP),
        );
        assert_eq!(raised.to_string(), "S/(S\\NP)");
    }

    #[test]
    fn parse_round_trips() {
        for text in ["S", "NP", "N", "(S\\NP)/NP", "S/(S\\NP)", "(S/(S\\NP))/N", "N/N"] {
            let cat: SynCat = text.parse().unwrap();
            assert_eq!(cat.to_string(), text);
        }
    }

    #[test]
    fn slashes_are_left_associative() {
        let a: SynCat = "S\\NP/NP".parse().unwrap();
        let b: SynCat = "(S\\NP)/NP".parse().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_unknown_atoms() {
        assert!("X/Y".parse::<SynCat>().is_err());
        assert!("(S".parse::<SynCat>().is_err());
    }
}
