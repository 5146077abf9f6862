//! Semantic types and the ontology of declared constants.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::parse::{parse_type, ParseError};
use super::term::Term;

/// Type of a lambda-calculus expression: entities, truth values, reals,
/// and functions between them. Entity may carry a flat subtype tag
/// (e.g. `e:city`); a tagged entity is accepted wherever bare `e` is
/// required.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SemType {
    Entity(Option<String>),
    Truth,
    Real,
    Func(Box<SemType>, Box<SemType>),
}

impl SemType {
    pub fn entity() -> Self {
        SemType::Entity(None)
    }

    pub fn entity_tagged(tag: impl Into<String>) -> Self {
        SemType::Entity(Some(tag.into()))
    }

    pub fn func(arg: SemType, result: SemType) -> Self {
        SemType::Func(Box::new(arg), Box::new(result))
    }

    /// `<e,t>` with untagged entity argument.
    pub fn pred1() -> Self {
        Self::func(Self::entity(), SemType::Truth)
    }

    /// `<e,<e,t>>` with untagged entity arguments.
    pub fn pred2() -> Self {
        Self::func(Self::entity(), Self::func(Self::entity(), SemType::Truth))
    }

    pub fn is_entity(&self) -> bool {
        matches!(self, SemType::Entity(_))
    }

    /// True when a value of type `actual` may be used where `self` is
    /// required. Structural except for entity tags: a tag matches bare
    /// `e` (and vice versa), and two tags must be equal.
    pub fn accepts(&self, actual: &SemType) -> bool {
        match (self, actual) {
            (SemType::Entity(a), SemType::Entity(b)) => {
                a.is_none() || b.is_none() || a == b
            }
            (SemType::Truth, SemType::Truth) => true,
            (SemType::Real, SemType::Real) => true,
            (SemType::Func(a1, r1), SemType::Func(a2, r2)) => {
                a1.accepts(a2) && r1.accepts(r2)
            }
            _ => false,
        }
    }
}

impl fmt::Display for SemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemType::Entity(None) => write!(f, "e"),
            SemType::Entity(Some(tag)) => write!(f, "e:{tag}"),
            SemType::Truth => write!(f, "t"),
            SemType::Real => write!(f, "r"),
            SemType::Func(a, r) => write!(f, "<{a},{r}>"),
        }
    }
}

impl std::str::FromStr for SemType {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_type(s)
    }
}

/// Names that may not be declared as constants because the term syntax
/// claims them.
pub const RESERVED_WORDS: &[&str] = &[
    "lambda", "and", "or", "not", "implies", "exists", "forall", "count",
    "argmax", "argmin", "iota", "e", "t", "r",
];

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum OntologyError {
    #[error("line {line}: constant `{name}` declared more than once")]
    Duplicate { line: usize, name: String },
    #[error("line {line}: `{name}` is a reserved word")]
    Reserved { line: usize, name: String },
    #[error("line {line}: expected `name : type`")]
    MalformedLine { line: usize },
    #[error("line {line}: {source}")]
    BadType { line: usize, source: ParseError },
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("constant `{name}` used at type {used} but declared as {declared}")]
    DeclarationMismatch {
        name: String,
        used: String,
        declared: String,
    },
}

/// Declarations of every constant (entities, predicates, functions,
/// numeric literals) available to logical forms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ontology {
    consts: BTreeMap<String, SemType>,
}

impl Ontology {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(
        &mut self,
        name: impl Into<String>,
        ty: SemType,
    ) -> Result<(), OntologyError> {
        let name = name.into();
        if RESERVED_WORDS.contains(&name.as_str()) {
            return Err(OntologyError::Reserved { line: 0, name });
        }
        if self.consts.contains_key(&name) {
            return Err(OntologyError::Duplicate { line: 0, name });
        }
        self.consts.insert(name, ty);
        Ok(())
    }

    pub fn lookup(&self, name: &str) -> Option<&SemType> {
        self.consts.get(name)
    }

    pub fn len(&self) -> usize {
        self.consts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.consts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &SemType)> {
        self.consts.iter()
    }

    /// Parses the `name : type` line format. `#` starts a comment; blank
    /// lines are skipped.
    pub fn parse(text: &str) -> Result<Self, OntologyError> {
        let mut ont = Ontology::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (name, ty_text) = line
                .split_once(':')
                .ok_or(OntologyError::MalformedLine { line: line_no })?;
            let name = name.trim();
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(OntologyError::MalformedLine { line: line_no });
            }
            let ty = parse_type(ty_text.trim())
                .map_err(|source| OntologyError::BadType { line: line_no, source })?;
            ont.declare(name, ty).map_err(|e| match e {
                OntologyError::Duplicate { name, .. } => {
                    OntologyError::Duplicate { line: line_no, name }
                }
                OntologyError::Reserved { name, .. } => {
                    OntologyError::Reserved { line: line_no, name }
                }
                other => other,
            })?;
        }
        Ok(ont)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, ty) in &self.consts {
            out.push_str(name);
            out.push_str(" : ");
            out.push_str(&ty.to_string());
            out.push('\n');
        }
        out
    }

    /// Checks that every constant occurring in `t` is declared here with
    /// exactly the type it carries.
    pub fn validate_term(&self, t: &Term) -> Result<(), OntologyError> {
        for (name, ty) in t.constants() {
            match self.lookup(name) {
                None => return Err(OntologyError::UnknownConstant(name.to_string())),
                Some(declared) if declared != ty => {
                    return Err(OntologyError::DeclarationMismatch {
                        name: name.to_string(),
                        used: ty.to_string(),
                        declared: declared.to_string(),
                    })
                }
                Some(_) => {}
            }
        }
        Ok(())
    }
}
