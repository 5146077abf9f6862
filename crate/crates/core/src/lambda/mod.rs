//! Typed lambda-calculus logical forms: representation, parsing,
//! printing, type checking, normalization, and equality.

mod normal;
mod parse;
mod print;
mod term;
mod typecheck;
mod types;

pub use normal::{alpha_eq, canonical_form, canonicalize, equivalent, normalize};
pub use parse::{parse_term, parse_type, ParseError};
pub use term::{Term, Var};
pub use typecheck::{type_of, TypeError};
pub use types::{Ontology, OntologyError, SemType, RESERVED_WORDS};
